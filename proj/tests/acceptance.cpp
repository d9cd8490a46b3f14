// Runs the twelve acceptance criteria and prints one PASS/FAIL line each.
// Exit status is nonzero when any criterion fails.
#include <cstdlib>
#include <iostream>

#include "dnls/io.hpp"
#include "dnls/scenario.hpp"

int main(int argc, char** argv)
{
    dnls::CheckOptions o;
    o.log = [](const std::string& s) { std::cerr << "[acceptance] " << s << "\n"; };
    if (argc > 1) o.time_scale = std::atof(argv[1]);
    const dnls::Report r = dnls::acceptance_report(o);
    int failed = 0;
    for (const auto& c : r.checks) {
        std::cout << dnls::summary_line(c) << std::endl;
        failed += !c.pass;
    }
    if (argc > 2) dnls::write_json(argv[2], r.to_json());
    std::cout << (failed ? "acceptance: FAIL" : "acceptance: PASS") << " (" << r.checks.size() - failed << "/"
              << r.checks.size() << ")" << std::endl;
    return failed ? 1 : 0;
}
