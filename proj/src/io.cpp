#include "dnls/io.hpp"

#include <cstdio>
#include <sstream>

namespace dnls {

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_field(std::ostream& os, const LatticeField& u, const nlohmann::json& meta)
{
    nlohmann::json header = meta;
    header["n_min"] = u.lattice.n_min;
    header["n_max"] = u.lattice.n_max;
    header["boundary"] = "dirichlet";
    os << "# " << header.dump() << '\n';
    for (int i = 0; i < u.size(); ++i)
        os << u.lattice.site(i) << ' ' << format_double(u.values[i].real()) << ' '
           << format_double(u.values[i].imag()) << '\n';
}

void write_field(const std::filesystem::path& path, const LatticeField& u, const nlohmann::json& meta)
{
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    write_field(os, u, meta);
}

void write_field(const std::filesystem::path& path, const RealField& u, const nlohmann::json& meta)
{
    write_field(path, to_complex(u), meta);
}

LatticeField read_field(std::istream& is, nlohmann::json* meta)
{
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw Error("field file lacks a JSON header");
    nlohmann::json header = nlohmann::json::parse(line.substr(2));
    Lattice lat(header.at("n_min").get<int>(), header.at("n_max").get<int>());
    LatticeField u(lat);
    for (int i = 0; i < lat.size(); ++i) {
        if (!std::getline(is, line)) throw Error("field file is truncated");
        std::istringstream ls(line);
        int site;
        double re, im;
        if (!(ls >> site >> re >> im) || site != lat.site(i)) throw Error("malformed field row: " + line);
        u.values[i] = {re, im};
    }
    if (meta) *meta = header;
    return u;
}

LatticeField read_field(const std::filesystem::path& path, nlohmann::json* meta)
{
    std::ifstream is(path);
    if (!is) throw Error("cannot open " + path.string());
    return read_field(is, meta);
}

RealField read_real_field(const std::filesystem::path& path, nlohmann::json* meta)
{
    LatticeField u = read_field(path, meta);
    if (u.values.imag().cwiseAbs().maxCoeff() != 0.0) throw Error(path.string() + " is not a real field");
    return RealField(u.lattice, u.values.real());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j)
{
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    os << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) throw Error("cannot open " + path.string());
    return nlohmann::json::parse(is);
}

std::uint64_t fnv1a64(std::string_view data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t h)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string hash_field(const RealField& f)
{
    std::ostringstream os;
    os << f.lattice.n_min << ' ' << f.lattice.n_max;
    for (int i = 0; i < f.size(); ++i) os << ' ' << format_double(f.values[i]);
    return hex64(fnv1a64(os.str()));
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
    : out_(path), width_(columns.size())
{
    if (!out_) throw Error("cannot open " + path.string() + " for writing");
    for (size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values)
{
    if (values.size() != width_) throw Error("CSV row width mismatch");
    for (size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
    out_ << '\n';
}

}  // namespace dnls
