#include "doctest.h"

#include <fstream>
#include <sstream>

#include "dnls/io.hpp"
#include "dnls/scenario.hpp"
#include "fixtures.hpp"

using namespace dnls;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ScenarioConfig small_standing_wave(const fs::path& out)
{
    ScenarioConfig c = ScenarioConfig::preset(ScenarioKind::StandingWave);
    c.window = 128;
    c.evolution.T = 2.0;
    c.out_dir = out;
    return c;
}

}  // namespace

TEST_CASE("scenario kinds roundtrip through their names")
{
    for (auto k : {ScenarioKind::StandingWave, ScenarioKind::InternalModeKick, ScenarioKind::RadiationKick,
                   ScenarioKind::MixedKick, ScenarioKind::ContrastSingleEigenvalue, ScenarioKind::FreeDecay})
        CHECK(scenario_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(scenario_kind_from_string("soliton"), DomainError);
}

TEST_CASE("config JSON roundtrip and hash")
{
    ScenarioConfig c = ScenarioConfig::preset(ScenarioKind::MixedKick);
    c.eta = 1e-4;
    c.seed = 77;
    const ScenarioConfig d = ScenarioConfig::from_json(c.to_json());
    CHECK(d.to_json() == c.to_json());
    CHECK(d.hash() == c.hash());
    ScenarioConfig e = d;
    e.out_dir = "elsewhere";
    CHECK(e.hash() == c.hash());
    e.seed = 78;
    CHECK(e.hash() != c.hash());
    const auto contrast = ScenarioConfig::preset(ScenarioKind::ContrastSingleEigenvalue);
    CHECK(contrast.profile == "delta");
    CHECK(contrast.eps < 0.0);
}

TEST_CASE("config validation")
{
    ScenarioConfig c;
    CHECK_NOTHROW(c.validate());
    c.window = 8;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = ScenarioConfig();
    c.evolution.dt = 0.1;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = ScenarioConfig();
    c.profile = "nonsense";
    CHECK_THROWS(c.validate());
    c = ScenarioConfig();
    c.eta = -1.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("field text format roundtrip")
{
    const Lattice lat = Lattice::symmetric(20);
    const LatticeField u = fixture::random_field(lat, 12);
    std::stringstream ss;
    write_field(ss, u, {{"note", "x"}});
    nlohmann::json meta;
    const LatticeField v = read_field(ss, &meta);
    CHECK(v.lattice == lat);
    CHECK(v.values == u.values);
    CHECK(meta["note"] == "x");
}

TEST_CASE("standing-wave scenario passes and is deterministic")
{
    const fs::path a = fs::temp_directory_path() / "dnls_sw_a", b = fs::temp_directory_path() / "dnls_sw_b";
    const Report ra = run_scenario(small_standing_wave(a));
    const Report rb = run_scenario(small_standing_wave(b));
    CHECK(ra.failed_stage.empty());
    for (const auto& c : ra.checks) {
        INFO(c.name);
        CHECK(c.pass);
        CHECK_FALSE(c.anchor.empty());
    }
    CHECK(ra.all_pass());
    CHECK(ra.config_hash == rb.config_hash);
    for (const char* f : {"trajectory.csv", "evolution.csv"}) {
        INFO(f);
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("summary line format")
{
    CheckRecord c;
    c.id = 3;
    c.name = "x";
    c.measured = 1e-3;
    c.tolerance = 1e-2;
    c.relation = "<=";
    c.pass = true;
    CHECK(summary_line(c).rfind("PASS criterion  3 x", 0) == 0);
    c.id = 0;
    c.pass = false;
    CHECK(summary_line(c).rfind("FAIL check x", 0) == 0);
}
