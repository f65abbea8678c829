#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "prodiab/harness/compare.hpp"
#include "prodiab/harness/config.hpp"
#include "prodiab/harness/scenario.hpp"

using namespace prodiab;
using namespace prodiab::harness;
namespace fs = std::filesystem;

namespace {

int error_line(const std::string& text) {
    try {
        ScenarioConfig::from_config(Config::parse(text));
    } catch (const ConfigError& e) {
        return e.line;
    }
    return -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("prodiab_test_" + std::to_string(::getpid()) + "_" + name);
    fs::remove_all(p);
    return p;
}

const char* kSmallJC = R"(
scenario = jc-sigmaz
jc.drives = 0.01, 0.02
grid.end = 40
grid.points = 81
)";

}  // namespace

TEST_CASE("config parsing") {
    const auto c = Config::parse("# comment\n\na.b = 1.5  # trailing\nlist = x, y ,z\n");
    CHECK(c.get_double("a.b", 0.0) == 1.5);
    CHECK(c.line_of("a.b") == 3);
    CHECK(c.get_strings("list", {}) == std::vector<std::string>{"x", "y", "z"});
    CHECK(c.get_double("missing", 7.0) == 7.0);

    try {
        Config::parse("a = 1\nb = 2\na = 3\n");
        FAIL("duplicate accepted");
    } catch (const ConfigError& e) {
        CHECK(e.line == 3);
    }
    try {
        Config::parse("a = 1\njunk line\n");
        FAIL("malformed accepted");
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
    }
    try {
        Config::parse("x = abc\n").get_double("x", 0.0);
        FAIL("bad number accepted");
    } catch (const ConfigError& e) {
        CHECK(e.line == 1);
    }

    auto o = Config::parse("a = 1\n");
    o.apply_override("a=2");
    CHECK(o.get_int("a", 0) == 2);
    CHECK_THROWS_AS(o.apply_override("novalue"), ConfigError);
}

TEST_CASE("scenario config validation") {
    CHECK(error_line("scenario = jc-sigmaz\nrepresentations = \n") == 2);
    CHECK(error_line("scenario = jc-sigmaz\nrepresentations = exact, bogus\n") == 2);
    CHECK(error_line("scenario = nope\n") == 1);
    CHECK(error_line("scenario = stirap\n\nstirap.typo = 1\n") == 3);
    CHECK(error_line("scenario = jc-g2\ngrid.start = 5\ngrid.end = 5\n") == 3);
    CHECK(error_line("scenario = jc-g2\ngrid.points = 1\n") == 2);
    CHECK(error_line("scenario = stirap\nstirap.env_H.kind = triangle\n") == 2);
    CHECK(error_line("scenario = stirap\nstirap.env_H.halfwidth = -1\n") > 0);
    CHECK(error_line("scenario = stirap\nstirap.initial_level = 4\n") == 2);
    CHECK(error_line("scenario = jc-sigmaz\njc.gamma_over_kappa = -1\n") > 0);
    CHECK(error_line("scenario = jc-sigmaz\nintegrator.rel_tol = 1e-15\n") > 0);
    CHECK_THROWS_AS(ScenarioConfig::from_config(Config::parse("grid.end = 4\n")), ConfigError);

    const auto s = ScenarioConfig::from_config(Config::parse("scenario = stirap\nrepresentations = pdb, exact\n"));
    CHECK(s.representations == std::vector<std::string>{"exact", "pdb"});
    CHECK(s.lambda.env_V.center == 55.0);
    CHECK(s.grid().size() == 401);
    CHECK(s.grid().back() == 100.0);
}

TEST_CASE("shipped configs validate") {
    for (const char* name : {"fig2a", "fig2b", "fig3", "figS1_top", "figS1_bottom"}) {
        const fs::path p = fs::path(PRODIAB_SOURCE_DIR) / "configs" / (std::string(name) + ".cfg");
        INFO(p.string());
        CHECK_NOTHROW(ScenarioConfig::from_config(Config::load(p.string())));
    }
}

TEST_CASE("compare") {
    CurveSet cs;
    cs.t = {0.0, 1.0, 2.0};
    cs.add("exact_x", {1.0, 2.0, 3.0});
    cs.add("adb_x", {1.0, 2.0, 3.0});
    cs.add("pdb_x", {1.5, 2.5, 3.5});
    const auto r = compare(cs);
    REQUIRE(r.pairs.size() == 2);
    CHECK(r.find("adb_x", "exact_x").max_abs == 0.0);
    CHECK(r.find("adb_x", "exact_x").l2 == 0.0);
    CHECK(r.find("pdb_x", "exact_x").max_abs == doctest::Approx(0.5));
    CHECK(r.find("pdb_x", "exact_x").l2 == doctest::Approx(0.5 * std::sqrt(2.0)));

    CurveSet noref;
    noref.t = {0.0, 1.0};
    noref.add("a_y", {0.0, 0.0});
    noref.add("b_y", {0.0, 1.0});
    noref.add("c_y", {0.0, 2.0});
    const auto q = compare(noref);
    CHECK(q.pairs.size() == 3);
    CHECK(q.find("b_y", "c_y").t_at_max == 1.0);

    CHECK_THROWS(cs.add("bad_x", {1.0}));
}

TEST_CASE("runs are deterministic and self-describing") {
    auto c = Config::parse(kSmallJC);
    const fs::path d1 = scratch("a"), d2 = scratch("b");
    c.set("output.dir", d1.string());
    const auto r1 = run_scenario(ScenarioConfig::from_config(c));
    c.apply_override("output.dir=" + d2.string());
    const auto r2 = run_scenario(ScenarioConfig::from_config(c));
    CHECK(r1.exit_code == 0);
    REQUIRE(r1.files.size() == r2.files.size());
    int compared = 0;
    for (const auto& f : r1.files) {
        const fs::path name = fs::path(f).filename();
        if (name == "timing.txt") continue;
        std::string a = slurp(d1 / name), b = slurp(d2 / name);
        CHECK(!a.empty());
        CHECK(a == b);
        CHECK(a.rfind(std::string("# prodiab ") + PRODIAB_VERSION, 0) == 0);
        CHECK(a.find("# jc.g_over_kappa = 0.15") != std::string::npos);
        ++compared;
    }
    CHECK(compared == 3);  // two drive files and the report
    const std::string csv = slurp(d1 / "sigmaz_f0.01.csv");
    CHECK(csv.find("t_kappa,exact_sigmaz,adb_sigmaz,pdb_sigmaz,pdb-lme_sigmaz\n") != std::string::npos);
    CHECK(r1.report("sigmaz_f0.02").pairs.size() == 3);
    CHECK(r1.report("sigmaz_f0.02").worst.within());
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("thread count does not change the output") {
    auto c = Config::parse(kSmallJC);
    const auto cfg = ScenarioConfig::from_config(c);
    ::setenv("PRODIAB_THREADS", "1", 1);
    const auto a = run_scenario(cfg, false);
    ::setenv("PRODIAB_THREADS", "4", 1);
    const auto b = run_scenario(cfg, false);
    ::unsetenv("PRODIAB_THREADS");
    REQUIRE(a.families.size() == b.families.size());
    for (std::size_t i = 0; i < a.families.size(); ++i) CHECK(a.families[i].second.values == b.families[i].second.values);
}

TEST_CASE("truncation leaks are flagged and retried once") {
    auto c = Config::parse(R"(
scenario = jc-sigmaz
representations = exact
jc.g_over_kappa = 0.45
jc.drives = 0.2
exact.n_max = 1
grid.end = 10
grid.points = 11
)");
    const auto r = run_scenario(ScenarioConfig::from_config(c), false);
    const auto& rep = r.report("sigmaz_f0.2");
    CHECK(rep.leak_flagged);
    int attempts = 0;
    for (const auto& n : rep.notes)
        if (n.rfind("exact n_max", 0) == 0) ++attempts;
    CHECK(attempts == 2);
    CHECK(r.exit_code == (rep.leak_max > 1e-6 ? 4 : 0));
    CHECK(rep.eps.warning);
}

TEST_CASE("stirap scenario writes drive diagnostics") {
    auto c = Config::parse(R"(
scenario = stirap
representations = adb, pdb
grid.end = 100
grid.points = 201
)");
    const auto r = run_scenario(ScenarioConfig::from_config(c), false);
    const auto& fam = r.family("populations");
    CHECK(fam.has("pdb_P3"));
    CHECK(fam.has("drive-FH"));
    CHECK(fam.has("overlap-pdb"));
    CHECK(std::isnan(fam.get("drive-adiabaticity")[0]));
    CHECK(r.report("populations").pairs.size() == 3);
}
