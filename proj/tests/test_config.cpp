#include <doctest.h>

#include "ringres/config.hpp"

using namespace ringres;

TEST_SUITE_BEGIN("config");

TEST_CASE("ini documents parse sections, comments and blanks") {
    const std::string text =
        "# heading comment\n"
        "[alpha]\n"
        "key = 1.5   ; trailing comment\n"
        "name = hello world\n"
        "\n"
        "[beta.gamma]\n"
        "flag = true\n";
    const IniDoc doc = IniDoc::parse(text);
    CHECK(doc.get_double("alpha", "key", 0.0) == 1.5);
    CHECK(doc.get("alpha", "name", "") == "hello world");
    CHECK(doc.get_bool("beta.gamma", "flag", false));
    CHECK(doc.get_int("beta.gamma", "missing", 7) == 7);
}

TEST_CASE("malformed config lines are rejected") {
    CHECK_THROWS_AS(IniDoc::parse("[unterminated\n"), std::invalid_argument);
    CHECK_THROWS_AS(IniDoc::parse("[s]\nno_equals_here\n"), std::invalid_argument);
    const IniDoc doc = IniDoc::parse("[s]\nx = abc\n");
    CHECK_THROWS_AS(doc.get_double("s", "x", 0.0), std::invalid_argument);
    CHECK_THROWS_AS(doc.get_bool("s", "x", false), std::invalid_argument);
}

TEST_CASE("number lists accept commas and ranges") {
    const auto a = parse_number_list("1, 2.5, -3");
    REQUIRE(a.size() == 3);
    CHECK(a[1] == 2.5);
    const auto b = parse_number_list("-20:10:20");
    REQUIRE(b.size() == 5);
    CHECK(b.front() == -20.0);
    CHECK(b.back() == 20.0);
    CHECK_THROWS_AS(parse_number_list("1:2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_number_list("1:0:5"), std::invalid_argument);
}

TEST_CASE("defaults survive an ini round trip") {
    const SweepConfig def = SweepConfig::defaults();
    const std::string text = def.canonical_text();
    const SweepConfig back = SweepConfig::from_ini(IniDoc::parse(text));
    CHECK(back.canonical_text() == text);
    CHECK(back.hash() == def.hash());
}

TEST_CASE("config hash tracks content") {
    const SweepConfig def = SweepConfig::defaults();
    SweepConfig mod = def;
    mod.narma10.beta = 0.7;
    CHECK(def.hash() != mod.hash());
}

TEST_CASE("overrides land in the right fields") {
    const std::string text =
        "[physics]\n"
        "thermal_time_s = 30e-9\n"
        "[sweep]\n"
        "power_dbm = -10:5:0\n"
        "tasks = narma10, equalize\n"
        "seeds = 4,5\n"
        "[task.equalize]\n"
        "snr_db = 20\n";
    const SweepConfig c = SweepConfig::from_ini(IniDoc::parse(text));
    CHECK(c.physics.tau_th == 30e-9);
    REQUIRE(c.power_dbm.size() == 3);
    CHECK(c.tasks == std::vector<std::string>{"narma10", "equalize"});
    CHECK(c.seeds == std::vector<std::uint64_t>{4, 5});
    CHECK(c.equalize.snr_db == 20.0);
    CHECK(c.narma10.train_len == 2000);  // untouched defaults stay
}

TEST_CASE("unit conversions") {
    CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3).epsilon(1e-15));
    CHECK(dbm_to_watts(20.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(dbm_to_watts(-20.0) == doctest::Approx(1e-5).epsilon(1e-15));
    CHECK(ghz_to_rad_s(1.0) == doctest::Approx(kTwoPi * 1e9).epsilon(1e-15));
}

TEST_CASE("grid-point physics keeps the node duration on the step grid") {
    const SweepConfig cfg = SweepConfig::defaults();
    // slow carriers: default 1 ps step
    PhysicalParams a = resolved_physics(cfg, 10e-9, 0.0);
    CHECK(a.dt == doctest::Approx(1e-12).epsilon(1e-12));
    CHECK(a.tau_fc == 10e-9);
    // 10 ps carriers: tau_fc/10 == 1 ps, still fine
    PhysicalParams b = resolved_physics(cfg, 10e-12, 0.0);
    CHECK(b.dt == doctest::Approx(1e-12).epsilon(1e-12));
    // 5 ps carriers force a finer, node-aligned step
    PhysicalParams c = resolved_physics(cfg, 5e-12, 0.0);
    CHECK(c.dt == doctest::Approx(0.5e-12).epsilon(1e-12));
    const double theta = 1.0 / (cfg.symbol_rate * cfg.node_count);
    CHECK(std::abs(theta / c.dt - std::round(theta / c.dt)) < 1e-9);
}

TEST_CASE("task lookup covers the pseudo-tasks") {
    const SweepConfig cfg = SweepConfig::defaults();
    CHECK(&cfg.task("capacity") == &cfg.narma10);
    CHECK(&cfg.task("detuning") == &cfg.narma10);
    CHECK(&cfg.task("equalize") == &cfg.equalize);
    CHECK_THROWS_AS(cfg.task("nope"), std::invalid_argument);
}

TEST_SUITE_END();
