#include <doctest.h>

#include "pdw/config.hpp"
#include "pdw/errors.hpp"

#include <cmath>
#include <string>

using namespace pdw;

TEST_SUITE("config") {

TEST_CASE("defaults") {
    RunConfig cfg;
    CHECK(cfg.family == "sinusoid");
    CHECK(cfg.threads == 1);
    CHECK(cfg.seed == 12345);
    CHECK(std::isnan(cfg.u1_power));
    CHECK(cfg.resolved_u1_power() == doctest::Approx(-1.5));  // -n/2 at n = 3
    auto prof = cfg.make_profile();
    CHECK(prof.eval_b(0.25) == doctest::Approx(1.5));
    auto data = cfg.make_data();
    CHECK(data.dimension == 3);
    CHECK(data.u1.power == doctest::Approx(-1.5));
    CHECK(data.u2.amplitude == 0.0);
}

TEST_CASE("parse a full document") {
    std::string text =
        "# profile\n"
        "family = \"square_wave\"\n"
        "lo = 0.25\n"
        "hi = 1.75   # comment after value\n"
        "duty = 0.4\n"
        "period = 2.0\n"
        "\n"
        "threads = 8\n"
        "seed = 999\n"
        "json = true\n"
        "out_dir = \"artifacts\"\n"
        "dimension = 2\n"
        "u1_power = 0.5\n";
    RunConfig cfg = parse_config_text(text, "inline");
    CHECK(cfg.family == "square_wave");
    CHECK(cfg.lo == doctest::Approx(0.25));
    CHECK(cfg.hi == doctest::Approx(1.75));
    CHECK(cfg.duty == doctest::Approx(0.4));
    CHECK(cfg.period == doctest::Approx(2.0));
    CHECK(cfg.threads == 8);
    CHECK(cfg.seed == 999);
    CHECK(cfg.json);
    CHECK(cfg.out_dir == "artifacts");
    CHECK(cfg.resolved_u1_power() == doctest::Approx(0.5));
    auto prof = cfg.make_profile();
    CHECK(prof.period() == doctest::Approx(2.0));
    CHECK(prof.eval_b(0.1) == doctest::Approx(0.25));
}

TEST_CASE("fourier lists") {
    std::string text =
        "family = \"fourier\"\n"
        "b0 = 1.0\n"
        "fourier_cos = [0.2, 0.1]\n"
        "fourier_sin = [0.3]\n";
    RunConfig cfg = parse_config_text(text, "inline");
    auto prof = cfg.make_profile();
    CHECK(prof.mean_beta() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("unknown key is reported with its line") {
    std::string text = "family = \"constant\"\nnot_a_key = 3\n";
    try {
        parse_config_text(text, "bad.toml");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("bad.toml:2") != std::string::npos);
        CHECK(msg.find("not_a_key") != std::string::npos);
    }
}

TEST_CASE("type and syntax errors") {
    CHECK_THROWS_AS(parse_config_text("threads = \"four\"\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("rtol 1e-9\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("family = 3\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("fourier_cos = [1, oops]\n", "x"), ConfigError);
}

TEST_CASE("validation of whole configs") {
    CHECK_THROWS_AS(parse_config_text("threads = 0\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("family = \"nope\"\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("rtol = -1.0\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("scan_points = 1\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("dimension = 0\n", "x"), ConfigError);
    // Profile parameter problems surface as ConfigError too.
    CHECK_THROWS_AS(parse_config_text("family = \"sinusoid\"\namp = 5.0\n", "x")
                        .make_profile(),
                    ConfigError);
}

TEST_CASE("time grids") {
    RunConfig cfg;
    cfg.slope_t_hi = 1000.0;
    cfg.slope_samples = 10;
    auto ts = cfg.slope_times();
    REQUIRE(ts.size() == 10);
    CHECK(ts.front() == doctest::Approx(1.0));
    CHECK(ts.back() == doctest::Approx(1000.0));
    for (std::size_t i = 1; i < ts.size(); ++i) CHECK(ts[i] > ts[i - 1]);
    cfg.tail_t_max = 10.0;
    cfg.tail_samples = 6;
    auto tt = cfg.tail_times();
    REQUIRE(tt.size() == 6);
    CHECK(tt.front() == doctest::Approx(0.0));
    CHECK(tt.back() == doctest::Approx(10.0));
    CHECK(tt[1] == doctest::Approx(2.0));
}

TEST_CASE("integrator options round trip") {
    RunConfig cfg;
    cfg.rtol = 1e-9;
    cfg.atol = 1e-11;
    cfg.max_step = 0.02;
    auto opts = cfg.make_integrator();
    CHECK(opts.rtol == doctest::Approx(1e-9));
    CHECK(opts.atol == doctest::Approx(1e-11));
    CHECK(opts.effective_max_step(1.0) == doctest::Approx(0.02));
}

TEST_CASE("missing file") {
    CHECK_THROWS_AS(parse_config_file("/nonexistent/path/pdw.toml"), ConfigError);
}

}
