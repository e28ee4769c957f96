#include <doctest.h>

#include <string>

#include "opa/config.hpp"
#include "opa/errors.hpp"

using namespace opa;

namespace {

const std::string kMinimal =
    "scenario = meanfield\n"
    "omega0 = 2.0\n"
    "omega1 = 1.0\n"
    "omega2 = 1.0\n"
    "kappa = 0.1\n"
    "alpha0_re = 3\n"
    "alpha1_im = -0.5\n"
    "t_final = 2.0\n"
    "dt = 0.01\n";

int error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

std::string error_text(const std::string& text) {
    try {
        parse_config(text);
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("minimal meanfield config gets defaults") {
    const RunConfig c = parse_config(kMinimal);
    CHECK(c.scenario == Scenario::meanfield);
    CHECK(c.params.omega == std::array<double, 3>{2.0, 1.0, 1.0});
    CHECK(c.params.kappa == 0.1);
    CHECK(c.params.phi == 0.0);
    CHECK_FALSE(c.params.include_zero_point);
    CHECK(c.initial[0] == Complex(3.0));
    CHECK(c.initial[1] == Complex(0.0, -0.5));
    CHECK(c.t_final == 2.0);
    CHECK(c.dt == 0.01);
    CHECK_FALSE(c.dims.has_value());
    CHECK(c.output_path == "meanfield.csv");
    CHECK(c.n_slices == 1024);
}

TEST_CASE("comments and whitespace") {
    const RunConfig c = parse_config("# header\n\n" + kMinimal + "   phi = 0.25   # inline\n");
    CHECK(c.params.phi == 0.25);
}

TEST_CASE("frequency matching is enforced") {
    const std::string text =
        "scenario = meanfield\nomega0 = 2.0\nomega1 = 1.5\nomega2 = 1.0\nkappa = 0.1\nt_final = 1\ndt = 0.1\n";
    CHECK_THROWS_AS(parse_config(text), ConfigError);
    CHECK(error_line(text) == 2);
}

TEST_CASE("malformed input is located") {
    CHECK(error_line(kMinimal + "colour = red\n") == 10);
    CHECK(error_line(kMinimal + "phi\n") == 10);
    CHECK(error_line(kMinimal + "phi = \n") == 10);
    CHECK(error_line(kMinimal + "phi = abc\n") == 10);
    CHECK(error_line(kMinimal + "phi = 1.0x\n") == 10);
    CHECK(error_line(kMinimal + "include_zero_point = maybe\n") == 10);
    CHECK(error_line("Scenario = meanfield\n") == 1);
    CHECK(error_line("scenario = teleport\n") == 1);
    CHECK(error_line(kMinimal + "kappa = 0.3\n") == 10);
    CHECK(error_text(kMinimal + "kappa = 0.3\n").find("line 5") != std::string::npos);
    CHECK(error_text(kMinimal + "kappa = 0.3\n").find("line 10") != std::string::npos);
}

TEST_CASE("required keys and value checks") {
    CHECK(error_text("scenario = meanfield\nomega0 = 2\nomega1 = 1\nomega2 = 1\nkappa = 0\nt_final = 1\n")
              .find("'dt'") != std::string::npos);
    CHECK(error_line(kMinimal + "n_slices = 0\n") == 10);
    std::string neg = kMinimal;
    neg.replace(neg.find("kappa = 0.1"), 11, "kappa = -1.");
    CHECK(error_line(neg) == 5);
    std::string short_run = kMinimal;
    short_run.replace(short_run.find("t_final = 2.0"), 13, "t_final = 0.001");
    CHECK(error_line(short_run) == 8);
}

TEST_CASE("truncation dimensions") {
    const std::string quantum = "scenario = quantum\nomega0 = 2\nomega1 = 1\nomega2 = 1\nkappa = 0.1\n"
                                "t_final = 1\ndt = 0.1\nd0 = 4\nd1 = 5\nd2 = 6\n";
    const RunConfig c = parse_config(quantum);
    REQUIRE(c.dims.has_value());
    CHECK(c.dims->total() == 120);

    std::string missing = quantum.substr(0, quantum.find("d2"));
    CHECK_THROWS_AS(parse_config(missing), ConfigError);

    std::string tiny = quantum;
    tiny.replace(tiny.find("d1 = 5"), 6, "d1 = 1");
    CHECK(error_line(tiny) > 0);

    std::string huge = quantum;
    huge.replace(huge.find("d0 = 4"), 6, "d0 = 9999");
    CHECK_THROWS_AS(parse_config(huge), ResourceError);
}

TEST_CASE("sweep axis") {
    const RunConfig c = parse_config(kMinimal + "sweep_key = kappa\nsweep_start = 0\nsweep_stop = 0.2\nsweep_count = 5\n");
    CHECK(c.scenario == Scenario::meanfield);
    const RunConfig s = parse_config("scenario = sweep\n" + kMinimal.substr(kMinimal.find('\n') + 1) +
                                     "sweep_key = kappa\nsweep_start = 0\nsweep_stop = 0.2\nsweep_count = 5\n");
    REQUIRE(s.sweep.has_value());
    CHECK(s.sweep->count == 5);
    CHECK(s.sweep->value(0) == 0.0);
    CHECK(s.sweep->value(4) == 0.2);
    CHECK(std::abs(s.sweep->value(2) - 0.1) < 1e-15);
    CHECK(is_sweepable_key("alpha1_im"));
    CHECK_FALSE(is_sweepable_key("omega0"));
    CHECK(with_value(s, "alpha1_re", 0.7).initial[1] == Complex(0.7, -0.5));
    CHECK(with_value(s, "phi", 0.3).params.phi == 0.3);
    CHECK_THROWS_AS(with_value(s, "omega1", 0.3), InvalidArgument);

    const std::string bad = "scenario = sweep\n" + kMinimal.substr(kMinimal.find('\n') + 1) +
                            "sweep_key = omega1\nsweep_start = 0\nsweep_stop = 0.2\nsweep_count = 5\n";
    CHECK(error_line(bad) == 10);
}
