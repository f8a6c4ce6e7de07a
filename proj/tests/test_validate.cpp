#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "phasex/errors.hpp"
#include "phasex/validate.hpp"

#include <cmath>
#include <limits>
#include <sys/stat.h>

using namespace phasex;
using phasex::test::TempDir;

namespace {

const std::chrono::milliseconds kTimeout{5000};

std::filesystem::path write_script(const TempDir& tmp, const std::string& name,
                                   const std::string& body) {
    const auto path = tmp / name;
    phasex::test::write_text(path, "#!/bin/sh\n" + body);
    REQUIRE(::chmod(path.c_str(), 0755) == 0);
    return path;
}

} // namespace

TEST_CASE("value streams parse one number per line") {
    const auto v = parse_value_stream("1.5\n\n  -2e-3  \n0\n3.25\n");
    CHECK(v == std::vector<double>{1.5, -2e-3, 0.0, 3.25});
    CHECK(parse_value_stream("").empty());
    CHECK_THROWS_AS(parse_value_stream("1.0\nnot-a-number\n"), Error);
    CHECK_THROWS_AS(parse_value_stream("1.0 2.0\n"), Error); // two values on a line
}

TEST_CASE("tolerance boundary is inclusive") {
    // A zero reference keeps each diff the exact double written here, so
    // the at-the-limit case probes the boundary itself.
    const std::vector<double> ref{0.0};
    CHECK(validate_outputs(ref, {0.0005}).correct);
    CHECK(validate_outputs(ref, {0.001}).correct); // exactly at the limit
    CHECK_FALSE(validate_outputs(ref, {0.0011}).correct);

    const auto v = validate_outputs(ref, {0.0011});
    CHECK(v.max_abs_diff == 0.0011);
    CHECK_FALSE(v.reason.empty());
}

TEST_CASE("identical outputs always validate") {
    const std::vector<double> ref{0.0, -17.25, 3e100, 1e-300};
    const auto v = validate_outputs(ref, ref);
    CHECK(v.correct);
    CHECK(v.max_abs_diff == 0.0);
    CHECK(v.compared_values == ref.size());
}

TEST_CASE("worst offender is reported") {
    const auto v = validate_outputs({1.0, 2.0, 3.0}, {1.0, 2.5, 3.1});
    CHECK_FALSE(v.correct);
    CHECK(v.max_abs_diff == doctest::Approx(0.5));
    CHECK(v.compared_values == 3);
}

TEST_CASE("nan fails closed") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_FALSE(validate_outputs({1.0}, {nan}).correct);
    CHECK_FALSE(validate_outputs({nan}, {1.0}).correct);
    CHECK_FALSE(validate_outputs({nan}, {nan}).correct);
    CHECK(std::isnan(validate_outputs({1.0}, {nan}).max_abs_diff));
}

TEST_CASE("length mismatch is incorrect") {
    const auto v = validate_outputs({1.0, 2.0}, {1.0});
    CHECK_FALSE(v.correct);
    CHECK_FALSE(v.reason.empty());
    CHECK_FALSE(validate_outputs({}, {1.0}).correct);
    CHECK(validate_outputs({}, {}).correct);
}

TEST_CASE("tolerance parameter widens the gate") {
    const std::vector<double> ref{1.0};
    CHECK_FALSE(validate_outputs(ref, {1.5}).correct);
    CHECK(validate_outputs(ref, {1.5}, 0.6).correct);
}

TEST_CASE("binary output is captured and scored") {
    TempDir tmp;
    const auto good = write_script(tmp, "good", "printf '1.0\\n2.0\\n3.0\\n'\n");
    const std::vector<double> ref{1.0, 2.0, 3.0};

    CHECK(capture_output_values(good, {}, kTimeout) == ref);

    const auto v = validate_binary(good, ref, {}, kTimeout);
    CHECK(v.correct);
    CHECK(v.compared_values == 3);

    const auto drifted = write_script(tmp, "drifted", "printf '1.0\\n2.0\\n3.5\\n'\n");
    CHECK_FALSE(validate_binary(drifted, ref, {}, kTimeout).correct);
}

TEST_CASE("environment reaches the validated binary") {
    TempDir tmp;
    const auto echo_env = write_script(tmp, "echo-env", "printf '%s\\n' \"${PHX_VAL:-0}\"\n");
    CHECK(capture_output_values(echo_env, {{"PHX_VAL", "42.5"}}, kTimeout) ==
          std::vector<double>{42.5});
}

TEST_CASE("runtime failure is an incorrect verdict with a reason") {
    TempDir tmp;
    const std::vector<double> ref{1.0};

    const auto failing = write_script(tmp, "failing", "printf '1.0\\n'; exit 9\n");
    auto v = validate_binary(failing, ref, {}, kTimeout);
    CHECK_FALSE(v.correct);
    CHECK_FALSE(v.reason.empty());

    const auto garbled = write_script(tmp, "garbled", "printf 'zero point five\\n'\n");
    v = validate_binary(garbled, ref, {}, kTimeout);
    CHECK_FALSE(v.correct);
    CHECK_FALSE(v.reason.empty());

    const auto slow = write_script(tmp, "slow", "sleep 30\n");
    v = validate_binary(slow, ref, {}, std::chrono::milliseconds{200});
    CHECK_FALSE(v.correct);
    CHECK_FALSE(v.reason.empty());

    CHECK_THROWS_AS(capture_output_values(failing, {}, kTimeout), Error);
    CHECK_THROWS_AS(capture_output_values(tmp / "missing", {}, kTimeout), Error);
}
