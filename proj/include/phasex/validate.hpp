#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace phasex {

struct Verdict {
    bool correct = false;
    double max_abs_diff = 0.0;
    std::size_t compared_values = 0;
    std::string reason; // set when incorrect

    bool operator==(const Verdict&) const = default;
};

/// Element-wise comparison gate between a candidate's numeric output and the
/// reference produced by the unoptimized serial build.
inline constexpr double kDefaultTolerance = 0.001;

/// One decimal value per line; blank lines skipped; scientific notation ok.
/// Throws Error on a line that is not a number.
std::vector<double> parse_value_stream(const std::string& text);

/// Absolute difference at every position must stay within the tolerance
/// (boundary included). Any NaN on either side fails closed, as does a
/// length mismatch.
Verdict validate_outputs(const std::vector<double>& reference,
                         const std::vector<double>& candidate,
                         double tolerance = kDefaultTolerance);

/// Runs the binary and parses its stdout as a value stream. Throws Error
/// on runtime failure or unparsable output. This is how the reference
/// output of the unoptimized serial build is produced.
std::vector<double> capture_output_values(const std::filesystem::path& binary,
                                          const std::map<std::string, std::string>& env,
                                          std::chrono::milliseconds run_timeout);

/// Runs the binary, captures stdout, and scores it against the reference.
/// Runtime failure of any kind (nonzero exit, signal, timeout, unparsable
/// output) is an incorrect verdict with the reason filled in.
Verdict validate_binary(const std::filesystem::path& binary,
                        const std::vector<double>& reference,
                        const std::map<std::string, std::string>& env,
                        std::chrono::milliseconds run_timeout,
                        double tolerance = kDefaultTolerance);

} // namespace phasex
