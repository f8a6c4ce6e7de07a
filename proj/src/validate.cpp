#include "phasex/validate.hpp"

#include "phasex/errors.hpp"
#include "phasex/subprocess.hpp"
#include "phasex/text_util.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <unistd.h>

namespace phasex {

std::vector<double> parse_value_stream(const std::string& text) {
    std::vector<double> values;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto v = parse_double(t);
        if (!v) throw Error("line " + std::to_string(lineno) + " is not a number: '" + t + "'");
        values.push_back(*v);
    }
    return values;
}

Verdict validate_outputs(const std::vector<double>& reference,
                         const std::vector<double>& candidate, double tolerance) {
    Verdict v;
    if (reference.size() != candidate.size()) {
        v.reason = "output length " + std::to_string(candidate.size()) +
                   " differs from reference length " + std::to_string(reference.size());
        return v;
    }
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double r = reference[i];
        const double c = candidate[i];
        if (std::isnan(r) || std::isnan(c)) {
            v.reason = "NaN at position " + std::to_string(i);
            v.max_abs_diff = std::numeric_limits<double>::quiet_NaN();
            return v;
        }
        const double d = std::fabs(r - c);
        if (d > v.max_abs_diff) v.max_abs_diff = d;
        if (d > tolerance) {
            v.reason = "position " + std::to_string(i) + " differs by " + fmt_double(d) +
                       " (tolerance " + fmt_double(tolerance) + ")";
            // Keep scanning: max_abs_diff should report the worst offender.
        }
    }
    v.compared_values = reference.size();
    v.correct = v.reason.empty();
    return v;
}

std::vector<double> capture_output_values(const std::filesystem::path& binary,
                                          const std::map<std::string, std::string>& env,
                                          std::chrono::milliseconds run_timeout) {
    char tmpl[] = "/tmp/phasex-capture-XXXXXX";
    const int fd = ::mkstemp(tmpl);
    if (fd < 0) throw Error("cannot create temporary capture file");
    ::close(fd);
    const std::filesystem::path capture = tmpl;
    struct Cleanup {
        const std::filesystem::path& p;
        ~Cleanup() {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
    } cleanup{capture};

    RunSpec spec;
    spec.argv = {binary.string()};
    spec.env_overrides = env;
    spec.timeout = run_timeout;
    spec.stdout_path = capture;
    spec.stderr_path = "/dev/null";
    const RunResult r = run_process(spec);

    if (!r.ok()) {
        switch (r.status) {
        case RunStatus::exited:
            throw Error("exited with code " + std::to_string(r.exit_code));
        case RunStatus::signaled:
            throw Error("killed by signal " + std::to_string(r.term_signal));
        case RunStatus::timed_out:
            throw Error("timed out after " + std::to_string(run_timeout.count()) + " ms");
        case RunStatus::spawn_failed:
            throw Error("failed to start: " + r.error);
        }
        throw Error("run failed");
    }

    std::string text;
    try {
        text = read_text_file(capture);
    } catch (const Error& e) {
        throw Error(std::string("cannot read captured output: ") + e.what());
    }
    try {
        return parse_value_stream(text);
    } catch (const Error& e) {
        throw Error(std::string("unparsable output: ") + e.what());
    }
}

Verdict validate_binary(const std::filesystem::path& binary,
                        const std::vector<double>& reference,
                        const std::map<std::string, std::string>& env,
                        std::chrono::milliseconds run_timeout, double tolerance) {
    std::vector<double> values;
    try {
        values = capture_output_values(binary, env, run_timeout);
    } catch (const Error& e) {
        Verdict v;
        v.reason = e.what();
        return v;
    }
    return validate_outputs(reference, values, tolerance);
}

} // namespace phasex
