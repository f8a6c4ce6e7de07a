#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <sys/types.h>

namespace phasex {

/// Nanoseconds from the CLOCK_MONOTONIC clock.
std::int64_t monotonic_ns();

struct RunSpec {
    std::vector<std::string> argv;
    /// Applied over the inherited environment; an empty value still sets the
    /// variable (to empty).
    std::map<std::string, std::string> env_overrides;
    std::optional<std::filesystem::path> stdout_path;
    std::optional<std::filesystem::path> stderr_path;
    std::optional<std::filesystem::path> cwd;
    /// Wall-clock limit; the whole process group is killed on expiry.
    std::chrono::milliseconds timeout{60000};
};

enum class RunStatus { exited, signaled, timed_out, spawn_failed };

struct RunResult {
    RunStatus status = RunStatus::spawn_failed;
    int exit_code = -1;
    int term_signal = 0;
    double wall_ms = 0.0;
    std::string error; // spawn failure detail

    bool ok() const { return status == RunStatus::exited && exit_code == 0; }
};

/// A spawned child under supervision. The child runs in its own process
/// group so a timeout kill takes down any helpers it forked.
class ChildProcess {
public:
    /// Spawns immediately; check spawn_ok() before waiting.
    explicit ChildProcess(const RunSpec& spec);
    ChildProcess(const ChildProcess&) = delete;
    ChildProcess& operator=(const ChildProcess&) = delete;
    ~ChildProcess();

    bool spawn_ok() const { return pid_ > 0; }
    pid_t pid() const { return pid_; }

    /// Nonblocking: result once the child has exited.
    std::optional<RunResult> poll();

    /// Blocks until exit or the RunSpec timeout, killing the group on expiry.
    RunResult wait();

    /// SIGKILL to the child's process group.
    void kill_group();

private:
    RunResult reap(int wstatus, bool timed_out);

    pid_t pid_ = -1;
    int pidfd_ = -1; // -1 when pidfd_open is unavailable; falls back to polling
    std::int64_t start_ns_ = 0;
    std::chrono::milliseconds timeout_{0};
    std::string spawn_error_;
    bool reaped_ = false;
};

/// Spawn, supervise, reap. The documented supervision slack on top of the
/// spec timeout is one poll interval (<= 10 ms) plus signal delivery.
RunResult run_process(const RunSpec& spec);

} // namespace phasex
