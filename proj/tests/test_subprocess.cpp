#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "phasex/subprocess.hpp"

#include <chrono>
#include <csignal>
#include <filesystem>
#include <sstream>
#include <thread>

#include <sys/types.h>
#include <signal.h>

using namespace phasex;
using phasex::test::TempDir;
using phasex::test::read_text;

namespace {

RunSpec sh(const std::string& script) {
    RunSpec spec;
    spec.argv = {"/bin/sh", "-c", script};
    return spec;
}

// True if any process in `pgid` is still running (zombies don't count:
// they hold no resources and merely await a reap by pid 1).
bool group_has_live_member(pid_t pgid) {
    for (const auto& entry : std::filesystem::directory_iterator("/proc")) {
        const std::string name = entry.path().filename().string();
        if (name.find_first_not_of("0123456789") != std::string::npos) continue;
        std::string stat;
        try {
            stat = read_text(entry.path() / "stat");
        } catch (const std::exception&) {
            continue; // raced a process exit
        }
        // Fields after the parenthesized command name: state ppid pgrp ...
        const auto close_paren = stat.rfind(')');
        if (close_paren == std::string::npos) continue;
        std::istringstream rest(stat.substr(close_paren + 1));
        char state = '?';
        long ppid = 0, pgrp = 0;
        rest >> state >> ppid >> pgrp;
        if (pgrp == pgid && state != 'Z' && state != 'X') return true;
    }
    return false;
}

} // namespace

TEST_CASE("exit codes come back verbatim") {
    CHECK(run_process(sh("exit 0")).ok());
    const auto r = run_process(sh("exit 7"));
    CHECK(r.status == RunStatus::exited);
    CHECK(r.exit_code == 7);
    CHECK_FALSE(r.ok());
}

TEST_CASE("termination by signal is reported") {
    const auto r = run_process(sh("kill -TERM $$"));
    CHECK(r.status == RunStatus::signaled);
    CHECK(r.term_signal == SIGTERM);
    CHECK_FALSE(r.ok());
}

TEST_CASE("spawn failure carries a reason") {
    RunSpec spec;
    spec.argv = {"/definitely/not/a/binary"};
    const auto r = run_process(spec);
    CHECK(r.status == RunStatus::spawn_failed);
    CHECK_FALSE(r.error.empty());
    CHECK_FALSE(r.ok());
}

TEST_CASE("environment overrides reach the child") {
    TempDir tmp;
    auto spec = sh("printf '%s|%s' \"$PHX_A\" \"$PHX_B\"");
    spec.env_overrides = {{"PHX_A", "alpha"}, {"PHX_B", ""}};
    spec.stdout_path = tmp / "out.txt";
    REQUIRE(run_process(spec).ok());
    CHECK(read_text(*spec.stdout_path) == "alpha|");
}

TEST_CASE("stdout and stderr redirect independently") {
    TempDir tmp;
    auto spec = sh("echo out; echo err 1>&2");
    spec.stdout_path = tmp / "out.txt";
    spec.stderr_path = tmp / "err.txt";
    REQUIRE(run_process(spec).ok());
    CHECK(read_text(*spec.stdout_path) == "out\n");
    CHECK(read_text(*spec.stderr_path) == "err\n");
}

TEST_CASE("stdin is the null device") {
    // A reader must see EOF immediately instead of inheriting the test's
    // stdin and hanging.
    TempDir tmp;
    auto spec = sh("wc -c");
    spec.stdout_path = tmp / "out.txt";
    spec.timeout = std::chrono::milliseconds{5000};
    const auto r = run_process(spec);
    REQUIRE(r.ok());
    CHECK(read_text(*spec.stdout_path).find('0') != std::string::npos);
}

TEST_CASE("working directory is applied") {
    TempDir tmp;
    auto spec = sh("pwd");
    spec.cwd = tmp.path();
    spec.stdout_path = tmp / "out.txt";
    REQUIRE(run_process(spec).ok());
    const auto printed = read_text(*spec.stdout_path);
    CHECK(std::filesystem::weakly_canonical(printed.substr(0, printed.size() - 1)) ==
          std::filesystem::weakly_canonical(tmp.path()));
}

TEST_CASE("wall time is measured") {
    auto spec = sh("sleep 0.2");
    const auto r = run_process(spec);
    REQUIRE(r.ok());
    CHECK(r.wall_ms >= 150.0);
    CHECK(r.wall_ms < 5000.0);
}

TEST_CASE("timeout kills the whole process group promptly") {
    auto spec = sh("sleep 30 & sleep 30");
    spec.timeout = std::chrono::milliseconds{300};

    const auto t0 = monotonic_ns();
    ChildProcess child(spec);
    REQUIRE(child.spawn_ok());
    const pid_t pid = child.pid();
    const auto r = child.wait();
    const double waited_ms = static_cast<double>(monotonic_ns() - t0) / 1e6;

    CHECK(r.status == RunStatus::timed_out);
    CHECK(waited_ms < 1300.0); // 300 ms budget plus supervision slack

    // The backgrounded sleep shared the child's process group and must be
    // dead too. An orphan lingers as a zombie until pid 1 reaps it and a
    // zombie still answers kill(-pgid, 0), so scan /proc for group members
    // that are actually running.
    bool group_gone = false;
    for (int i = 0; i < 200 && !group_gone; ++i) {
        group_gone = !group_has_live_member(pid);
        if (!group_gone) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    CHECK(group_gone);
}

TEST_CASE("poll is nonblocking and eventually reaps") {
    auto spec = sh("sleep 0.2; exit 3");
    spec.timeout = std::chrono::milliseconds{5000};
    ChildProcess child(spec);
    REQUIRE(child.spawn_ok());
    CHECK_FALSE(child.poll().has_value()); // still running right after spawn

    std::optional<RunResult> r;
    for (int i = 0; i < 500 && !r; ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
        r = child.poll();
    }
    REQUIRE(r.has_value());
    CHECK(r->status == RunStatus::exited);
    CHECK(r->exit_code == 3);
}
