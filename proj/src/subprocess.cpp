#include "phasex/subprocess.hpp"

#include "phasex/errors.hpp"

#include <cerrno>
#include <cstring>
#include <ctime>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/syscall.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace phasex {

std::int64_t monotonic_ns() {
    timespec ts{};
    clock_gettime(CLOCK_MONOTONIC, &ts);
    return static_cast<std::int64_t>(ts.tv_sec) * 1000000000ll + ts.tv_nsec;
}

namespace {

int pidfd_open_compat(pid_t pid) {
#ifdef SYS_pidfd_open
    return static_cast<int>(syscall(SYS_pidfd_open, pid, 0));
#else
    (void)pid;
    errno = ENOSYS;
    return -1;
#endif
}

// Child-side: redirect an stdio fd to a file, or /dev/null for stdin.
bool redirect_fd(int target_fd, const char* path, int flags) {
    int fd = ::open(path, flags, 0644);
    if (fd < 0) return false;
    if (::dup2(fd, target_fd) < 0) {
        ::close(fd);
        return false;
    }
    ::close(fd);
    return true;
}

std::vector<std::string> merged_environment(const std::map<std::string, std::string>& overrides) {
    std::vector<std::string> env;
    for (char** e = environ; *e; ++e) {
        std::string entry(*e);
        auto eq = entry.find('=');
        std::string key = eq == std::string::npos ? entry : entry.substr(0, eq);
        if (!overrides.count(key)) env.push_back(std::move(entry));
    }
    for (const auto& [k, v] : overrides) env.push_back(k + "=" + v);
    return env;
}

} // namespace

ChildProcess::ChildProcess(const RunSpec& spec) : timeout_(spec.timeout) {
    if (spec.argv.empty()) {
        spawn_error_ = "empty argv";
        return;
    }

    std::vector<std::string> env = merged_environment(spec.env_overrides);
    std::vector<char*> argv_ptrs;
    argv_ptrs.reserve(spec.argv.size() + 1);
    for (const auto& a : spec.argv) argv_ptrs.push_back(const_cast<char*>(a.c_str()));
    argv_ptrs.push_back(nullptr);
    std::vector<char*> env_ptrs;
    env_ptrs.reserve(env.size() + 1);
    for (const auto& e : env) env_ptrs.push_back(const_cast<char*>(e.c_str()));
    env_ptrs.push_back(nullptr);

    const std::string out_path = spec.stdout_path ? spec.stdout_path->string() : "";
    const std::string err_path = spec.stderr_path ? spec.stderr_path->string() : "";
    const std::string cwd = spec.cwd ? spec.cwd->string() : "";

    // Exec failure is reported back through a close-on-exec pipe: a
    // successful exec closes it silently, a failed setup writes the stage
    // and errno before exiting.
    int epipe[2] = {-1, -1};
    if (::pipe2(epipe, O_CLOEXEC) != 0) {
        spawn_error_ = std::string("pipe failed: ") + std::strerror(errno);
        return;
    }

    start_ns_ = monotonic_ns();
    pid_t pid = ::fork();
    if (pid < 0) {
        spawn_error_ = std::string("fork failed: ") + std::strerror(errno);
        ::close(epipe[0]);
        ::close(epipe[1]);
        return;
    }
    if (pid == 0) {
        ::close(epipe[0]);
        ::setpgid(0, 0);
        const auto bail = [&](char stage) {
            const int err = errno;
            char msg[8] = {stage, 0, 0, 0, 0, 0, 0, 0};
            std::memcpy(msg + 1, &err, sizeof err);
            ssize_t n = ::write(epipe[1], msg, sizeof msg);
            (void)n;
            _exit(127);
        };
        if (!cwd.empty() && ::chdir(cwd.c_str()) != 0) bail('c');
        if (!redirect_fd(STDIN_FILENO, "/dev/null", O_RDONLY)) bail('r');
        if (!out_path.empty() &&
            !redirect_fd(STDOUT_FILENO, out_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC))
            bail('r');
        if (!err_path.empty() &&
            !redirect_fd(STDERR_FILENO, err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC))
            bail('r');
        ::execvpe(argv_ptrs[0], argv_ptrs.data(), env_ptrs.data());
        bail('x');
    }
    ::close(epipe[1]);
    char report[8];
    ssize_t got;
    do {
        got = ::read(epipe[0], report, sizeof report);
    } while (got < 0 && errno == EINTR);
    ::close(epipe[0]);
    if (got >= static_cast<ssize_t>(sizeof report)) {
        int err = 0;
        std::memcpy(&err, report + 1, sizeof err);
        const char* what = report[0] == 'c'   ? "chdir failed: "
                           : report[0] == 'r' ? "redirect failed: "
                                              : "exec failed: ";
        spawn_error_ = std::string(what) + std::strerror(err);
        int wstatus = 0;
        ::waitpid(pid, &wstatus, 0);
        return;
    }
    pid_ = pid;
    pidfd_ = pidfd_open_compat(pid);
}

ChildProcess::~ChildProcess() {
    if (pid_ > 0 && !reaped_) {
        kill_group();
        int wstatus = 0;
        ::waitpid(pid_, &wstatus, 0);
    }
    if (pidfd_ >= 0) ::close(pidfd_);
}

void ChildProcess::kill_group() {
    if (pid_ > 0) {
        ::kill(-pid_, SIGKILL);
        ::kill(pid_, SIGKILL); // in case the group switch raced exec
    }
}

RunResult ChildProcess::reap(int wstatus, bool timed_out) {
    reaped_ = true;
    RunResult r;
    r.wall_ms = static_cast<double>(monotonic_ns() - start_ns_) / 1e6;
    if (timed_out) {
        r.status = RunStatus::timed_out;
        return r;
    }
    if (WIFEXITED(wstatus)) {
        r.status = RunStatus::exited;
        r.exit_code = WEXITSTATUS(wstatus);
    } else if (WIFSIGNALED(wstatus)) {
        r.status = RunStatus::signaled;
        r.term_signal = WTERMSIG(wstatus);
    } else {
        r.status = RunStatus::signaled;
    }
    return r;
}

std::optional<RunResult> ChildProcess::poll() {
    if (pid_ <= 0) {
        RunResult r;
        r.status = RunStatus::spawn_failed;
        r.error = spawn_error_;
        return r;
    }
    if (reaped_) return std::nullopt;
    int wstatus = 0;
    pid_t w = ::waitpid(pid_, &wstatus, WNOHANG);
    if (w == pid_) return reap(wstatus, false);
    return std::nullopt;
}

RunResult ChildProcess::wait() {
    if (pid_ <= 0) {
        RunResult r;
        r.status = RunStatus::spawn_failed;
        r.error = spawn_error_;
        return r;
    }
    const std::int64_t deadline_ns = start_ns_ + static_cast<std::int64_t>(timeout_.count()) * 1000000ll;
    for (;;) {
        int wstatus = 0;
        pid_t w = ::waitpid(pid_, &wstatus, WNOHANG);
        if (w == pid_) return reap(wstatus, false);

        std::int64_t now = monotonic_ns();
        if (now >= deadline_ns) {
            kill_group();
            ::waitpid(pid_, &wstatus, 0);
            return reap(wstatus, true);
        }

        std::int64_t remain_ms = (deadline_ns - now) / 1000000ll + 1;
        if (pidfd_ >= 0) {
            pollfd pfd{pidfd_, POLLIN, 0};
            ::poll(&pfd, 1, static_cast<int>(remain_ms > 1000 ? 1000 : remain_ms));
        } else {
            timespec nap{0, 2000000}; // 2 ms fallback poll interval
            ::nanosleep(&nap, nullptr);
        }
    }
}

RunResult run_process(const RunSpec& spec) {
    ChildProcess child(spec);
    return child.wait();
}

} // namespace phasex
