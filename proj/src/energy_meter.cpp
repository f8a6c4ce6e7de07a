#include "phasex/energy_meter.hpp"

#include "phasex/errors.hpp"
#include "phasex/text_util.hpp"

#include <json.hpp>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <thread>

namespace phasex {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(ProviderKind kind) {
    switch (kind) {
    case ProviderKind::rapl: return "rapl";
    case ProviderKind::sensor_files: return "sensor-files";
    case ProviderKind::mock: return "mock";
    }
    return "?";
}

ProviderKind provider_kind_from_string(std::string_view s) {
    if (s == "rapl") return ProviderKind::rapl;
    if (s == "sensor-files" || s == "sensor_files") return ProviderKind::sensor_files;
    if (s == "mock") return ProviderKind::mock;
    throw ConfigError("unknown energy provider: " + std::string(s));
}

std::uint64_t wrapped_delta(std::uint64_t before, std::uint64_t after, std::uint64_t max_range) {
    if (after >= before) return after - before;
    if (max_range == 0 || before >= max_range)
        throw ProviderError("energy counter moved backwards without a usable wrap range");
    return (max_range - before) + after;
}

namespace {

std::uint64_t parse_counter(const std::string& text, const fs::path& origin) {
    errno = 0;
    char* end = nullptr;
    const std::string t = trim(text);
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (errno != 0 || end == t.c_str() || *end != '\0')
        throw ProviderError("unparsable counter value in " + origin.string() + ": '" + t + "'");
    return v;
}

std::string read_for_provider(const fs::path& p) {
    try {
        return read_text_file(p);
    } catch (const Error& e) {
        throw ProviderError(e.what());
    }
}

// ---------------------------------------------------------------------------
// OS power-capping tree reader. Packages are summed; per-socket memory
// domains join the sum by default. Psys is always excluded: it subsumes the
// package counters and would double count.

struct RaplDomain {
    std::string name;
    fs::path energy_file;
    std::uint64_t max_range_uj = 0;
};

class RaplProvider final : public EnergyProvider {
public:
    explicit RaplProvider(const ProviderSpec& spec) : spec_(spec) { enumerate(); }

    CapabilityReport probe() override {
        CapabilityReport rep;
        rep.kind = ProviderKind::rapl;
        rep.counter_resolution_uj = 1.0;
        rep.update_period_us = kUpdatePeriodUs;
        bool any_package = false;
        for (const auto& d : domains_) {
            DomainStatus st;
            st.name = d.name;
            st.path = d.energy_file.string();
            try {
                parse_counter(read_for_provider(d.energy_file), d.energy_file);
                st.available = true;
            } catch (const ProviderError& e) {
                st.detail = e.what();
            }
            if (st.available && d.name.rfind("package", 0) == 0) any_package = true;
            rep.domains.push_back(std::move(st));
        }
        rep.available = any_package;
        if (domains_.empty())
            rep.notes = "no power domains under " + spec_.rapl_root.string();
        return rep;
    }

    void begin(const MeasureContext&) override {
        if (domains_.empty())
            throw ProviderError("no power domains under " + spec_.rapl_root.string());
        before_.clear();
        for (const auto& d : domains_)
            before_.push_back(parse_counter(read_for_provider(d.energy_file), d.energy_file));
    }

    MeasurementSample end(double measured_elapsed_ms) override {
        std::uint64_t total_uj = 0;
        for (std::size_t i = 0; i < domains_.size(); ++i) {
            const auto& d = domains_[i];
            const std::uint64_t now = parse_counter(read_for_provider(d.energy_file), d.energy_file);
            total_uj += wrapped_delta(before_[i], now, d.max_range_uj);
        }
        MeasurementSample s;
        s.energy_joules = static_cast<double>(total_uj) * 1e-6;
        s.elapsed_ms = measured_elapsed_ms;
        s.low_confidence = measured_elapsed_ms < 4.0 * (kUpdatePeriodUs / 1000.0);
        return s;
    }

private:
    static constexpr std::uint64_t kUpdatePeriodUs = 1000;

    void enumerate() {
        std::error_code ec;
        for (const auto& entry : fs::directory_iterator(spec_.rapl_root, ec)) {
            const std::string base = entry.path().filename().string();
            if (base.rfind("intel-rapl:", 0) != 0) continue;
            // Top level: one zone per socket plus possibly psys.
            if (base.find(':', std::string("intel-rapl:").size()) != std::string::npos) continue;
            add_zone(entry.path(), /*top_level=*/true);
            for (const auto& sub : fs::directory_iterator(entry.path(), ec)) {
                if (sub.path().filename().string().rfind("intel-rapl:", 0) == 0)
                    add_zone(sub.path(), /*top_level=*/false);
            }
        }
        std::sort(domains_.begin(), domains_.end(),
                  [](const RaplDomain& a, const RaplDomain& b) {
                      return a.energy_file.string() < b.energy_file.string();
                  });
    }

    void add_zone(const fs::path& zone, bool top_level) {
        std::string name;
        try {
            name = trim(read_for_provider(zone / "name"));
        } catch (const ProviderError&) {
            return;
        }
        bool wanted = false;
        if (top_level) {
            wanted = name.rfind("package", 0) == 0;
        } else if (name == "dram") {
            wanted = spec_.rapl_include_dram;
        } else if (name == "core" || name == "uncore" || name == "gpu") {
            wanted = spec_.rapl_include_gpu;
        }
        if (!wanted) return;
        RaplDomain d;
        d.name = name;
        d.energy_file = zone / "energy_uj";
        try {
            d.max_range_uj =
                parse_counter(read_for_provider(zone / "max_energy_range_uj"), zone);
        } catch (const ProviderError&) {
            d.max_range_uj = 0; // wrap correction disabled; backwards motion will throw
        }
        domains_.push_back(std::move(d));
    }

    ProviderSpec spec_;
    std::vector<RaplDomain> domains_;
    std::vector<std::uint64_t> before_;
};

// ---------------------------------------------------------------------------
// Board sensor reader: device files expose instantaneous watts as decimal
// text. A poller thread samples every update period and integrates power
// over time (left rectangles), so the reported joules cover the whole run.

class SensorFilesProvider final : public EnergyProvider {
public:
    explicit SensorFilesProvider(const ProviderSpec& spec) : spec_(spec) {
        if (spec_.sensor_files.empty())
            throw ConfigError("sensor-files provider needs at least one sensor file");
        if (spec_.sensor_period.count() <= 0)
            throw ConfigError("sensor period must be positive");
    }

    ~SensorFilesProvider() override { stop_poller(); }

    CapabilityReport probe() override {
        CapabilityReport rep;
        rep.kind = ProviderKind::sensor_files;
        rep.update_period_us = static_cast<std::uint64_t>(spec_.sensor_period.count());
        bool all_ok = true;
        for (const auto& f : spec_.sensor_files) {
            DomainStatus st;
            st.name = f.filename().string();
            st.path = f.string();
            try {
                parse_watts(read_for_provider(f), f);
                st.available = true;
            } catch (const ProviderError& e) {
                st.detail = e.what();
                all_ok = false;
            }
            rep.domains.push_back(std::move(st));
        }
        rep.available = all_ok && !spec_.sensor_files.empty();
        return rep;
    }

    void begin(const MeasureContext&) override {
        stop_poller();
        joules_ = 0.0;
        poll_error_.clear();
        stop_.store(false, std::memory_order_relaxed);
        poller_ = std::thread([this] { poll_loop(); });
    }

    MeasurementSample end(double measured_elapsed_ms) override {
        stop_poller();
        if (!poll_error_.empty()) throw ProviderError(poll_error_);
        MeasurementSample s;
        s.energy_joules = joules_;
        s.elapsed_ms = measured_elapsed_ms;
        const double period_ms = static_cast<double>(spec_.sensor_period.count()) / 1000.0;
        s.low_confidence = measured_elapsed_ms < 4.0 * period_ms;
        return s;
    }

private:
    static double parse_watts(const std::string& text, const fs::path& origin) {
        const auto v = parse_double(text);
        if (!v)
            throw ProviderError("unparsable sensor reading in " + origin.string() + ": '" +
                                trim(text) + "'");
        return *v;
    }

    double read_watts_sum() const {
        double w = 0.0;
        for (const auto& f : spec_.sensor_files) w += parse_watts(read_for_provider(f), f);
        return w;
    }

    void poll_loop() {
        try {
            std::int64_t last_ns = monotonic_ns();
            double watts = read_watts_sum();
            const auto period = spec_.sensor_period;
            while (!stop_.load(std::memory_order_relaxed)) {
                // Sleep in short slices so end() returns promptly; sensor
                // reads still happen once per period.
                auto remaining = period;
                while (remaining.count() > 0 && !stop_.load(std::memory_order_relaxed)) {
                    const auto slice = std::min<std::chrono::microseconds>(
                        remaining, std::chrono::microseconds(20000));
                    std::this_thread::sleep_for(slice);
                    remaining -= slice;
                }
                const std::int64_t now = monotonic_ns();
                joules_ += watts * static_cast<double>(now - last_ns) * 1e-9;
                last_ns = now;
                if (stop_.load(std::memory_order_relaxed)) break;
                watts = read_watts_sum();
            }
        } catch (const std::exception& e) {
            poll_error_ = e.what();
        }
    }

    void stop_poller() {
        stop_.store(true, std::memory_order_relaxed);
        if (poller_.joinable()) poller_.join();
    }

    ProviderSpec spec_;
    std::thread poller_;
    std::atomic<bool> stop_{false};
    double joules_ = 0.0;       // owned by the poller until join
    std::string poll_error_;    // likewise
};

// ---------------------------------------------------------------------------
// Deterministic model for tests and dry runs. Two modes:
//   constant: every sample is the same fixed (energy, time) pair.
//   sidecar:  cost comes from '<binary>.cost' next to the executed file,
//             scaled by the entry the run's OMP_NUM_THREADS selects.

class MockProvider final : public EnergyProvider {
public:
    explicit MockProvider(const ProviderSpec& spec) : spec_(spec) {
        json m;
        try {
            m = json::parse(read_for_provider(spec_.mock_model));
        } catch (const json::exception& e) {
            throw ProviderError("bad mock model " + spec_.mock_model.string() + ": " + e.what());
        }
        const std::string mode = m.value("mode", "constant");
        if (mode == "constant") {
            sidecar_ = false;
            if (!m.contains("energy_joules"))
                throw ProviderError("mock constant model needs energy_joules");
            energy_j_ = m["energy_joules"].get<double>();
            if (m.contains("elapsed_ms")) elapsed_ms_ = m["elapsed_ms"].get<double>();
        } else if (mode == "sidecar") {
            sidecar_ = true;
            if (m.contains("default_watts")) default_watts_ = m["default_watts"].get<double>();
        } else {
            throw ProviderError("mock model mode must be constant or sidecar, got " + mode);
        }
    }

    CapabilityReport probe() override {
        CapabilityReport rep;
        rep.kind = ProviderKind::mock;
        rep.available = true;
        rep.notes = sidecar_ ? "deterministic sidecar cost model" : "deterministic constant model";
        DomainStatus st;
        st.name = "model";
        st.path = spec_.mock_model.string();
        st.available = true;
        rep.domains.push_back(std::move(st));
        return rep;
    }

    void begin(const MeasureContext& ctx) override { ctx_ = ctx; }

    MeasurementSample end(double measured_elapsed_ms) override {
        MeasurementSample s;
        if (!sidecar_) {
            s.energy_joules = energy_j_;
            s.elapsed_ms = elapsed_ms_.value_or(measured_elapsed_ms);
            return s;
        }
        if (ctx_.argv.empty()) throw ProviderError("mock sidecar model saw an empty command");
        const fs::path cost_file = ctx_.argv.front() + ".cost";
        if (!fs::exists(cost_file)) {
            if (default_watts_) {
                s.energy_joules = *default_watts_ * measured_elapsed_ms / 1000.0;
                s.elapsed_ms = measured_elapsed_ms;
                return s;
            }
            throw ProviderError("no cost sidecar at " + cost_file.string());
        }
        json c;
        try {
            c = json::parse(read_for_provider(cost_file));
        } catch (const json::exception& e) {
            throw ProviderError("bad cost sidecar " + cost_file.string() + ": " + e.what());
        }
        double energy = c.at("energy_j").get<double>();
        double time_ms = c.at("time_ms").get<double>();
        if (c.contains("thread_curve")) {
            const auto it = ctx_.env.find("OMP_NUM_THREADS");
            const std::string key = it == ctx_.env.end() ? "1" : it->second;
            const auto& curve = c["thread_curve"];
            if (curve.contains(key)) {
                const auto& v = curve[key];
                if (v.is_number()) {
                    energy *= v.get<double>();
                    time_ms *= v.get<double>();
                } else {
                    energy *= v.at("energy").get<double>();
                    time_ms *= v.at("time").get<double>();
                }
            }
        }
        s.energy_joules = energy;
        s.elapsed_ms = time_ms;
        return s;
    }

private:
    ProviderSpec spec_;
    bool sidecar_ = false;
    double energy_j_ = 0.0;
    std::optional<double> elapsed_ms_;
    std::optional<double> default_watts_;
    MeasureContext ctx_;
};

} // namespace

std::unique_ptr<EnergyProvider> make_provider(const ProviderSpec& spec) {
    switch (spec.kind) {
    case ProviderKind::rapl: return std::make_unique<RaplProvider>(spec);
    case ProviderKind::sensor_files: return std::make_unique<SensorFilesProvider>(spec);
    case ProviderKind::mock: return std::make_unique<MockProvider>(spec);
    }
    throw ConfigError("unknown energy provider kind");
}

MeasurementSample measure(const std::vector<std::string>& argv,
                          EnergyProvider& provider,
                          const std::map<std::string, std::string>& env,
                          std::chrono::milliseconds run_timeout) {
    if (argv.empty()) throw Error("measure: empty command");
    RunSpec spec;
    spec.argv = argv;
    spec.env_overrides = env;
    spec.timeout = run_timeout;
    // Output is scored separately by the validator; during measurement it
    // would only add IO noise.
    spec.stdout_path = "/dev/null";
    spec.stderr_path = "/dev/null";

    MeasureContext ctx{argv, env};
    provider.begin(ctx);
    const RunResult r = run_process(spec);
    // end() must run even for failed runs: it stops poller threads.
    MeasurementSample s = provider.end(r.wall_ms);

    if (!r.ok()) {
        std::string what = "measured run failed: " + argv.front();
        switch (r.status) {
        case RunStatus::exited:
            what += " exited with code " + std::to_string(r.exit_code);
            break;
        case RunStatus::signaled:
            what += " killed by signal " + std::to_string(r.term_signal);
            break;
        case RunStatus::timed_out:
            what += " timed out after " + std::to_string(run_timeout.count()) + " ms";
            break;
        case RunStatus::spawn_failed:
            what += " failed to spawn: " + r.error;
            break;
        }
        throw Error(what);
    }
    return s;
}

MeasurementLock::MeasurementLock(const std::filesystem::path& lock_file) {
    fd_ = ::open(lock_file.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0)
        throw Error("cannot open lock file " + lock_file.string() + ": " +
                    std::strerror(errno));
    if (::flock(fd_, LOCK_EX) != 0) {
        const int err = errno;
        ::close(fd_);
        fd_ = -1;
        throw Error("cannot lock " + lock_file.string() + ": " + std::strerror(err));
    }
}

MeasurementLock::~MeasurementLock() {
    if (fd_ >= 0) {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
}

} // namespace phasex
