#pragma once

#include "phasex/subprocess.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace phasex {

/// One measured execution: consumed energy and elapsed wall time.
/// Average power is always derived as P = E / dt, never stored separately.
struct MeasurementSample {
    double energy_joules = 0.0;
    double elapsed_ms = 0.0;
    /// Set when the run was too short for the provider's update period to
    /// yield enough samples (shorter than ~4 periods).
    bool low_confidence = false;

    double watts() const { return energy_joules / (elapsed_ms / 1000.0); }

    bool operator==(const MeasurementSample&) const = default;
};

enum class ProviderKind { rapl, sensor_files, mock };

std::string_view to_string(ProviderKind kind);
ProviderKind provider_kind_from_string(std::string_view s);

struct ProviderSpec {
    ProviderKind kind = ProviderKind::mock;

    // rapl: root of the OS power-capping tree; package domains are always
    // summed, DRAM per socket by default, GPU/psys domains excluded.
    std::filesystem::path rapl_root = "/sys/class/powercap";
    bool rapl_include_dram = true;
    bool rapl_include_gpu = false;

    // sensor_files: device files exposing instantaneous watts as decimal
    // text, polled at the update period and integrated over the run.
    std::vector<std::filesystem::path> sensor_files;
    std::chrono::microseconds sensor_period{263808};

    // mock: deterministic model file (see MockProvider).
    std::filesystem::path mock_model;
};

struct DomainStatus {
    std::string name;
    std::string path;
    bool available = false;
    std::string detail;
};

struct CapabilityReport {
    ProviderKind kind = ProviderKind::mock;
    bool available = false;
    std::vector<DomainStatus> domains;
    double counter_resolution_uj = 0.0;
    std::uint64_t update_period_us = 0;
    std::string notes;
};

/// Wraparound correction for a free-running energy counter of known range:
/// the corrected delta is always in [0, max_range).
std::uint64_t wrapped_delta(std::uint64_t before, std::uint64_t after, std::uint64_t max_range);

/// Context a provider may consult when finalizing a sample (the mock model
/// keys off the command and its thread-count variable).
struct MeasureContext {
    std::vector<std::string> argv;
    std::map<std::string, std::string> env;
};

class EnergyProvider {
public:
    virtual ~EnergyProvider() = default;

    virtual CapabilityReport probe() = 0;

    /// Snapshot counters (or start polling) immediately before the spawn.
    virtual void begin(const MeasureContext& ctx) = 0;

    /// Counters read immediately after exit; returns the finalized sample.
    /// `measured_elapsed_ms` is the supervised wall time; providers with an
    /// intrinsic time model (mock) may substitute their own.
    virtual MeasurementSample end(double measured_elapsed_ms) = 0;
};

std::unique_ptr<EnergyProvider> make_provider(const ProviderSpec& spec);

/// Runs `argv` under the provider: counters are read immediately before the
/// spawn and immediately after exit. Throws ProviderError on counter read
/// failure and Error on nonzero exit / timeout / spawn failure.
MeasurementSample measure(const std::vector<std::string>& argv,
                          EnergyProvider& provider,
                          const std::map<std::string, std::string>& env,
                          std::chrono::milliseconds run_timeout);

/// Machine-wide exclusive lock held around measured executions; counters
/// are system-wide, so concurrent measurement is forbidden.
class MeasurementLock {
public:
    explicit MeasurementLock(const std::filesystem::path& lock_file);
    MeasurementLock(const MeasurementLock&) = delete;
    MeasurementLock& operator=(const MeasurementLock&) = delete;
    ~MeasurementLock();

private:
    int fd_ = -1;
};

} // namespace phasex
