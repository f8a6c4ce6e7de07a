#pragma once

#include "phasex/energy_meter.hpp"
#include "phasex/journal.hpp"
#include "phasex/pass_catalog.hpp"
#include "phasex/runner.hpp"
#include "phasex/toolchain.hpp"
#include "phasex/transition_model.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace phasex {

/// One kernel under exploration: the function source compiled through the
/// candidate pass orders, and the harness that drives and prints it.
struct KernelSpec {
    std::string name;
    std::filesystem::path source;
    std::filesystem::path harness;
    bool openmp = false; // kernel has a parallel variant worth sweeping
};

/// Resolved campaign parameters.
struct ExplorationPlan {
    std::string seed = "phasex";
    std::vector<KernelSpec> kernels;
    std::vector<std::string> levels{"-O0", "-O1", "-O2", "-O3"};
    std::vector<int> thread_set{1, 2, 4, 8, 16, 32};
    int random_count = 1000;   // random phase orders per kernel
    int model_count = 1000;    // model-sampled phase orders per kernel
    int sequence_length = 128; // passes per generated order
    double fraction = 0.05;    // share of usable screened orders kept for rescreening
    int reps = 25;             // repetition block for baselines and rescreening
    int screen_reps = 1;       // single-shot screening
    double tolerance = kDefaultTolerance;
    std::chrono::milliseconds run_timeout{60000};
    int parallel_jobs = 0; // compile-phase workers; 0 means hardware count
    std::filesystem::path lock_file = "/tmp/phasex-measure.lock";
};

/// Screening score of one candidate, in generation order.
struct CandidateScore {
    double energy_j = 0.0;
    double time_ms = 0.0;
};

/// Rescreening pool size for a screened pool: ceil(pool * fraction),
/// clamped to the pool (a hair of slack absorbs representation error, so
/// an exact 5% of 1000 is 50, not 51).
std::size_t selection_count(std::size_t pool, double fraction);

/// Indices of the `count` best scores: lowest energy first, ties broken by
/// time, then by generation order.
std::vector<std::size_t> select_top_indices(const std::vector<CandidateScore>& scores,
                                            std::size_t count);
std::vector<std::size_t> select_top_indices(const std::vector<CandidateScore>& scores,
                                            double fraction);

struct BaselineCell {
    std::string level;
    bool openmp = false;
    int threads = 1;
    EvaluationRecord rec;
};

/// The usable cell with the lowest mean energy (ties: time, then sweep
/// order); nullptr when no cell measured successfully.
const BaselineCell* best_baseline(const std::vector<BaselineCell>& cells);

struct CampaignSummary {
    std::size_t measured_cells = 0;
    std::size_t reused_cells = 0;
    std::size_t kernels_with_champion = 0;
    nlohmann::json document;
};

/// Drives a whole campaign over the journal: references, stock-level
/// baselines, random screening, selection, rescreening, transition-model
/// phase, and result documents. Every measured cell goes through the
/// journal first, so a rerun with --resume repeats nothing.
class Explorer {
public:
    Explorer(ExplorationPlan plan, PassCatalog catalog, ToolchainDriver& driver,
             EnergyProvider& provider, Journal& journal, std::ostream& log);

    /// Stock-level sweep only; writes results/baselines-<kernel>.json.
    CampaignSummary run_baseline(bool resume);

    /// The full protocol; writes results/<kernel>.json and results/summary.json.
    CampaignSummary run_campaign(bool resume);

private:
    struct Task; // identity + build recipe for one journal cell
    struct VariantPool;
    struct KernelState;

    void prepare_journal(bool resume, const char* mode);
    nlohmann::json manifest_doc(const char* mode) const;

    std::vector<double>& reference_for(const KernelSpec& kernel);
    std::vector<EvaluationRecord> run_batch(std::vector<Task>& tasks);
    std::vector<BaselineCell> baseline_sweep(const KernelSpec& kernel);

    /// Screens, selects, and rescreens one pool of generated sequences.
    void run_phase(KernelState& state, const std::vector<PassSequence>& sequences,
                   std::string_view origin);

    nlohmann::json kernel_result(const KernelState& state) const;

    ExplorationPlan plan_;
    PassCatalog catalog_;
    ToolchainDriver& driver_;
    EnergyProvider& provider_;
    Journal& journal_;
    std::ostream& log_;
    std::map<std::string, std::vector<double>> references_;
    std::size_t measured_ = 0;
    std::size_t reused_ = 0;
};

} // namespace phasex
