#include "phasex/explorer.hpp"

#include "phasex/errors.hpp"
#include "phasex/fnv.hpp"
#include "phasex/sequence_gen.hpp"
#include "phasex/text_util.hpp"
#include "phasex/validate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <thread>

namespace phasex {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string pad4(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04zu", i);
    return buf;
}

unsigned worker_count(int configured, std::size_t work) {
    unsigned jobs = configured > 0 ? static_cast<unsigned>(configured)
                                   : std::max(1u, std::thread::hardware_concurrency());
    if (work < jobs) jobs = static_cast<unsigned>(std::max<std::size_t>(work, 1));
    return jobs;
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr first_err;
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!first_err) first_err = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (first_err) std::rethrow_exception(first_err);
}

/// Lexicographic (energy, time) comparison over usable records.
bool strictly_better(const EvaluationRecord& a, const EvaluationRecord& b) {
    const double ae = a.mean_energy_j(), be = b.mean_energy_j();
    if (ae != be) return ae < be;
    return a.mean_time_ms() < b.mean_time_ms();
}

json record_brief(const EvaluationRecord& rec) {
    return json{{"sequence_id", rec.sequence_id}, {"origin", rec.origin},
                {"exec", rec.exec_label()},       {"energy_j", rec.mean_energy_j()},
                {"time_ms", rec.mean_time_ms()},  {"reps", rec.reps}};
}

} // namespace

std::size_t selection_count(std::size_t pool, double fraction) {
    if (pool == 0 || fraction <= 0.0) return 0;
    // The slack keeps an exactly-representable-in-spirit product like
    // 1000 * 0.05 from ceiling up to 51 on representation error alone.
    const double raw = std::ceil(static_cast<double>(pool) * fraction - 1e-9);
    if (raw <= 0.0) return 0;
    const auto count = static_cast<std::size_t>(raw);
    return std::min(pool, count);
}

std::vector<std::size_t> select_top_indices(const std::vector<CandidateScore>& scores,
                                            std::size_t count) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a].energy_j != scores[b].energy_j)
            return scores[a].energy_j < scores[b].energy_j;
        if (scores[a].time_ms != scores[b].time_ms) return scores[a].time_ms < scores[b].time_ms;
        return a < b;
    });
    if (order.size() > count) order.resize(count);
    return order;
}

std::vector<std::size_t> select_top_indices(const std::vector<CandidateScore>& scores,
                                            double fraction) {
    return select_top_indices(scores, selection_count(scores.size(), fraction));
}

const BaselineCell* best_baseline(const std::vector<BaselineCell>& cells) {
    const BaselineCell* best = nullptr;
    for (const auto& cell : cells) {
        if (!cell.rec.usable()) continue;
        if (!best || strictly_better(cell.rec, best->rec)) best = &cell;
    }
    return best;
}

// ---------------------------------------------------------------------------

struct Explorer::Task {
    EvaluationRecord identity;
    const KernelSpec* kernel = nullptr;
    std::string key;
    bool need_compile = false;
    CompileOutcome outcome;
};

struct Explorer::VariantPool {
    bool openmp = false;
    int threads = 1;
    std::vector<EvaluationRecord> screened;   // generation order, every status
    std::vector<std::size_t> selected;        // generation indices, rank order
    std::vector<EvaluationRecord> rescreened; // same order as selected
};

struct Explorer::KernelState {
    const KernelSpec* kernel = nullptr;
    std::vector<BaselineCell> baselines;
    std::ptrdiff_t best_base = -1;       // index into baselines, -1 when none
    std::optional<int> omp_threads;      // execution width for parallel candidates

    struct Phase {
        std::string origin;
        std::size_t generated = 0;
        std::vector<PassSequence> sequences;
        std::vector<VariantPool> pools;
    };
    std::vector<Phase> phases;

    bool has_champion = false;
    EvaluationRecord champion;
    PassSequence champion_seq;
};

Explorer::Explorer(ExplorationPlan plan, PassCatalog catalog, ToolchainDriver& driver,
                   EnergyProvider& provider, Journal& journal, std::ostream& log)
    : plan_(std::move(plan)),
      catalog_(std::move(catalog)),
      driver_(driver),
      provider_(provider),
      journal_(journal),
      log_(log) {
    if (plan_.kernels.empty()) throw ConfigError("no kernels configured");
    if (plan_.sequence_length <= 0) throw ConfigError("sequence_length must be positive");
    if (plan_.fraction <= 0.0 || plan_.fraction > 1.0)
        throw ConfigError("fraction must be in (0, 1]");
    if (plan_.reps <= 0 || plan_.screen_reps <= 0)
        throw ConfigError("repetition counts must be positive");
    std::set<std::string> names;
    for (const auto& k : plan_.kernels)
        if (!names.insert(k.name).second)
            throw ConfigError("duplicate kernel name: " + k.name);
}

json Explorer::manifest_doc(const char*) const {
    json kernels = json::array();
    for (const auto& k : plan_.kernels) {
        std::error_code ec;
        kernels.push_back({{"name", k.name},
                           {"source", fs::weakly_canonical(k.source, ec).string()},
                           {"harness", fs::weakly_canonical(k.harness, ec).string()},
                           {"openmp", k.openmp}});
    }
    std::string tool_id;
    const auto& tc = driver_.config();
    for (const auto* tmpl : {&tc.frontend, &tc.optimizer, &tc.backend, &tc.linker, &tc.standard})
        tool_id += join(*tmpl, " ") + "\n";
    tool_id += join(tc.openmp_flags, " ") + "|" + join(tc.extra_flags, " ") + "|" + tc.cpu_flag +
               "|" + tc.fp_contract_flag;

    return json{{"schema", 1},
                {"seed", plan_.seed},
                {"kernels", kernels},
                {"levels", plan_.levels},
                {"thread_set", plan_.thread_set},
                {"random_count", plan_.random_count},
                {"model_count", plan_.model_count},
                {"sequence_length", plan_.sequence_length},
                {"fraction", plan_.fraction},
                {"reps", plan_.reps},
                {"screen_reps", plan_.screen_reps},
                {"tolerance", plan_.tolerance},
                {"run_timeout_ms", plan_.run_timeout.count()},
                {"catalog", {{"label", catalog_.source_label()},
                             {"size", catalog_.size()},
                             {"hash", fnv1a64_hex(join(catalog_.names(), "\n"))}}},
                {"toolchain_hash", fnv1a64_hex(tool_id)},
                {"provider", std::string(to_string(provider_.probe().kind))}};
}

void Explorer::prepare_journal(bool resume, const char* mode) {
    if (!journal_.empty() && !resume)
        throw ConfigError("journal at " + journal_.dir().string() +
                          " already holds campaign data; pass --resume to continue it");
    const json manifest = manifest_doc(mode);
    if (const auto existing = journal_.read_manifest()) {
        if (*existing != manifest)
            throw ConfigError("journal at " + journal_.dir().string() +
                              " was created with a different configuration; refusing to mix "
                              "campaigns");
    } else {
        journal_.write_manifest(manifest);
    }
}

std::vector<double>& Explorer::reference_for(const KernelSpec& kernel) {
    if (const auto it = references_.find(kernel.name); it != references_.end())
        return it->second;
    log_ << "[" << kernel.name << "] building reference output (unoptimized serial build)\n";
    CompileOutcome out =
        driver_.compile_standard(kernel.source, kernel.harness, false, "-O0", "ref-" + kernel.name);
    if (!out.ok()) {
        driver_.cleanup(out);
        throw ToolchainError("reference build failed for " + kernel.name + " at " + out.stage +
                             ": " + out.log_excerpt);
    }
    std::vector<double> values;
    try {
        values = capture_output_values(out.binary_path, {}, plan_.run_timeout);
    } catch (const Error& e) {
        driver_.cleanup(out);
        throw ToolchainError("reference run failed for " + kernel.name + ": " + e.what());
    }
    driver_.cleanup(out);
    if (values.empty())
        throw ToolchainError("reference output for " + kernel.name + " holds no values");
    log_ << "[" << kernel.name << "] reference holds " << values.size() << " values\n";
    return references_.emplace(kernel.name, std::move(values)).first->second;
}

std::vector<EvaluationRecord> Explorer::run_batch(std::vector<Task>& tasks) {
    std::set<std::string> pending;
    for (auto& t : tasks) {
        t.key = Journal::record_key(t.identity);
        t.need_compile = !journal_.has(t.key) && pending.insert(t.key).second;
    }

    const unsigned jobs = worker_count(plan_.parallel_jobs, tasks.size());
    const std::size_t chunk = std::max<std::size_t>(std::size_t{jobs} * 4, 16);
    std::vector<EvaluationRecord> results;
    results.reserve(tasks.size());

    for (std::size_t begin = 0; begin < tasks.size(); begin += chunk) {
        const std::size_t end = std::min(tasks.size(), begin + chunk);
        std::vector<std::size_t> to_compile;
        for (std::size_t i = begin; i < end; ++i)
            if (tasks[i].need_compile) to_compile.push_back(i);

        parallel_for(to_compile.size(), worker_count(plan_.parallel_jobs, to_compile.size()),
                     [&](std::size_t w) {
                         Task& t = tasks[to_compile[w]];
                         if (t.identity.level.empty())
                             t.outcome = driver_.compile_sequence(
                                 t.kernel->source, t.kernel->harness, t.identity.openmp,
                                 t.identity.sequence, t.key);
                         else
                             t.outcome = driver_.compile_standard(
                                 t.kernel->source, t.kernel->harness, t.identity.openmp,
                                 t.identity.level, t.key);
                     });

        for (std::size_t i = begin; i < end; ++i) {
            Task& t = tasks[i];
            if (journal_.has(t.key)) {
                results.push_back(journal_.load(t.key));
                ++reused_;
                if (t.need_compile) driver_.cleanup(t.outcome);
                continue;
            }
            EvaluationRecord rec = t.identity;
            ExecConfig exec;
            exec.run_timeout = plan_.run_timeout;
            run_evaluation(rec, t.outcome, reference_for(*t.kernel), plan_.tolerance, provider_,
                           plan_.lock_file, exec);
            journal_.store(t.key, rec);
            ++measured_;
            driver_.cleanup(t.outcome);
            results.push_back(std::move(rec));
        }
    }
    return results;
}

std::vector<BaselineCell> Explorer::baseline_sweep(const KernelSpec& kernel) {
    std::vector<Task> tasks;
    for (const auto& level : plan_.levels) {
        Task t;
        t.kernel = &kernel;
        t.identity.kernel = kernel.name;
        t.identity.phase = "baseline";
        t.identity.origin = std::string(to_string(SequenceOrigin::standard_level));
        t.identity.level = level;
        t.identity.sequence_id = level;
        t.identity.openmp = false;
        t.identity.threads = 1;
        t.identity.reps = plan_.reps;
        tasks.push_back(t);
        if (kernel.openmp) {
            for (int threads : plan_.thread_set) {
                Task o = t;
                o.identity.openmp = true;
                o.identity.threads = threads;
                tasks.push_back(o);
            }
        }
    }

    const auto records = run_batch(tasks);
    std::vector<BaselineCell> cells;
    cells.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        BaselineCell cell;
        cell.level = tasks[i].identity.level;
        cell.openmp = tasks[i].identity.openmp;
        cell.threads = tasks[i].identity.threads;
        cell.rec = records[i];
        if (cell.rec.usable())
            log_ << "[" << kernel.name << "] baseline " << cell.level << " "
                 << cell.rec.exec_label() << ": " << g6(cell.rec.mean_energy_j()) << " J, "
                 << g6(cell.rec.mean_time_ms()) << " ms\n";
        else
            log_ << "[" << kernel.name << "] baseline " << cell.level << " "
                 << cell.rec.exec_label() << ": " << to_string(cell.rec.status) << "\n";
        cells.push_back(std::move(cell));
    }
    return cells;
}

void Explorer::run_phase(KernelState& state, const std::vector<PassSequence>& sequences,
                         std::string_view origin) {
    const KernelSpec& kernel = *state.kernel;
    KernelState::Phase phase;
    phase.origin = origin;
    phase.generated = sequences.size();
    phase.sequences = sequences;

    std::vector<std::pair<bool, int>> variants{{false, 1}};
    if (kernel.openmp) {
        if (state.omp_threads)
            variants.emplace_back(true, *state.omp_threads);
        else
            log_ << "[" << kernel.name << "] no usable parallel baseline; screening the "
                 << origin << " pool serial-only\n";
    }

    for (const auto& [openmp, threads] : variants) {
        VariantPool pool;
        pool.openmp = openmp;
        pool.threads = threads;
        const std::string exec_label = openmp ? "omp" + std::to_string(threads) : "serial";

        std::vector<Task> tasks;
        tasks.reserve(sequences.size());
        for (std::size_t i = 0; i < sequences.size(); ++i) {
            Task t;
            t.kernel = &kernel;
            t.identity.kernel = kernel.name;
            t.identity.phase = "screening";
            t.identity.origin = std::string(origin);
            t.identity.sequence = render_sequence(catalog_, sequences[i]);
            t.identity.sequence_id = std::string(origin) + "-" + pad4(i);
            t.identity.openmp = openmp;
            t.identity.threads = threads;
            t.identity.reps = plan_.screen_reps;
            tasks.push_back(std::move(t));
        }
        pool.screened = run_batch(tasks);

        std::vector<CandidateScore> scores;
        std::vector<std::size_t> usable_to_gen;
        for (std::size_t i = 0; i < pool.screened.size(); ++i) {
            const auto& rec = pool.screened[i];
            if (!rec.usable()) continue;
            scores.push_back({rec.mean_energy_j(), rec.mean_time_ms()});
            usable_to_gen.push_back(i);
        }
        // The rescreening pool is a fraction of what survived screening, not
        // of what was generated; candidates that failed to compile or
        // validate never compete for a slot.
        const std::size_t want = selection_count(scores.size(), plan_.fraction);
        for (std::size_t rank : select_top_indices(scores, want))
            pool.selected.push_back(usable_to_gen[rank]);

        std::vector<Task> rescreen;
        rescreen.reserve(pool.selected.size());
        for (std::size_t gen : pool.selected) {
            Task t;
            t.kernel = &kernel;
            t.identity = pool.screened[gen]; // same identity fields
            t.identity.phase = "rescreening";
            t.identity.reps = plan_.reps;
            t.identity.status = EvalStatus::compile_failed;
            t.identity.samples.clear();
            t.identity.verdict = Verdict{};
            rescreen.push_back(std::move(t));
        }
        pool.rescreened = run_batch(rescreen);

        const EvaluationRecord* best = nullptr;
        for (std::size_t j = 0; j < pool.rescreened.size(); ++j) {
            const auto& rec = pool.rescreened[j];
            if (!rec.usable()) continue;
            if (!best || strictly_better(rec, *best)) best = &rec;
            if (!state.has_champion || strictly_better(rec, state.champion)) {
                state.has_champion = true;
                state.champion = rec;
                state.champion_seq = sequences[pool.selected[j]];
            }
        }
        log_ << "[" << kernel.name << "] " << origin << " " << exec_label << ": "
             << pool.screened.size() << " screened, " << scores.size() << " usable, "
             << pool.selected.size() << " rescreened"
             << (best ? ", best " + g6(best->mean_energy_j()) + " J" : "") << "\n";

        phase.pools.push_back(std::move(pool));
    }
    state.phases.push_back(std::move(phase));
}

json Explorer::kernel_result(const KernelState& state) const {
    const KernelSpec& kernel = *state.kernel;
    json doc;
    doc["kernel"] = kernel.name;
    doc["reference_values"] = references_.count(kernel.name)
                                  ? json(references_.at(kernel.name).size())
                                  : json();

    json baselines = json::array();
    for (const auto& cell : state.baselines) {
        json b{{"level", cell.level},
               {"exec", cell.rec.exec_label()},
               {"status", std::string(to_string(cell.rec.status))}};
        b["energy_j"] = cell.rec.usable() ? json(cell.rec.mean_energy_j()) : json();
        b["time_ms"] = cell.rec.usable() ? json(cell.rec.mean_time_ms()) : json();
        baselines.push_back(std::move(b));
    }
    doc["baselines"] = std::move(baselines);

    const BaselineCell* base =
        state.best_base >= 0 ? &state.baselines[static_cast<std::size_t>(state.best_base)]
                             : nullptr;
    doc["best_baseline"] =
        base ? json{{"level", base->level},
                    {"exec", base->rec.exec_label()},
                    {"energy_j", base->rec.mean_energy_j()},
                    {"time_ms", base->rec.mean_time_ms()}}
             : json();

    json phases = json::array();
    for (const auto& phase : state.phases) {
        json variants = json::array();
        for (const auto& pool : phase.pools) {
            std::size_t usable = 0;
            for (const auto& rec : pool.screened)
                if (rec.usable()) ++usable;
            const EvaluationRecord* best = nullptr;
            for (const auto& rec : pool.rescreened)
                if (rec.usable() && (!best || strictly_better(rec, *best))) best = &rec;
            variants.push_back(
                {{"exec", pool.openmp ? "omp" + std::to_string(pool.threads) : "serial"},
                 {"screened", pool.screened.size()},
                 {"usable", usable},
                 {"rescreened", pool.rescreened.size()},
                 {"best", best ? record_brief(*best) : json()}});
        }
        phases.push_back({{"origin", phase.origin},
                          {"generated", phase.generated},
                          {"variants", std::move(variants)}});
    }
    doc["phases"] = std::move(phases);

    if (state.has_champion) {
        json champ = record_brief(state.champion);
        champ["sequence"] = state.champion.sequence;
        if (base) {
            champ["improvement_energy"] =
                base->rec.mean_energy_j() / state.champion.mean_energy_j();
            champ["improvement_time"] = base->rec.mean_time_ms() / state.champion.mean_time_ms();
        } else {
            champ["improvement_energy"] = json();
            champ["improvement_time"] = json();
        }
        doc["champion"] = std::move(champ);
    } else {
        doc["champion"] = json();
    }
    return doc;
}

CampaignSummary Explorer::run_baseline(bool resume) {
    prepare_journal(resume, "baseline");
    std::size_t kernels_with_base = 0;
    json kernels = json::array();
    for (const auto& kernel : plan_.kernels) {
        reference_for(kernel);
        KernelState state;
        state.kernel = &kernel;
        state.baselines = baseline_sweep(kernel);
        const BaselineCell* base = best_baseline(state.baselines);
        if (base) {
            state.best_base = base - state.baselines.data();
            ++kernels_with_base;
        }
        json doc = kernel_result(state);
        doc.erase("phases");
        doc.erase("champion");
        journal_.write_result("baselines-" + kernel.name, doc);
        kernels.push_back(std::move(doc));
    }
    CampaignSummary summary;
    summary.measured_cells = measured_;
    summary.reused_cells = reused_;
    summary.kernels_with_champion = kernels_with_base;
    summary.document = json{{"mode", "baseline"},
                            {"seed", plan_.seed},
                            {"kernels", std::move(kernels)},
                            {"measured_cells", measured_},
                            {"reused_cells", reused_}};
    journal_.write_result("summary", summary.document);
    if (kernels_with_base == 0)
        throw EmptySelectionError("no kernel produced a usable baseline measurement");
    return summary;
}

CampaignSummary Explorer::run_campaign(bool resume) {
    prepare_journal(resume, "explore");

    std::vector<KernelState> states;
    states.reserve(plan_.kernels.size());

    for (const auto& kernel : plan_.kernels) {
        KernelState state;
        state.kernel = &kernel;
        reference_for(kernel);
        state.baselines = baseline_sweep(kernel);
        if (const BaselineCell* base = best_baseline(state.baselines))
            state.best_base = base - state.baselines.data();

        if (kernel.openmp) {
            // Parallel candidates execute at the width the stock levels
            // liked best; without a usable parallel baseline there is no
            // anchor to compare against.
            const BaselineCell* best_omp = nullptr;
            for (const auto& cell : state.baselines) {
                if (!cell.openmp || !cell.rec.usable()) continue;
                if (!best_omp || strictly_better(cell.rec, best_omp->rec)) best_omp = &cell;
            }
            if (best_omp) state.omp_threads = best_omp->threads;
        }

        if (plan_.random_count > 0) {
            Arc4 rng(plan_.seed + "/random/" + kernel.name);
            const auto sequences =
                generate_random(catalog_, static_cast<std::size_t>(plan_.random_count),
                                static_cast<std::size_t>(plan_.sequence_length), rng);
            run_phase(state, sequences, "random");
        }
        states.push_back(std::move(state));
    }

    // The champions of the first phase seed the sequence model: each
    // kernel's model trains on every other kernel's best phase order.
    std::vector<SeedSequence> seeds;
    for (const auto& state : states)
        if (state.has_champion) seeds.push_back({state.kernel->name, state.champion_seq});

    if (plan_.model_count > 0) {
        for (auto& state : states) {
            const std::string& name = state.kernel->name;
            std::vector<SeedSequence> others;
            for (const auto& s : seeds)
                if (s.kernel != name) others.push_back(s);
            if (others.size() < 2) {
                log_ << "[" << name << "] skipping model phase: only " << others.size()
                     << " training kernels available\n";
                continue;
            }
            const bool self_seeded =
                others.size() != seeds.size(); // this kernel contributed a seed
            TransitionGraph graph = self_seeded
                                        ? TransitionGraph::leave_one_out(catalog_, seeds, name)
                                        : TransitionGraph::build(catalog_, others);
            journal_.write_model(name, graph.to_json());
            log_ << "[" << name << "] sequence model: " << graph.edge_kinds() << " edge kinds from "
                 << others.size() << " kernels\n";

            Arc4 rng(plan_.seed + "/model/" + name);
            const auto sequences = graph.sample(static_cast<std::size_t>(plan_.model_count),
                                                static_cast<std::size_t>(plan_.sequence_length),
                                                rng);
            run_phase(state, sequences, "model");
        }
    }

    std::size_t champions = 0;
    json kernel_docs = json::array();
    for (const auto& state : states) {
        json doc = kernel_result(state);
        journal_.write_result(state.kernel->name, doc);
        if (state.has_champion) {
            ++champions;
            const auto& champ = state.champion;
            log_ << "[" << state.kernel->name << "] champion " << champ.sequence_id << " "
                 << champ.exec_label() << ": " << g6(champ.mean_energy_j()) << " J";
            if (state.best_base >= 0) {
                const auto& base = state.baselines[static_cast<std::size_t>(state.best_base)];
                log_ << " (best stock " << base.level << " " << base.rec.exec_label() << " "
                     << g6(base.rec.mean_energy_j()) << " J, ratio "
                     << g6(base.rec.mean_energy_j() / champ.mean_energy_j()) << ")";
            }
            log_ << "\n";
        } else {
            log_ << "[" << state.kernel->name << "] no usable candidate survived\n";
        }
        kernel_docs.push_back(std::move(doc));
    }

    CampaignSummary summary;
    summary.measured_cells = measured_;
    summary.reused_cells = reused_;
    summary.kernels_with_champion = champions;
    summary.document = json{{"mode", "explore"},
                            {"seed", plan_.seed},
                            {"kernels", std::move(kernel_docs)},
                            {"measured_cells", measured_},
                            {"reused_cells", reused_}};
    journal_.write_result("summary", summary.document);

    if (champions == 0)
        throw EmptySelectionError("no kernel produced a usable candidate phase order");
    return summary;
}

} // namespace phasex
