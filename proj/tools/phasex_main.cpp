#include "phasex/campaign_config.hpp"
#include "phasex/errors.hpp"
#include "phasex/explorer.hpp"
#include "phasex/journal.hpp"
#include "phasex/pass_catalog.hpp"
#include "phasex/report.hpp"
#include "phasex/text_util.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <ostream>

namespace {

// Exit codes: 0 success, 1 configuration or usage, 2 toolchain setup,
// 3 energy provider, 4 campaign found nothing usable.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitToolchain = 2;
constexpr int kExitProvider = 3;
constexpr int kExitEmptySelection = 4;

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const phasex::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const phasex::ToolchainError& e) {
        std::cerr << "toolchain error: " << e.what() << "\n";
        return kExitToolchain;
    } catch (const phasex::ProviderError& e) {
        std::cerr << "provider error: " << e.what() << "\n";
        return kExitProvider;
    } catch (const phasex::EmptySelectionError& e) {
        std::cerr << "empty selection: " << e.what() << "\n";
        return kExitEmptySelection;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

struct Overrides {
    std::string seed;
    std::string journal;
    int random_count = -1;
    int model_count = -1;
    int reps = -1;
    int screen_reps = -1;
    double fraction = -1.0;
    int jobs = -1;
    bool keep_artifacts = false;
    bool keep_artifacts_set = false;
};

void add_override_options(CLI::App& cmd, Overrides& ov) {
    cmd.add_option("--seed", ov.seed, "Replace the campaign seed string");
    cmd.add_option("--journal", ov.journal, "Replace the journal directory");
    cmd.add_option("--random-count", ov.random_count, "Random phase orders per kernel")
        ->check(CLI::NonNegativeNumber);
    cmd.add_option("--model-count", ov.model_count, "Model-sampled phase orders per kernel")
        ->check(CLI::NonNegativeNumber);
    cmd.add_option("--reps", ov.reps, "Repetitions for baselines and rescreening")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--screen-reps", ov.screen_reps, "Repetitions for screening runs")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--fraction", ov.fraction, "Share of screened orders kept for rescreening")
        ->check(CLI::Range(1e-9, 1.0));
    cmd.add_option("--jobs", ov.jobs, "Parallel compile workers (0 = hardware)")
        ->check(CLI::NonNegativeNumber);
    cmd.add_flag_callback(
        "--keep-artifacts",
        [&ov] {
            ov.keep_artifacts = true;
            ov.keep_artifacts_set = true;
        },
        "Keep compiled binaries and stage logs in the scratch tree");
}

phasex::CampaignConfig load_with_overrides(const std::string& config_path, const Overrides& ov) {
    phasex::CampaignConfig cfg = phasex::load_campaign_config(config_path);
    if (!ov.seed.empty()) cfg.plan.seed = ov.seed;
    if (!ov.journal.empty()) cfg.journal_dir = ov.journal;
    if (ov.random_count >= 0) cfg.plan.random_count = ov.random_count;
    if (ov.model_count >= 0) cfg.plan.model_count = ov.model_count;
    if (ov.reps > 0) cfg.plan.reps = ov.reps;
    if (ov.screen_reps > 0) cfg.plan.screen_reps = ov.screen_reps;
    if (ov.fraction > 0.0) cfg.plan.fraction = ov.fraction;
    if (ov.jobs >= 0) cfg.plan.parallel_jobs = ov.jobs;
    if (ov.keep_artifacts_set) cfg.keep_artifacts = ov.keep_artifacts;
    return cfg;
}

/// Discards everything; used with --quiet.
class NullBuf final : public std::streambuf {
    int overflow(int c) override { return c; }
};

int run_campaign_command(const std::string& config_path, const Overrides& ov, bool resume,
                         bool quiet, bool baseline_only) {
    const phasex::CampaignConfig cfg = load_with_overrides(config_path, ov);
    std::cout << "resolved configuration:\n" << cfg.to_json().dump(2) << "\n";

    NullBuf null_buf;
    std::ostream null_stream(&null_buf);
    std::ostream& log = quiet ? null_stream : std::cout;

    phasex::PassCatalog catalog = phasex::PassCatalog::load(cfg.catalog_path);
    auto provider = phasex::make_provider(cfg.provider);
    phasex::ToolchainDriver driver(cfg.toolchain, cfg.scratch_dir, cfg.keep_artifacts);
    phasex::Journal journal(cfg.journal_dir);

    phasex::Explorer explorer(cfg.plan, std::move(catalog), driver, *provider, journal, log);
    const phasex::CampaignSummary summary =
        baseline_only ? explorer.run_baseline(resume) : explorer.run_campaign(resume);

    std::cout << (baseline_only ? "baseline sweep" : "campaign") << " complete: "
              << summary.measured_cells << " cells measured, " << summary.reused_cells
              << " reused from the journal, " << summary.kernels_with_champion << "/"
              << cfg.plan.kernels.size()
              << (baseline_only ? " kernels with a usable baseline" : " kernels with a champion")
              << "\n";
    std::cout << "results in " << (cfg.journal_dir / "results").string() << "\n";
    return kExitOk;
}

int run_probe_command(const std::string& config_path) {
    const phasex::CampaignConfig cfg = phasex::load_campaign_config(config_path);
    auto provider = phasex::make_provider(cfg.provider);
    const phasex::CapabilityReport rep = provider->probe();
    std::cout << "provider: " << to_string(rep.kind) << "\n";
    std::cout << "available: " << (rep.available ? "yes" : "no") << "\n";
    if (rep.update_period_us > 0)
        std::cout << "update period: " << rep.update_period_us << " us\n";
    if (rep.counter_resolution_uj > 0)
        std::cout << "counter resolution: " << phasex::fmt_double(rep.counter_resolution_uj)
                  << " uJ\n";
    for (const auto& d : rep.domains) {
        std::cout << "domain " << d.name << " at " << d.path << ": "
                  << (d.available ? "ok" : "unavailable");
        if (!d.detail.empty()) std::cout << " (" << d.detail << ")";
        std::cout << "\n";
    }
    if (!rep.notes.empty()) std::cout << "notes: " << rep.notes << "\n";
    if (!rep.available) {
        std::cerr << "provider error: provider is not usable on this machine\n";
        return kExitProvider;
    }
    return kExitOk;
}

int run_report_command(const std::string& journal_dir, const std::string& format,
                       const std::string& out_path) {
    phasex::Journal journal(journal_dir);
    if (journal.empty())
        throw phasex::ConfigError("journal at " + journal_dir + " holds no campaign data");
    const std::string text =
        phasex::make_report(journal, phasex::report_format_from_string(format));
    if (out_path.empty()) {
        std::cout << text;
    } else {
        phasex::write_text_file_atomic(out_path, text);
        std::cout << "report written to " << out_path << "\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-guided compiler phase-order exploration"};
    app.require_subcommand(1);

    std::string config_path;
    std::string journal_dir;
    std::string format = "table";
    std::string out_path;
    bool resume = false;
    bool quiet = false;
    Overrides ov;

    CLI::App* explore = app.add_subcommand(
        "explore", "Run the full campaign: baselines, random and model phases, selection");
    explore->add_option("--config", config_path, "Campaign config file")->required();
    explore->add_flag("--resume", resume, "Continue a campaign in a non-empty journal");
    explore->add_flag("--quiet", quiet, "Suppress per-cell progress output");
    add_override_options(*explore, ov);

    CLI::App* baseline =
        app.add_subcommand("baseline", "Measure only the stock optimization levels");
    baseline->add_option("--config", config_path, "Campaign config file")->required();
    baseline->add_flag("--resume", resume, "Continue a campaign in a non-empty journal");
    baseline->add_flag("--quiet", quiet, "Suppress per-cell progress output");
    add_override_options(*baseline, ov);

    CLI::App* report = app.add_subcommand("report", "Render reports from a campaign journal");
    report->add_option("--journal", journal_dir, "Journal directory")->required();
    report->add_option("--format", format, "table, records, or scatter");
    report->add_option("--out", out_path, "Write to this file instead of stdout");

    CLI::App* probe =
        app.add_subcommand("probe", "Check whether the configured energy provider works here");
    probe->add_option("--config", config_path, "Campaign config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return kExitConfig;
    }

    if (explore->parsed())
        return guarded([&] { return run_campaign_command(config_path, ov, resume, quiet, false); });
    if (baseline->parsed())
        return guarded([&] { return run_campaign_command(config_path, ov, resume, quiet, true); });
    if (report->parsed())
        return guarded([&] { return run_report_command(journal_dir, format, out_path); });
    if (probe->parsed()) return guarded([&] { return run_probe_command(config_path); });
    return kExitConfig;
}
