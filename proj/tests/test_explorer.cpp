#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "phasex/errors.hpp"
#include "phasex/explorer.hpp"
#include "phasex/transition_model.hpp"

#include <json.hpp>

#include <chrono>
#include <sstream>

using namespace phasex;
using namespace phasex::test;
using nlohmann::json;

namespace {

ExplorationPlan small_plan(const TempDir& tmp) {
    ExplorationPlan plan;
    plan.seed = "unit-explorer";
    plan.kernels = {{"k1", fixture("k1.fk"), fixture("harness.fk"), false},
                    {"k2", fixture("k2.fk"), fixture("harness.fk"), true},
                    {"k3", fixture("k3.fk"), fixture("harness.fk"), false}};
    plan.levels = {"-O0", "-O1", "-O2", "-O3"};
    plan.thread_set = {1, 2, 4};
    plan.random_count = 40;
    plan.model_count = 40;
    plan.sequence_length = 8;
    plan.fraction = 0.05;
    plan.reps = 2;
    plan.screen_reps = 1;
    plan.run_timeout = std::chrono::milliseconds{10000};
    plan.lock_file = tmp / "measure.lock";
    return plan;
}

/// Everything an Explorer needs, wired to the fake toolchain and the
/// deterministic meter.
struct Rig {
    explicit Rig(const TempDir& tmp, const std::string& journal_name = "journal")
        : catalog(PassCatalog::load(fixture("catalog-small.txt"))),
          driver(fake_toolchain(), tmp / "scratch"),
          journal(tmp / journal_name) {
        ProviderSpec spec;
        spec.kind = ProviderKind::mock;
        spec.mock_model = fixture("mock-sidecar.json");
        provider = make_provider(spec);
    }

    PassCatalog catalog;
    ToolchainDriver driver;
    Journal journal;
    std::unique_ptr<EnergyProvider> provider;
    std::ostringstream log;
};

} // namespace

TEST_CASE("degenerate plans are rejected up front") {
    TempDir tmp;
    Rig rig(tmp);

    auto no_kernels = small_plan(tmp);
    no_kernels.kernels.clear();
    CHECK_THROWS_AS(Explorer(no_kernels, rig.catalog, rig.driver, *rig.provider, rig.journal,
                             rig.log),
                    ConfigError);

    auto bad_fraction = small_plan(tmp);
    bad_fraction.fraction = 0.0;
    CHECK_THROWS_AS(Explorer(bad_fraction, rig.catalog, rig.driver, *rig.provider, rig.journal,
                             rig.log),
                    ConfigError);

    auto dup = small_plan(tmp);
    dup.kernels.push_back(dup.kernels.front());
    CHECK_THROWS_AS(Explorer(dup, rig.catalog, rig.driver, *rig.provider, rig.journal, rig.log),
                    ConfigError);
}

TEST_CASE("a full campaign explores, selects, and resumes") {
    TempDir tmp;
    const auto plan = small_plan(tmp);

    CampaignSummary first;
    {
        Rig rig(tmp);
        Explorer explorer(plan, rig.catalog, rig.driver, *rig.provider, rig.journal, rig.log);
        first = explorer.run_campaign(/*resume=*/false);
    }

    CHECK(first.measured_cells > 0);
    CHECK(first.kernels_with_champion == 3);
    CHECK(first.document["mode"] == "explore");
    CHECK(first.document["seed"] == "unit-explorer");

    Journal journal(tmp / "journal");
    CHECK(journal.read_result("summary").has_value());

    for (const std::string name : {"k1", "k2", "k3"}) {
        const auto doc = journal.read_result(name);
        REQUIRE(doc.has_value());
        CHECK((*doc)["baselines"].size() >= 4);
        CHECK_FALSE((*doc)["best_baseline"].is_null());
        CHECK_FALSE((*doc)["champion"].is_null());
        CHECK((*doc)["champion"]["improvement_energy"].get<double>() > 0.0);

        // Both generation phases ran, and every selection kept exactly the
        // configured share of the usable screened pool.
        const auto& phases = (*doc)["phases"];
        REQUIRE(phases.size() == 2);
        CHECK(phases[0]["origin"] == "random");
        CHECK(phases[1]["origin"] == "model");
        for (const auto& phase : phases) {
            CHECK(phase["generated"] == 40);
            for (const auto& variant : phase["variants"]) {
                const auto usable = variant["usable"].get<std::size_t>();
                const auto rescreened = variant["rescreened"].get<std::size_t>();
                CHECK(usable > 0);
                CHECK(rescreened == selection_count(usable, plan.fraction));
            }
        }

        // The parallel kernel screens two execution variants.
        const std::size_t variants = phases[0]["variants"].size();
        if (name == "k2") {
            REQUIRE(variants == 2);
            CHECK(phases[0]["variants"][0]["exec"] == "serial");
            const std::string omp_exec = phases[0]["variants"][1]["exec"];
            CHECK(omp_exec.rfind("omp", 0) == 0);
        } else {
            CHECK(variants == 1);
        }

        // The stored sequence model trains on the other kernels only.
        const auto model = journal.read_model(name);
        REQUIRE(model.has_value());
        const auto graph = TransitionGraph::from_json(*model);
        CHECK(graph.training_set().size() == 2);
        for (const auto& seed : graph.training_set()) CHECK(seed.kernel != name);
    }

    const std::string k1_doc = journal.read_result("k1")->dump();

    // Resuming replays the campaign out of the journal: nothing is measured
    // again and every document comes out identical.
    {
        Rig rig(tmp);
        Explorer explorer(plan, rig.catalog, rig.driver, *rig.provider, rig.journal, rig.log);
        const auto resumed = explorer.run_campaign(/*resume=*/true);
        CHECK(resumed.measured_cells == 0);
        CHECK(resumed.reused_cells == first.measured_cells + first.reused_cells);
        CHECK(resumed.kernels_with_champion == 3);
    }
    CHECK(Journal(tmp / "journal").read_result("k1")->dump() == k1_doc);
}

TEST_CASE("journal guards refuse mixing campaigns") {
    TempDir tmp;
    auto plan = small_plan(tmp);
    plan.random_count = 4;
    plan.model_count = 0;

    {
        Rig rig(tmp);
        Explorer explorer(plan, rig.catalog, rig.driver, *rig.provider, rig.journal, rig.log);
        explorer.run_campaign(false);
    }

    // Same journal without the resume flag: refused.
    {
        Rig rig(tmp);
        Explorer explorer(plan, rig.catalog, rig.driver, *rig.provider, rig.journal, rig.log);
        CHECK_THROWS_AS(explorer.run_campaign(false), ConfigError);
    }

    // Resume under a different identity: refused.
    {
        Rig rig(tmp);
        auto other = plan;
        other.seed = "something-else";
        Explorer explorer(other, rig.catalog, rig.driver, *rig.provider, rig.journal, rig.log);
        CHECK_THROWS_AS(explorer.run_campaign(true), ConfigError);
    }
}

TEST_CASE("model phase needs at least two training kernels") {
    TempDir tmp;
    auto plan = small_plan(tmp);
    plan.kernels.erase(plan.kernels.begin() + 1); // drop k2: two kernels left
    plan.random_count = 12;
    plan.model_count = 12;

    Rig rig(tmp);
    Explorer explorer(plan, rig.catalog, rig.driver, *rig.provider, rig.journal, rig.log);
    const auto summary = explorer.run_campaign(false);

    CHECK(summary.kernels_with_champion == 2);
    CHECK(rig.log.str().find("skipping model phase") != std::string::npos);
    for (const std::string name : {"k1", "k3"}) {
        const auto doc = rig.journal.read_result(name);
        REQUIRE(doc.has_value());
        CHECK((*doc)["phases"].size() == 1); // random only
        CHECK_FALSE(rig.journal.read_model(name).has_value());
    }
}

TEST_CASE("a catalog of poison passes selects nothing") {
    TempDir tmp;
    auto plan = small_plan(tmp);
    plan.random_count = 6;
    plan.model_count = 0;

    Rig rig(tmp);
    const auto poison =
        PassCatalog::from_names({"-fake-crash", "-fake-perturb"}, "poison");
    Explorer explorer(plan, poison, rig.driver, *rig.provider, rig.journal, rig.log);
    CHECK_THROWS_AS(explorer.run_campaign(false), EmptySelectionError);

    // The result documents still landed for post-mortem inspection.
    CHECK(rig.journal.read_result("summary").has_value());
    CHECK(rig.journal.read_result("k1")->at("champion").is_null());
}

TEST_CASE("baseline mode sweeps stock levels only") {
    TempDir tmp;
    const auto plan = small_plan(tmp);

    Rig rig(tmp);
    Explorer explorer(plan, rig.catalog, rig.driver, *rig.provider, rig.journal, rig.log);
    const auto summary = explorer.run_baseline(false);

    // k1 and k3 measure 4 serial cells each; k2 adds 3 thread widths per
    // level on top of serial.
    CHECK(summary.measured_cells == 24);
    CHECK(summary.kernels_with_champion == 3); // here: kernels with a usable baseline
    CHECK(summary.document["mode"] == "baseline");

    const auto doc = rig.journal.read_result("baselines-k2");
    REQUIRE(doc.has_value());
    CHECK((*doc)["baselines"].size() == 16);
    CHECK_FALSE(doc->contains("phases"));
    CHECK_FALSE(doc->contains("champion"));
    CHECK_FALSE((*doc)["best_baseline"].is_null());

    // A baseline journal is a campaign journal: replaying it is free.
    Rig again(tmp);
    Explorer second(plan, again.catalog, again.driver, *again.provider, again.journal,
                    again.log);
    CHECK(second.run_baseline(true).measured_cells == 0);
}
