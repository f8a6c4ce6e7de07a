#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "phasex/campaign_config.hpp"
#include "phasex/errors.hpp"

#include <json.hpp>

using namespace phasex;
using namespace phasex::test;
using nlohmann::json;

namespace {

/// Writes `doc` as config.json in `tmp` and loads it.
CampaignConfig load(const TempDir& tmp, const json& doc) {
    return load_campaign_config(write_campaign_config(tmp.path(), doc));
}

void expect_rejected(const TempDir& tmp, json doc) {
    CHECK_THROWS_AS(load(tmp, doc), ConfigError);
}

} // namespace

TEST_CASE("a full campaign config resolves") {
    TempDir tmp;
    const auto cfg = load(tmp, campaign_doc(tmp.path(), "cfg-test"));

    CHECK(cfg.plan.seed == "cfg-test");
    CHECK(cfg.catalog_path == fixture("catalog-small.txt"));
    CHECK(cfg.journal_dir == tmp / "journal");
    CHECK(cfg.scratch_dir == tmp / "scratch");
    CHECK(cfg.plan.lock_file == tmp / "measure.lock");
    REQUIRE(cfg.plan.kernels.size() == 3);
    CHECK(cfg.plan.kernels[0].name == "k1");
    CHECK_FALSE(cfg.plan.kernels[0].openmp);
    CHECK(cfg.plan.kernels[1].openmp);
    CHECK(cfg.plan.levels == std::vector<std::string>{"-O0", "-O1", "-O2", "-O3"});
    CHECK(cfg.plan.thread_set == std::vector<int>{1, 2, 4});
    CHECK(cfg.plan.random_count == 40);
    CHECK(cfg.plan.fraction == 0.05);
    CHECK(cfg.plan.reps == 3);
    CHECK(cfg.plan.run_timeout.count() == 10000);
    CHECK(cfg.provider.kind == ProviderKind::mock);
    CHECK(cfg.toolchain.tool_timeout.count() == 5000);
    CHECK(cfg.toolchain.openmp_flags == std::vector<std::string>{"--openmp"});
    CHECK(cfg.toolchain.cpu_flag.empty());

    // The resolved form is a complete, printable document.
    const auto dump = cfg.to_json();
    CHECK(dump["seed"] == "cfg-test");
    CHECK(dump["kernels"].size() == 3);
    CHECK(dump["provider"]["kind"] == "mock");
    CHECK(dump["toolchain"]["tool_timeout_ms"] == 5000);
}

TEST_CASE("relative paths anchor at the config file") {
    TempDir tmp;
    // A movable campaign directory: everything lives next to config.json.
    write_text(tmp / "cat.txt", "-fk-a\n-fk-b\n");
    write_text(tmp / "kern.fk", read_text(fixture("k1.fk")));
    write_text(tmp / "harn.fk", read_text(fixture("harness.fk")));
    write_text(tmp / "model.json", "{\"mode\": \"sidecar\"}");

    auto doc = campaign_doc(tmp.path(), "rel");
    doc["catalog"] = "cat.txt";
    doc["journal"] = "journal";
    doc.erase("scratch"); // defaults to <journal>/scratch
    doc["lock_file"] = "measure.lock";
    doc["kernels"] = json::array(
        {{{"name", "k"}, {"source", "kern.fk"}, {"harness", "harn.fk"}}});
    doc["provider"] = {{"kind", "mock"}, {"mock_model", "model.json"}};

    const auto cfg = load(tmp, doc);
    CHECK(cfg.catalog_path == tmp / "cat.txt");
    CHECK(cfg.journal_dir == tmp / "journal");
    CHECK(cfg.scratch_dir == tmp / "journal" / "scratch");
    CHECK(cfg.plan.lock_file == tmp / "measure.lock");
    CHECK(cfg.plan.kernels[0].source == tmp / "kern.fk");
    CHECK(cfg.provider.mock_model == tmp / "model.json");
}

TEST_CASE("unknown keys fail loudly") {
    TempDir tmp;
    auto doc = campaign_doc(tmp.path(), "unknown");

    auto top = doc;
    top["random_cuont"] = 40; // typo
    expect_rejected(tmp, top);

    auto prov = doc;
    prov["provider"]["modle"] = "x";
    expect_rejected(tmp, prov);

    auto tc = doc;
    tc["toolchain"]["optimizzer"] = json::array({"opt"});
    expect_rejected(tmp, tc);

    auto kern = doc;
    kern["kernels"][0]["sorce"] = "typo.fk";
    expect_rejected(tmp, kern);
}

TEST_CASE("required keys and files") {
    TempDir tmp;
    const auto doc = campaign_doc(tmp.path(), "required");

    for (const char* key : {"seed", "catalog", "journal", "kernels", "provider"}) {
        auto broken = doc;
        broken.erase(key);
        expect_rejected(tmp, broken);
    }

    auto empty_seed = doc;
    empty_seed["seed"] = "";
    expect_rejected(tmp, empty_seed);

    auto no_kernels = doc;
    no_kernels["kernels"] = json::array();
    expect_rejected(tmp, no_kernels);

    auto missing_source = doc;
    missing_source["kernels"][0]["source"] = (tmp / "ghost.fk").string();
    expect_rejected(tmp, missing_source);

    auto missing_catalog = doc;
    missing_catalog["catalog"] = (tmp / "ghost.txt").string();
    expect_rejected(tmp, missing_catalog);

    auto missing_model = doc;
    missing_model["provider"]["mock_model"] = (tmp / "ghost.json").string();
    expect_rejected(tmp, missing_model);

    expect_rejected(tmp, json::parse("{\"seed\": \"x\"}"));
    write_text(tmp / "config.json", "{oops");
    CHECK_THROWS_AS(load_campaign_config(tmp / "config.json"), ConfigError);
}

TEST_CASE("numeric ranges are enforced") {
    TempDir tmp;
    const auto doc = campaign_doc(tmp.path(), "ranges");

    const auto with = [&](const char* key, json value) {
        auto d = doc;
        d[key] = std::move(value);
        return d;
    };

    expect_rejected(tmp, with("fraction", 0.0));
    expect_rejected(tmp, with("fraction", 1.5));
    CHECK(load(tmp, with("fraction", 1.0)).plan.fraction == 1.0);
    expect_rejected(tmp, with("reps", 0));
    expect_rejected(tmp, with("screen_reps", -1));
    expect_rejected(tmp, with("sequence_length", 0));
    expect_rejected(tmp, with("random_count", -5));
    expect_rejected(tmp, with("run_timeout_ms", 0));
    expect_rejected(tmp, with("parallel_jobs", -1));
    expect_rejected(tmp, with("tolerance", 0.0));
    expect_rejected(tmp, with("levels", json::array()));
    expect_rejected(tmp, with("thread_set", json::array({4, 0})));

    auto tc = doc;
    tc["toolchain"]["tool_timeout_ms"] = 0;
    expect_rejected(tmp, tc);
}

TEST_CASE("toolchain profiles") {
    TempDir tmp;
    auto doc = campaign_doc(tmp.path(), "profiles");

    // Stock profile: templates come from the LLVM defaults, overrides land
    // on top.
    auto stock = doc;
    stock["toolchain"] = {{"profile", "llvm"}};
    auto cfg = load(tmp, stock);
    CHECK(cfg.toolchain.frontend.front() == "clang");
    CHECK(cfg.toolchain.optimizer.front() == "opt");
    CHECK(cfg.toolchain.backend.front() == "llc");
    CHECK(cfg.toolchain.cpu_flag == "-mcpu=native");
    CHECK(cfg.toolchain.openmp_flags == std::vector<std::string>{"-fopenmp"});

    auto overridden = doc;
    overridden["toolchain"] = {{"profile", "llvm"},
                               {"optimizer", {"opt-3.7", "{passes}", "{input}", "-o", "{output}"}},
                               {"cpu_flag", "-mcpu=cortex-a15"}};
    cfg = load(tmp, overridden);
    CHECK(cfg.toolchain.optimizer.front() == "opt-3.7");
    CHECK(cfg.toolchain.cpu_flag == "-mcpu=cortex-a15");
    CHECK(cfg.toolchain.frontend.front() == "clang"); // untouched default

    // Omitting the toolchain entirely means the stock profile.
    auto none = doc;
    none.erase("toolchain");
    CHECK(load(tmp, none).toolchain.optimizer.front() == "opt");

    // Custom profile must spell out all five stages.
    auto incomplete = doc;
    incomplete["toolchain"].erase("backend");
    expect_rejected(tmp, incomplete);

    auto bad_profile = doc;
    bad_profile["toolchain"]["profile"] = "gcc";
    expect_rejected(tmp, bad_profile);

    auto empty_stage = doc;
    empty_stage["toolchain"]["linker"] = json::array();
    expect_rejected(tmp, empty_stage);
}

TEST_CASE("provider variants") {
    TempDir tmp;
    auto doc = campaign_doc(tmp.path(), "providers");

    auto rapl = doc;
    rapl["provider"] = {{"kind", "rapl"}};
    auto cfg = load(tmp, rapl);
    CHECK(cfg.provider.kind == ProviderKind::rapl);
    CHECK(cfg.provider.rapl_root == "/sys/class/powercap");
    CHECK(cfg.provider.rapl_include_dram);
    CHECK_FALSE(cfg.provider.rapl_include_gpu);

    write_text(tmp / "arm.watts", "1.0\n");
    auto sensors = doc;
    sensors["provider"] = {{"kind", "sensor-files"},
                           {"sensor_files", {(tmp / "arm.watts").string()}}};
    cfg = load(tmp, sensors);
    CHECK(cfg.provider.kind == ProviderKind::sensor_files);
    CHECK(cfg.provider.sensor_period.count() == 263808); // board default

    auto tuned = sensors;
    tuned["provider"]["sensor_period_us"] = 50000;
    CHECK(load(tmp, tuned).provider.sensor_period.count() == 50000);

    auto no_files = doc;
    no_files["provider"] = {{"kind", "sensor-files"}, {"sensor_files", json::array()}};
    expect_rejected(tmp, no_files);

    auto bad_period = sensors;
    bad_period["provider"]["sensor_period_us"] = 0;
    expect_rejected(tmp, bad_period);

    auto bad_kind = doc;
    bad_kind["provider"]["kind"] = "crystal-ball";
    expect_rejected(tmp, bad_kind);

    auto mock_without_model = doc;
    mock_without_model["provider"].erase("mock_model");
    expect_rejected(tmp, mock_without_model);
}
