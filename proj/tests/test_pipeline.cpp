#include "tspec/error.hpp"
#include "tspec/pipeline.hpp"
#include "tspec/textio.hpp"

#include <doctest.h>

#include <filesystem>
#include <set>

using namespace tspec;
namespace fs = std::filesystem;

namespace {

SyntheticScenario small_scenario()
{
    SyntheticScenario sc;
    sc.duration = 420;
    sc.feature_count = 3;
    sc.missing_rate = 0.05;
    sc.attacks.push_back({"burst", AttackPattern::Burst, 60, 60, 1, {5.0, 0.0, 2.5}});
    sc.attacks.push_back({"pulse", AttackPattern::Periodic, 220, 120, 3, {0.0, 5.0, 2.5}});
    return sc;
}

RunConfig small_config(const std::string& name)
{
    RunConfig cfg;
    cfg.scenario = small_scenario();
    cfg.window = 10;
    cfg.families = {"glm"};
    cfg.ratios = {0.0, 1.0};
    cfg.bins = 20;
    cfg.seed = 3;
    cfg.out = fs::temp_directory_path() / ("tspec_pipeline_" + name);
    fs::remove_all(cfg.out);
    return cfg;
}

fs::path source_dir()
{
    return TSPEC_SOURCE_DIR;
}

}  // namespace

TEST_CASE("config defaults, validation and merging")
{
    RunConfig cfg;
    CHECK(cfg.window == 30);
    CHECK(cfg.ratios.size() == 11);
    CHECK_NOTHROW(cfg.validate());

    RunConfig bad = cfg;
    bad.d_model = 7;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.test_fraction = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    cfg.merge_json({{"window", 60}, {"methods", {"sspe"}}, {"input", "flows.csv"}}, "/data");
    CHECK(cfg.window == 60);
    CHECK(cfg.methods == std::vector<LabelMethod>{LabelMethod::Sspe});
    CHECK(cfg.input == fs::path("/data/flows.csv"));
    CHECK(cfg.stride == 1);

    const auto shipped = RunConfig::load(source_dir() / "config/synthetic_run.json");
    REQUIRE(shipped.scenario);
    CHECK(shipped.scenario->attacks.size() == 3);
    CHECK(shipped.d_model == 8);
}

TEST_CASE("shipped tables load")
{
    const auto grid = load_encoding_grid(source_dir() / "config/encoding_grid.json");
    CHECK(grid.d_models.size() == 9);
    CHECK(grid.windows == std::vector<std::size_t>{10, 20, 30, 40, 50, 60});

    const auto profiles = load_attack_profiles(source_dir() / "config/edge_iiotset.json");
    REQUIRE(profiles.size() == 14);
    for (const auto& p : profiles) {
        if (p.name == "Port Scanning")
            CHECK(p.feature_count == 37);
        if (p.name == "DDoS UDP")
            CHECK(p.feature_count == 9);
    }
}

TEST_CASE("family resolution and detection threshold")
{
    CHECK(resolve_family("glm", Task::Classify) == ModelFamily::GlmBinomial);
    CHECK(resolve_family("glm", Task::Regress) == ModelFamily::GlmGaussian);
    CHECK(resolve_family("rf", Task::Regress) == ModelFamily::RandomForest);

    const std::vector<double> labels{0, 0, 0, 0, 0, 3, 4, 5, 6, 9};
    const auto th = detection_threshold(labels, 0.2, ThresholdMode::RankDefault);
    CHECK(th.n1 == 2);
    CHECK(th.tau == 6.0);
}

TEST_CASE("window table segments follow attack runs")
{
    const auto tl = generate_synthetic(small_scenario(), 1);
    const auto table = build_window_table(tl, 10, 1, 8);
    CHECK(table.features.cols() == 30);
    CHECK(table.features.rows() == tl.size() - 9);
    int max_segment = -1;
    for (std::size_t i = 0; i < table.coap.size(); ++i) {
        CHECK((table.coap[i] > 0) == (table.baseline_any[i] == 1));
        CHECK((table.segment[i] >= 0) == !table.attack[i].empty());
        max_segment = std::max(max_segment, table.segment[i]);
    }
    CHECK(max_segment == 1);
}

TEST_CASE("build-dataset writes deterministic artifacts")
{
    auto a = small_config("build_a");
    auto b = small_config("build_b");
    cmd_build_dataset(a);
    cmd_build_dataset(b);
    const ArtifactPaths pa{a.out}, pb{b.out};
    for (auto m : {LabelMethod::Baseline, LabelMethod::Coap, LabelMethod::Sspe}) {
        CHECK(textio::read_file(pa.train_csv(m)) == textio::read_file(pb.train_csv(m)));
        CHECK(textio::read_file(pa.test_csv(m)) == textio::read_file(pb.test_csv(m)));
    }
    const auto side = nlohmann::json::parse(textio::read_file(pa.sidecar(LabelMethod::Sspe)));
    CHECK(side["provenance"]["method"] == "sspe");
    CHECK(side["provenance"]["d_model"] == 8);
    const auto header = textio::read_file(pa.train_csv(LabelMethod::Sspe)).substr(0, 200);
    CHECK(header.find("f29,spectrum_label") != std::string::npos);
    CHECK(fs::exists(pa.signatures(LabelMethod::Coap)));
    CHECK_FALSE(fs::exists(pa.signatures(LabelMethod::Baseline)));
    CHECK_FALSE(fs::exists(a.out / ".tspec.lock"));
    fs::remove_all(a.out);
    fs::remove_all(b.out);
}

TEST_CASE("window longer than the timeline is a data error")
{
    auto cfg = small_config("too_long");
    cfg.window = 1000;
    CHECK_THROWS_AS(cmd_build_dataset(cfg), DataError);
    fs::remove_all(cfg.out);
}

TEST_CASE("train, sweep and identify")
{
    auto cfg = small_config("full");
    cmd_build_dataset(cfg);

    auto bad = cfg;
    bad.families = {"glm_binomial"};
    bad.tasks = {"identify"};
    CHECK_THROWS_AS(cmd_train(bad), ConfigError);

    auto detect_only = cfg;
    detect_only.families = {"glm_binomial", "random_forest"};
    detect_only.tasks = {"detect"};
    detect_only.methods = {LabelMethod::Sspe};
    cmd_train(detect_only);
    const ArtifactPaths paths{cfg.out};
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(paths.models()))
        files += e.is_regular_file();
    CHECK(files == 2);
    fs::remove_all(paths.models());

    cmd_train(cfg);
    const auto report = cmd_sweep(cfg);
    std::set<double> ratios;
    for (const auto& r : report.rows)
        ratios.insert(r.noise_ratio);
    CHECK(ratios == std::set<double>{0.0, 1.0});
    CHECK(fs::exists(paths.report() / "report.json"));
    CHECK(fs::exists(paths.report() / "hist_sspe.csv"));

    const auto id = cmd_identify(cfg);
    CHECK(fs::exists(paths.identification()));
    CHECK(id == cmd_identify(cfg));

    // Signatures taken from the test segments themselves identify every segment.
    const auto side = nlohmann::json::parse(textio::read_file(paths.sidecar(LabelMethod::Coap)));
    const auto test = read_dataset_csv(paths.test_csv(LabelMethod::Coap), Provenance::from_json(side["provenance"]));
    const auto own = build_signatures(test, cfg.bins);
    for (const auto& seg : group_segments(test)) {
        std::vector<double> values;
        for (auto r : seg.rows)
            values.push_back(test.spectrum_labels[r]);
        CHECK(identify_attack(values, own).predicted_attack == seg.attack);
    }

    auto empty = cfg;
    empty.registry = cfg.out / "empty_registry.json";
    textio::write_file(*empty.registry, "[]");
    CHECK_THROWS_AS(cmd_identify(empty), DataError);
    fs::remove_all(cfg.out);
}

TEST_CASE("sweep without trained models is a data error")
{
    auto cfg = small_config("untrained");
    CHECK_THROWS_AS(cmd_sweep(cfg), DataError);
    fs::remove_all(cfg.out);
}

TEST_CASE("a held lock blocks a second run")
{
    auto cfg = small_config("locked");
    OutputLock held(cfg.out);
    CHECK_THROWS_AS(cmd_build_dataset(cfg), std::runtime_error);
}

TEST_CASE("csv input with a schema and feature list")
{
    auto cfg = small_config("csv_in");
    cmd_synth(cfg);
    const fs::path feats = cfg.out / "features.json";
    textio::write_file(feats, R"({"features": ["f2", "f0"]})");
    cfg.input = cfg.out / "synthetic.csv";
    cfg.schema = cfg.out / "synthetic_schema.json";
    cfg.feature_list = feats;
    const auto tl = load_timeline(cfg);
    CHECK(tl.feature_names == std::vector<std::string>{"f2", "f0"});
    CHECK(tl.missing_seconds() == 0);
    cfg.scenario.reset();
    cmd_build_dataset(cfg);
    const auto side = nlohmann::json::parse(textio::read_file(ArtifactPaths{cfg.out}.sidecar(LabelMethod::Coap)));
    CHECK(side["feature_names"] == nlohmann::json{"f2", "f0"});
    fs::remove_all(cfg.out);
}

TEST_CASE("grid command writes ranked candidates")
{
    auto cfg = small_config("grid");
    const std::vector<std::size_t> windows{10, 20};
    const std::vector<int> dims{2, 8};
    const auto scores = cmd_grid(cfg, windows, dims);
    CHECK(scores.size() == 4);
    CHECK(fs::exists(cfg.out / "grid.json"));
    fs::remove_all(cfg.out);
}
