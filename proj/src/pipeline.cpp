#include "tspec/pipeline.hpp"

#include "tspec/error.hpp"
#include "tspec/rng.hpp"
#include "tspec/textio.hpp"
#include "tspec/windowing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace fs = std::filesystem;

namespace tspec {

namespace {

nlohmann::json parse_json_file(const fs::path& path, const char* what)
{
    if (!fs::exists(path))
        throw ConfigError(std::string(what) + ": no such file " + path.string());
    try {
        return nlohmann::json::parse(textio::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string(what) + " " + path.string() + ": " + e.what());
    }
}

std::string_view to_string(BaselineRule r)
{
    return r == BaselineRule::Any ? "any" : "majority";
}

BaselineRule parse_baseline_rule(const std::string& s)
{
    if (s == "any") return BaselineRule::Any;
    if (s == "majority") return BaselineRule::Majority;
    throw ConfigError("baseline_rule must be 'any' or 'majority'");
}

Task task_of(const std::string& name)
{
    if (name == "detect") return Task::Classify;
    if (name == "identify") return Task::Regress;
    throw ConfigError("unknown task '" + name + "' (expected detect or identify)");
}

std::string task_name(Task t)
{
    return t == Task::Classify ? "detect" : "identify";
}

nlohmann::json read_sidecar(const ArtifactPaths& paths, LabelMethod m)
{
    const auto p = paths.sidecar(m);
    if (!fs::exists(p))
        throw DataError("missing dataset sidecar " + p.string() + " (run build-dataset first)");
    try {
        return nlohmann::json::parse(textio::read_file(p));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("dataset sidecar " + p.string() + ": " + e.what());
    }
}

Dataset read_split(const ArtifactPaths& paths, LabelMethod m, bool train, const nlohmann::json& sidecar)
{
    const auto prov = Provenance::from_json(sidecar.at("provenance"));
    Dataset ds = read_dataset_csv(train ? paths.train_csv(m) : paths.test_csv(m), prov);
    ds.validate();
    return ds;
}

}  // namespace

void RunConfig::validate() const
{
    if (window < 1)
        throw ConfigError("window must be >= 1");
    if (stride < 1)
        throw ConfigError("stride must be >= 1");
    (void)EncodingConfig(d_model);
    if (methods.empty())
        throw ConfigError("no label methods selected");
    if (families.empty())
        throw ConfigError("no model families selected");
    for (const auto& t : tasks)
        task_of(t);
    for (double r : ratios)
        if (!(r >= 0.0 && r <= 1.0))
            throw ConfigError("noise ratios must lie in [0, 1]");
    if (!(noise_scale > 0.0))
        throw ConfigError("noise scale must be positive");
    if (!(train_noise_ratio >= 0.0 && train_noise_ratio <= 1.0))
        throw ConfigError("train noise ratio must lie in [0, 1]");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ConfigError("test fraction must lie in (0, 1)");
    if (bins < 2)
        throw ConfigError("bins must be >= 2");
    if (input && !fs::exists(*input))
        throw ConfigError("input file does not exist: " + input->string());
    if (input && !schema)
        throw ConfigError("an input CSV needs a schema file");
    if (schema && !fs::exists(*schema))
        throw ConfigError("schema file does not exist: " + schema->string());
    if (feature_list && !fs::exists(*feature_list))
        throw ConfigError("feature list does not exist: " + feature_list->string());
    if (registry && !fs::exists(*registry))
        throw ConfigError("signature registry does not exist: " + registry->string());
}

nlohmann::json RunConfig::to_json() const
{
    nlohmann::json j;
    auto opt_path = [](const std::optional<fs::path>& p) {
        return p ? nlohmann::json(p->generic_string()) : nlohmann::json(nullptr);
    };
    j["input"] = opt_path(input);
    j["schema"] = opt_path(schema);
    j["scenario"] = scenario ? scenario->to_json() : nlohmann::json(nullptr);
    j["feature_list"] = opt_path(feature_list);
    j["window"] = window;
    j["stride"] = stride;
    std::vector<std::string> m;
    for (auto x : methods)
        m.emplace_back(tspec::to_string(x));
    j["methods"] = m;
    j["d_model"] = d_model;
    j["threshold_mode"] = std::string(tspec::to_string(threshold_mode));
    j["baseline_rule"] = std::string(to_string(baseline_rule));
    j["families"] = families;
    j["tasks"] = tasks;
    j["ratios"] = ratios;
    j["noise_scale"] = noise_scale;
    j["train_noise_ratio"] = train_noise_ratio;
    j["test_fraction"] = test_fraction;
    j["stratify"] = stratify;
    j["downsample"] = downsample ? nlohmann::json(*downsample) : nlohmann::json(nullptr);
    j["bins"] = bins;
    j["signatures_include_normal"] = signatures_include_normal;
    j["registry"] = opt_path(registry);
    j["seed"] = seed;
    j["out"] = out.generic_string();
    return j;
}

void RunConfig::merge_json(const nlohmann::json& j, const fs::path& base_dir)
{
    auto path_of = [&](const nlohmann::json& v) -> std::optional<fs::path> {
        if (v.is_null())
            return std::nullopt;
        fs::path p = v.get<std::string>();
        if (p.is_relative() && !base_dir.empty())
            p = base_dir / p;
        return p;
    };
    try {
        if (!j.is_object())
            throw ConfigError("config: expected a JSON object");
        if (j.contains("input")) input = path_of(j["input"]);
        if (j.contains("schema")) schema = path_of(j["schema"]);
        if (j.contains("feature_list")) feature_list = path_of(j["feature_list"]);
        if (j.contains("registry")) registry = path_of(j["registry"]);
        if (j.contains("scenario")) {
            const auto& s = j["scenario"];
            if (s.is_null())
                scenario.reset();
            else if (s.is_string())
                scenario = SyntheticScenario::from_json(parse_json_file(*path_of(s), "scenario"));
            else
                scenario = SyntheticScenario::from_json(s);
        }
        if (j.contains("window")) window = j["window"].get<std::size_t>();
        if (j.contains("stride")) stride = j["stride"].get<std::size_t>();
        if (j.contains("methods")) {
            methods.clear();
            for (const auto& m : j["methods"])
                methods.push_back(parse_label_method(m.get<std::string>()));
        }
        if (j.contains("d_model")) d_model = j["d_model"].get<int>();
        if (j.contains("threshold_mode"))
            threshold_mode = parse_threshold_mode(j["threshold_mode"].get<std::string>());
        if (j.contains("baseline_rule")) baseline_rule = parse_baseline_rule(j["baseline_rule"].get<std::string>());
        if (j.contains("families")) families = j["families"].get<std::vector<std::string>>();
        if (j.contains("tasks")) tasks = j["tasks"].get<std::vector<std::string>>();
        if (j.contains("ratios")) ratios = j["ratios"].get<std::vector<double>>();
        if (j.contains("noise_scale")) noise_scale = j["noise_scale"].get<double>();
        if (j.contains("train_noise_ratio")) train_noise_ratio = j["train_noise_ratio"].get<double>();
        if (j.contains("test_fraction")) test_fraction = j["test_fraction"].get<double>();
        if (j.contains("stratify")) stratify = j["stratify"].get<bool>();
        if (j.contains("downsample")) {
            if (j["downsample"].is_null())
                downsample.reset();
            else
                downsample = j["downsample"].get<double>();
        }
        if (j.contains("bins")) bins = j["bins"].get<std::size_t>();
        if (j.contains("signatures_include_normal"))
            signatures_include_normal = j["signatures_include_normal"].get<bool>();
        if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
        if (j.contains("out")) out = *path_of(j["out"]);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

RunConfig RunConfig::load(const fs::path& path)
{
    RunConfig cfg;
    cfg.merge_json(parse_json_file(path, "config"), path.parent_path());
    return cfg;
}

fs::path ArtifactPaths::train_csv(LabelMethod m) const
{
    return datasets() / (std::string(to_string(m)) + "_train.csv");
}

fs::path ArtifactPaths::test_csv(LabelMethod m) const
{
    return datasets() / (std::string(to_string(m)) + "_test.csv");
}

fs::path ArtifactPaths::sidecar(LabelMethod m) const
{
    return datasets() / (std::string(to_string(m)) + ".json");
}

fs::path ArtifactPaths::signatures(LabelMethod m) const
{
    return datasets() / (std::string(to_string(m)) + "_signatures.json");
}

fs::path ArtifactPaths::model(LabelMethod m, ModelFamily f, Task t) const
{
    return models() / (std::string(to_string(m)) + "_" + std::string(to_string(f)) + "_" + task_name(t) + ".json");
}

PacketTimeline load_timeline(const RunConfig& cfg)
{
    PacketTimeline tl;
    if (cfg.input) {
        tl = parse_flow_csv(*cfg.input, load_schema(*cfg.schema));
    } else if (cfg.scenario) {
        tl = generate_synthetic(*cfg.scenario, derive_seed(cfg.seed, "synthetic"));
    } else {
        throw ConfigError("no input: give --input with --schema, or a synthetic scenario");
    }
    if (tl.records.empty())
        throw DataError("ingest: timeline is empty");
    tl = fill_missing_points(tl, derive_seed(cfg.seed, "fill"));
    if (cfg.feature_list) {
        const auto names = load_feature_list(*cfg.feature_list);
        tl = select_features(tl, names);
    } else {
        const auto keep = non_constant_features(tl);
        if (keep.empty())
            throw DataError("ingest: every feature is constant");
        if (keep.size() != tl.feature_count())
            tl = select_features(tl, keep);
    }
    return tl;
}

WindowTable build_window_table(const PacketTimeline& timeline, std::size_t window, std::size_t stride, int d_model)
{
    const auto windows = make_windows(timeline, window, stride);
    const SspeTable table(window, EncodingConfig(d_model));
    WindowTable t;
    t.features = Matrix(0, window * timeline.feature_count());
    int segment = -1;
    std::string previous;
    for (const auto& w : windows) {
        t.features.append_row(flatten(w));
        const double count = coap(w.labels).value;
        t.coap.push_back(count);
        t.sspe.push_back(table(w.labels));
        t.baseline_any.push_back(count > 0.0 ? 1 : 0);
        t.baseline_majority.push_back(count > static_cast<double>(window) / 2.0 ? 1 : 0);
        const int dominant = w.dominant_attack();
        std::string name;
        if (count > 0.0)
            name = dominant >= 0 ? timeline.attack_names[static_cast<std::size_t>(dominant)] : "attack";
        if (name.empty()) {
            t.segment.push_back(-1);
        } else {
            if (name != previous)
                ++segment;
            t.segment.push_back(segment);
        }
        t.attack.push_back(name);
        previous = name;
    }
    return t;
}

std::vector<BuiltDataset> build_datasets(const RunConfig& cfg, const PacketTimeline& timeline)
{
    const WindowTable table = build_window_table(timeline, cfg.window, cfg.stride, cfg.d_model);
    std::vector<BuiltDataset> out;
    for (LabelMethod method : cfg.methods) {
        Dataset full;
        full.features = table.features;
        full.binary_labels = table.baseline_any;
        full.row_attack = table.attack;
        full.row_segment = table.segment;
        full.provenance = {cfg.window, cfg.stride, method, std::nullopt};
        switch (method) {
        case LabelMethod::Baseline: {
            const auto& bits = cfg.baseline_rule == BaselineRule::Any ? table.baseline_any : table.baseline_majority;
            full.spectrum_labels.assign(bits.begin(), bits.end());
            break;
        }
        case LabelMethod::Coap: full.spectrum_labels = table.coap; break;
        case LabelMethod::Sspe:
            full.spectrum_labels = table.sspe;
            full.provenance.d_model = cfg.d_model;
            break;
        }

        // The split depends only on the row count and binary labels, so every
        // method gets the same partition.
        auto [train, test] = split_dataset(full, cfg.test_fraction, derive_seed(cfg.seed, "split"), cfg.stratify);
        if (cfg.downsample)
            train = downsample_majority(train, *cfg.downsample, derive_seed(cfg.seed, "downsample"));

        BuiltDataset built;
        built.zscore = zscore_fit(train.features);
        train.features = zscore_apply(train.features, built.zscore);
        test.features = zscore_apply(test.features, built.zscore);
        built.train = std::move(train);
        built.test = std::move(test);
        built.attack_fraction = timeline.attack_fraction();
        built.feature_names = timeline.feature_names;
        out.push_back(std::move(built));
    }
    return out;
}

ThresholdSpec detection_threshold(std::span<const double> spectrum_labels, double attack_fraction,
                                  ThresholdMode mode)
{
    const auto n = spectrum_labels.size();
    auto n1 = static_cast<std::size_t>(std::llround(attack_fraction * static_cast<double>(n)));
    n1 = std::min(n1, n);
    return compute_threshold(spectrum_labels, n1, mode);
}

ModelFamily resolve_family(const std::string& name, Task task)
{
    ModelFamily f;
    if (name == "glm")
        f = task == Task::Classify ? ModelFamily::GlmBinomial : ModelFamily::GlmGaussian;
    else
        f = parse_model_family(name);
    ModelSpec::make(f, task);
    return f;
}

OutputLock::OutputLock(const fs::path& dir)
{
    fs::create_directories(dir);
    path_ = dir / ".tspec.lock";
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    if (!f)
        throw std::runtime_error("output directory " + dir.string() + " is locked by another run (" +
                                 path_.string() + ")");
    std::fclose(f);
}

OutputLock::~OutputLock()
{
    std::error_code ec;
    fs::remove(path_, ec);
}

void cmd_synth(const RunConfig& cfg)
{
    if (!cfg.scenario)
        throw ConfigError("synth: no scenario configured");
    OutputLock lock(cfg.out);
    const auto tl = generate_synthetic(*cfg.scenario, derive_seed(cfg.seed, "synthetic"));
    textio::write_file(cfg.out / "synthetic.csv", format_flow_csv(tl));
    textio::write_file(cfg.out / "synthetic_schema.json", flow_schema_for(tl).to_json().dump(1) + "\n");
}

void cmd_build_dataset(const RunConfig& cfg)
{
    cfg.validate();
    OutputLock lock(cfg.out);
    const ArtifactPaths paths{cfg.out};
    const auto timeline = load_timeline(cfg);
    const auto built = build_datasets(cfg, timeline);
    fs::create_directories(paths.datasets());

    for (const auto& b : built) {
        const LabelMethod m = b.train.provenance.method;
        write_dataset_csv(b.train, paths.train_csv(m));
        write_dataset_csv(b.test, paths.test_csv(m));

        nlohmann::json side;
        side["format"] = "tspec-dataset";
        side["version"] = 1;
        side["provenance"] = b.train.provenance.to_json();
        side["threshold_mode"] = std::string(to_string(cfg.threshold_mode));
        side["baseline_rule"] = std::string(to_string(cfg.baseline_rule));
        side["attack_fraction"] = b.attack_fraction;
        side["feature_names"] = b.feature_names;
        side["zscore"] = b.zscore.to_json();
        side["rows"] = {{"train", b.train.size()}, {"test", b.test.size()}};
        side["timeline"] = {{"records", timeline.size()}, {"attack_names", timeline.attack_names}};
        side["source"] = cfg.input ? nlohmann::json(cfg.input->generic_string()) : nlohmann::json("synthetic");
        side["seeds"] = {{"base", cfg.seed},
                         {"synthetic", derive_seed(cfg.seed, "synthetic")},
                         {"fill", derive_seed(cfg.seed, "fill")},
                         {"split", derive_seed(cfg.seed, "split")},
                         {"downsample", derive_seed(cfg.seed, "downsample")}};
        textio::write_file(paths.sidecar(m), side.dump(1) + "\n");

        if (m != LabelMethod::Baseline) {
            const auto sigs = build_signatures(b.train, cfg.bins, cfg.signatures_include_normal);
            save_registry(sigs, paths.signatures(m));
        }
    }
}

void cmd_train(const RunConfig& cfg)
{
    cfg.validate();
    OutputLock lock(cfg.out);
    const ArtifactPaths paths{cfg.out};
    fs::create_directories(paths.models());

    // Resolve every (family, task) pair up front so a bad combination fails
    // before any model is written.
    std::vector<std::pair<ModelFamily, Task>> jobs;
    for (const auto& t : cfg.tasks)
        for (const auto& f : cfg.families)
            jobs.emplace_back(resolve_family(f, task_of(t)), task_of(t));

    for (LabelMethod method : cfg.methods) {
        const auto side = read_sidecar(paths, method);
        Dataset train_set = read_split(paths, method, true, side);
        if (cfg.train_noise_ratio > 0.0)
            train_set = inject_noise(train_set, {cfg.train_noise_ratio, cfg.noise_scale, derive_seed(cfg.seed, "train-noise")});
        const double attack_fraction = side.at("attack_fraction").get<double>();

        for (const auto& [family, task] : jobs) {
            if (task == Task::Regress && method == LabelMethod::Baseline)
                continue;  // baseline windows carry no spectrum to regress on
            nlohmann::json meta;
            meta["method"] = std::string(to_string(method));
            meta["task"] = task_name(task);
            std::vector<double> y;
            if (task == Task::Classify) {
                std::vector<std::uint8_t> bits;
                if (method == LabelMethod::Baseline) {
                    for (double v : train_set.spectrum_labels)
                        bits.push_back(v >= 0.5 ? 1 : 0);
                } else {
                    const auto th = detection_threshold(train_set.spectrum_labels, attack_fraction, cfg.threshold_mode);
                    bits = binarize(train_set.spectrum_labels, th);
                    meta["threshold"] = {{"tau", th.tau},
                                         {"mode", std::string(to_string(th.mode))},
                                         {"n1", th.n1},
                                         {"n", th.n}};
                }
                y.assign(bits.begin(), bits.end());
                const auto positives = static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1));
                if (positives == 0 || positives == bits.size())
                    throw DataError("train: " + std::string(to_string(method)) +
                                    " detection labels are all one class");
            } else {
                y = train_set.spectrum_labels;
            }
            const std::string name = std::string(to_string(method)) + ":" + std::string(to_string(family)) + ":" +
                                     task_name(task);
            const ModelSpec spec = ModelSpec::make(family, task, derive_seed(cfg.seed, "model:" + name));
            TrainedModel model = train(spec, train_set.features, y);
            model.metadata = std::move(meta);
            save_model(model, paths.model(method, family, task));
        }
    }
}

namespace {

std::vector<std::uint8_t> detection_truth(const Dataset& test, LabelMethod method, const TrainedModel& model)
{
    if (method == LabelMethod::Baseline) {
        std::vector<std::uint8_t> bits;
        for (double v : test.spectrum_labels)
            bits.push_back(v >= 0.5 ? 1 : 0);
        return bits;
    }
    if (!model.metadata.contains("threshold"))
        throw DataError("model for " + std::string(to_string(method)) + " carries no binarization threshold");
    const auto& th = model.metadata.at("threshold");
    ThresholdSpec spec;
    spec.tau = th.at("tau").get<double>();
    spec.mode = parse_threshold_mode(th.at("mode").get<std::string>());
    spec.n1 = th.at("n1").get<std::size_t>();
    spec.n = th.at("n").get<std::size_t>();
    return binarize(test.spectrum_labels, spec);
}

struct LoadedMethod {
    LabelMethod method;
    Dataset test;
    std::vector<SpectrumSignature> signatures;
};

std::vector<SpectrumSignature> signatures_for(const RunConfig& cfg, const ArtifactPaths& paths, LabelMethod m)
{
    if (cfg.registry)
        return load_registry(*cfg.registry);
    return load_registry(paths.signatures(m));
}

}  // namespace

EvalReport cmd_sweep(const RunConfig& cfg)
{
    cfg.validate();
    OutputLock lock(cfg.out);
    const ArtifactPaths paths{cfg.out};

    std::vector<std::pair<ModelFamily, Task>> jobs;
    for (const auto& t : cfg.tasks)
        for (const auto& f : cfg.families)
            jobs.emplace_back(resolve_family(f, task_of(t)), task_of(t));

    // Cells point into `loaded`, so it must not reallocate after this.
    std::vector<LoadedMethod> loaded;
    loaded.reserve(cfg.methods.size());
    for (LabelMethod m : cfg.methods) {
        const auto side = read_sidecar(paths, m);
        LoadedMethod lm{m, read_split(paths, m, false, side), {}};
        const bool wants_identify =
            m != LabelMethod::Baseline &&
            std::any_of(jobs.begin(), jobs.end(), [](const auto& j) { return j.second == Task::Regress; });
        if (wants_identify)
            lm.signatures = signatures_for(cfg, paths, m);
        loaded.push_back(std::move(lm));
    }

    SweepPlan plan;
    std::vector<std::string> families_run;
    for (const auto& lm : loaded) {
        for (const auto& [family, task] : jobs) {
            if (task == Task::Regress && lm.method == LabelMethod::Baseline)
                continue;
            const auto path = paths.model(lm.method, family, task);
            if (!fs::exists(path))
                throw DataError("missing model " + path.string() + " (run train first)");
            TrainedModel model = load_model(path);
            if (task == Task::Classify) {
                DetectorCell cell{lm.method, std::move(model), &lm.test, {}};
                cell.truth = detection_truth(lm.test, lm.method, cell.model);
                plan.detectors.push_back(std::move(cell));
            } else {
                plan.identifiers.push_back({lm.method, std::move(model), &lm.test, lm.signatures});
            }
            const std::string fam(to_string(family));
            if (std::find(families_run.begin(), families_run.end(), fam) == families_run.end())
                families_run.push_back(fam);
        }
    }
    plan.noise = noise_grid(cfg.ratios, cfg.noise_scale, derive_seed(cfg.seed, "noise"));
    plan.config = cfg.to_json();
    // The output location is not a run parameter; leaving it out lets two
    // directories built from one config hold identical reports.
    plan.config.erase("out");
    plan.config["families_run"] = families_run;

    EvalReport report = run_noise_sweep(plan);
    std::map<LabelMethod, std::vector<SpectrumSignature>> hist;
    for (const auto& lm : loaded)
        if (!lm.signatures.empty())
            hist[lm.method] = lm.signatures;
    emit_report(report, paths.report(), hist);
    return report;
}

nlohmann::json cmd_identify(const RunConfig& cfg)
{
    cfg.validate();
    OutputLock lock(cfg.out);
    const ArtifactPaths paths{cfg.out};

    nlohmann::json out;
    out["format"] = "tspec-identification";
    out["version"] = 1;
    out["results"] = nlohmann::json::array();
    bool any = false;
    for (LabelMethod m : cfg.methods) {
        if (m == LabelMethod::Baseline)
            continue;
        const auto side = read_sidecar(paths, m);
        const Dataset test = read_split(paths, m, false, side);
        const auto signatures = signatures_for(cfg, paths, m);
        if (signatures.empty())
            throw DataError("signature registry for " + std::string(to_string(m)) + " is empty");
        for (const auto& fam : cfg.families) {
            const ModelFamily family = resolve_family(fam, Task::Regress);
            const auto path = paths.model(m, family, Task::Regress);
            if (!fs::exists(path))
                throw DataError("missing regression model " + path.string() + " (run train first)");
            const auto model = load_model(path);
            const auto segs = identify_segments(model, test, signatures);

            std::vector<IdentificationResult> results;
            std::vector<std::string> truth;
            nlohmann::json seg_json = nlohmann::json::array();
            for (const auto& s : segs) {
                results.push_back(s.result);
                truth.push_back(s.segment.attack);
                auto j = s.result.to_json(signatures);
                j["segment"] = s.segment.segment;
                j["truth"] = s.segment.attack;
                j["windows"] = s.segment.rows.size();
                seg_json.push_back(std::move(j));
            }
            nlohmann::json entry;
            entry["method"] = std::string(to_string(m));
            entry["family"] = std::string(to_string(family));
            entry["segments"] = std::move(seg_json);
            entry["accuracy"] = results.empty() ? nlohmann::json(nullptr)
                                                : nlohmann::json(identification_accuracy(results, truth));
            out["results"].push_back(std::move(entry));
            any = true;
        }
    }
    if (!any)
        throw ConfigError("identify: no spectrum label method selected");
    textio::write_file(paths.identification(), out.dump(1) + "\n");
    return out;
}

std::vector<GridScore> cmd_grid(const RunConfig& cfg, std::span<const std::size_t> windows,
                                std::span<const int> d_models)
{
    const auto timeline = load_timeline(cfg);
    std::vector<std::uint8_t> labels;
    labels.reserve(timeline.size());
    for (const auto& r : timeline.records)
        labels.push_back(r.label);
    auto scores = score_encoding_grid(labels, windows, d_models, cfg.stride);

    OutputLock lock(cfg.out);
    nlohmann::json j = nlohmann::json::array();
    for (const auto& g : scores)
        j.push_back({{"window", g.window_size},
                     {"d_model", g.d_model},
                     {"score", g.valid ? nlohmann::json(g.score) : nlohmann::json(nullptr)},
                     {"valid", g.valid}});
    textio::write_file(cfg.out / "grid.json", j.dump(1) + "\n");
    return scores;
}

EncodingGrid load_encoding_grid(const fs::path& path)
{
    const auto j = parse_json_file(path, "encoding grid");
    EncodingGrid g;
    try {
        g.d_models = j.at("d_model").get<std::vector<int>>();
        g.windows = j.at("window").get<std::vector<std::size_t>>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("encoding grid: ") + e.what());
    }
    for (int d : g.d_models)
        (void)EncodingConfig(d);
    return g;
}

std::vector<AttackProfile> load_attack_profiles(const fs::path& path)
{
    const auto j = parse_json_file(path, "attack profiles");
    std::vector<AttackProfile> out;
    try {
        for (const auto& a : j.at("attacks")) {
            out.push_back({a.at("name").get<std::string>(), a.at("feature_count").get<std::size_t>(),
                           a.at("d_model").get<int>(), a.at("window").get<std::size_t>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("attack profiles: ") + e.what());
    }
    return out;
}

std::vector<std::string> load_feature_list(const fs::path& path)
{
    const auto j = parse_json_file(path, "feature list");
    try {
        if (j.is_array())
            return j.get<std::vector<std::string>>();
        return j.at("features").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("feature list: ") + e.what());
    }
}

}  // namespace tspec
