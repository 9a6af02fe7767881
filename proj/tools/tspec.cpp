// Command-line driver: synth, build-dataset, train, sweep, identify, grid, run.
//
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 runtime error.

#include "tspec/error.hpp"
#include "tspec/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

template <typename T>
std::vector<T> split_list(const std::string& s)
{
    std::vector<T> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        if constexpr (std::is_same_v<T, std::string>) {
            out.push_back(item);
        } else {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size())
                throw tspec::ConfigError("cannot parse number '" + item + "'");
            out.push_back(static_cast<T>(v));
        }
    }
    return out;
}

struct Flags {
    std::string config;
    std::string input, schema, features, scenario, registry;
    std::optional<std::size_t> window, stride, bins;
    std::string method, threshold_mode, families, tasks, ratios;
    std::optional<int> d_model;
    std::optional<double> noise_scale, test_fraction;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string grid = "config/encoding_grid.json";
};

tspec::RunConfig resolve(const Flags& f)
{
    tspec::RunConfig cfg;
    if (!f.config.empty())
        cfg = tspec::RunConfig::load(f.config);
    nlohmann::json o = nlohmann::json::object();
    if (!f.input.empty()) o["input"] = f.input;
    if (!f.schema.empty()) o["schema"] = f.schema;
    if (!f.features.empty()) o["feature_list"] = f.features;
    if (!f.scenario.empty()) o["scenario"] = f.scenario;
    if (!f.registry.empty()) o["registry"] = f.registry;
    if (f.window) o["window"] = *f.window;
    if (f.stride) o["stride"] = *f.stride;
    if (f.bins) o["bins"] = *f.bins;
    if (!f.method.empty()) o["methods"] = split_list<std::string>(f.method);
    if (!f.threshold_mode.empty()) o["threshold_mode"] = f.threshold_mode;
    if (!f.families.empty()) o["families"] = split_list<std::string>(f.families);
    if (!f.tasks.empty()) o["tasks"] = split_list<std::string>(f.tasks);
    if (!f.ratios.empty()) o["ratios"] = split_list<double>(f.ratios);
    if (f.d_model) o["d_model"] = *f.d_model;
    if (f.noise_scale) o["noise_scale"] = *f.noise_scale;
    if (f.test_fraction) o["test_fraction"] = *f.test_fraction;
    if (f.seed) o["seed"] = *f.seed;
    if (!f.out.empty()) o["out"] = f.out;
    cfg.merge_json(o);
    return cfg;
}

void print_report_summary(const tspec::EvalReport& report)
{
    for (const auto& r : report.rows) {
        std::cout << r.task << ' ' << tspec::to_string(r.method) << ' ' << r.family << " noise=" << r.noise_ratio;
        if (r.detection)
            std::cout << " accuracy=" << r.detection->accuracy << " f1=" << r.detection->f1;
        if (r.identification_accuracy)
            std::cout << " identification=" << *r.identification_accuracy << " (" << r.identified << '/'
                      << r.segments << ')';
        std::cout << '\n';
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Temporal-spectrum labelling of network traffic"};
    app.require_subcommand(1);
    Flags f;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", f.config, "JSON run configuration");
        sub->add_option("--input", f.input, "flow-record CSV");
        sub->add_option("--schema", f.schema, "schema JSON for --input");
        sub->add_option("--features", f.features, "JSON list of feature names to keep");
        sub->add_option("--scenario", f.scenario, "synthetic scenario JSON (used without --input)");
        sub->add_option("--registry", f.registry, "signature registry JSON");
        sub->add_option("--window", f.window, "sliding window length W");
        sub->add_option("--stride", f.stride, "sliding window stride");
        sub->add_option("--bins", f.bins, "histogram bins for signatures");
        sub->add_option("--method", f.method, "label methods: baseline,coap,sspe");
        sub->add_option("--d-model", f.d_model, "SSPE encoding dimension (even)");
        sub->add_option("--threshold-mode", f.threshold_mode, "rank-default or as-paper");
        sub->add_option("--families", f.families, "model families, e.g. glm,random_forest,gbm");
        sub->add_option("--tasks", f.tasks, "detect,identify");
        sub->add_option("--ratios", f.ratios, "noise ratios, e.g. 0,0.5,1.0");
        sub->add_option("--noise-scale", f.noise_scale, "noise standard deviation (standardized units)");
        sub->add_option("--test-fraction", f.test_fraction, "held-out fraction of windows");
        sub->add_option("--seed", f.seed, "base seed");
        sub->add_option("--out", f.out, "output directory");
    };

    auto* synth = app.add_subcommand("synth", "write a synthetic flow CSV and its schema");
    auto* build = app.add_subcommand("build-dataset", "window, label and standardize a timeline");
    auto* train = app.add_subcommand("train", "train detection and identification models");
    auto* sweep = app.add_subcommand("sweep", "evaluate models across noise ratios");
    auto* ident = app.add_subcommand("identify", "identify attack types per test segment");
    auto* grid = app.add_subcommand("grid", "rank (window, d_model) candidates by label normality");
    auto* run = app.add_subcommand("run", "build-dataset, train, sweep and identify in one go");
    for (auto* sub : {synth, build, train, sweep, ident, grid, run})
        add_common(sub);
    grid->add_option("--grid", f.grid, "encoding grid JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const tspec::RunConfig cfg = resolve(f);
        if (*synth) {
            tspec::cmd_synth(cfg);
            std::cout << "wrote " << (cfg.out / "synthetic.csv").string() << '\n';
        } else if (*build) {
            tspec::cmd_build_dataset(cfg);
            std::cout << "wrote datasets to " << (cfg.out / "datasets").string() << '\n';
        } else if (*train) {
            tspec::cmd_train(cfg);
            std::cout << "wrote models to " << (cfg.out / "models").string() << '\n';
        } else if (*sweep) {
            print_report_summary(tspec::cmd_sweep(cfg));
        } else if (*ident) {
            const auto j = tspec::cmd_identify(cfg);
            for (const auto& r : j["results"])
                std::cout << r["method"].get<std::string>() << ' ' << r["family"].get<std::string>()
                          << " accuracy=" << r["accuracy"] << '\n';
        } else if (*grid) {
            const auto g = tspec::load_encoding_grid(f.grid);
            for (const auto& s : tspec::cmd_grid(cfg, g.windows, g.d_models)) {
                std::cout << "window=" << s.window_size << " d_model=" << s.d_model;
                if (s.valid)
                    std::cout << " score=" << s.score << '\n';
                else
                    std::cout << " degenerate\n";
            }
        } else if (*run) {
            tspec::cmd_build_dataset(cfg);
            tspec::cmd_train(cfg);
            print_report_summary(tspec::cmd_sweep(cfg));
            if (std::find(cfg.tasks.begin(), cfg.tasks.end(), "identify") != cfg.tasks.end())
                tspec::cmd_identify(cfg);
        }
    } catch (const tspec::ConfigError& e) {
        std::cerr << "tspec: configuration error: " << e.what() << '\n';
        return 1;
    } catch (const tspec::DataError& e) {
        std::cerr << "tspec: data error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "tspec: error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
