// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include "tspec/dataprep.hpp"
#include "tspec/evalharness.hpp"
#include "tspec/identify.hpp"
#include "tspec/pipeline.hpp"
#include "tspec/rng.hpp"
#include "tspec/spectrum.hpp"
#include "tspec/textio.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

using namespace tspec;
namespace fs = std::filesystem;

namespace {

const std::vector<int> kGridDims{2, 4, 8, 16, 32, 64, 128, 236, 256};
const std::vector<std::size_t> kGridWindows{10, 20, 30, 40, 50, 60};
constexpr int kSeeds = 5;

int failures = 0;

void report(int id, bool pass, const std::string& detail)
{
    std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!pass)
        ++failures;
}

std::string fmt(const char* f, double a)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Written independently of the library: angle per component from scratch.
double sspe_brute_force(const std::vector<std::uint8_t>& labels, int d)
{
    double total = 0.0;
    for (std::size_t pos = 0; pos < labels.size(); ++pos) {
        if (!labels[pos])
            continue;
        for (int j = 0; j < d; ++j) {
            const double freq = std::pow(10000.0, static_cast<double>(j - j % 2) / d);
            const double angle = static_cast<double>(pos) / freq;
            total += (j % 2 == 0) ? std::sin(angle) : std::cos(angle);
        }
    }
    return total;
}

void criterion_1()
{
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(20240601);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t len = kGridWindows[rng.below(kGridWindows.size())];
        const int d = kGridDims[rng.below(kGridDims.size())];
        const double density = rng.uniform();
        std::vector<std::uint8_t> labels(len);
        for (auto& b : labels)
            b = rng.uniform() < density ? 1 : 0;
        const double got = sspe(labels, EncodingConfig(d)).value;
        worst = std::max(worst, std::abs(got - sspe_brute_force(labels, d)));
    }
    const double secs = seconds_since(t0);
    report(1, worst <= 1e-9 && secs < 30.0,
           "SSPE vs brute force over 1000 sequences, max |diff| = " + fmt("%.3g", worst) + ", " +
               fmt("%.2f", secs) + " s");
}

void criterion_2()
{
    double worst = 0.0;
    for (int d : kGridDims) {
        const EncodingConfig cfg(d);
        for (std::size_t pos = 0; pos < 60; ++pos) {
            const auto pe = positional_encoding(pos, cfg);
            for (int i = 0; i < d / 2; ++i)
                worst = std::max(worst, std::abs(pe[2 * i] * pe[2 * i] + pe[2 * i + 1] * pe[2 * i + 1] - 1.0));
        }
    }
    report(2, worst <= 1e-12, "sin^2 + cos^2 = 1 for every pair, max deviation " + fmt("%.3g", worst));
}

void criterion_3()
{
    Rng rng(77);
    std::set<double> distinct;
    while (distinct.size() < 10000)
        distinct.insert(rng.uniform() * 1000.0);
    std::vector<double> values(distinct.begin(), distinct.end());
    rng.shuffle(values.begin(), values.end());

    auto positives = [&](ThresholdMode mode) {
        const auto bits = binarize(values, compute_threshold(values, 2000, mode));
        return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1));
    };
    const auto rank = positives(ThresholdMode::RankDefault);
    const auto percentile = positives(ThresholdMode::AsPaper);
    report(3, rank == 2000 && percentile == 10000 - 2000 + 1,
           "n1 = 2000 of 10000: rank-default " + std::to_string(rank) + " positives (want 2000), as-paper " +
               std::to_string(percentile) + " (want 8001)");
}

void criterion_4()
{
    Rng rng(4);
    Matrix x(1000, 20);
    for (std::size_t i = 0; i < 1000; ++i)
        for (std::size_t j = 0; j < 20; ++j)
            x(i, j) = rng.normal(static_cast<double>(j) * 10.0 - 50.0, 0.1 + static_cast<double>(j));
    const auto z = zscore_apply(x, zscore_fit(x));
    double worst_mean = 0.0, worst_std = 0.0;
    for (std::size_t j = 0; j < 20; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < 1000; ++i)
            s += z(i, j);
        const double mean = s / 1000.0;
        double ss = 0.0;
        for (std::size_t i = 0; i < 1000; ++i)
            ss += (z(i, j) - mean) * (z(i, j) - mean);
        worst_mean = std::max(worst_mean, std::abs(mean));
        worst_std = std::max(worst_std, std::abs(std::sqrt(ss / 1000.0) - 1.0));
    }
    report(4, worst_mean <= 1e-9 && worst_std <= 1e-9,
           "standardized 1000x20: max |mean| " + fmt("%.3g", worst_mean) + ", max |std-1| " + fmt("%.3g", worst_std));
}

void criterion_5()
{
    Rng rng(5);
    Dataset ds;
    const std::size_t m = 997;
    ds.features = Matrix(m, 12);
    for (auto& v : ds.features.data())
        v = rng.normal();
    for (std::size_t i = 0; i < m; ++i) {
        ds.spectrum_labels.push_back(i % 4 == 0 ? 3.0 : 0.0);
        ds.binary_labels.push_back(i % 4 == 0);
        ds.row_attack.push_back(i % 4 == 0 ? "a" : "");
        ds.row_segment.push_back(i % 4 == 0 ? 0 : -1);
    }
    bool ok = true;
    std::string detail;
    for (const auto& spec : noise_grid(1.0, 99)) {
        const auto noisy = inject_noise(ds, spec);
        std::size_t changed = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const auto a = ds.features.row(i);
            const auto b = noisy.features.row(i);
            changed += !std::equal(a.begin(), a.end(), b.begin());
        }
        const auto want = static_cast<std::size_t>(std::lround(spec.ratio * static_cast<double>(m)));
        ok = ok && changed == want;
        if (spec.ratio == 0.0)
            ok = ok && noisy == ds;
        detail += std::to_string(changed) + (spec.ratio < 1.0 ? "," : "");
    }
    report(5, ok, "rows modified per ratio 0..1 of M = 997: " + detail + "; ratio 0 bit-exact");
}

// Outcome of one seeded end-to-end run on the synthetic scenario.
struct SeedRun {
    std::map<std::pair<LabelMethod, std::string>, double> detect_accuracy;  // at 100% noise
    double rf_sspe_f1_clean = 0.0;
    std::map<std::string, double> identify_clean;  // SSPE, per family
    std::map<std::string, double> identify_noisy;
    double seconds_detection = 0.0;
};

RunConfig scenario_config(std::uint64_t seed, const fs::path& out)
{
    auto cfg = RunConfig::load(fs::path(TSPEC_SOURCE_DIR) / "config/synthetic_run.json");
    cfg.seed = seed;
    cfg.ratios = {0.0, 1.0};
    cfg.out = out;
    return cfg;
}

SeedRun run_seed(std::uint64_t seed, const fs::path& out)
{
    fs::remove_all(out);
    SeedRun r;
    const auto t0 = std::chrono::steady_clock::now();
    auto cfg = scenario_config(seed, out);
    cmd_build_dataset(cfg);
    cmd_train(cfg);
    const auto detect = cmd_sweep(cfg);
    r.seconds_detection = seconds_since(t0);
    for (const auto& row : detect.rows) {
        if (row.task != "detect")
            continue;
        if (row.noise_ratio == 1.0)
            r.detect_accuracy[{row.method, row.family}] = row.detection->accuracy;
        if (row.noise_ratio == 0.0 && row.method == LabelMethod::Sspe && row.family == "random_forest")
            r.rf_sspe_f1_clean = row.detection->f1;
    }

    // Reference signatures from the held-out (test) segments before any
    // noise is applied, using their true SSPE labels.
    const ArtifactPaths paths{out};
    const auto side = nlohmann::json::parse(textio::read_file(paths.sidecar(LabelMethod::Sspe)));
    const auto test = read_dataset_csv(paths.test_csv(LabelMethod::Sspe), Provenance::from_json(side.at("provenance")));
    const auto registry = out / "heldout_signatures.json";
    save_registry(build_signatures(test, cfg.bins), registry);

    auto id_cfg = cfg;
    id_cfg.methods = {LabelMethod::Sspe};
    id_cfg.tasks = {"identify"};
    id_cfg.registry = registry;
    for (const auto& row : cmd_sweep(id_cfg).rows) {
        auto& slot = row.noise_ratio == 0.0 ? r.identify_clean : r.identify_noisy;
        slot[row.family] = *row.identification_accuracy;
    }
    return r;
}

void criteria_6_to_8(const std::vector<SeedRun>& runs)
{
    // 6: random forest on binarized SSPE labels, clean test set.
    double f1 = 0.0, secs = 0.0;
    for (const auto& r : runs) {
        f1 += r.rf_sspe_f1_clean;
        secs += r.seconds_detection;
    }
    f1 /= static_cast<double>(runs.size());
    report(6, f1 >= 0.95 && secs < 300.0,
           "random forest, SSPE d_model 8, W 30: mean F1 over 5 seeds " + fmt("%.4f", f1) + " (need >= 0.95), " +
               fmt("%.1f", secs) + " s");

    // 7: every SSPE regressor family identifies all three attacks on clean
    // data, and at least two of three under full noise in >= 4 of 5 seeds.
    std::set<std::string> families;
    for (const auto& [fam, acc] : runs.front().identify_clean)
        families.insert(fam);
    bool ok = !families.empty();
    std::string detail;
    for (const auto& fam : families) {
        int clean_perfect = 0, noisy_above = 0;
        for (const auto& r : runs) {
            clean_perfect += r.identify_clean.at(fam) == 1.0;
            noisy_above += r.identify_noisy.at(fam) >= 2.0 / 3.0 - 1e-12;
        }
        ok = ok && clean_perfect == kSeeds && noisy_above >= 4;
        detail += fam + " clean 3/3 in " + std::to_string(clean_perfect) + "/5, noisy >= 2/3 in " +
                  std::to_string(noisy_above) + "/5; ";
    }
    report(7, ok, "SSPE identification with held-out clean signatures: " + detail);

    // 8: mean accuracy at 100% noise, paired by seed and family.
    auto mean_for = [&](LabelMethod m) {
        double s = 0.0;
        std::size_t n = 0;
        for (const auto& r : runs)
            for (const auto& [key, acc] : r.detect_accuracy)
                if (key.first == m) {
                    s += acc;
                    ++n;
                }
        return s / static_cast<double>(n);
    };
    const double base = mean_for(LabelMethod::Baseline);
    const double coap_gain = mean_for(LabelMethod::Coap) - base;
    const double sspe_gain = mean_for(LabelMethod::Sspe) - base;
    report(8, coap_gain >= 0.05 && sspe_gain >= 0.05,
           "accuracy at 100% noise: baseline " + fmt("%.4f", base) + ", COAP " + fmt("%+.4f", coap_gain) +
               ", SSPE " + fmt("%+.4f", sspe_gain) + " (need >= +0.05 each)");
}

std::map<std::string, std::string> artifact_files(const fs::path& root)
{
    std::map<std::string, std::string> out;
    for (const char* sub : {"datasets", "models", "report"})
        for (const auto& e : fs::recursive_directory_iterator(root / sub))
            if (e.is_regular_file())
                out[fs::relative(e.path(), root).generic_string()] = textio::read_file(e.path());
    return out;
}

void criterion_9(const fs::path& scratch)
{
    const auto a = scratch / "determinism_a";
    const auto b = scratch / "determinism_b";
    for (const auto& dir : {a, b}) {
        fs::remove_all(dir);
        auto cfg = RunConfig::load(fs::path(TSPEC_SOURCE_DIR) / "config/synthetic_run.json");
        cfg.seed = 11;
        cfg.out = dir;
        cmd_build_dataset(cfg);
        cmd_train(cfg);
        cmd_sweep(cfg);
    }
    const auto fa = artifact_files(a);
    const auto fb = artifact_files(b);
    std::size_t same = 0;
    for (const auto& [name, bytes] : fa) {
        auto it = fb.find(name);
        same += it != fb.end() && it->second == bytes;
    }
    report(9, !fa.empty() && fa.size() == fb.size() && same == fa.size(),
           std::to_string(same) + " of " + std::to_string(fa.size()) +
               " dataset/model/report files byte-identical across two runs");
}

void criterion_10()
{
    std::vector<IdentificationResult> results(14);
    std::vector<std::string> truth;
    for (int i = 0; i < 14; ++i) {
        truth.push_back("attack-" + std::to_string(i));
        results[i].predicted_attack = i == 9 ? "attack-0" : truth.back();
    }
    const double acc = identification_accuracy(results, truth);
    report(10, std::abs(acc - 13.0 / 14.0) <= 1e-12, "13 of 14 correct gives " + fmt("%.15f", acc));
}

void guarded(int id, const std::function<void()>& body)
{
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, std::string("threw: ") + e.what());
    }
}

}  // namespace

int main()
{
    const fs::path scratch = fs::temp_directory_path() / "tspec_acceptance";
    fs::create_directories(scratch);

    guarded(1, criterion_1);
    guarded(2, criterion_2);
    guarded(3, criterion_3);
    guarded(4, criterion_4);
    guarded(5, criterion_5);

    std::vector<SeedRun> runs;
    try {
        for (int s = 1; s <= kSeeds; ++s)
            runs.push_back(run_seed(static_cast<std::uint64_t>(s), scratch / ("seed" + std::to_string(s))));
        criteria_6_to_8(runs);
    } catch (const std::exception& e) {
        for (int id : {6, 7, 8})
            report(id, false, std::string("threw: ") + e.what());
    }

    guarded(9, [&] { criterion_9(scratch); });
    guarded(10, criterion_10);

    fs::remove_all(scratch);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
