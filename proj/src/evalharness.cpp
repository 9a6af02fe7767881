#include "tspec/evalharness.hpp"

#include "tspec/error.hpp"
#include "tspec/textio.hpp"

#include <algorithm>
#include <set>

namespace tspec {

namespace {

double ratio(std::size_t num, std::size_t den)
{
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r)
{
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

}  // namespace

DetectionMetrics DetectionMetrics::from_confusion(const Confusion& c)
{
    DetectionMetrics m;
    m.confusion = c;
    const std::size_t n = c.total();
    m.accuracy = ratio(c.tp + c.tn, n);
    m.precision = ratio(c.tp, c.tp + c.fp);
    m.recall = ratio(c.tp, c.tp + c.fn);
    m.f1 = harmonic(m.precision, m.recall);

    const double p0 = ratio(c.tn, c.tn + c.fn);
    const double r0 = ratio(c.tn, c.tn + c.fp);
    const double f0 = harmonic(p0, r0);
    const double w1 = ratio(c.tp + c.fn, n);
    const double w0 = ratio(c.tn + c.fp, n);
    m.weighted_precision = w1 * m.precision + w0 * p0;
    m.weighted_recall = w1 * m.recall + w0 * r0;
    m.weighted_f1 = w1 * m.f1 + w0 * f0;
    m.micro_f1 = m.accuracy;
    return m;
}

nlohmann::json DetectionMetrics::to_json() const
{
    return {{"tp", confusion.tp},
            {"fp", confusion.fp},
            {"fn", confusion.fn},
            {"tn", confusion.tn},
            {"accuracy", accuracy},
            {"precision", precision},
            {"recall", recall},
            {"f1", f1},
            {"weighted_precision", weighted_precision},
            {"weighted_recall", weighted_recall},
            {"weighted_f1", weighted_f1},
            {"micro_f1", micro_f1}};
}

DetectionMetrics DetectionMetrics::from_json(const nlohmann::json& j)
{
    Confusion c{j.at("tp").get<std::size_t>(), j.at("fp").get<std::size_t>(), j.at("fn").get<std::size_t>(),
                j.at("tn").get<std::size_t>()};
    DetectionMetrics m;
    m.confusion = c;
    m.accuracy = j.at("accuracy").get<double>();
    m.precision = j.at("precision").get<double>();
    m.recall = j.at("recall").get<double>();
    m.f1 = j.at("f1").get<double>();
    m.weighted_precision = j.at("weighted_precision").get<double>();
    m.weighted_recall = j.at("weighted_recall").get<double>();
    m.weighted_f1 = j.at("weighted_f1").get<double>();
    m.micro_f1 = j.at("micro_f1").get<double>();
    return m;
}

DetectionMetrics detection_metrics(std::span<const std::uint8_t> y_true, std::span<const std::uint8_t> y_pred)
{
    if (y_true.size() != y_pred.size())
        throw DataError("detection_metrics: length mismatch");
    if (y_true.empty())
        throw DataError("detection_metrics: no samples");
    Confusion c;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool t = y_true[i] != 0, p = y_pred[i] != 0;
        if (t && p) ++c.tp;
        else if (!t && p) ++c.fp;
        else if (t && !p) ++c.fn;
        else ++c.tn;
    }
    return DetectionMetrics::from_confusion(c);
}

double identification_accuracy(std::span<const IdentificationResult> results, std::span<const std::string> truth)
{
    if (results.size() != truth.size())
        throw DataError("identification_accuracy: length mismatch");
    if (results.empty())
        throw DataError("identification_accuracy: no results");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < results.size(); ++i)
        correct += results[i].predicted_attack == truth[i];
    return static_cast<double>(correct) / static_cast<double>(results.size());
}

nlohmann::json ReportRow::to_json() const
{
    nlohmann::json j = {{"family", family},
                        {"method", std::string(to_string(method))},
                        {"task", task},
                        {"noise_ratio", noise_ratio},
                        {"seed", seed}};
    if (detection)
        j["detection"] = detection->to_json();
    if (identification_accuracy) {
        j["identification_accuracy"] = *identification_accuracy;
        j["identified"] = identified;
        j["segments"] = segments;
    }
    return j;
}

ReportRow ReportRow::from_json(const nlohmann::json& j)
{
    ReportRow r;
    r.family = j.at("family").get<std::string>();
    r.method = parse_label_method(j.at("method").get<std::string>());
    r.task = j.at("task").get<std::string>();
    r.noise_ratio = j.at("noise_ratio").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("detection"))
        r.detection = DetectionMetrics::from_json(j.at("detection"));
    if (j.contains("identification_accuracy")) {
        r.identification_accuracy = j.at("identification_accuracy").get<double>();
        r.identified = j.at("identified").get<std::size_t>();
        r.segments = j.at("segments").get<std::size_t>();
    }
    return r;
}

nlohmann::json EvalReport::to_json() const
{
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& r : rows)
        rows_json.push_back(r.to_json());
    return {{"format", "tspec-report"}, {"version", schema_version}, {"config", config}, {"rows", rows_json}};
}

EvalReport EvalReport::from_json(const nlohmann::json& j)
{
    try {
        if (j.at("format").get<std::string>() != "tspec-report")
            throw DataError("report: unknown format");
        if (j.at("version").get<int>() != schema_version)
            throw DataError("report: unsupported version");
        EvalReport r;
        r.config = j.at("config");
        for (const auto& row : j.at("rows"))
            r.rows.push_back(ReportRow::from_json(row));
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("report: ") + e.what());
    }
}

std::vector<std::uint8_t> decide(std::span<const double> probabilities)
{
    std::vector<std::uint8_t> out;
    out.reserve(probabilities.size());
    for (double p : probabilities)
        out.push_back(p >= 0.5 ? 1 : 0);
    return out;
}

DetectionMetrics evaluate_detector(const TrainedModel& model, const Dataset& test, std::span<const std::uint8_t> truth)
{
    if (model.spec.task != Task::Classify)
        throw ConfigError("evaluate_detector: model is not a classifier");
    const auto pred = decide(predict(model, test.features));
    return detection_metrics(truth, pred);
}

std::vector<SegmentIdentification> identify_segments(const TrainedModel& model, const Dataset& test,
                                                     std::span<const SpectrumSignature> signatures)
{
    if (model.spec.task != Task::Regress)
        throw ConfigError("identify_segments: model is not a regressor");
    const auto predictions = predict(model, test.features);
    std::vector<SegmentIdentification> out;
    for (auto& seg : group_segments(test)) {
        std::vector<double> values;
        for (std::size_t r : seg.rows)
            values.push_back(predictions[r]);
        auto result = identify_attack(values, signatures);
        out.push_back({std::move(seg), std::move(result)});
    }
    return out;
}

EvalReport run_noise_sweep(const SweepPlan& plan)
{
    if (plan.noise.empty())
        throw ConfigError("run_noise_sweep: empty noise grid");
    for (const auto& d : plan.detectors)
        if (!d.test || d.truth.size() != d.test->size())
            throw DataError("run_noise_sweep: detector cell is missing its test set or truth");
    for (const auto& c : plan.identifiers)
        if (!c.test || c.signatures.empty())
            throw DataError("run_noise_sweep: identifier cell is missing its test set or signatures");

    EvalReport report;
    report.config = plan.config;
    for (const auto& spec : plan.noise) {
        // Cells sharing a test set see the same perturbation at a given ratio.
        std::map<const Dataset*, Dataset> noisy;
        auto noisy_for = [&](const Dataset* ds) -> const Dataset& {
            auto it = noisy.find(ds);
            if (it == noisy.end())
                it = noisy.emplace(ds, inject_noise(*ds, spec)).first;
            return it->second;
        };
        for (const auto& cell : plan.detectors) {
            ReportRow row;
            row.family = std::string(to_string(cell.model.spec.family));
            row.method = cell.method;
            row.task = "detect";
            row.noise_ratio = spec.ratio;
            row.seed = spec.seed;
            row.detection = evaluate_detector(cell.model, noisy_for(cell.test), cell.truth);
            report.rows.push_back(std::move(row));
        }
        for (const auto& cell : plan.identifiers) {
            const auto results = identify_segments(cell.model, noisy_for(cell.test), cell.signatures);
            ReportRow row;
            row.family = std::string(to_string(cell.model.spec.family));
            row.method = cell.method;
            row.task = "identify";
            row.noise_ratio = spec.ratio;
            row.seed = spec.seed;
            row.segments = results.size();
            for (const auto& r : results)
                row.identified += r.result.predicted_attack == r.segment.attack;
            row.identification_accuracy =
                results.empty() ? 0.0 : static_cast<double>(row.identified) / static_cast<double>(row.segments);
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

namespace {

std::optional<double> metric_of(const ReportRow& row, const std::string& metric)
{
    if (metric == "identification")
        return row.identification_accuracy;
    if (!row.detection)
        return std::nullopt;
    const auto& d = *row.detection;
    if (metric == "accuracy") return d.accuracy;
    if (metric == "precision") return d.precision;
    if (metric == "recall") return d.recall;
    if (metric == "f1") return d.f1;
    if (metric == "weighted_precision") return d.weighted_precision;
    if (metric == "weighted_recall") return d.weighted_recall;
    if (metric == "weighted_f1") return d.weighted_f1;
    throw ConfigError("unknown metric '" + metric + "'");
}

}  // namespace

FigureSeries figure_series(const EvalReport& report, const std::string& metric)
{
    std::set<double> ratio_set;
    for (const auto& r : report.rows)
        ratio_set.insert(r.noise_ratio);
    FigureSeries fs;
    fs.ratios.assign(ratio_set.begin(), ratio_set.end());
    for (LabelMethod m : {LabelMethod::Baseline, LabelMethod::Coap, LabelMethod::Sspe}) {
        std::vector<std::optional<double>> col;
        for (double ratio_value : fs.ratios) {
            double sum = 0.0;
            std::size_t n = 0;
            for (const auto& r : report.rows) {
                if (r.method != m || r.noise_ratio != ratio_value)
                    continue;
                if (auto v = metric_of(r, metric)) {
                    sum += *v;
                    ++n;
                }
            }
            col.push_back(n ? std::optional<double>(sum / static_cast<double>(n)) : std::nullopt);
        }
        fs.mean[m] = std::move(col);
    }
    return fs;
}

std::string format_figure_csv(const FigureSeries& series)
{
    std::string out = "noise_ratio,baseline,coap,sspe\n";
    for (std::size_t i = 0; i < series.ratios.size(); ++i) {
        out += textio::format_double(series.ratios[i]);
        for (LabelMethod m : {LabelMethod::Baseline, LabelMethod::Coap, LabelMethod::Sspe}) {
            out += ',';
            const auto it = series.mean.find(m);
            if (it != series.mean.end() && it->second[i])
                out += textio::format_double(*it->second[i]);
        }
        out += '\n';
    }
    return out;
}

void emit_report(const EvalReport& report, const std::filesystem::path& out_dir,
                 const std::map<LabelMethod, std::vector<SpectrumSignature>>& histograms)
{
    if (report.rows.empty())
        throw DataError("emit_report: report has no rows");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw std::runtime_error("emit_report: cannot create " + out_dir.string());

    textio::write_file(out_dir / "report.json", report.to_json().dump(1) + "\n");

    bool any_detection = false, any_identification = false;
    for (const auto& r : report.rows) {
        any_detection |= r.detection.has_value();
        any_identification |= r.identification_accuracy.has_value();
    }
    if (any_detection) {
        for (const char* metric : {"accuracy", "precision", "recall", "f1", "weighted_precision", "weighted_f1"})
            textio::write_file(out_dir / ("figure_detection_" + std::string(metric) + ".csv"),
                               format_figure_csv(figure_series(report, metric)));
    }
    if (any_identification)
        textio::write_file(out_dir / "figure_identification_accuracy.csv",
                           format_figure_csv(figure_series(report, "identification")));

    for (const auto& [method, sigs] : histograms) {
        if (sigs.empty())
            continue;
        std::string out = "bin_lo,bin_hi";
        for (const auto& s : sigs)
            out += "," + s.attack_name;
        out += '\n';
        const auto& edges = sigs.front().bin_edges;
        for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
            out += textio::format_double(edges[k]) + "," + textio::format_double(edges[k + 1]);
            for (const auto& s : sigs)
                out += "," + textio::format_double(s.counts[k]);
            out += '\n';
        }
        textio::write_file(out_dir / ("hist_" + std::string(to_string(method)) + ".csv"), out);
    }
}

}  // namespace tspec
