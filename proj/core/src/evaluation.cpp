#include "smlmc/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "parallel.hpp"
#include "smlmc/errors.hpp"
#include "smlmc/format.hpp"

namespace smlmc {

namespace {
constexpr std::string_view kPredHeader = "sample_id,x_nm,y_nm";
}

Predictions read_predictions(const std::filesystem::path& path) {
    const std::string name = path.string();
    HashingLineReader reader(path);
    std::string_view line;
    if (!reader.next(line) || line != kPredHeader) {
        throw ParseError(name, 1, "expected header '" + std::string(kPredHeader) + "'");
    }
    Predictions preds;
    while (reader.next(line)) {
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        std::int64_t id = 0;
        double x = 0.0, y = 0.0;
        if (fields.size() != 3 || !parse_int(fields[0], id) || !parse_double(fields[1], x) ||
            !parse_double(fields[2], y)) {
            throw ParseError(name, reader.line_number(), "expected sample_id,x_nm,y_nm");
        }
        preds[id].push_back({x, y});
    }
    return preds;
}

void write_predictions(const std::filesystem::path& path, const Predictions& predictions) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << kPredHeader << '\n';
    std::string row;
    for (const auto& [id, points] : predictions) {
        for (const Point& p : points) {
            row.clear();
            append_int(row, id);
            row += ',';
            append_coord(row, p.x_nm);
            row += ',';
            append_coord(row, p.y_nm);
            row += '\n';
            out << row;
        }
    }
    out.close();
    if (!out) throw IoError("failed writing " + path.string());
}

SampleMetrics score_sample(const Sample& sample, const std::vector<Point>& prediction,
                           double tau_nm) {
    SampleMetrics m;
    m.sample_id = sample.sample_id;
    const Assignment a = hungarian_assignment(prediction, sample.ground_truth);
    m.chamfer_nm = chamfer_distance(prediction, sample.ground_truth);
    m.hungarian_nm = a.total_cost_nm / static_cast<double>(a.pairs.size());
    m.detection = detection_report(a, prediction, sample.ground_truth, tau_nm);
    return m;
}

EvaluationSummary summarize(const std::vector<SampleMetrics>& per_sample) {
    std::vector<double> chamfer, hung, tp, fp, fn, fpfn, acc, rmse;
    for (const auto& m : per_sample) {
        chamfer.push_back(m.chamfer_nm);
        hung.push_back(m.hungarian_nm);
        tp.push_back(static_cast<double>(m.detection.tp));
        fp.push_back(static_cast<double>(m.detection.fp));
        fn.push_back(static_cast<double>(m.detection.fn));
        fpfn.push_back(0.5 * static_cast<double>(m.detection.fp + m.detection.fn));
        acc.push_back(m.detection.detection_accuracy);
        if (m.detection.rmse_tp_nm) rmse.push_back(*m.detection.rmse_tp_nm);
    }
    return {mean_std(chamfer), mean_std(hung), mean_std(tp),  mean_std(fp),
            mean_std(fn),      mean_std(fpfn), mean_std(acc), mean_std(rmse)};
}

EvaluationReport evaluate(const std::vector<Sample>& samples, const Predictions& predictions,
                          Split split, double tau_nm, unsigned threads) {
    if (!(tau_nm > 0.0)) throw InvalidArgument("tau must be positive");

    std::vector<std::int64_t> missing;
    for (const Sample& s : samples) {
        if (!predictions.contains(s.sample_id)) missing.push_back(s.sample_id);
    }
    if (!missing.empty()) {
        std::ostringstream os;
        os << missing.size() << " sample id(s) of split '" << split_name(split)
           << "' have no predictions; first missing:";
        for (std::size_t i = 0; i < std::min<std::size_t>(10, missing.size()); ++i) {
            os << ' ' << missing[i];
        }
        throw DataError(os.str());
    }
    if (predictions.size() != samples.size()) {
        for (const auto& [id, _] : predictions) {
            const bool known = std::any_of(samples.begin(), samples.end(),
                                           [id = id](const Sample& s) { return s.sample_id == id; });
            if (!known) {
                throw DataError("predictions contain sample id " + std::to_string(id) +
                                " which is not in split '" + split_name(split) + "'");
            }
        }
    }
    for (const Sample& s : samples) {
        const auto& p = predictions.at(s.sample_id);
        if (p.size() != s.ground_truth.size()) {
            throw DataError("sample " + std::to_string(s.sample_id) + ": expected " +
                            std::to_string(s.ground_truth.size()) + " predicted rows, found " +
                            std::to_string(p.size()));
        }
    }

    EvaluationReport report;
    report.split = split_name(split);
    report.tau_nm = tau_nm;
    report.per_sample.resize(samples.size());
    detail::parallel_for(static_cast<std::int64_t>(samples.size()), threads, [&](std::int64_t i) {
        const Sample& s = samples[static_cast<std::size_t>(i)];
        report.per_sample[static_cast<std::size_t>(i)] =
            score_sample(s, predictions.at(s.sample_id), tau_nm);
    });
    report.summary = summarize(report.per_sample);
    return report;
}

std::string report_json(const EvaluationReport& report) {
    auto stat = [](const MeanStd& m) {
        nlohmann::ordered_json j;
        j["mean"] = m.mean;
        j["std"] = m.std;
        j["n"] = m.count;
        return j;
    };
    const auto& s = report.summary;
    nlohmann::ordered_json j;
    j["split"] = report.split;
    j["tau_nm"] = report.tau_nm;
    j["n_samples"] = report.per_sample.size();
    j["chamfer_nm"] = stat(s.chamfer_nm);
    j["hungarian_error_nm"] = stat(s.hungarian_error_nm);
    j["tp"] = stat(s.tp);
    j["fp"] = stat(s.fp);
    j["fn"] = stat(s.fn);
    j["fp_fn"] = stat(s.fp_fn);
    j["detection_accuracy"] = stat(s.detection_accuracy);
    j["rmse_tp_nm"] = stat(s.rmse_tp_nm);
    return j.dump(2) + "\n";
}

void write_per_sample_csv(const EvaluationReport& report, std::ostream& out) {
    out << "sample_id,chamfer_nm,hungarian_nm,tp,fp,fn,rmse_tp_nm\n";
    for (const auto& m : report.per_sample) {
        out << m.sample_id << ',' << format_fixed(m.chamfer_nm, 6) << ','
            << format_fixed(m.hungarian_nm, 6) << ',' << m.detection.tp << ','
            << m.detection.fp << ',' << m.detection.fn << ',';
        if (m.detection.rmse_tp_nm) out << format_fixed(*m.detection.rmse_tp_nm, 6);
        out << '\n';
    }
}

}  // namespace smlmc
