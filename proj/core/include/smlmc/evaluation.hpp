#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "smlmc/dataset.hpp"
#include "smlmc/metrics.hpp"

namespace smlmc {

/// Predicted emitter positions keyed by sample id, rows in file order.
using Predictions = std::map<std::int64_t, std::vector<Point>>;

/// CSV `sample_id,x_nm,y_nm`. Throws ParseError / IoError.
Predictions read_predictions(const std::filesystem::path& path);
void write_predictions(const std::filesystem::path& path, const Predictions& predictions);

struct SampleMetrics {
    std::int64_t sample_id = 0;
    double chamfer_nm = 0.0;
    double hungarian_nm = 0.0;
    DetectionReport detection;
};

struct EvaluationSummary {
    MeanStd chamfer_nm;
    MeanStd hungarian_error_nm;
    MeanStd tp;
    MeanStd fp;
    MeanStd fn;
    MeanStd fp_fn;  // mean of (fp + fn) / 2; equals fp when |pred| = |truth|
    MeanStd detection_accuracy;
    MeanStd rmse_tp_nm;  // over samples with tp > 0
};

struct EvaluationReport {
    std::string split;
    double tau_nm = kDefaultTauNm;
    std::vector<SampleMetrics> per_sample;
    EvaluationSummary summary;
};

/// Checks that predictions cover the split exactly (one row per ground-truth
/// emitter of each sample) and scores every sample. Throws DataError naming
/// the first ten missing ids, or the first sample with a wrong row count.
EvaluationReport evaluate(const std::vector<Sample>& samples, const Predictions& predictions,
                          Split split, double tau_nm = kDefaultTauNm, unsigned threads = 0);

SampleMetrics score_sample(const Sample& sample, const std::vector<Point>& prediction,
                           double tau_nm);
EvaluationSummary summarize(const std::vector<SampleMetrics>& per_sample);

std::string report_json(const EvaluationReport& report);
/// `sample_id,chamfer_nm,hungarian_nm,tp,fp,fn,rmse_tp_nm`; rmse empty when undefined.
void write_per_sample_csv(const EvaluationReport& report, std::ostream& out);

}  // namespace smlmc
