#include "commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "smlmc/baseline.hpp"
#include "smlmc/dataset.hpp"
#include "smlmc/errors.hpp"
#include "smlmc/evaluation.hpp"
#include "smlmc/format.hpp"
#include "smlmc/metrics.hpp"
#include "smlmc/registry.hpp"
#include "smlmc/stats.hpp"

namespace smlmc::cli {

namespace fs = std::filesystem;

namespace {

struct GenerateArgs {
    std::string condition;
    std::int64_t samples = 100000;
    std::uint64_t seed = 0;
    std::string out;
    bool variable_n = false;
    unsigned threads = 0;
    std::optional<double> density_override;
    std::optional<double> mu_off_override;
    std::optional<double> sigma_override;
};

struct PredictArgs {
    std::string dataset;
    std::string split = "test";
    std::string out;
    std::int64_t restarts = 8;
    std::int64_t max_iters = 100;
    std::uint64_t seed = 0;
};

struct EvaluateArgs {
    std::string dataset;
    std::string pred;
    std::string split = "test";
    double tau = kDefaultTauNm;
    std::string out;
};

struct StatsArgs {
    std::string dataset;
    std::int64_t window = 0;
};

struct SelectArgs {
    std::string dataset;
    std::string losses;
    std::string mode;
    std::string out;
};

struct DumpArgs {
    std::string dataset;
    std::string out;
};

std::string override_suffix(const GenerateArgs& a) {
    std::ostringstream os;
    if (a.density_override) os << "density=" << *a.density_override << ";";
    if (a.mu_off_override) os << "mu_off=" << *a.mu_off_override << ";";
    if (a.sigma_override) os << "sigma=" << *a.sigma_override << ";";
    std::string s = os.str();
    if (s.empty()) return s;
    s.pop_back();
    return "[" + s + "]";
}

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
    ConditionParams params = find_condition(a.condition);
    if (a.density_override) params.density_per_um2 = *a.density_override;
    if (a.mu_off_override) params.mu_off_frames = *a.mu_off_override;
    if (a.sigma_override) params.sigma_loc_nm = *a.sigma_override;
    params.id += override_suffix(a);
    params.validate();
    check_not_excluded(params);
    if (a.samples < 10) throw InvalidArgument("--samples must be at least 10");

    GenerateOptions opt;
    opt.n_samples = a.samples;
    opt.master_seed = a.seed;
    opt.fixed_n = !a.variable_n;
    opt.output_dir = a.out;
    opt.threads = a.threads;
    const DatasetManifest m = generate_dataset(params, opt);
    out << "manifest: " << (fs::path(a.out) / "manifest.json").string() << "\n";
    out << "n_out: " << m.n_out << "\n";
    out << "splits: " << m.splits.train << "/" << m.splits.val << "/" << m.splits.test << "\n";
    return kOk;
}

int cmd_predict(const PredictArgs& a, std::ostream& out) {
    const Split split = parse_split(a.split);
    const auto samples = load_split(a.dataset, split);
    Predictions preds;
    for (const Sample& s : samples) {
        BaselineConfig cfg;
        cfg.n_out = static_cast<std::int64_t>(s.ground_truth.size());
        cfg.n_restarts = a.restarts;
        cfg.max_iters = a.max_iters;
        cfg.seed = mix64(a.seed ^ mix64(static_cast<std::uint64_t>(s.sample_id)));
        preds[s.sample_id] = cluster_predict(s.localizations, cfg);
    }
    write_predictions(a.out, preds);
    out << "predictions: " << a.out << " (" << preds.size() << " samples)\n";
    return kOk;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
    const Split split = parse_split(a.split);
    if (!(a.tau > 0.0)) throw InvalidArgument("--tau must be positive");
    const auto samples = load_split(a.dataset, split);
    const Predictions preds = read_predictions(a.pred);
    const EvaluationReport report = evaluate(samples, preds, split, a.tau);

    std::string prefix = a.out;
    if (prefix.empty()) {
        fs::path p(a.pred);
        prefix = (p.parent_path() / p.stem()).string() + "." + a.split;
    }
    const std::string json_path = prefix + ".report.json";
    const std::string csv_path = prefix + ".per_sample.csv";
    {
        std::ofstream f(json_path, std::ios::binary | std::ios::trunc);
        f << report_json(report);
        if (!f) throw IoError("cannot write " + json_path);
    }
    {
        std::ofstream f(csv_path, std::ios::binary | std::ios::trunc);
        write_per_sample_csv(report, f);
        if (!f) throw IoError("cannot write " + csv_path);
    }
    const auto& s = report.summary;
    out << "split " << report.split << ", " << report.per_sample.size() << " samples, tau "
        << report.tau_nm << " nm\n";
    out << "chamfer_nm " << format_fixed(s.chamfer_nm.mean, 4) << " +- "
        << format_fixed(s.chamfer_nm.std, 4) << "\n";
    out << "hungarian_error_nm " << format_fixed(s.hungarian_error_nm.mean, 4) << " +- "
        << format_fixed(s.hungarian_error_nm.std, 4) << "\n";
    out << "tp " << format_fixed(s.tp.mean, 4) << "  fp_fn " << format_fixed(s.fp_fn.mean, 4)
        << "  detection_accuracy " << format_fixed(s.detection_accuracy.mean, 4) << "\n";
    out << "rmse_tp_nm " << format_fixed(s.rmse_tp_nm.mean, 4) << " (" << s.rmse_tp_nm.count
        << " samples with tp > 0)\n";
    out << "report: " << json_path << "\nper-sample: " << csv_path << "\n";
    return kOk;
}

int cmd_stats(const StatsArgs& a, std::ostream& out) {
    const LoadedDataset data = load_dataset(a.dataset);
    std::int64_t window = a.window;
    if (window == 0) {
        const auto& reg = condition_registry();
        if (auto it = reg.find(data.manifest.condition); it != reg.end()) {
            window = it->second.max_frames;
        }
    }
    print_stats(compute_stats(data, window), out);
    return kOk;
}

std::vector<std::pair<std::int64_t, double>> read_losses(const fs::path& path) {
    HashingLineReader reader(path);
    std::string_view line;
    if (!reader.next(line) || line != "sample_id,loss") {
        throw ParseError(path.string(), 1, "expected header 'sample_id,loss'");
    }
    std::vector<std::pair<std::int64_t, double>> rows;
    while (reader.next(line)) {
        if (line.empty()) continue;
        const auto f = split_fields(line);
        std::int64_t id = 0;
        double loss = 0.0;
        if (f.size() != 2 || !parse_int(f[0], id) || !parse_double(f[1], loss)) {
            throw ParseError(path.string(), reader.line_number(), "expected sample_id,loss");
        }
        rows.emplace_back(id, loss);
    }
    if (rows.empty()) throw DataError(path.string() + ": no loss rows");
    return rows;
}

int cmd_select(const SelectArgs& a, std::ostream& out) {
    SelectionMode mode;
    if (a.mode == "median") mode = SelectionMode::Median;
    else if (a.mode == "easy") mode = SelectionMode::Easy;
    else if (a.mode == "hard") mode = SelectionMode::Hard;
    else throw InvalidArgument("--mode must be median, easy or hard");

    const auto rows = read_losses(a.losses);
    const LoadedDataset data = load_dataset(a.dataset);
    std::map<std::int64_t, const Sample*> by_id;
    for (Split s : kAllSplits) {
        for (const Sample& sample : data.split(s)) by_id[sample.sample_id] = &sample;
    }
    for (const auto& [id, _] : rows) {
        if (!by_id.contains(id)) {
            throw DataError("loss file references sample " + std::to_string(id) +
                            " which is not in the dataset");
        }
    }

    std::vector<double> losses;
    losses.reserve(rows.size());
    for (const auto& r : rows) losses.push_back(r.second);
    const auto picked = select_examples(losses, mode);

    fs::path out_dir = a.out.empty() ? fs::path(a.losses).parent_path() : fs::path(a.out);
    if (out_dir.empty()) out_dir = ".";
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    const fs::path loc_path = out_dir / ("selected_" + a.mode + ".localizations.csv");
    const fs::path gt_path = out_dir / ("selected_" + a.mode + ".ground_truth.csv");
    std::ofstream loc(loc_path, std::ios::binary | std::ios::trunc);
    std::ofstream gt(gt_path, std::ios::binary | std::ios::trunc);
    if (!loc || !gt) throw IoError("cannot write selection files in " + out_dir.string());
    loc << "sample_id,frame,x_nm,y_nm,true_emitter_idx\n";
    gt << "sample_id,emitter_idx,x_nm,y_nm\n";
    for (std::size_t idx : picked) {
        const Sample& s = *by_id.at(rows[idx].first);
        out << s.sample_id << "\n";
        for (std::size_t i = 0; i < s.ground_truth.size(); ++i) {
            gt << s.sample_id << ',' << i << ',' << format_coord(s.ground_truth[i].x_nm) << ','
               << format_coord(s.ground_truth[i].y_nm) << '\n';
        }
        for (const auto& rec : s.localizations) {
            loc << s.sample_id << ',' << rec.frame << ',' << format_coord(rec.x_nm) << ','
                << format_coord(rec.y_nm) << ',' << rec.true_emitter_id << '\n';
        }
    }
    return kOk;
}

int cmd_dump(const DumpArgs& a, std::ostream& out) {
    const LoadedDataset data = load_dataset(a.dataset);
    if (a.out.empty()) {
        write_canonical_dump(data, out);
        return kOk;
    }
    std::ofstream f(a.out, std::ios::binary | std::ios::trunc);
    write_canonical_dump(data, f);
    if (!f) throw IoError("cannot write " + a.out);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"smlmc: SMLM localization-sequence simulator and benchmark harness"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "simulate a dataset for one condition");
    generate->add_option("--condition", gen.condition, "condition id (D1-D6, P1-P4)")->required();
    generate->add_option("--samples", gen.samples, "number of samples")->capture_default_str();
    generate->add_option("--seed", gen.seed, "master seed")->capture_default_str();
    generate->add_option("--out", gen.out, "output directory")->required();
    generate->add_flag("--variable-n", gen.variable_n,
                       "keep every sample with >= 1 retained emitter instead of fixing N");
    generate->add_option("--threads", gen.threads, "worker threads (0 = all cores)");
    generate->add_option("--density-override", gen.density_override, "emitters per um^2");
    generate->add_option("--mu-off-override", gen.mu_off_override, "mean off-dwell, frames");
    generate->add_option("--sigma-override", gen.sigma_override, "localization noise, nm");

    PredictArgs pred;
    auto* predict = app.add_subcommand("predict", "run the k-means baseline on a split");
    predict->add_option("--dataset", pred.dataset)->required();
    predict->add_option("--split", pred.split)->capture_default_str();
    predict->add_option("--out", pred.out, "predictions CSV")->required();
    predict->add_option("--restarts", pred.restarts)->capture_default_str();
    predict->add_option("--max-iters", pred.max_iters)->capture_default_str();
    predict->add_option("--seed", pred.seed)->capture_default_str();

    EvaluateArgs eval;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "score predictions against a split");
    evaluate_cmd->add_option("--dataset", eval.dataset)->required();
    evaluate_cmd->add_option("--pred", eval.pred, "predictions CSV")->required();
    evaluate_cmd->add_option("--split", eval.split)->capture_default_str();
    evaluate_cmd->add_option("--tau", eval.tau, "matching threshold, nm")->capture_default_str();
    evaluate_cmd->add_option("--out", eval.out,
                             "report prefix (default: predictions path + split)");

    StatsArgs st;
    auto* stats = app.add_subcommand("stats", "photophysics statistics of a dataset");
    stats->add_option("--dataset", st.dataset)->required();
    stats->add_option("--window", st.window,
                      "acquisition length for the off-dwell correction (default: condition)");

    SelectArgs sel;
    auto* select = app.add_subcommand("select-examples", "pick median / easy / hard samples");
    select->add_option("--dataset", sel.dataset)->required();
    select->add_option("--losses", sel.losses, "CSV sample_id,loss (model-averaged)")->required();
    select->add_option("--mode", sel.mode)->required()->check(
        CLI::IsMember({"median", "easy", "hard"}));
    select->add_option("--out", sel.out, "directory for the selected samples");

    DumpArgs dump;
    auto* dump_cmd = app.add_subcommand("dump", "canonical text dump of a loaded dataset");
    dump_cmd->add_option("--dataset", dump.dataset)->required();
    dump_cmd->add_option("--out", dump.out, "output file (default: stdout)");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("smlmc");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kUsage;
    }

    try {
        if (*generate) return cmd_generate(gen, out);
        if (*predict) return cmd_predict(pred, out);
        if (*evaluate_cmd) return cmd_evaluate(eval, out);
        if (*stats) return cmd_stats(st, out);
        if (*select) return cmd_select(sel, out);
        if (*dump_cmd) return cmd_dump(dump, out);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ExcludedRegimeError& e) {
        err << "error: " << e.what() << "\n";
        return kExcludedRegime;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kUsage;
}

}  // namespace smlmc::cli
