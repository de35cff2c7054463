#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gazeconf/errors.hpp"
#include "gazeconf/eval.hpp"
#include "gazeconf/rng.hpp"
#include "gazeconf/gaze_model.hpp"
#include "gazeconf/pipeline.hpp"
#include "gazeconf/report.hpp"
#include "gazeconf/synth.hpp"
#include "gazeconf/util.hpp"

namespace {

using namespace gazeconf;

// exit codes: 0 success, 1 usage, 2 data/validation, 3 convergence
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitConvergence = 3;

struct CommonOpts {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string aoi_mode = "relative";
    std::string layout_path;
    std::string eval_mode = "lopo";
    std::string feature_mode = "stepwise";
    bool include_unlabeled = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "INI file with detector/SVM parameters");
    cmd->add_option("--seed", o.seed, "master seed for every random choice");
}

void add_aoi(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--aoi-mode", o.aoi_mode, "AOI source: absolute or relative")
        ->check(CLI::IsMember({"absolute", "relative"}));
    cmd->add_option("--layout", o.layout_path, "layout JSON (required with --aoi-mode absolute)");
}

PipelineConfig build_config(const CommonOpts& o) {
    PipelineConfig cfg;
    if (!o.config_path.empty()) {
        const IniFile ini = IniFile::parse_file(o.config_path);
        cfg.detector = DetectorParams::from_ini(ini);
        cfg.svm = SvmParams::from_ini(ini);
    }
    cfg.seed = o.seed;
    cfg.aoi_mode = (o.aoi_mode == "absolute") ? AoiMode::Absolute : AoiMode::Relative;
    if (!o.layout_path.empty()) {
        cfg.layout = load_layout(o.layout_path);
    }
    if (o.eval_mode == "pooled") cfg.eval_mode = EvalMode::Pooled;
    if (o.feature_mode == "all") {
        cfg.feature_mode = FeatureMode::All;
    } else if (o.feature_mode == "reading-time-only") {
        cfg.feature_mode = FeatureMode::ReadingTimeOnly;
    } else {
        cfg.feature_mode = FeatureMode::Stepwise;
    }
    cfg.labeled_only = !o.include_unlabeled;
    cfg.validate();
    return cfg;
}

void print_stats(const FeaturizeStats& stats) {
    std::cerr << "records kept: " << stats.kept << ", dropped by filter: "
              << stats.dropped_by_filter << ", dropped without events: "
              << stats.dropped_no_events << "\n";
}

int cmd_synth(const std::string& profile_path, int participants, int questions,
              const std::string& out_path, std::uint64_t seed) {
    BehaviorProfile profile =
        profile_path.empty() ? BehaviorProfile::defaults() : BehaviorProfile::from_file(profile_path);
    if (participants <= 1) {
        Session s = generate_session(profile, "p001", questions, derive_seed(seed, 1000));
        save_session(s, out_path);
        std::cerr << "wrote 1 session, " << s.records.size() << " questions\n";
    } else {
        std::vector<Session> all = generate_population(profile, participants, questions, seed);
        save_sessions(all, out_path);
        std::cerr << "wrote " << all.size() << " sessions, " << questions
                  << " questions each\n";
    }
    return kExitOk;
}

int cmd_detect(const std::string& log_path, const std::string& out_path,
               const PipelineConfig& cfg) {
    const Session session = load_session(log_path);
    nlohmann::json out;
    out["participant"] = session.participant_id;
    nlohmann::json questions = nlohmann::json::array();
    for (const QuestionRecord& rec : session.records) {
        const EventStream ev = detect_events(rec.samples, cfg.detector);
        nlohmann::json qj;
        qj["question"] = rec.answer.question_id;
        nlohmann::json fixations = nlohmann::json::array();
        for (const Fixation& f : ev.fixations) {
            fixations.push_back({{"start", f.start},
                                 {"end", f.end},
                                 {"cx", f.cx},
                                 {"cy", f.cy},
                                 {"duration", f.duration}});
        }
        nlohmann::json saccades = nlohmann::json::array();
        for (const Saccade& s : ev.saccades) {
            saccades.push_back({{"start", s.start},
                                {"end", s.end},
                                {"from_x", s.from_x},
                                {"from_y", s.from_y},
                                {"to_x", s.to_x},
                                {"to_y", s.to_y},
                                {"length", s.length},
                                {"duration", s.duration},
                                {"speed", s.speed}});
        }
        qj["fixations"] = fixations;
        qj["saccades"] = saccades;
        questions.push_back(std::move(qj));
    }
    out["questions"] = questions;
    write_text_file(out_path, out.dump(2) + "\n");
    std::cerr << "wrote events for " << session.records.size() << " questions\n";
    return kExitOk;
}

int cmd_extract(const std::string& log_path, const std::string& out_path,
                const PipelineConfig& cfg) {
    const std::vector<Session> sessions = load_sessions(log_path);
    FeaturizeStats stats;
    const Dataset d = featurize_sessions(sessions, cfg, &stats);
    if (d.rows.empty()) {
        throw ValidationError("no records survived filtering; nothing to extract");
    }
    write_feature_csv(d, out_path);
    print_stats(stats);
    return kExitOk;
}

int cmd_train(const std::string& csv_path, const std::string& out_path,
              const PipelineConfig& cfg) {
    Dataset d = read_feature_csv(csv_path);
    // unlabeled rows cannot train; keep the labeled subset
    Dataset labeled;
    for (DataRow& r : d.rows) {
        if (r.confident.has_value()) labeled.rows.push_back(std::move(r));
    }
    if (labeled.rows.size() < d.rows.size()) {
        std::cerr << "ignoring " << (d.rows.size() - labeled.rows.size())
                  << " unlabeled rows\n";
    }
    labeled.validate_for_training();
    if (labeled.count_confident() == 0 || labeled.count_unconfident() == 0) {
        throw ValidationError("training data contains a single class");
    }

    const std::vector<int> selected = select_features(labeled, cfg, cfg.seed);
    const Dataset balanced = oversample(labeled, derive_seed(cfg.seed, 0x0b));
    const SvmModel model = svm_train(balanced, cfg.svm, selected);
    save_model(model, out_path);

    std::cerr << "trained on " << balanced.rows.size() << " rows (" << labeled.rows.size()
              << " before oversampling), " << model.support_vectors.size()
              << " support vectors, features:";
    for (int f : selected) std::cerr << " f" << f;
    std::cerr << "\n";
    return kExitOk;
}

int cmd_eval(const std::vector<std::string>& log_paths, const std::string& out_path,
             const std::string& pr_csv_path, const PipelineConfig& cfg) {
    std::vector<Session> sessions;
    for (const std::string& path : log_paths) {
        std::vector<Session> some = load_sessions(path);
        sessions.insert(sessions.end(), std::make_move_iterator(some.begin()),
                        std::make_move_iterator(some.end()));
    }
    const EvalReport report = run_eval(sessions, cfg);
    write_text_file(out_path, report.to_json());
    if (!pr_csv_path.empty()) {
        write_pr_csv(report, pr_csv_path);
    }

    std::cout << "rows: " << report.n_rows << " (" << report.n_confident << " confident, "
              << report.n_unconfident << " unconfident)\n";
    std::cout << "confidence detection   AP = " << format_double(report.confidence.average_precision)
              << "\n";
    std::cout << "unconfidence detection AP = "
              << format_double(report.unconfidence.average_precision) << "\n";
    for (const FoldReport& f : report.folds) {
        std::cout << "  fold " << f.name << ": ";
        if (f.skipped) {
            std::cout << "skipped (" << f.skip_reason << ")\n";
            continue;
        }
        std::cout << f.n_test << " rows";
        if (f.ap_confidence) std::cout << ", AP conf " << format_double(*f.ap_confidence);
        if (f.ap_unconfidence) std::cout << ", AP unconf " << format_double(*f.ap_unconfidence);
        std::cout << "\n";
    }
    return kExitOk;
}

int cmd_report(const std::string& model_path, const std::string& log_path,
               const std::string& out_path, const std::string& md_path,
               const PipelineConfig& cfg) {
    const SvmModel model = load_model(model_path);
    const Session session = load_session(log_path);

    // keep unlabeled records: prediction does not need the survey label
    PipelineConfig report_cfg = cfg;
    report_cfg.labeled_only = false;
    const Dataset d = featurize_session(session, report_cfg);
    if (d.rows.empty()) {
        throw ValidationError("no records survived filtering; nothing to report");
    }

    std::vector<AnswerOutcome> outcomes;
    outcomes.reserve(d.rows.size());
    for (const DataRow& row : d.rows) {
        const double score = svm_decision(model, row.features);
        AnswerOutcome o;
        o.question_id = row.question;
        o.correct = row.features.f(30) > 0.5;
        o.predicted_confident = score > 0.0;
        o.decision_score = score;
        outcomes.push_back(std::move(o));
    }

    const std::vector<ReviewItem> items = build_review_list(outcomes);
    render_report(items, summarize(outcomes), out_path, md_path);
    std::cout << "review list: " << items.size() << " of " << outcomes.size()
              << " questions\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gaze-based answer-confidence estimation pipeline"};
    app.require_subcommand(1);

    CommonOpts opts;

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic gaze log");
    std::string synth_profile;
    std::string synth_out = "gaze.jsonl";
    int synth_participants = 1;
    int synth_questions = 50;
    synth->add_option("--profile", synth_profile, "behavior profile INI");
    synth->add_option("--participants", synth_participants, "number of participants");
    synth->add_option("--questions", synth_questions, "questions per participant");
    synth->add_option("--out", synth_out, "output gaze log (JSONL)")->required();
    add_common(synth, opts);

    // detect
    auto* detect = app.add_subcommand("detect", "segment a gaze log into fixations/saccades");
    std::string detect_log;
    std::string detect_out = "events.json";
    detect->add_option("log", detect_log, "input gaze log")->required();
    detect->add_option("--out", detect_out, "output events JSON")->required();
    add_common(detect, opts);

    // extract
    auto* extract = app.add_subcommand("extract", "compute the feature matrix CSV");
    std::string extract_log;
    std::string extract_out = "features.csv";
    extract->add_option("log", extract_log, "input gaze log")->required();
    extract->add_option("--out", extract_out, "output feature CSV")->required();
    extract->add_flag("--include-unlabeled", opts.include_unlabeled,
                      "keep records without a confidence label");
    add_common(extract, opts);
    add_aoi(extract, opts);

    // train
    auto* train = app.add_subcommand("train", "train the confidence classifier");
    std::string train_csv;
    std::string train_out = "model.json";
    train->add_option("csv", train_csv, "input feature CSV")->required();
    train->add_option("--out", train_out, "output model JSON")->required();
    train->add_option("--features", opts.feature_mode,
                      "feature policy: all, stepwise or reading-time-only")
        ->check(CLI::IsMember({"all", "stepwise", "reading-time-only"}));
    add_common(train, opts);

    // eval
    auto* eval = app.add_subcommand("eval", "cross-validated evaluation of the pipeline");
    std::vector<std::string> eval_logs;
    std::string eval_out = "eval.json";
    std::string eval_pr_csv;
    eval->add_option("logs", eval_logs, "input gaze logs")->required();
    eval->add_option("--out", eval_out, "output report JSON")->required();
    eval->add_option("--pr-csv", eval_pr_csv, "optional recall/precision CSV");
    eval->add_option("--eval", opts.eval_mode, "cross-validation scheme: lopo or pooled")
        ->check(CLI::IsMember({"lopo", "pooled"}));
    eval->add_option("--features", opts.feature_mode,
                     "feature policy: all, stepwise or reading-time-only")
        ->check(CLI::IsMember({"all", "stepwise", "reading-time-only"}));
    add_common(eval, opts);
    add_aoi(eval, opts);

    // report
    auto* report = app.add_subcommand("report", "build the review report for one session");
    std::string report_model;
    std::string report_log;
    std::string report_out = "report.json";
    std::string report_md;
    report->add_option("log", report_log, "input gaze log (single participant)")->required();
    report->add_option("--model", report_model, "trained model JSON")->required();
    report->add_option("--out", report_out, "output report JSON")->required();
    report->add_option("--md", report_md, "optional markdown rendering");
    add_common(report, opts);
    add_aoi(report, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // CLI11's own exit codes are remapped onto the documented scheme:
        // help exits 0, any usage problem exits 1
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*synth) {
            return cmd_synth(synth_profile, synth_participants, synth_questions, synth_out,
                             opts.seed);
        }
        const PipelineConfig cfg = build_config(opts);
        if (*detect) return cmd_detect(detect_log, detect_out, cfg);
        if (*extract) return cmd_extract(extract_log, extract_out, cfg);
        if (*train) return cmd_train(train_csv, train_out, cfg);
        if (*eval) return cmd_eval(eval_logs, eval_out, eval_pr_csv, cfg);
        if (*report) return cmd_report(report_model, report_log, report_out, report_md, cfg);
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
