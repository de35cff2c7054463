#include "gazeconf/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gazeconf/errors.hpp"
#include "gazeconf/rng.hpp"
#include "gazeconf/util.hpp"

namespace gazeconf {

using nlohmann::json;

std::array<double, 11> pr_curve_11pt(const RankedPredictions& ranked) {
    std::size_t total_pos = 0;
    for (const auto& [score, pos] : ranked) {
        if (pos) ++total_pos;
    }
    if (total_pos == 0) {
        throw ValidationError("pr_curve_11pt: no positive items in the ranking");
    }

    RankedPredictions sorted = ranked;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });

    // (recall, precision) at each tie-group boundary
    std::vector<std::pair<double, double>> points;
    std::size_t tp = 0;
    std::size_t seen = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j].first == sorted[i].first) {
            if (sorted[j].second) ++tp;
            ++seen;
            ++j;
        }
        points.emplace_back(static_cast<double>(tp) / static_cast<double>(total_pos),
                            static_cast<double>(tp) / static_cast<double>(seen));
        i = j;
    }

    std::array<double, 11> out{};
    for (int k = 0; k <= 10; ++k) {
        const double rho = static_cast<double>(k) / 10.0;
        double best = 0.0;
        for (const auto& [recall, precision] : points) {
            // the small epsilon absorbs 0.30000000000000004-style grid error
            if (recall + 1e-12 >= rho) best = std::max(best, precision);
        }
        out[static_cast<std::size_t>(k)] = best;
    }
    return out;
}

double average_precision_11pt(const RankedPredictions& ranked) {
    const auto curve = pr_curve_11pt(ranked);
    double sum = 0.0;
    for (double p : curve) sum += p;
    return sum / 11.0;
}

namespace {

TargetEval eval_target(const RankedPredictions& ranked) {
    TargetEval t;
    t.precisions = pr_curve_11pt(ranked);
    double sum = 0.0;
    for (double p : t.precisions) sum += p;
    t.average_precision = sum / 11.0;
    return t;
}

std::optional<double> try_ap(const RankedPredictions& ranked) {
    for (const auto& [score, pos] : ranked) {
        if (pos) return average_precision_11pt(ranked);
    }
    return std::nullopt;
}

RankedPredictions for_confidence(const std::vector<std::pair<double, bool>>& scored) {
    RankedPredictions r;
    r.reserve(scored.size());
    for (const auto& [score, confident] : scored) r.emplace_back(score, confident);
    return r;
}

RankedPredictions for_unconfidence(const std::vector<std::pair<double, bool>>& scored) {
    RankedPredictions r;
    r.reserve(scored.size());
    for (const auto& [score, confident] : scored) r.emplace_back(-score, !confident);
    return r;
}

} // namespace

EvalReport evaluate_both_targets(const std::vector<FoldPredictions>& folds) {
    EvalReport report;
    std::vector<std::pair<double, bool>> pooled;
    std::set<int> feature_union;

    for (const FoldPredictions& fold : folds) {
        FoldReport fr;
        fr.name = fold.name;
        fr.skipped = fold.skipped;
        fr.skip_reason = fold.skip_reason;
        fr.selected_features = fold.selected_features;
        fr.n_test = fold.scored.size();
        if (!fold.skipped) {
            pooled.insert(pooled.end(), fold.scored.begin(), fold.scored.end());
            feature_union.insert(fold.selected_features.begin(), fold.selected_features.end());
            fr.ap_confidence = try_ap(for_confidence(fold.scored));
            fr.ap_unconfidence = try_ap(for_unconfidence(fold.scored));
        }
        report.folds.push_back(std::move(fr));
    }

    if (pooled.empty()) {
        throw ValidationError("evaluate_both_targets: no scored predictions");
    }
    report.n_rows = pooled.size();
    for (const auto& [score, confident] : pooled) {
        if (confident) {
            ++report.n_confident;
        } else {
            ++report.n_unconfident;
        }
    }
    report.confidence = eval_target(for_confidence(pooled));
    report.unconfidence = eval_target(for_unconfidence(pooled));
    report.selected_features_union.assign(feature_union.begin(), feature_union.end());
    return report;
}

namespace {

FoldPredictions run_fold(const std::string& name, const Dataset& train, const Dataset& test,
                         const PipelineConfig& cfg, std::uint64_t fold_seed) {
    FoldPredictions fold;
    fold.name = name;
    if (train.count_confident() == 0 || train.count_unconfident() == 0) {
        fold.skipped = true;
        fold.skip_reason = "single-class training data";
        return fold;
    }
    fold.selected_features = select_features(train, cfg, fold_seed);
    const Dataset balanced = oversample(train, derive_seed(fold_seed, 0x0b));
    const SvmModel model = svm_train(balanced, cfg.svm, fold.selected_features);
    fold.scored.reserve(test.rows.size());
    for (const DataRow& r : test.rows) {
        fold.scored.emplace_back(svm_decision(model, r.features), *r.confident);
    }
    return fold;
}

} // namespace

EvalReport lopo_cv(const std::vector<Session>& sessions, const PipelineConfig& cfg) {
    cfg.validate();
    // participants in first-appearance order; ids must be unique per session list
    std::vector<std::string> participants;
    for (const Session& s : sessions) {
        if (std::find(participants.begin(), participants.end(), s.participant_id) ==
            participants.end()) {
            participants.push_back(s.participant_id);
        }
    }
    if (participants.size() < 2) {
        throw ValidationError("lopo_cv: need at least 2 participants, got " +
                              std::to_string(participants.size()));
    }

    const Dataset all = featurize_sessions(sessions, cfg);
    all.validate_for_training();

    std::vector<FoldPredictions> folds;
    for (std::size_t p = 0; p < participants.size(); ++p) {
        Dataset train;
        Dataset test;
        for (const DataRow& r : all.rows) {
            (r.participant == participants[p] ? test : train).rows.push_back(r);
        }
        if (test.rows.empty()) {
            FoldPredictions fold;
            fold.name = participants[p];
            fold.skipped = true;
            fold.skip_reason = "participant has no usable records";
            folds.push_back(std::move(fold));
            continue;
        }
        folds.push_back(
            run_fold(participants[p], train, test, cfg, derive_seed(cfg.seed, p)));
    }

    EvalReport report = evaluate_both_targets(folds);
    report.feature_mode = to_string(cfg.feature_mode);
    report.eval_mode = to_string(EvalMode::Lopo);
    return report;
}

EvalReport pooled_cv(const Dataset& d, const PipelineConfig& cfg) {
    cfg.validate();
    d.validate_for_training();
    constexpr std::size_t kFolds = 5;
    if (d.rows.size() < kFolds) {
        throw ValidationError("pooled_cv: need at least 5 rows");
    }

    // stratified assignment: shuffle each class, deal round-robin
    std::vector<std::size_t> conf;
    std::vector<std::size_t> unconf;
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        (*d.rows[i].confident ? conf : unconf).push_back(i);
    }
    Rng rng(derive_seed(cfg.seed, 0x5f));
    rng.shuffle(conf);
    rng.shuffle(unconf);
    std::vector<std::size_t> fold_of(d.rows.size(), 0);
    for (std::size_t i = 0; i < conf.size(); ++i) fold_of[conf[i]] = i % kFolds;
    for (std::size_t i = 0; i < unconf.size(); ++i) fold_of[unconf[i]] = i % kFolds;

    std::vector<FoldPredictions> folds;
    for (std::size_t k = 0; k < kFolds; ++k) {
        Dataset train;
        Dataset test;
        for (std::size_t i = 0; i < d.rows.size(); ++i) {
            (fold_of[i] == k ? test : train).rows.push_back(d.rows[i]);
        }
        folds.push_back(run_fold("fold" + std::to_string(k), train, test, cfg,
                                 derive_seed(cfg.seed, 100 + k)));
    }

    EvalReport report = evaluate_both_targets(folds);
    report.feature_mode = to_string(cfg.feature_mode);
    report.eval_mode = to_string(EvalMode::Pooled);
    return report;
}

EvalReport run_eval(const std::vector<Session>& sessions, const PipelineConfig& cfg) {
    if (cfg.eval_mode == EvalMode::Lopo) {
        return lopo_cv(sessions, cfg);
    }
    const Dataset d = featurize_sessions(sessions, cfg);
    return pooled_cv(d, cfg);
}

std::vector<LearningCurvePoint> learning_curve(const Dataset& d,
                                               const std::vector<std::size_t>& sizes,
                                               int repeats, const SvmParams& params,
                                               std::uint64_t seed) {
    d.validate_for_training();
    if (repeats < 1) {
        throw ValidationError("learning_curve: repeats must be >= 1");
    }
    for (std::size_t s : sizes) {
        if (s < 4) {
            throw ValidationError("learning_curve: size must be at least 4");
        }
        if (s >= d.rows.size()) {
            throw ValidationError("learning_curve: size " + std::to_string(s) +
                                  " leaves no holdout (dataset has " +
                                  std::to_string(d.rows.size()) + " rows)");
        }
    }

    std::vector<int> all_features(kFeatureCount);
    for (int i = 0; i < kFeatureCount; ++i) all_features[static_cast<std::size_t>(i)] = i + 1;

    std::vector<std::size_t> conf;
    std::vector<std::size_t> unconf;
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        (*d.rows[i].confident ? conf : unconf).push_back(i);
    }
    const double frac_conf =
        static_cast<double>(conf.size()) / static_cast<double>(d.rows.size());

    std::vector<LearningCurvePoint> out;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        const std::size_t size = sizes[si];
        // class-stratified subset size; at least one row per class
        std::size_t n_conf = static_cast<std::size_t>(
            std::llround(frac_conf * static_cast<double>(size)));
        n_conf = std::clamp<std::size_t>(n_conf, 1, size - 1);
        n_conf = std::min(n_conf, conf.size());
        const std::size_t n_unconf = std::min(size - n_conf, unconf.size());

        std::vector<double> aps;
        for (int rep = 0; rep < repeats; ++rep) {
            Rng rng(derive_seed(seed, si * 1000 + static_cast<std::size_t>(rep)));
            std::vector<std::size_t> conf_pool = conf;
            std::vector<std::size_t> unconf_pool = unconf;
            rng.shuffle(conf_pool);
            rng.shuffle(unconf_pool);

            std::vector<char> picked(d.rows.size(), 0);
            Dataset train;
            for (std::size_t i = 0; i < n_conf; ++i) {
                picked[conf_pool[i]] = 1;
                train.rows.push_back(d.rows[conf_pool[i]]);
            }
            for (std::size_t i = 0; i < n_unconf; ++i) {
                picked[unconf_pool[i]] = 1;
                train.rows.push_back(d.rows[unconf_pool[i]]);
            }

            const Dataset balanced = oversample(train, rng.next_u64());
            const SvmModel model = svm_train(balanced, params, all_features);

            RankedPredictions ranked;
            for (std::size_t i = 0; i < d.rows.size(); ++i) {
                if (picked[i]) continue;
                ranked.emplace_back(svm_decision(model, d.rows[i].features),
                                    *d.rows[i].confident);
            }
            aps.push_back(average_precision_11pt(ranked));
        }

        LearningCurvePoint pt;
        pt.size = size;
        double mean = 0.0;
        for (double a : aps) mean += a;
        mean /= static_cast<double>(aps.size());
        double var = 0.0;
        for (double a : aps) var += (a - mean) * (a - mean);
        var /= static_cast<double>(aps.size());
        pt.mean_ap = mean;
        pt.std_ap = std::sqrt(var);
        out.push_back(pt);
    }
    return out;
}

std::array<double, kFeatureCount> pearson_correlations(const Dataset& d) {
    d.validate_for_training();
    if (d.rows.size() < 2) {
        throw ValidationError("pearson_correlations: need at least 2 rows");
    }
    const double n = static_cast<double>(d.rows.size());
    double label_mean = 0.0;
    for (const DataRow& r : d.rows) label_mean += *r.confident ? 1.0 : 0.0;
    label_mean /= n;
    double label_var = 0.0;
    for (const DataRow& r : d.rows) {
        const double dl = (*r.confident ? 1.0 : 0.0) - label_mean;
        label_var += dl * dl;
    }
    if (label_var == 0.0) {
        throw ValidationError("pearson_correlations: labels have no variance");
    }

    std::array<double, kFeatureCount> out{};
    for (int f = 1; f <= kFeatureCount; ++f) {
        double mean = 0.0;
        for (const DataRow& r : d.rows) mean += r.features.f(f);
        mean /= n;
        double var = 0.0;
        double cov = 0.0;
        for (const DataRow& r : d.rows) {
            const double dv = r.features.f(f) - mean;
            const double dl = (*r.confident ? 1.0 : 0.0) - label_mean;
            var += dv * dv;
            cov += dv * dl;
        }
        out[static_cast<std::size_t>(f - 1)] =
            var == 0.0 ? 0.0 : cov / std::sqrt(var * label_var);
    }
    return out;
}

// ---------------------------------------------------------------------------
// report serialization
// ---------------------------------------------------------------------------

namespace {

json target_to_json(const TargetEval& t) {
    json j;
    j["average_precision"] = t.average_precision;
    j["precisions"] = t.precisions;
    return j;
}

TargetEval target_from_json(const json& j) {
    TargetEval t;
    t.average_precision = j.at("average_precision").get<double>();
    const auto p = j.at("precisions").get<std::vector<double>>();
    if (p.size() != 11) {
        throw ParseError("eval report: precisions must have 11 entries");
    }
    std::copy(p.begin(), p.end(), t.precisions.begin());
    return t;
}

} // namespace

std::string EvalReport::to_json() const {
    json j;
    j["n_rows"] = n_rows;
    j["n_confident"] = n_confident;
    j["n_unconfident"] = n_unconfident;
    j["feature_mode"] = feature_mode;
    j["eval_mode"] = eval_mode;
    j["targets"] = {{"confidence", target_to_json(confidence)},
                    {"unconfidence", target_to_json(unconfidence)}};
    j["selected_features_union"] = selected_features_union;
    json folds_json = json::array();
    for (const FoldReport& f : folds) {
        json fj;
        fj["name"] = f.name;
        fj["n_test"] = f.n_test;
        fj["skipped"] = f.skipped;
        fj["skip_reason"] = f.skip_reason;
        fj["selected_features"] = f.selected_features;
        fj["ap_confidence"] = f.ap_confidence ? json(*f.ap_confidence) : json(nullptr);
        fj["ap_unconfidence"] = f.ap_unconfidence ? json(*f.ap_unconfidence) : json(nullptr);
        folds_json.push_back(std::move(fj));
    }
    j["folds"] = folds_json;
    return j.dump(2) + "\n";
}

EvalReport EvalReport::from_json(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(origin + ": malformed eval report: " + e.what());
    }
    EvalReport r;
    try {
        r.n_rows = j.at("n_rows").get<std::size_t>();
        r.n_confident = j.at("n_confident").get<std::size_t>();
        r.n_unconfident = j.at("n_unconfident").get<std::size_t>();
        r.feature_mode = j.at("feature_mode").get<std::string>();
        r.eval_mode = j.at("eval_mode").get<std::string>();
        r.confidence = target_from_json(j.at("targets").at("confidence"));
        r.unconfidence = target_from_json(j.at("targets").at("unconfidence"));
        r.selected_features_union = j.at("selected_features_union").get<std::vector<int>>();
        for (const json& fj : j.at("folds")) {
            FoldReport f;
            f.name = fj.at("name").get<std::string>();
            f.n_test = fj.at("n_test").get<std::size_t>();
            f.skipped = fj.at("skipped").get<bool>();
            f.skip_reason = fj.at("skip_reason").get<std::string>();
            f.selected_features = fj.at("selected_features").get<std::vector<int>>();
            if (!fj.at("ap_confidence").is_null()) {
                f.ap_confidence = fj.at("ap_confidence").get<double>();
            }
            if (!fj.at("ap_unconfidence").is_null()) {
                f.ap_unconfidence = fj.at("ap_unconfidence").get<double>();
            }
            r.folds.push_back(std::move(f));
        }
    } catch (const json::exception& e) {
        throw ParseError(origin + ": incomplete eval report: " + e.what());
    }
    return r;
}

void write_pr_csv(const EvalReport& report, const std::string& path) {
    std::ostringstream ss;
    ss << "target,recall,precision\n";
    auto dump = [&](const char* name, const TargetEval& t) {
        for (int k = 0; k <= 10; ++k) {
            ss << name << ',' << format_double(static_cast<double>(k) / 10.0) << ','
               << format_double(t.precisions[static_cast<std::size_t>(k)]) << '\n';
        }
    };
    dump("confidence", report.confidence);
    dump("unconfidence", report.unconfidence);
    write_text_file(path, ss.str());
}

} // namespace gazeconf
