#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gazeconf/learn.hpp"
#include "gazeconf/pipeline.hpp"

namespace gazeconf {

/// (score, is-positive-for-the-target) pairs; higher score ranks earlier.
using RankedPredictions = std::vector<std::pair<double, bool>>;

/**
 * 11-point interpolated precision: p(r) = max precision over every prefix
 * whose recall is >= r, evaluated at r = 0.0, 0.1, ..., 1.0. Equal scores
 * are evaluated as one group, i.e. precision is only read at group
 * boundaries, which is the worst case over orderings within a tie and makes
 * the result independent of input order. Throws ValidationError when the
 * input holds no positive.
 */
std::array<double, 11> pr_curve_11pt(const RankedPredictions& ranked);

/// Mean of the 11 interpolated precisions.
double average_precision_11pt(const RankedPredictions& ranked);

struct TargetEval {
    std::array<double, 11> precisions{};
    double average_precision = 0.0;
};

/// Scored predictions of one cross-validation fold (test participant).
struct FoldPredictions {
    std::string name;
    std::vector<int> selected_features;
    std::vector<std::pair<double, bool>> scored; // (decision score, truly confident)
    bool skipped = false;
    std::string skip_reason;
};

struct FoldReport {
    std::string name;
    std::size_t n_test = 0;
    bool skipped = false;
    std::string skip_reason;
    std::vector<int> selected_features;
    std::optional<double> ap_confidence;   // absent when the fold lacks positives
    std::optional<double> ap_unconfidence;
};

struct EvalReport {
    TargetEval confidence;   // positive = confident, ranked by +score
    TargetEval unconfidence; // positive = unconfident, ranked by -score
    std::vector<FoldReport> folds;
    std::vector<int> selected_features_union;
    std::string feature_mode;
    std::string eval_mode;
    std::size_t n_rows = 0;
    std::size_t n_confident = 0;
    std::size_t n_unconfident = 0;

    std::string to_json() const;
    static EvalReport from_json(const std::string& text,
                                const std::string& origin = "<string>");
};

/**
 * Pools every fold's scored test rows and evaluates both detection targets:
 * confidence detection ranks by +score with confident rows positive,
 * unconfidence detection ranks by -score with unconfident rows positive.
 * Skipped folds are carried through into the report.
 */
EvalReport evaluate_both_targets(const std::vector<FoldPredictions>& folds);

/**
 * Leave-one-participant-out cross-validation over full sessions: one fold
 * per participant, trained on everyone else's rows. Oversampling and (when
 * configured) forward selection run inside each training fold only. Folds
 * whose training data collapses to a single class are skipped and recorded.
 * Requires >= 2 participants.
 */
EvalReport lopo_cv(const std::vector<Session>& sessions, const PipelineConfig& cfg);

/// Stratified 5-fold cross-validation ignoring participant boundaries.
EvalReport pooled_cv(const Dataset& d, const PipelineConfig& cfg);

/// Dispatches on cfg.eval_mode.
EvalReport run_eval(const std::vector<Session>& sessions, const PipelineConfig& cfg);

struct LearningCurvePoint {
    std::size_t size = 0;
    double mean_ap = 0.0;
    double std_ap = 0.0;
};

/**
 * For each requested size, draws `repeats` class-stratified random subsets,
 * trains on them (all 30 features) and evaluates confidence-detection AP on
 * the held-out remainder; reports mean and population std per size.
 * Sizes must leave a non-empty holdout.
 */
std::vector<LearningCurvePoint> learning_curve(const Dataset& d,
                                               const std::vector<std::size_t>& sizes,
                                               int repeats, const SvmParams& params,
                                               std::uint64_t seed);

/// Pearson r between each feature column and the label (confident = 1,
/// unconfident = 0). Constant features report r = 0. Throws ValidationError
/// when the labels have no variance.
std::array<double, kFeatureCount> pearson_correlations(const Dataset& d);

/// recall/precision pairs per target as CSV: target,recall,precision.
void write_pr_csv(const EvalReport& report, const std::string& path);

} // namespace gazeconf
