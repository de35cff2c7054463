#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazeconf/features.hpp"
#include "gazeconf/ini.hpp"

namespace gazeconf {

/// One labeled (or not yet labeled) feature row. confident is the learner's
/// reported label; rows without it can be carried through the CSV interchange
/// but are rejected by every training operation.
struct DataRow {
    FeatureVector features;
    std::optional<bool> confident;
    std::string participant;
    std::string question;
};

struct Dataset {
    std::vector<DataRow> rows;

    std::size_t count_confident() const;
    std::size_t count_unconfident() const;

    /// throws ValidationError: empty set, unlabeled rows, non-finite features
    void validate_for_training() const;
};

struct SvmParams {
    double c = 1.0;
    double gamma = 0.125;
    double tolerance = 1e-3;
    std::int64_t max_passes = 200000;

    void validate() const;

    /// keys svm_c, svm_gamma, svm_tolerance, svm_max_passes (top level or [svm])
    static SvmParams from_ini(const IniFile& ini);
};

/**
 * A trained soft-margin RBF-SVM. Support vectors are stored standardized and
 * projected onto selected_features (sorted 1-based feature numbers);
 * feature_means/feature_stds align with that projection. dual_coefs holds
 * alpha_i * y_i, so the decision value for a standardized input z is
 *   sum_i dual_coefs[i] * exp(-gamma * |sv_i - z|^2) + bias
 * with positive meaning "confident".
 */
struct SvmModel {
    SvmParams params;
    std::vector<int> selected_features;
    std::vector<double> feature_means;
    std::vector<double> feature_stds;
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> dual_coefs;
    double bias = 0.0;
};

/**
 * Random oversampling: minority rows are duplicated uniformly at random
 * (with replacement) until both classes have equal counts. Majority rows are
 * untouched and row order is original-rows-then-duplicates, so the result is
 * deterministic for a given seed. Throws ValidationError when a class is
 * missing.
 */
Dataset oversample(const Dataset& d, std::uint64_t seed);

struct Standardization {
    std::vector<double> means;
    std::vector<double> stds;
};

/// Per-feature mean and population standard deviation over the given
/// feature numbers. A constant column reports std 1 so the transform
/// leaves it centered at zero rather than dividing by zero.
Standardization standardize_fit(const Dataset& d, const std::vector<int>& features);

/// exp(-gamma * |a - b|^2); throws ValidationError on length mismatch.
double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

/**
 * Trains the soft-margin dual with sequential minimal optimization on
 * standardized selected features. The working pair is picked by maximal
 * KKT violation, which makes training fully deterministic; no random state
 * is consumed. Throws ConvergenceError (with best-so-far diagnostics) if
 * the KKT gap is still above tolerance after max_passes iterations, and
 * ValidationError for single-class input or an empty feature set.
 */
SvmModel svm_train(const Dataset& d, const SvmParams& params, const std::vector<int>& features);

double svm_decision(const SvmModel& m, const FeatureVector& x);

/**
 * Greedy forward selection: starting from the empty set, repeatedly add the
 * feature that maximizes the mean 2-fold cross-validated average precision
 * of the trained SVM (confidence detection), stopping once no addition
 * strictly improves the score. The first feature is always kept as the
 * baseline. Ties break toward the lowest feature number. The fold split is
 * stratified by label and derived from the seed; candidate evaluations run
 * in parallel but the outcome does not depend on scheduling.
 */
std::vector<int> forward_stepwise(const Dataset& d, const SvmParams& params, std::uint64_t seed);

/// Feature matrix interchange: header f1..f30,label,participant,question;
/// label is 1/0 and empty for unlabeled rows.
void write_feature_csv(const Dataset& d, std::ostream& out);
void write_feature_csv(const Dataset& d, const std::string& path);
Dataset read_feature_csv(const std::string& path);
Dataset parse_feature_csv(std::istream& in, const std::string& origin);

/// Model file (JSON, carries a format-version field).
void save_model(const SvmModel& m, const std::string& path);
SvmModel load_model(const std::string& path);
std::string model_to_json(const SvmModel& m);
SvmModel model_from_json(const std::string& text, const std::string& origin = "<string>");

} // namespace gazeconf
