#include "gazeconf/learn.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "gazeconf/errors.hpp"
#include "gazeconf/eval.hpp"
#include "gazeconf/rng.hpp"
#include "gazeconf/util.hpp"

namespace gazeconf {

std::size_t Dataset::count_confident() const {
    std::size_t n = 0;
    for (const DataRow& r : rows) {
        if (r.confident && *r.confident) ++n;
    }
    return n;
}

std::size_t Dataset::count_unconfident() const {
    std::size_t n = 0;
    for (const DataRow& r : rows) {
        if (r.confident && !*r.confident) ++n;
    }
    return n;
}

void Dataset::validate_for_training() const {
    if (rows.empty()) {
        throw ValidationError("dataset is empty");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].confident.has_value()) {
            throw ValidationError("dataset row " + std::to_string(i) + " has no label");
        }
        for (double v : rows[i].features.values) {
            if (!std::isfinite(v)) {
                throw ValidationError("dataset row " + std::to_string(i) +
                                      " has a non-finite feature");
            }
        }
    }
}

void SvmParams::validate() const {
    if (!(c > 0.0)) throw ValidationError("SVM penalty C must be positive");
    if (!(gamma > 0.0)) throw ValidationError("SVM gamma must be positive");
    if (!(tolerance > 0.0)) throw ValidationError("SVM tolerance must be positive");
    if (max_passes <= 0) throw ValidationError("SVM max_passes must be positive");
}

SvmParams SvmParams::from_ini(const IniFile& ini) {
    SvmParams p;
    const std::string section = ini.has_section("svm") ? "svm" : "";
    p.c = ini.get_double(section, "svm_c", p.c);
    p.gamma = ini.get_double(section, "svm_gamma", p.gamma);
    p.tolerance = ini.get_double(section, "svm_tolerance", p.tolerance);
    p.max_passes = ini.get_int(section, "svm_max_passes", p.max_passes);
    p.validate();
    return p;
}

Dataset oversample(const Dataset& d, std::uint64_t seed) {
    d.validate_for_training();
    const std::size_t n_conf = d.count_confident();
    const std::size_t n_unconf = d.count_unconfident();
    if (n_conf == 0 || n_unconf == 0) {
        throw ValidationError("oversample: both classes must be present");
    }

    Dataset out = d;
    if (n_conf == n_unconf) return out;

    const bool minority_confident = n_conf < n_unconf;
    std::vector<std::size_t> minority_idx;
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        if (*d.rows[i].confident == minority_confident) minority_idx.push_back(i);
    }
    const std::size_t deficit =
        (minority_confident ? n_unconf - n_conf : n_conf - n_unconf);
    Rng rng(seed);
    for (std::size_t k = 0; k < deficit; ++k) {
        out.rows.push_back(d.rows[minority_idx[rng.below(minority_idx.size())]]);
    }
    return out;
}

Standardization standardize_fit(const Dataset& d, const std::vector<int>& features) {
    if (d.rows.empty()) {
        throw ValidationError("standardize_fit: dataset is empty");
    }
    Standardization s;
    s.means.reserve(features.size());
    s.stds.reserve(features.size());
    const double n = static_cast<double>(d.rows.size());
    for (int f : features) {
        double mean = 0.0;
        for (const DataRow& r : d.rows) mean += r.features.f(f);
        mean /= n;
        double var = 0.0;
        for (const DataRow& r : d.rows) {
            const double dv = r.features.f(f) - mean;
            var += dv * dv;
        }
        var /= n;
        const double sd = std::sqrt(var);
        s.means.push_back(mean);
        s.stds.push_back(sd > 0.0 ? sd : 1.0);
    }
    return s;
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
    if (a.size() != b.size()) {
        throw ValidationError("rbf_kernel: vectors differ in length");
    }
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

double svm_decision(const SvmModel& m, const FeatureVector& x) {
    std::vector<double> z(m.selected_features.size());
    for (std::size_t j = 0; j < m.selected_features.size(); ++j) {
        z[j] = (x.f(m.selected_features[j]) - m.feature_means[j]) / m.feature_stds[j];
    }
    double acc = m.bias;
    for (std::size_t i = 0; i < m.support_vectors.size(); ++i) {
        acc += m.dual_coefs[i] * rbf_kernel(m.support_vectors[i], z, m.params.gamma);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// forward stepwise selection
// ---------------------------------------------------------------------------

namespace {

/// Stratified two-fold split: shuffle each class separately, then alternate
/// fold assignment, so both folds see both classes whenever a class has at
/// least two members.
std::array<std::vector<std::size_t>, 2> stratified_two_fold(const Dataset& d,
                                                            std::uint64_t seed) {
    std::vector<std::size_t> conf;
    std::vector<std::size_t> unconf;
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        (*d.rows[i].confident ? conf : unconf).push_back(i);
    }
    Rng rng(seed);
    rng.shuffle(conf);
    rng.shuffle(unconf);
    std::array<std::vector<std::size_t>, 2> folds;
    for (std::size_t i = 0; i < conf.size(); ++i) folds[i % 2].push_back(conf[i]);
    for (std::size_t i = 0; i < unconf.size(); ++i) folds[i % 2].push_back(unconf[i]);
    return folds;
}

Dataset subset(const Dataset& d, const std::vector<std::size_t>& idx) {
    Dataset out;
    out.rows.reserve(idx.size());
    for (std::size_t i : idx) out.rows.push_back(d.rows[i]);
    return out;
}

/// Mean 2-fold CV average precision (confidence detection) of the SVM
/// trained on `features`. Training halves are pre-oversampled by the caller
/// so every candidate sees the identical row sets.
double cv_score(const std::array<Dataset, 2>& train_halves,
                const std::array<Dataset, 2>& valid_halves, const SvmParams& params,
                const std::vector<int>& features) {
    double total = 0.0;
    for (int k = 0; k < 2; ++k) {
        const SvmModel model = svm_train(train_halves[static_cast<std::size_t>(k)], params, features);
        std::vector<std::pair<double, bool>> ranked;
        const Dataset& valid = valid_halves[static_cast<std::size_t>(k)];
        ranked.reserve(valid.rows.size());
        for (const DataRow& r : valid.rows) {
            ranked.emplace_back(svm_decision(model, r.features), *r.confident);
        }
        total += average_precision_11pt(ranked);
    }
    return total / 2.0;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to per-index slots; completion order carries no information.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    unsigned threads = std::thread::hardware_concurrency();
    if (threads < 2 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(n));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace

std::vector<int> forward_stepwise(const Dataset& d, const SvmParams& params,
                                  std::uint64_t seed) {
    params.validate();
    d.validate_for_training();
    if (d.rows.size() < 4) {
        throw ValidationError("forward_stepwise: need at least 4 rows");
    }
    if (d.count_confident() < 2 || d.count_unconfident() < 2) {
        throw ValidationError("forward_stepwise: need at least 2 rows per class");
    }

    const auto folds = stratified_two_fold(d, seed);
    std::array<Dataset, 2> train_halves;
    std::array<Dataset, 2> valid_halves;
    for (std::size_t k = 0; k < 2; ++k) {
        // fold k validates; the other half trains (oversampled once, reused
        // for every candidate)
        train_halves[k] = oversample(subset(d, folds[1 - k]), derive_seed(seed, k));
        valid_halves[k] = subset(d, folds[k]);
    }

    std::vector<int> selected;
    double best_score = -1.0;
    std::vector<char> in_set(kFeatureCount + 1, 0);

    while (selected.size() < kFeatureCount) {
        std::vector<int> candidates;
        for (int f = 1; f <= kFeatureCount; ++f) {
            if (!in_set[static_cast<std::size_t>(f)]) candidates.push_back(f);
        }
        std::vector<double> scores(candidates.size(), -1.0);
        parallel_for(candidates.size(), [&](std::size_t i) {
            std::vector<int> trial = selected;
            trial.push_back(candidates[i]);
            std::sort(trial.begin(), trial.end());
            scores[i] = cv_score(train_halves, valid_halves, params, trial);
        });

        std::size_t best_i = 0;
        for (std::size_t i = 1; i < candidates.size(); ++i) {
            if (scores[i] > scores[best_i]) best_i = i; // ties keep the lower number
        }

        const bool first_round = selected.empty();
        if (!first_round && scores[best_i] <= best_score) break;
        best_score = scores[best_i];
        selected.push_back(candidates[best_i]);
        in_set[static_cast<std::size_t>(candidates[best_i])] = 1;
    }

    std::sort(selected.begin(), selected.end());
    return selected;
}

// ---------------------------------------------------------------------------
// CSV interchange
// ---------------------------------------------------------------------------

namespace {

void check_csv_field(const std::string& v, const std::string& what) {
    if (v.find(',') != std::string::npos || v.find('\n') != std::string::npos) {
        throw ValidationError(what + " must not contain commas or newlines: '" + v + "'");
    }
}

} // namespace

void write_feature_csv(const Dataset& d, std::ostream& out) {
    const auto names = feature_column_names();
    for (const std::string& n : names) out << n << ',';
    out << "label,participant,question\n";
    for (const DataRow& r : d.rows) {
        check_csv_field(r.participant, "participant id");
        check_csv_field(r.question, "question id");
        for (double v : r.features.values) out << format_double(v) << ',';
        if (r.confident.has_value()) out << (*r.confident ? '1' : '0');
        out << ',' << r.participant << ',' << r.question << '\n';
    }
}

void write_feature_csv(const Dataset& d, const std::string& path) {
    std::ostringstream ss;
    write_feature_csv(d, ss);
    write_text_file(path, ss.str());
}

Dataset parse_feature_csv(std::istream& in, const std::string& origin) {
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) {
        throw ParseError(origin + ": empty feature CSV");
    }
    ++line_no;
    const auto names = feature_column_names();
    std::string expected;
    for (const std::string& n : names) expected += n + ',';
    expected += "label,participant,question";
    if (trim(line) != expected) {
        throw ParseError(origin + ":1: unexpected CSV header");
    }

    Dataset d;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split(line, ',');
        if (cells.size() != kFeatureCount + 3) {
            throw ParseError(origin + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(kFeatureCount + 3) + " columns, got " +
                             std::to_string(cells.size()));
        }
        DataRow row;
        for (int i = 0; i < kFeatureCount; ++i) {
            const std::string& cell = cells[static_cast<std::size_t>(i)];
            double v = 0.0;
            auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
                throw ParseError(origin + ":" + std::to_string(line_no) + ": column f" +
                                 std::to_string(i + 1) + " is not a number: '" + cell + "'");
            }
            row.features.values[static_cast<std::size_t>(i)] = v;
        }
        const std::string& label = cells[kFeatureCount];
        if (label.empty()) {
            row.confident = std::nullopt;
        } else if (label == "1") {
            row.confident = true;
        } else if (label == "0") {
            row.confident = false;
        } else {
            throw ParseError(origin + ":" + std::to_string(line_no) +
                             ": label must be 1, 0 or empty, got '" + label + "'");
        }
        row.participant = cells[kFeatureCount + 1];
        row.question = cells[kFeatureCount + 2];
        d.rows.push_back(std::move(row));
    }
    return d;
}

Dataset read_feature_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open feature CSV: " + path);
    }
    return parse_feature_csv(in, path);
}

} // namespace gazeconf
