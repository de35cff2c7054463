#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <json.hpp>

#include "gazeconf/errors.hpp"
#include "gazeconf/learn.hpp"
#include "gazeconf/util.hpp"

namespace gazeconf {

using nlohmann::json;

namespace {

/**
 * Sequential minimal optimization for the soft-margin dual
 *   min 1/2 a'Qa - e'a   s.t. 0 <= a <= C, y'a = 0,   Q_ij = y_i y_j K_ij.
 * The working pair is the maximal violating pair; convergence is declared
 * when the KKT gap m(a) - M(a) drops to the tolerance.
 */
struct SmoResult {
    std::vector<double> alpha;
    double bias = 0.0;
    std::int64_t iterations = 0;
    double gap = 0.0;
};

SmoResult smo_solve(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                    const SvmParams& p) {
    const std::size_t n = x.size();
    const double c = p.c;

    // dense Gram matrix; fine at this project's training sizes
    std::vector<double> kernel(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        kernel[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double k = rbf_kernel(x[i], x[j], p.gamma);
            kernel[i * n + j] = k;
            kernel[j * n + i] = k;
        }
    }

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0); // gradient of the dual objective at alpha = 0

    auto in_up = [&](std::size_t t) {
        return (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0.0);
    };
    auto in_low = [&](std::size_t t) {
        return (y[t] > 0 && alpha[t] > 0.0) || (y[t] < 0 && alpha[t] < c);
    };

    SmoResult res;
    double m_up = 0.0;
    double m_low = 0.0;
    while (true) {
        // maximal violating pair
        std::size_t i = n;
        std::size_t j = n;
        m_up = -std::numeric_limits<double>::infinity();
        m_low = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -y[t] * grad[t];
            if (in_up(t) && v > m_up) {
                m_up = v;
                i = t;
            }
            if (in_low(t) && v < m_low) {
                m_low = v;
                j = t;
            }
        }
        res.gap = m_up - m_low;
        if (res.gap <= p.tolerance || i == n || j == n) break;
        if (res.iterations >= p.max_passes) {
            throw ConvergenceError("SMO did not converge: KKT gap " + format_double(res.gap) +
                                       " after " + std::to_string(res.iterations) + " iterations",
                                   res.iterations, res.gap);
        }

        // two-variable subproblem on (i, j)
        const double kii = kernel[i * n + i];
        const double kjj = kernel[j * n + j];
        const double kij = kernel[i * n + j];
        const double eta = std::max(kii + kjj - 2.0 * kij, 1e-12);

        const double ai_old = alpha[i];
        const double aj_old = alpha[j];
        // e_i - e_j where e_t = (f(x_t) without bias) - y_t = y_t * grad_t
        const double diff = y[i] * grad[i] - y[j] * grad[j];

        double lo;
        double hi;
        if (y[i] == y[j]) {
            lo = std::max(0.0, ai_old + aj_old - c);
            hi = std::min(c, ai_old + aj_old);
        } else {
            lo = std::max(0.0, aj_old - ai_old);
            hi = std::min(c, c + aj_old - ai_old);
        }

        double aj_new = aj_old + y[j] * diff / eta;
        aj_new = std::clamp(aj_new, lo, hi);
        double ai_new = ai_old + y[i] * y[j] * (aj_old - aj_new);

        // Round-off can leave a multiplier one ulp away from its bound. Such
        // a variable keeps its KKT violation but only admits ~1e-16 steps,
        // which stalls the working-set loop. Snap onto the exact bound; the
        // gradient update below uses the snapped deltas, so it stays
        // consistent.
        auto snap = [c](double a) {
            if (a < 1e-12 * c) return 0.0;
            if (a > c - 1e-12 * c) return c;
            return a;
        };
        ai_new = snap(ai_new);
        aj_new = snap(aj_new);

        const double delta_i = ai_new - ai_old;
        const double delta_j = aj_new - aj_old;
        alpha[i] = ai_new;
        alpha[j] = aj_new;
        for (std::size_t t = 0; t < n; ++t) {
            grad[t] += y[t] * (y[i] * kernel[t * n + i] * delta_i +
                               y[j] * kernel[t * n + j] * delta_j);
        }
        ++res.iterations;
    }

    // bias from the free support vectors; midpoint of the KKT bounds when
    // every multiplier sits on the box
    double bias_sum = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0 && alpha[t] < c) {
            bias_sum += -y[t] * grad[t];
            ++n_free;
        }
    }
    res.bias = n_free > 0 ? bias_sum / static_cast<double>(n_free) : (m_up + m_low) / 2.0;
    res.alpha = std::move(alpha);
    return res;
}

} // namespace

SvmModel svm_train(const Dataset& d, const SvmParams& params, const std::vector<int>& features) {
    params.validate();
    d.validate_for_training();
    if (features.empty()) {
        throw ValidationError("svm_train: feature set is empty");
    }
    for (int f : features) {
        if (f < 1 || f > kFeatureCount) {
            throw ValidationError("svm_train: feature number out of range: " + std::to_string(f));
        }
    }
    if (d.count_confident() == 0 || d.count_unconfident() == 0) {
        throw ValidationError("svm_train: both classes must be present");
    }

    std::vector<int> selected = features;
    std::sort(selected.begin(), selected.end());
    selected.erase(std::unique(selected.begin(), selected.end()), selected.end());

    const Standardization st = standardize_fit(d, selected);

    const std::size_t n = d.rows.size();
    std::vector<std::vector<double>> x(n, std::vector<double>(selected.size()));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < selected.size(); ++j) {
            x[i][j] = (d.rows[i].features.f(selected[j]) - st.means[j]) / st.stds[j];
        }
        y[i] = *d.rows[i].confident ? 1 : -1;
    }

    const SmoResult res = smo_solve(x, y, params);

    SvmModel model;
    model.params = params;
    model.selected_features = std::move(selected);
    model.feature_means = st.means;
    model.feature_stds = st.stds;
    model.bias = res.bias;
    for (std::size_t i = 0; i < n; ++i) {
        if (res.alpha[i] > 0.0) {
            model.support_vectors.push_back(x[i]);
            model.dual_coefs.push_back(res.alpha[i] * y[i]);
        }
    }
    return model;
}

// ---------------------------------------------------------------------------
// model serialization
// ---------------------------------------------------------------------------

namespace {
constexpr int kModelFormatVersion = 1;
}

std::string model_to_json(const SvmModel& m) {
    json j;
    j["format_version"] = kModelFormatVersion;
    j["params"] = {{"C", m.params.c},
                   {"gamma", m.params.gamma},
                   {"tolerance", m.params.tolerance},
                   {"max_passes", m.params.max_passes}};
    j["selected_features"] = m.selected_features;
    j["feature_means"] = m.feature_means;
    j["feature_stds"] = m.feature_stds;
    j["support_vectors"] = m.support_vectors;
    j["dual_coefs"] = m.dual_coefs;
    j["bias"] = m.bias;
    return j.dump(2) + "\n";
}

SvmModel model_from_json(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(origin + ": malformed model JSON: " + e.what());
    }
    SvmModel m;
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion) {
            throw ParseError(origin + ": unsupported model format version " +
                             std::to_string(version));
        }
        const json& p = j.at("params");
        m.params.c = p.at("C").get<double>();
        m.params.gamma = p.at("gamma").get<double>();
        m.params.tolerance = p.at("tolerance").get<double>();
        m.params.max_passes = p.at("max_passes").get<std::int64_t>();
        m.selected_features = j.at("selected_features").get<std::vector<int>>();
        m.feature_means = j.at("feature_means").get<std::vector<double>>();
        m.feature_stds = j.at("feature_stds").get<std::vector<double>>();
        m.support_vectors = j.at("support_vectors").get<std::vector<std::vector<double>>>();
        m.dual_coefs = j.at("dual_coefs").get<std::vector<double>>();
        m.bias = j.at("bias").get<double>();
    } catch (const json::exception& e) {
        throw ParseError(origin + ": incomplete model JSON: " + e.what());
    }
    m.params.validate();
    if (m.selected_features.empty() ||
        !std::is_sorted(m.selected_features.begin(), m.selected_features.end())) {
        throw ValidationError(origin + ": selected features must be a non-empty sorted list");
    }
    if (m.feature_means.size() != m.selected_features.size() ||
        m.feature_stds.size() != m.selected_features.size()) {
        throw ValidationError(origin + ": standardization arrays do not match selected features");
    }
    if (m.support_vectors.size() != m.dual_coefs.size() || m.support_vectors.empty()) {
        throw ValidationError(origin + ": support vectors and dual coefficients do not match");
    }
    for (const auto& sv : m.support_vectors) {
        if (sv.size() != m.selected_features.size()) {
            throw ValidationError(origin + ": support vector dimension mismatch");
        }
    }
    return m;
}

void save_model(const SvmModel& m, const std::string& path) {
    write_text_file(path, model_to_json(m));
}

SvmModel load_model(const std::string& path) {
    return model_from_json(read_text_file(path), path);
}

} // namespace gazeconf
