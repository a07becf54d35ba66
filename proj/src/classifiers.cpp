#include "psdes/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace psdes {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

int argmax_lowest(std::span<const double> values) {
    int best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    }
    return best;
}

void check_training_inputs(const Matrix& X, const std::vector<int>& y, int n_classes) {
    if (X.rows() != y.size()) throw std::invalid_argument("feature/label row count mismatch");
    if (X.rows() == 0) throw std::invalid_argument("empty training set");
    std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes), 0);
    for (int label : y) {
        if (label < 0 || label >= n_classes) throw std::invalid_argument("label outside [0, n_classes)");
        counts[static_cast<std::size_t>(label)]++;
    }
    std::size_t present = 0;
    for (auto c : counts) {
        if (c > 0) ++present;
    }
    if (present < 2) throw std::invalid_argument("training labels contain a single class");
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (double v : X.row(i)) {
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in training features");
        }
    }
}

std::vector<double> softmax(std::vector<double> scores) {
    const double peak = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (auto& s : scores) {
        s = std::exp(s - peak);
        sum += s;
    }
    for (auto& s : scores) s /= sum;
    return scores;
}

std::vector<double> linear_scores(const LinearModel& m, std::span<const double> x) {
    const std::size_t L = m.weights.rows();
    std::vector<double> scores(L, 0.0);
    for (std::size_t c = 0; c < L; ++c) {
        const auto w = m.weights.row(c);
        double s = m.bias[c];
        for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * x[j];
        scores[c] = s;
    }
    return scores;
}

TrainedClassifier fit_perceptron(const PerceptronParams& params, const Matrix& X,
                                 const std::vector<int>& y, int n_classes, RandomStream& rng) {
    const std::size_t n = X.rows();
    const std::size_t d = X.cols();
    const std::size_t L = static_cast<std::size_t>(n_classes);
    LinearModel model{Matrix(L, d), std::vector<double>(L, 0.0)};

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    // One-vs-rest: every class keeps its own binary perceptron; an epoch
    // with no update anywhere terminates training.
    for (int epoch = 0; epoch < params.max_epochs; ++epoch) {
        rng.shuffle(order);
        bool updated = false;
        for (std::size_t idx : order) {
            const auto x = X.row(idx);
            for (std::size_t c = 0; c < L; ++c) {
                const double target = y[idx] == static_cast<int>(c) ? 1.0 : -1.0;
                auto w = model.weights.row(c);
                double score = model.bias[c];
                for (std::size_t j = 0; j < d; ++j) score += w[j] * x[j];
                if (target * score <= 0.0) {
                    const double step = params.learning_rate * target;
                    for (std::size_t j = 0; j < d; ++j) w[j] += step * x[j];
                    model.bias[c] += step;
                    updated = true;
                }
            }
        }
        if (!updated) break;
    }

    TrainedClassifier clf;
    clf.kind = ClassifierKind::perceptron;
    clf.n_classes = n_classes;
    clf.n_features = d;
    clf.model = std::move(model);
    return clf;
}

TrainedClassifier fit_logistic(const LogisticRegressionParams& params, const Matrix& X,
                               const std::vector<int>& y, int n_classes) {
    const std::size_t d = X.cols();
    const std::size_t L = static_cast<std::size_t>(n_classes);
    Matrix W(L, d);
    std::vector<double> b(L, 0.0);

    TrainedClassifier clf;
    clf.kind = ClassifierKind::logistic_regression;
    clf.n_classes = n_classes;
    clf.n_features = d;

    Matrix grad_w(L, d);
    std::vector<double> grad_b(L, 0.0);
    double current = logreg::loss(W, b, X, y, params.l2_lambda);
    clf.loss_history.push_back(current);

    for (int iter = 0; iter < params.max_iterations; ++iter) {
        logreg::gradient(W, b, X, y, params.l2_lambda, grad_w, grad_b);
        double grad_norm_sq = 0.0;
        for (std::size_t c = 0; c < L; ++c) {
            for (std::size_t j = 0; j < d; ++j) grad_norm_sq += grad_w(c, j) * grad_w(c, j);
            grad_norm_sq += grad_b[c] * grad_b[c];
        }
        if (std::sqrt(grad_norm_sq) < params.grad_tolerance) break;

        // Backtracking line search with the Armijo condition.
        double step = 1.0;
        bool accepted = false;
        for (int half = 0; half < 50; ++half) {
            Matrix W_try = W;
            std::vector<double> b_try = b;
            for (std::size_t c = 0; c < L; ++c) {
                for (std::size_t j = 0; j < d; ++j) W_try(c, j) -= step * grad_w(c, j);
                b_try[c] -= step * grad_b[c];
            }
            const double candidate = logreg::loss(W_try, b_try, X, y, params.l2_lambda);
            if (candidate <= current - 1e-4 * step * grad_norm_sq) {
                W = std::move(W_try);
                b = std::move(b_try);
                current = candidate;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        clf.loss_history.push_back(current);
    }

    clf.model = LinearModel{std::move(W), std::move(b)};
    return clf;
}

TrainedClassifier fit_gaussian_nb(const GaussianNbParams& params, const Matrix& X,
                                  const std::vector<int>& y, int n_classes) {
    const std::size_t n = X.rows();
    const std::size_t d = X.cols();
    const std::size_t L = static_cast<std::size_t>(n_classes);

    GaussianNbModel model{Matrix(L, d), Matrix(L, d), std::vector<double>(L, 0.0)};
    std::vector<std::size_t> counts(L, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = X.row(i);
        const auto c = static_cast<std::size_t>(y[i]);
        counts[c]++;
        for (std::size_t j = 0; j < d; ++j) model.means(c, j) += x[j];
    }
    for (std::size_t c = 0; c < L; ++c) {
        if (counts[c] == 0) throw std::invalid_argument("gaussian_nb: class without samples");
        for (std::size_t j = 0; j < d; ++j) model.means(c, j) /= static_cast<double>(counts[c]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = X.row(i);
        const auto c = static_cast<std::size_t>(y[i]);
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = x[j] - model.means(c, j);
            model.variances(c, j) += diff * diff;
        }
    }

    // Smoothing scale: largest population variance across all features.
    std::vector<double> mean_all(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = X.row(i);
        for (std::size_t j = 0; j < d; ++j) mean_all[j] += x[j];
    }
    for (auto& m : mean_all) m /= static_cast<double>(n);
    double max_var = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double diff = X(i, j) - mean_all[j];
            v += diff * diff;
        }
        max_var = std::max(max_var, v / static_cast<double>(n));
    }
    const double epsilon = params.var_smoothing * max_var;

    for (std::size_t c = 0; c < L; ++c) {
        model.priors[c] = static_cast<double>(counts[c]) / static_cast<double>(n);
        for (std::size_t j = 0; j < d; ++j) {
            model.variances(c, j) = model.variances(c, j) / static_cast<double>(counts[c]) + epsilon;
        }
    }

    TrainedClassifier clf;
    clf.kind = ClassifierKind::gaussian_nb;
    clf.n_classes = n_classes;
    clf.n_features = d;
    clf.model = std::move(model);
    return clf;
}

}  // namespace

std::string to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::perceptron: return "perceptron";
        case ClassifierKind::logistic_regression: return "logistic_regression";
        case ClassifierKind::gaussian_nb: return "gaussian_nb";
    }
    return "unknown";
}

ClassifierKind classifier_kind_from_string(const std::string& name) {
    if (name == "perceptron") return ClassifierKind::perceptron;
    if (name == "logistic_regression") return ClassifierKind::logistic_regression;
    if (name == "gaussian_nb") return ClassifierKind::gaussian_nb;
    throw std::invalid_argument("unknown classifier kind: " + name);
}

int TrainedClassifier::predict(std::span<const double> x) const {
    if (x.size() != n_features) throw std::invalid_argument("feature dimension mismatch in predict");
    if (kind == ClassifierKind::perceptron) {
        return argmax_lowest(linear_scores(std::get<LinearModel>(model), x));
    }
    const auto proba = predict_proba(x);
    return argmax_lowest(proba);
}

std::vector<double> TrainedClassifier::predict_proba(std::span<const double> x) const {
    if (x.size() != n_features) throw std::invalid_argument("feature dimension mismatch in predict_proba");
    const std::size_t L = static_cast<std::size_t>(n_classes);
    switch (kind) {
        case ClassifierKind::perceptron: {
            std::vector<double> proba(L, 0.0);
            const auto scores = linear_scores(std::get<LinearModel>(model), x);
            proba[static_cast<std::size_t>(argmax_lowest(scores))] = 1.0;
            return proba;
        }
        case ClassifierKind::logistic_regression: {
            return softmax(linear_scores(std::get<LinearModel>(model), x));
        }
        case ClassifierKind::gaussian_nb: {
            const auto& m = std::get<GaussianNbModel>(model);
            std::vector<double> log_post(L, 0.0);
            for (std::size_t c = 0; c < L; ++c) {
                double lp = std::log(m.priors[c]);
                for (std::size_t j = 0; j < x.size(); ++j) {
                    const double var = m.variances(c, j);
                    const double diff = x[j] - m.means(c, j);
                    lp += -0.5 * std::log(two_pi * var) - diff * diff / (2.0 * var);
                }
                log_post[c] = lp;
            }
            return softmax(std::move(log_post));
        }
    }
    throw std::logic_error("unreachable classifier kind");
}

TrainedClassifier fit(const ClassifierSpec& spec, const Matrix& X, const std::vector<int>& y,
                      int n_classes, RandomStream& rng) {
    check_training_inputs(X, y, n_classes);
    switch (spec.kind) {
        case ClassifierKind::perceptron: return fit_perceptron(spec.perceptron, X, y, n_classes, rng);
        case ClassifierKind::logistic_regression: return fit_logistic(spec.logistic, X, y, n_classes);
        case ClassifierKind::gaussian_nb: return fit_gaussian_nb(spec.gaussian_nb, X, y, n_classes);
    }
    throw std::logic_error("unreachable classifier kind");
}

namespace logreg {

double loss(const Matrix& weights, std::span<const double> bias, const Matrix& X,
            const std::vector<int>& y, double lambda) {
    const std::size_t n = X.rows();
    const std::size_t L = weights.rows();
    double nll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = X.row(i);
        std::vector<double> scores(L, 0.0);
        for (std::size_t c = 0; c < L; ++c) {
            const auto w = weights.row(c);
            double s = bias[c];
            for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * x[j];
            scores[c] = s;
        }
        const double peak = *std::max_element(scores.begin(), scores.end());
        double log_sum = 0.0;
        for (double s : scores) log_sum += std::exp(s - peak);
        log_sum = peak + std::log(log_sum);
        nll += log_sum - scores[static_cast<std::size_t>(y[i])];
    }
    double penalty = 0.0;
    for (std::size_t c = 0; c < L; ++c) {
        for (double w : weights.row(c)) penalty += w * w;
    }
    const double dn = static_cast<double>(n);
    return nll / dn + lambda * penalty / (2.0 * dn);
}

void gradient(const Matrix& weights, std::span<const double> bias, const Matrix& X,
              const std::vector<int>& y, double lambda, Matrix& grad_w,
              std::vector<double>& grad_b) {
    const std::size_t n = X.rows();
    const std::size_t L = weights.rows();
    const std::size_t d = weights.cols();
    grad_w = Matrix(L, d);
    grad_b.assign(L, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = X.row(i);
        std::vector<double> scores(L, 0.0);
        for (std::size_t c = 0; c < L; ++c) {
            const auto w = weights.row(c);
            double s = bias[c];
            for (std::size_t j = 0; j < d; ++j) s += w[j] * x[j];
            scores[c] = s;
        }
        const auto proba = softmax(std::move(scores));
        for (std::size_t c = 0; c < L; ++c) {
            const double residual = proba[c] - (y[i] == static_cast<int>(c) ? 1.0 : 0.0);
            auto g = grad_w.row(c);
            for (std::size_t j = 0; j < d; ++j) g[j] += residual * x[j];
            grad_b[c] += residual;
        }
    }
    const double dn = static_cast<double>(n);
    for (std::size_t c = 0; c < L; ++c) {
        auto g = grad_w.row(c);
        const auto w = weights.row(c);
        for (std::size_t j = 0; j < d; ++j) g[j] = g[j] / dn + lambda * w[j] / dn;
        grad_b[c] /= dn;
    }
}

}  // namespace logreg

}  // namespace psdes
