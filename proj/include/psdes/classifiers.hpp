#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "psdes/matrix.hpp"
#include "psdes/rng.hpp"

namespace psdes {

enum class ClassifierKind { perceptron, logistic_regression, gaussian_nb };

std::string to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(const std::string& name);

struct PerceptronParams {
    double learning_rate = 1.0;
    int max_epochs = 1000;
};

struct LogisticRegressionParams {
    double l2_lambda = 1.0;
    int max_iterations = 200;
    double grad_tolerance = 1e-5;
};

struct GaussianNbParams {
    double var_smoothing = 1e-9;
};

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::perceptron;
    PerceptronParams perceptron;
    LogisticRegressionParams logistic;
    GaussianNbParams gaussian_nb;
};

// Per-class linear scores: weights is L x d, bias length L.
struct LinearModel {
    Matrix weights;
    std::vector<double> bias;
};

struct GaussianNbModel {
    Matrix means;      // L x d
    Matrix variances;  // L x d, smoothed
    std::vector<double> priors;
};

class TrainedClassifier {
public:
    ClassifierKind kind = ClassifierKind::perceptron;
    int n_classes = 0;
    std::size_t n_features = 0;
    std::variant<LinearModel, GaussianNbModel> model;
    std::vector<double> loss_history;  // filled by logistic regression training

    // Argmax of predict_proba, ties to the lowest class index.
    int predict(std::span<const double> x) const;
    // Length-L non-negative vector summing to 1. The perceptron reports a
    // one-hot vector of its predicted class; it has no calibrated posterior.
    std::vector<double> predict_proba(std::span<const double> x) const;
};

TrainedClassifier fit(const ClassifierSpec& spec, const Matrix& X, const std::vector<int>& y,
                      int n_classes, RandomStream& rng);

// Multinomial logistic loss and gradient, shared by training and the
// finite-difference checks: mean NLL plus lambda/(2n) * ||W||^2.
namespace logreg {
double loss(const Matrix& weights, std::span<const double> bias, const Matrix& X,
            const std::vector<int>& y, double lambda);
void gradient(const Matrix& weights, std::span<const double> bias, const Matrix& X,
              const std::vector<int>& y, double lambda, Matrix& grad_w,
              std::vector<double>& grad_b);
}  // namespace logreg

}  // namespace psdes
