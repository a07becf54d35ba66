#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "psdes/matrix.hpp"

namespace psdes {

double accuracy(std::span<const int> y_true, std::span<const int> y_pred);

// Macro F1: unweighted mean of per-class F1 over the classes present in
// y_true. Classes absent from the truth vector are excluded.
double f_macro(std::span<const int> y_true, std::span<const int> y_pred, int n_classes);

// Multiclass Matthews correlation coefficient (covariance form over the
// full confusion matrix). A vanishing denominator yields 0.
double mcc(std::span<const int> y_true, std::span<const int> y_pred);

// Mean scores per (method, dataset); higher is better.
struct ScoreTable {
    std::vector<std::string> methods;
    std::vector<std::string> datasets;
    Matrix values;  // methods x datasets
};

// Per-dataset ranks (1 = best, ties averaged), averaged over datasets.
std::vector<double> average_ranks(const ScoreTable& table);

struct WinTieLoss {
    int wins = 0;
    int ties = 0;
    int losses = 0;
};

WinTieLoss win_tie_loss(const ScoreTable& table, const std::string& control,
                        const std::string& other);

enum class Alternative { greater, two_sided };
enum class ZeroPolicy { drop, pratt };

struct WilcoxonResult {
    double statistic = 0.0;  // W+: rank sum of positive differences
    double p_value = 1.0;
    std::size_t n_effective = 0;
    Alternative alternative = Alternative::greater;
};

// Paired Wilcoxon signed-rank test on differences x - y. Zero differences
// are handled per policy (classic drop, or Pratt ranking). The null
// distribution is enumerated exactly for up to 15 effective samples,
// otherwise a tie-corrected normal approximation with continuity correction
// is used. `greater` tests whether x tends to exceed y.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                    Alternative alternative = Alternative::greater,
                                    ZeroPolicy zero_policy = ZeroPolicy::drop);

// Ranks of |values| with average tie handling (rank 1 = smallest).
std::vector<double> average_tied_ranks(std::span<const double> values);

}  // namespace psdes
