#include "psdes/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace psdes {

namespace {

void check_lengths(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw std::invalid_argument("label vectors differ in length");
    if (a.empty()) throw std::invalid_argument("label vectors are empty");
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

double accuracy(std::span<const int> y_true, std::span<const int> y_pred) {
    check_lengths(y_true, y_pred);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == y_pred[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

double f_macro(std::span<const int> y_true, std::span<const int> y_pred, int n_classes) {
    check_lengths(y_true, y_pred);
    const std::size_t L = static_cast<std::size_t>(n_classes);
    std::vector<std::size_t> tp(L, 0), fp(L, 0), fn(L, 0), support(L, 0);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const auto t = static_cast<std::size_t>(y_true[i]);
        const auto p = static_cast<std::size_t>(y_pred[i]);
        if (t >= L || p >= L) throw std::invalid_argument("label outside [0, n_classes)");
        support[t]++;
        if (t == p) {
            tp[t]++;
        } else {
            fn[t]++;
            fp[p]++;
        }
    }
    double sum = 0.0;
    std::size_t present = 0;
    for (std::size_t c = 0; c < L; ++c) {
        if (support[c] == 0) continue;
        ++present;
        const double denom = static_cast<double>(2 * tp[c] + fp[c] + fn[c]);
        if (denom > 0.0) sum += 2.0 * static_cast<double>(tp[c]) / denom;
    }
    return sum / static_cast<double>(present);
}

double mcc(std::span<const int> y_true, std::span<const int> y_pred) {
    check_lengths(y_true, y_pred);
    int max_label = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        max_label = std::max({max_label, y_true[i], y_pred[i]});
    }
    const std::size_t L = static_cast<std::size_t>(max_label) + 1;
    Matrix confusion(L, L);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        confusion(static_cast<std::size_t>(y_true[i]), static_cast<std::size_t>(y_pred[i])) += 1.0;
    }
    const double s = static_cast<double>(y_true.size());
    double c = 0.0;
    std::vector<double> t(L, 0.0), p(L, 0.0);
    for (std::size_t k = 0; k < L; ++k) {
        c += confusion(k, k);
        for (std::size_t l = 0; l < L; ++l) {
            t[k] += confusion(k, l);
            p[l] += confusion(k, l);
        }
    }
    double tp_dot = 0.0, tt = 0.0, pp = 0.0;
    for (std::size_t k = 0; k < L; ++k) {
        tp_dot += t[k] * p[k];
        tt += t[k] * t[k];
        pp += p[k] * p[k];
    }
    const double num = c * s - tp_dot;
    const double denom = std::sqrt(s * s - pp) * std::sqrt(s * s - tt);
    return denom > 0.0 ? num / denom : 0.0;
}

std::vector<double> average_tied_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] < values[b];
    });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

std::vector<double> average_ranks(const ScoreTable& table) {
    const std::size_t m = table.methods.size();
    const std::size_t d = table.datasets.size();
    std::vector<double> mean_ranks(m, 0.0);
    std::vector<double> negated(m);
    for (std::size_t col = 0; col < d; ++col) {
        for (std::size_t row = 0; row < m; ++row) negated[row] = -table.values(row, col);
        const auto ranks = average_tied_ranks(negated);  // best score -> rank 1
        for (std::size_t row = 0; row < m; ++row) mean_ranks[row] += ranks[row];
    }
    for (auto& r : mean_ranks) r /= static_cast<double>(d);
    return mean_ranks;
}

WinTieLoss win_tie_loss(const ScoreTable& table, const std::string& control,
                        const std::string& other) {
    const auto find = [&](const std::string& name) {
        const auto it = std::find(table.methods.begin(), table.methods.end(), name);
        if (it == table.methods.end()) throw std::invalid_argument("unknown method: " + name);
        return static_cast<std::size_t>(it - table.methods.begin());
    };
    const std::size_t a = find(control);
    const std::size_t b = find(other);
    WinTieLoss out;
    for (std::size_t col = 0; col < table.datasets.size(); ++col) {
        const double va = table.values(a, col);
        const double vb = table.values(b, col);
        if (va > vb) {
            out.wins++;
        } else if (va < vb) {
            out.losses++;
        } else {
            out.ties++;
        }
    }
    return out;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                    Alternative alternative, ZeroPolicy zero_policy) {
    if (x.size() != y.size()) throw std::invalid_argument("paired vectors differ in length");
    if (x.size() < 3) throw std::invalid_argument("wilcoxon requires at least 3 pairs");

    std::vector<double> diffs;
    diffs.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) diffs.push_back(x[i] - y[i]);

    // Ranks of |d|. Under drop the zeros are removed before ranking;
    // under Pratt they take part in the ranking but not in the statistic.
    std::vector<double> ranked_abs;
    std::vector<int> signs;  // matching ranked_abs order; 0 marks a Pratt zero
    for (double d : diffs) {
        if (d == 0.0 && zero_policy == ZeroPolicy::drop) continue;
        ranked_abs.push_back(std::abs(d));
        signs.push_back(d > 0.0 ? 1 : (d < 0.0 ? -1 : 0));
    }
    std::size_t n_effective = 0;
    for (int s : signs) {
        if (s != 0) ++n_effective;
    }

    WilcoxonResult result;
    result.alternative = alternative;
    result.n_effective = n_effective;
    if (n_effective == 0) {
        result.statistic = 0.0;
        result.p_value = 1.0;
        return result;
    }

    const auto ranks = average_tied_ranks(ranked_abs);
    double w_plus = 0.0;
    std::vector<double> flip_ranks;  // ranks whose signs vary under the null
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (signs[i] == 0) continue;
        flip_ranks.push_back(ranks[i]);
        if (signs[i] > 0) w_plus += ranks[i];
    }
    result.statistic = w_plus;

    const std::size_t k = flip_ranks.size();
    const double eps = 1e-9;
    if (k <= 15) {
        // Exact null: every sign assignment of the observed ranks.
        const std::uint64_t total = 1ULL << k;
        const double sum_ranks = std::accumulate(flip_ranks.begin(), flip_ranks.end(), 0.0);
        const double mean = sum_ranks / 2.0;
        std::uint64_t count = 0;
        for (std::uint64_t mask = 0; mask < total; ++mask) {
            double w = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                if (mask & (1ULL << i)) w += flip_ranks[i];
            }
            const bool hit = alternative == Alternative::greater
                                 ? w >= w_plus - eps
                                 : std::abs(w - mean) >= std::abs(w_plus - mean) - eps;
            if (hit) ++count;
        }
        result.p_value = static_cast<double>(count) / static_cast<double>(total);
    } else {
        double sum = 0.0, sum_sq = 0.0;
        for (double r : flip_ranks) {
            sum += r;
            sum_sq += r * r;
        }
        const double mean = sum / 2.0;
        const double sd = std::sqrt(sum_sq / 4.0);
        if (alternative == Alternative::greater) {
            const double z = (w_plus - mean - 0.5) / sd;
            result.p_value = 1.0 - normal_cdf(z);
        } else {
            const double z = (std::abs(w_plus - mean) - 0.5) / sd;
            result.p_value = std::min(1.0, 2.0 * (1.0 - normal_cdf(std::max(z, 0.0))));
        }
    }
    return result;
}

}  // namespace psdes
