#include "psdes/neighbors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace psdes {

namespace {

std::atomic<std::uint64_t> roc_token_counter{1};

// Exact k-NN by full scan; DSEL sizes here stay small enough that an index
// structure would not pay for itself.
template <typename DistanceFn>
void nearest_rows(std::size_t n_rows, std::size_t k, std::size_t excluded, DistanceFn&& dist_sq,
                  std::vector<std::size_t>& indices, std::vector<double>& distances) {
    const std::size_t available = excluded < n_rows ? n_rows - 1 : n_rows;
    if (k == 0 || k > available) {
        throw std::invalid_argument("neighbor count " + std::to_string(k) +
                                    " outside [1, " + std::to_string(available) + "]");
    }
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(available);
    for (std::size_t i = 0; i < n_rows; ++i) {
        if (i == excluded) continue;
        scored.emplace_back(dist_sq(i), i);
    }
    std::sort(scored.begin(), scored.end());
    indices.resize(k);
    distances.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        indices[i] = scored[i].second;
        distances[i] = std::sqrt(scored[i].first);
    }
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        sum += diff * diff;
    }
    return sum;
}

constexpr std::size_t kNoExclusion = std::numeric_limits<std::size_t>::max();

RegionOfCompetence roc_impl(std::span<const double> x_q, const Dataset& dsel, std::size_t k,
                            std::size_t excluded) {
    if (x_q.size() != dsel.n_features()) {
        throw std::invalid_argument("query dimension does not match DSEL");
    }
    RegionOfCompetence roc;
    roc.token = roc_token_counter.fetch_add(1, std::memory_order_relaxed);
    nearest_rows(dsel.n_samples(), k, excluded,
                 [&](std::size_t i) { return squared_distance(x_q, dsel.features.row(i)); },
                 roc.indices, roc.distances);
    return roc;
}

ProfileNeighborhood profile_impl(std::span<const double> profile, const Pool& pool, std::size_t kp,
                                 std::size_t excluded) {
    if (!pool.caches_ready()) throw std::invalid_argument("pool DSEL profiles not cached");
    if (profile.size() != pool.dsel_profiles.cols()) {
        throw std::invalid_argument("profile dimension does not match the cached profiles");
    }
    ProfileNeighborhood nbhd;
    nearest_rows(pool.dsel_profiles.rows(), kp, excluded,
                 [&](std::size_t i) { return squared_distance(profile, pool.dsel_profiles.row(i)); },
                 nbhd.indices, nbhd.distances);
    return nbhd;
}

}  // namespace

RegionOfCompetence compute_roc(std::span<const double> x_q, const Dataset& dsel, std::size_t k) {
    return roc_impl(x_q, dsel, k, kNoExclusion);
}

RegionOfCompetence compute_roc_excluding(std::span<const double> x_q, const Dataset& dsel,
                                         std::size_t k, std::size_t excluded_row) {
    return roc_impl(x_q, dsel, k, excluded_row);
}

std::vector<double> output_profile(const Pool& pool, std::span<const double> x) {
    const std::size_t L = static_cast<std::size_t>(pool.n_classes);
    std::vector<double> profile;
    profile.reserve(pool.size() * L);
    for (const auto& clf : pool.classifiers) {
        const auto proba = clf.predict_proba(x);
        profile.insert(profile.end(), proba.begin(), proba.end());
    }
    return profile;
}

ProfileNeighborhood profile_neighbors(std::span<const double> profile, const Pool& pool,
                                      std::size_t kp) {
    return profile_impl(profile, pool, kp, kNoExclusion);
}

ProfileNeighborhood profile_neighbors_excluding(std::span<const double> profile, const Pool& pool,
                                                std::size_t kp, std::size_t excluded_row) {
    return profile_impl(profile, pool, kp, excluded_row);
}

}  // namespace psdes
