#include "psdes/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace psdes {

namespace {

void require_caches(const Pool& pool) {
    if (!pool.caches_ready()) throw std::invalid_argument("pool DSEL caches not filled");
}

// Applies the shared fallback rule and fills the member votes.
SelectedEnsemble finish(DesTechnique technique, const Pool& pool,
                        std::vector<std::size_t> selected, std::span<const int> query_votes) {
    SelectedEnsemble ensemble;
    ensemble.technique = technique;
    if (selected.empty()) {
        selected.resize(pool.size());
        std::iota(selected.begin(), selected.end(), 0);
        ensemble.used_fallback = true;
    }
    ensemble.votes.reserve(selected.size());
    for (std::size_t idx : selected) ensemble.votes.push_back(query_votes[idx]);
    ensemble.member_indices = std::move(selected);
    return ensemble;
}

}  // namespace

std::string to_string(DesTechnique technique) {
    switch (technique) {
        case DesTechnique::knora_u: return "knora_u";
        case DesTechnique::knop: return "knop";
        case DesTechnique::des_p: return "des_p";
        case DesTechnique::meta_des: return "meta_des";
    }
    return "unknown";
}

DesTechnique des_technique_from_string(const std::string& name) {
    if (name == "knora_u") return DesTechnique::knora_u;
    if (name == "knop") return DesTechnique::knop;
    if (name == "des_p") return DesTechnique::des_p;
    if (name == "meta_des") return DesTechnique::meta_des;
    throw std::invalid_argument("unknown DES technique: " + name);
}

SelectedEnsemble knora_u_select(const Pool& pool, const RegionOfCompetence& roc,
                                std::span<const int> query_votes) {
    require_caches(pool);
    std::vector<std::size_t> selected;
    std::vector<int> hits;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        int count = 0;
        for (std::size_t j : roc.indices) count += pool.dsel_correct[i][j];
        if (count > 0) {
            selected.push_back(i);
            hits.push_back(count);
        }
    }
    auto ensemble = finish(DesTechnique::knora_u, pool, std::move(selected), query_votes);
    ensemble.roc_token = roc.token;
    if (!ensemble.used_fallback) ensemble.hit_counts = std::move(hits);
    return ensemble;
}

SelectedEnsemble knop_select(const Pool& pool, const ProfileNeighborhood& neighborhood,
                             std::span<const int> query_votes) {
    require_caches(pool);
    std::vector<std::size_t> selected;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        for (std::size_t j : neighborhood.indices) {
            if (pool.dsel_correct[i][j]) {
                selected.push_back(i);
                break;
            }
        }
    }
    return finish(DesTechnique::knop, pool, std::move(selected), query_votes);
}

SelectedEnsemble knop_select(const Pool& pool, std::span<const double> x_q, std::size_t kp,
                             std::span<const int> query_votes) {
    const auto profile = output_profile(pool, x_q);
    return knop_select(pool, profile_neighbors(profile, pool, kp), query_votes);
}

SelectedEnsemble desp_select(const Pool& pool, const RegionOfCompetence& roc, int n_classes,
                             std::span<const int> query_votes) {
    require_caches(pool);
    if (n_classes < 2) throw std::invalid_argument("des_p needs at least two classes");
    const double guess_rate = 1.0 / static_cast<double>(n_classes);
    const double k = static_cast<double>(roc.indices.size());
    std::vector<std::size_t> selected;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        int count = 0;
        for (std::size_t j : roc.indices) count += pool.dsel_correct[i][j];
        if (static_cast<double>(count) / k > guess_rate) selected.push_back(i);
    }
    auto ensemble = finish(DesTechnique::des_p, pool, std::move(selected), query_votes);
    ensemble.roc_token = roc.token;
    return ensemble;
}

double MetaModel::competence(std::span<const double> features) const {
    if (degenerate) throw std::logic_error("competence queried on a degenerate meta-model");
    if (features.size() != n_features) throw std::invalid_argument("meta-feature length mismatch");
    std::array<double, 2> log_post = log_prior;
    for (std::size_t f = 0; f < features.size(); ++f) {
        const bool bit = features[f] > 0.5;
        for (int c = 0; c < 2; ++c) {
            const auto ci = static_cast<std::size_t>(c);
            log_post[ci] += bit ? log_p_one[ci][f] : log_p_zero[ci][f];
        }
    }
    const double peak = std::max(log_post[0], log_post[1]);
    const double z0 = std::exp(log_post[0] - peak);
    const double z1 = std::exp(log_post[1] - peak);
    return z1 / (z0 + z1);
}

std::vector<double> metades_meta_features(const Pool& pool, std::size_t classifier_index,
                                          std::span<const int> dsel_labels,
                                          const RegionOfCompetence& roc,
                                          const ProfileNeighborhood& profile_nbhd,
                                          std::span<const double> query_profile) {
    require_caches(pool);
    const std::size_t L = static_cast<std::size_t>(pool.n_classes);
    const std::size_t K = roc.indices.size();
    const std::size_t Kp = profile_nbhd.indices.size();

    std::vector<double> features;
    features.reserve(2 * K + Kp + 2);

    // f1: correctness over the region.
    double hit_sum = 0.0;
    for (std::size_t j : roc.indices) {
        const double bit = pool.dsel_correct[classifier_index][j];
        features.push_back(bit);
        hit_sum += bit;
    }
    // f2: posterior assigned to the true class of each region sample.
    for (std::size_t j : roc.indices) {
        const auto profile_row = pool.dsel_profiles.row(j);
        const auto true_class = static_cast<std::size_t>(dsel_labels[j]);
        features.push_back(profile_row[classifier_index * L + true_class]);
    }
    // f3: mean correctness over the region.
    features.push_back(hit_sum / static_cast<double>(K));
    // f4: correctness over the output-profile neighbors.
    for (std::size_t j : profile_nbhd.indices) {
        features.push_back(pool.dsel_correct[classifier_index][j]);
    }
    // f5: the classifier's posterior for its own prediction on the query.
    const auto block = query_profile.subspan(classifier_index * L, L);
    std::size_t best = 0;
    for (std::size_t c = 1; c < L; ++c) {
        if (block[c] > block[best]) best = c;
    }
    features.push_back(block[best]);
    return features;
}

MetaModel metades_train(const Pool& pool, const Dataset& dsel, double h_c, std::size_t k,
                        std::size_t kp) {
    require_caches(pool);
    const std::size_t M = pool.size();
    const std::size_t N = dsel.n_samples();

    MetaModel model;
    model.n_features = 2 * k + kp + 2;

    std::array<std::size_t, 2> class_counts{};
    std::array<std::vector<std::size_t>, 2> one_counts;
    one_counts[0].assign(model.n_features, 0);
    one_counts[1].assign(model.n_features, 0);

    for (std::size_t j = 0; j < N; ++j) {
        // Pool consensus: fraction voting the plurality class.
        std::vector<std::size_t> vote_counts(static_cast<std::size_t>(pool.n_classes), 0);
        for (std::size_t i = 0; i < M; ++i) {
            vote_counts[static_cast<std::size_t>(pool.dsel_votes[i][j])]++;
        }
        const std::size_t plurality = *std::max_element(vote_counts.begin(), vote_counts.end());
        const double consensus = static_cast<double>(plurality) / static_cast<double>(M);
        if (!(consensus < h_c)) continue;

        const auto x_j = dsel.features.row(j);
        const auto roc = compute_roc_excluding(x_j, dsel, k, j);
        const auto profile = output_profile(pool, x_j);
        const auto nbhd = profile_neighbors_excluding(profile, pool, kp, j);

        for (std::size_t i = 0; i < M; ++i) {
            const auto features =
                metades_meta_features(pool, i, dsel.labels, roc, nbhd, profile);
            const std::size_t label = pool.dsel_correct[i][j] ? 1 : 0;
            class_counts[label]++;
            for (std::size_t f = 0; f < features.size(); ++f) {
                if (features[f] > 0.5) one_counts[label][f]++;
            }
        }
    }

    if (class_counts[0] == 0 || class_counts[1] == 0) {
        model.degenerate = true;
        return model;
    }

    model.degenerate = false;
    const double total = static_cast<double>(class_counts[0] + class_counts[1]);
    for (int c = 0; c < 2; ++c) {
        const auto ci = static_cast<std::size_t>(c);
        model.log_prior[ci] = std::log(static_cast<double>(class_counts[ci]) / total);
        model.log_p_one[ci].resize(model.n_features);
        model.log_p_zero[ci].resize(model.n_features);
        const double denom = static_cast<double>(class_counts[ci]) + 2.0;
        for (std::size_t f = 0; f < model.n_features; ++f) {
            const double p_one = (static_cast<double>(one_counts[ci][f]) + 1.0) / denom;
            model.log_p_one[ci][f] = std::log(p_one);
            model.log_p_zero[ci][f] = std::log(1.0 - p_one);
        }
    }
    return model;
}

SelectedEnsemble metades_select(const MetaModel& model, const Pool& pool,
                                std::span<const int> dsel_labels, const RegionOfCompetence& roc,
                                const ProfileNeighborhood& profile_nbhd,
                                std::span<const double> query_profile,
                                std::span<const int> query_votes) {
    require_caches(pool);
    std::vector<std::size_t> selected;
    if (!model.degenerate) {
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const auto features =
                metades_meta_features(pool, i, dsel_labels, roc, profile_nbhd, query_profile);
            if (model.competence(features) > model.threshold) selected.push_back(i);
        }
    }
    auto ensemble = finish(DesTechnique::meta_des, pool, std::move(selected), query_votes);
    ensemble.roc_token = roc.token;
    return ensemble;
}

}  // namespace psdes
