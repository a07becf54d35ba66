#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psdes/neighbors.hpp"
#include "psdes/pool.hpp"

namespace psdes {

enum class DesTechnique { knora_u, knop, des_p, meta_des };

std::string to_string(DesTechnique technique);
DesTechnique des_technique_from_string(const std::string& name);

// One candidate ensemble: the selected pool members and their votes for the
// query. Every criterion that selects nothing falls back to the whole pool,
// so member_indices is never empty.
struct SelectedEnsemble {
    DesTechnique technique = DesTechnique::knora_u;
    std::vector<std::size_t> member_indices;
    std::vector<int> votes;
    std::optional<double> potential;
    std::uint64_t roc_token = 0;   // region the criterion consumed, 0 if none
    bool used_fallback = false;
    std::vector<int> hit_counts;   // KNORA-U per-member RoC hits (provenance only)
};

// Selects every classifier correct on at least one RoC sample.
SelectedEnsemble knora_u_select(const Pool& pool, const RegionOfCompetence& roc,
                                std::span<const int> query_votes);

// KNORA-U's rule applied over neighbors in output-profile space.
SelectedEnsemble knop_select(const Pool& pool, const ProfileNeighborhood& neighborhood,
                             std::span<const int> query_votes);
SelectedEnsemble knop_select(const Pool& pool, std::span<const double> x_q, std::size_t kp,
                             std::span<const int> query_votes);

// Selects classifiers whose RoC accuracy strictly exceeds the random-guess
// rate 1/L.
SelectedEnsemble desp_select(const Pool& pool, const RegionOfCompetence& roc, int n_classes,
                             std::span<const int> query_votes);

// Bernoulli naive Bayes over binarized meta-features (threshold 0.5,
// Laplace alpha = 1). Degenerate when meta-training saw a single meta-class.
struct MetaModel {
    std::size_t n_features = 0;
    bool degenerate = true;
    double threshold = 0.5;
    std::array<double, 2> log_prior{};
    std::array<std::vector<double>, 2> log_p_one;   // log P(bit = 1 | class)
    std::array<std::vector<double>, 2> log_p_zero;  // log P(bit = 0 | class)

    // Posterior probability of the "competent" meta-class.
    double competence(std::span<const double> features) const;
};

// Meta-feature vector for one classifier and one query, length 2K + Kp + 2:
// K RoC correctness bits, K posteriors for the true class of each RoC
// sample, their mean, Kp profile-neighbor correctness bits, and the
// classifier's posterior for its own prediction on the query.
std::vector<double> metades_meta_features(const Pool& pool, std::size_t classifier_index,
                                          std::span<const int> dsel_labels,
                                          const RegionOfCompetence& roc,
                                          const ProfileNeighborhood& profile_nbhd,
                                          std::span<const double> query_profile);

// Trains the meta-classifier on DSEL. Samples whose pool consensus reaches
// h_c are excluded; each retained sample contributes one meta-example per
// classifier, with region and profile neighbors computed leave-one-out.
MetaModel metades_train(const Pool& pool, const Dataset& dsel, double h_c, std::size_t k,
                        std::size_t kp);

SelectedEnsemble metades_select(const MetaModel& model, const Pool& pool,
                                std::span<const int> dsel_labels, const RegionOfCompetence& roc,
                                const ProfileNeighborhood& profile_nbhd,
                                std::span<const double> query_profile,
                                std::span<const int> query_votes);

}  // namespace psdes
