#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "psdes/dataset.hpp"
#include "psdes/pool.hpp"
#include "psdes/selection.hpp"

namespace psdes {

enum class PotentialKind { accuracy, f_score, mcc, random };
enum class FPositiveConvention { majority_label, fixed_label_one };

PotentialKind potential_kind_from_string(const std::string& name);

struct PotentialMetric {
    PotentialKind kind = PotentialKind::accuracy;
    FPositiveConvention f_convention = FPositiveConvention::majority_label;
};

// Plurality class, ties to the lowest class index.
int majority_vote(std::span<const int> votes);

// Ensemble potential: the votes are scored against the ensemble's own
// majority vote taken as the truth. With a = #votes agreeing with the
// majority out of n: accuracy gives a/n, the F-score (majority_label
// convention) 2a/(n+a), and MCC is identically 0 because the constant truth
// vector makes its denominator vanish. kind=random draws uniformly in [0,1).
double potential(std::span<const int> votes, const PotentialMetric& metric,
                 RandomStream* rng = nullptr);

// Algorithm-1 post-selection over precomputed candidates: fills each
// candidate's potential and returns the index of the winner. The update rule
// keeps any candidate whose potential reaches the running maximum, so the
// last technique attaining the maximum wins; the maximum starts at 0, so the
// first candidate always installs.
std::size_t select_among(std::vector<SelectedEnsemble>& candidates, const PotentialMetric& metric,
                         RandomStream* rng = nullptr);

// Uniform seeded choice among candidates (the PS-DES-Random scheme).
std::size_t random_post_select(std::span<const SelectedEnsemble> candidates, RandomStream& rng);

// Majority vote of the ensemble's member votes.
int combine(const SelectedEnsemble& ensemble);

// A prepared PS-DES system: the trained pool with DSEL caches, the DES set
// in iteration order, and the potential metric used for post-selection.
struct PsDesSystem {
    Pool pool;
    Dataset dsel;
    std::vector<DesTechnique> des_set{DesTechnique::knora_u, DesTechnique::knop,
                                      DesTechnique::des_p, DesTechnique::meta_des};
    PotentialMetric metric;
    std::size_t k = 7;
    std::size_t kp_knop = 7;
    std::size_t kp_meta = 5;
    double h_c = 1.0;
    MetaModel meta_model;
    std::uint64_t random_stream_seed = 0;
};

// Builds the system from an already-trained pool: caches DSEL outputs and
// trains the META-DES meta-model when the DES set needs it.
PsDesSystem prepare_system(Pool pool, Dataset dsel, std::vector<DesTechnique> des_set,
                           PotentialMetric metric, std::size_t k, std::size_t kp_knop,
                           std::size_t kp_meta, double h_c, std::uint64_t random_stream_seed);

// Everything all techniques share for one query: the single region of
// competence, the query's output profile, both profile neighborhoods, and
// every pool member's vote.
struct QueryContext {
    RegionOfCompetence roc;
    std::vector<double> profile;
    ProfileNeighborhood knop_neighborhood;
    ProfileNeighborhood meta_neighborhood;
    std::vector<int> pool_votes;
};

QueryContext make_query_context(const PsDesSystem& system, std::span<const double> x_q);

// Candidate ensembles in des_set order, all built from the shared context.
std::vector<SelectedEnsemble> candidate_ensembles(const PsDesSystem& system,
                                                  const QueryContext& context);

SelectedEnsemble ps_des_select(std::span<const double> x_q, const PsDesSystem& system,
                               std::uint64_t query_index = 0);

int classify(std::span<const double> x_q, const PsDesSystem& system,
             std::uint64_t query_index = 0);

}  // namespace psdes
