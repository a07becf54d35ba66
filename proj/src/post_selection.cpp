#include "psdes/post_selection.hpp"

#include <algorithm>
#include <stdexcept>

#include "psdes/metrics.hpp"

namespace psdes {

namespace {

constexpr std::uint64_t kRandomPotentialStream = 0x9a7d;

}  // namespace

PotentialKind potential_kind_from_string(const std::string& name) {
    if (name == "accuracy" || name == "acc") return PotentialKind::accuracy;
    if (name == "f_score" || name == "f") return PotentialKind::f_score;
    if (name == "mcc") return PotentialKind::mcc;
    if (name == "random") return PotentialKind::random;
    throw std::invalid_argument("unknown potential metric: " + name);
}

int majority_vote(std::span<const int> votes) {
    if (votes.empty()) throw std::invalid_argument("majority vote over no votes");
    int max_label = *std::max_element(votes.begin(), votes.end());
    std::vector<std::size_t> counts(static_cast<std::size_t>(max_label) + 1, 0);
    for (int v : votes) {
        if (v < 0) throw std::invalid_argument("negative class index in votes");
        counts[static_cast<std::size_t>(v)]++;
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] > counts[best]) best = c;
    }
    return static_cast<int>(best);
}

double potential(std::span<const int> votes, const PotentialMetric& metric, RandomStream* rng) {
    if (votes.empty()) throw std::invalid_argument("potential of an empty vote list");
    if (metric.kind == PotentialKind::random) {
        if (!rng) throw std::invalid_argument("random potential requires a seeded stream");
        return rng->uniform_real();
    }

    const int majority = majority_vote(votes);
    const std::vector<int> truth(votes.size(), majority);
    switch (metric.kind) {
        case PotentialKind::accuracy:
            return accuracy(truth, votes);
        case PotentialKind::f_score: {
            if (metric.f_convention == FPositiveConvention::majority_label) {
                // Only the majority class is present in the truth vector, so
                // the macro average reduces to its F1, which is 2a/(n+a).
                const int n_classes = 1 + *std::max_element(votes.begin(), votes.end());
                return f_macro(truth, votes, n_classes);
            }
            // fixed_label_one: the positive class is label 1. When the
            // majority is any other class the truth has no positives and
            // the F-score collapses to 0.
            if (majority != 1) return 0.0;
            std::size_t agree = 0;
            for (int v : votes) {
                if (v == majority) ++agree;
            }
            return 2.0 * static_cast<double>(agree) /
                   (static_cast<double>(votes.size()) + static_cast<double>(agree));
        }
        case PotentialKind::mcc:
            return mcc(truth, votes);
        case PotentialKind::random:
            break;
    }
    throw std::logic_error("unreachable potential kind");
}

std::size_t select_among(std::vector<SelectedEnsemble>& candidates, const PotentialMetric& metric,
                         RandomStream* rng) {
    if (candidates.empty()) throw std::invalid_argument("post-selection over no candidates");
    double pot_max = 0.0;
    std::size_t winner = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double pot = potential(candidates[i].votes, metric, rng);
        candidates[i].potential = pot;
        if (pot >= pot_max) {
            pot_max = pot;
            winner = i;
        }
    }
    return winner;
}

std::size_t random_post_select(std::span<const SelectedEnsemble> candidates, RandomStream& rng) {
    if (candidates.empty()) throw std::invalid_argument("random post-selection over no candidates");
    return rng.uniform_below(candidates.size());
}

int combine(const SelectedEnsemble& ensemble) { return majority_vote(ensemble.votes); }

PsDesSystem prepare_system(Pool pool, Dataset dsel, std::vector<DesTechnique> des_set,
                           PotentialMetric metric, std::size_t k, std::size_t kp_knop,
                           std::size_t kp_meta, double h_c, std::uint64_t random_stream_seed) {
    if (des_set.empty()) throw std::invalid_argument("des_set must not be empty");
    PsDesSystem system;
    system.pool = std::move(pool);
    system.dsel = std::move(dsel);
    system.des_set = std::move(des_set);
    system.metric = metric;
    system.k = k;
    system.kp_knop = kp_knop;
    system.kp_meta = kp_meta;
    system.h_c = h_c;
    system.random_stream_seed = random_stream_seed;

    if (!system.pool.caches_ready()) cache_dsel_outputs(system.pool, system.dsel);
    if (std::find(system.des_set.begin(), system.des_set.end(), DesTechnique::meta_des) !=
        system.des_set.end()) {
        system.meta_model = metades_train(system.pool, system.dsel, h_c, k, kp_meta);
    }
    return system;
}

QueryContext make_query_context(const PsDesSystem& system, std::span<const double> x_q) {
    QueryContext context;
    context.roc = compute_roc(x_q, system.dsel, system.k);
    context.profile = output_profile(system.pool, x_q);

    const bool wants_knop = std::find(system.des_set.begin(), system.des_set.end(),
                                      DesTechnique::knop) != system.des_set.end();
    const bool wants_meta = std::find(system.des_set.begin(), system.des_set.end(),
                                      DesTechnique::meta_des) != system.des_set.end();
    if (wants_knop) {
        context.knop_neighborhood = profile_neighbors(context.profile, system.pool, system.kp_knop);
    }
    if (wants_meta) {
        context.meta_neighborhood = profile_neighbors(context.profile, system.pool, system.kp_meta);
    }

    const std::size_t L = static_cast<std::size_t>(system.pool.n_classes);
    context.pool_votes.reserve(system.pool.size());
    for (std::size_t i = 0; i < system.pool.size(); ++i) {
        const auto block = std::span<const double>(context.profile).subspan(i * L, L);
        std::size_t best = 0;
        for (std::size_t c = 1; c < L; ++c) {
            if (block[c] > block[best]) best = c;
        }
        context.pool_votes.push_back(static_cast<int>(best));
    }
    return context;
}

std::vector<SelectedEnsemble> candidate_ensembles(const PsDesSystem& system,
                                                  const QueryContext& context) {
    std::vector<SelectedEnsemble> candidates;
    candidates.reserve(system.des_set.size());
    for (DesTechnique technique : system.des_set) {
        switch (technique) {
            case DesTechnique::knora_u:
                candidates.push_back(knora_u_select(system.pool, context.roc, context.pool_votes));
                break;
            case DesTechnique::knop:
                candidates.push_back(
                    knop_select(system.pool, context.knop_neighborhood, context.pool_votes));
                break;
            case DesTechnique::des_p:
                candidates.push_back(desp_select(system.pool, context.roc, system.pool.n_classes,
                                                 context.pool_votes));
                break;
            case DesTechnique::meta_des:
                candidates.push_back(metades_select(system.meta_model, system.pool,
                                                    system.dsel.labels, context.roc,
                                                    context.meta_neighborhood, context.profile,
                                                    context.pool_votes));
                break;
        }
    }
    return candidates;
}

SelectedEnsemble ps_des_select(std::span<const double> x_q, const PsDesSystem& system,
                               std::uint64_t query_index) {
    const auto context = make_query_context(system, x_q);
    auto candidates = candidate_ensembles(system, context);
    RandomStream rng(derive_seed(system.random_stream_seed, kRandomPotentialStream, query_index));
    const std::size_t winner = select_among(candidates, system.metric, &rng);
    return std::move(candidates[winner]);
}

int classify(std::span<const double> x_q, const PsDesSystem& system, std::uint64_t query_index) {
    return combine(ps_des_select(x_q, system, query_index));
}

}  // namespace psdes
