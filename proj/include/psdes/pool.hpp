#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "psdes/classifiers.hpp"
#include "psdes/dataset.hpp"
#include "psdes/matrix.hpp"
#include "psdes/rng.hpp"

namespace psdes {

struct PoolMemberInfo {
    int bootstrap_index = 0;
    int spec_index = 0;
};

// Bagged pool of b x m classifiers, ordered bootstrap-major (all of
// bootstrap 0's members first). The DSEL caches are filled once by
// cache_dsel_outputs and shared read-only by every selection technique.
struct Pool {
    std::vector<TrainedClassifier> classifiers;
    std::vector<PoolMemberInfo> provenance;
    int n_classes = 0;

    std::vector<std::vector<int>> dsel_votes;          // M x |DSEL|
    std::vector<std::vector<std::uint8_t>> dsel_correct;  // M x |DSEL|
    Matrix dsel_profiles;                              // |DSEL| x (M*L)

    std::size_t size() const { return classifiers.size(); }
    std::size_t dsel_size() const { return dsel_votes.empty() ? 0 : dsel_votes.front().size(); }
    bool caches_ready() const { return !dsel_votes.empty(); }
};

// n draws with replacement from [0, n).
std::vector<std::size_t> bootstrap_indices(std::size_t n, RandomStream& rng);

// Trains every spec on every bootstrap. A bootstrap missing some class is
// redrawn up to 10 times, then a per-class (stratified) bootstrap is forced.
// Per-bootstrap and per-classifier streams are derived from the seed, so
// the result does not depend on training order.
Pool build_pool(const Dataset& train, int n_bootstraps, const std::vector<ClassifierSpec>& specs,
                std::uint64_t seed);

void cache_dsel_outputs(Pool& pool, const Dataset& dsel);

// Text serialization, format "psdes-pool v1". Parameters round-trip through
// decimal text without loss.
void save_pool(const Pool& pool, std::ostream& out);
Pool load_pool(std::istream& in);
void save_pool(const Pool& pool, const std::string& path);
Pool load_pool(const std::string& path);

}  // namespace psdes
