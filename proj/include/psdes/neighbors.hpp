#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "psdes/dataset.hpp"
#include "psdes/pool.hpp"

namespace psdes {

// The k DSEL rows nearest to a query in feature space, ascending distance,
// distance ties broken by the lower row index. The token identifies one
// computed region so callers can assert that several techniques shared it.
struct RegionOfCompetence {
    std::vector<std::size_t> indices;
    std::vector<double> distances;
    std::uint64_t token = 0;
};

struct ProfileNeighborhood {
    std::vector<std::size_t> indices;
    std::vector<double> distances;
};

RegionOfCompetence compute_roc(std::span<const double> x_q, const Dataset& dsel, std::size_t k);

// Leave-one-out variant for queries that are themselves DSEL rows.
RegionOfCompetence compute_roc_excluding(std::span<const double> x_q, const Dataset& dsel,
                                         std::size_t k, std::size_t excluded_row);

// Concatenation of every pool member's posterior for x, in pool order.
std::vector<double> output_profile(const Pool& pool, std::span<const double> x);

ProfileNeighborhood profile_neighbors(std::span<const double> profile, const Pool& pool,
                                      std::size_t kp);
ProfileNeighborhood profile_neighbors_excluding(std::span<const double> profile, const Pool& pool,
                                                std::size_t kp, std::size_t excluded_row);

}  // namespace psdes
