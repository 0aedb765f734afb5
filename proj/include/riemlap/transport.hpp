#pragma once

#include <cstdint>
#include <vector>

#include "riemlap/types.hpp"

namespace riemlap {

/// Exact uncapacitated transportation problem: minimize sum c_ij x_ij with
/// row sums equal to supply and column sums equal to demand (both integer,
/// with equal totals). Primal network simplex on the spanning-tree basis,
/// northwest-corner start, block pivot search with a Bland fallback.
/// Returns the optimal cost sum f_ij c_ij.
double transport_simplex(const Mat& cost, const std::vector<std::int64_t>& supply,
                         const std::vector<std::int64_t>& demand);

}  // namespace riemlap
