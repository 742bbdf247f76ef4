#pragma once

#include <functional>

#include "mdcc/channel.hpp"

namespace mdcc::detail {

/// Euclidean projection onto the probability simplex.
Vector project_to_simplex(const Vector& v);

/// Enumerates all points k/N on the dim-simplex with k integer compositions
/// of N, invoking visit on each (the same vector object is reused).
void simplex_grid(Index dim, long N, const std::function<void(const Vector&)>& visit);

/// Deterministic compass search over the simplex: moves mass along e_i - e_j
/// directions with a shrinking step. Maximizes f. Returns the best point.
/// f may assume its argument lies exactly on the simplex.
Vector pattern_search_simplex(const std::function<double(const Vector&)>& f, Vector start,
                              double initial_step, double min_step, int max_iters = 100000);

}  // namespace mdcc::detail
