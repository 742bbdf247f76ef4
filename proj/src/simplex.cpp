#include "mdcc/detail/simplex.hpp"

#include <algorithm>
#include <vector>

namespace mdcc::detail {

Vector project_to_simplex(const Vector& v) {
  const Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0;
  double theta = 0.0;
  int k = 0;
  for (Index i = 0; i < n; ++i) {
    css += u[static_cast<std::size_t>(i)];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[static_cast<std::size_t>(i)] - t > 0.0) {
      theta = t;
      k = static_cast<int>(i + 1);
    }
  }
  (void)k;
  Vector out(n);
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    out[i] = std::max(0.0, v[i] - theta);
    sum += out[i];
  }
  out /= sum;
  return out;
}

namespace {

void simplex_grid_rec(Vector& point, Index pos, long remaining, long N,
                      const std::function<void(const Vector&)>& visit) {
  if (pos + 1 == point.size()) {
    point[pos] = static_cast<double>(remaining) / static_cast<double>(N);
    visit(point);
    return;
  }
  for (long k = 0; k <= remaining; ++k) {
    point[pos] = static_cast<double>(k) / static_cast<double>(N);
    simplex_grid_rec(point, pos + 1, remaining - k, N, visit);
  }
}

}  // namespace

void simplex_grid(Index dim, long N, const std::function<void(const Vector&)>& visit) {
  Vector point(dim);
  simplex_grid_rec(point, 0, N, N, visit);
}

Vector pattern_search_simplex(const std::function<double(const Vector&)>& f, Vector start,
                              double initial_step, double min_step, int max_iters) {
  const Index n = start.size();
  Vector best = project_to_simplex(start);
  double best_val = f(best);
  double step = initial_step;
  int iters = 0;
  while (step >= min_step && iters < max_iters) {
    bool improved = false;
    for (Index i = 0; i < n && iters < max_iters; ++i) {
      for (Index j = 0; j < n && iters < max_iters; ++j) {
        if (i == j) continue;
        const double move = std::min(step, best[j]);
        if (move <= 0.0) continue;
        ++iters;
        Vector cand = best;
        cand[i] += move;
        cand[j] -= move;
        const double val = f(cand);
        if (val > best_val) {
          best_val = val;
          best = cand;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace mdcc::detail
