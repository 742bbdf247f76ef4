#include "mdcc/measures.hpp"

#include <cmath>
#include <limits>

#include "mdcc/errors.hpp"

namespace mdcc {

namespace {

void check_shapes(const InputDistribution& p, Index rows, Index what) {
  if (p.size() != rows) throw ShapeMismatch("input distribution does not match channel rows");
  (void)what;
}

}  // namespace

Vector output_distribution(const InputDistribution& p, const TestChannel& v) {
  check_shapes(p, v.input_size(), 0);
  return v.probabilities.transpose() * p.weights;
}

double mutual_information(const InputDistribution& p, const TestChannel& v) {
  check_shapes(p, v.input_size(), 0);
  const Vector q = v.probabilities.transpose() * p.weights;
  double info = 0.0;
  for (Index x : p.support) {
    double row = 0.0;
    for (Index y = 0; y < v.output_size(); ++y) {
      const double vxy = v.probabilities(x, y);
      if (vxy > 0.0) row += vxy * std::log(vxy / q[y]);
    }
    info += p.weights[x] * row;
  }
  return info;
}

double conditional_kl(const TestChannel& v, const Channel& w, const InputDistribution& p) {
  if (v.input_size() != w.input_size() || v.output_size() != w.output_size()) {
    throw ShapeMismatch("V and W have different shapes");
  }
  check_shapes(p, w.input_size(), 0);
  double total = 0.0;
  for (Index x : p.support) {
    for (Index y = 0; y < w.output_size(); ++y) {
      const double vxy = v.probabilities(x, y);
      if (vxy == 0.0) continue;
      const double wxy = w.probabilities(x, y);
      if (wxy == 0.0) return std::numeric_limits<double>::infinity();
      total += p.weights[x] * vxy * std::log(vxy / wxy);
    }
  }
  return total;
}

double info_density_variance(const InputDistribution& p, const TestChannel& v) {
  check_shapes(p, v.input_size(), 0);
  const Vector q = v.probabilities.transpose() * p.weights;
  double m1 = 0.0;
  double m2 = 0.0;
  for (Index x : p.support) {
    for (Index y = 0; y < v.output_size(); ++y) {
      const double vxy = v.probabilities(x, y);
      if (vxy == 0.0) continue;
      const double i = std::log(vxy / q[y]);
      const double mass = p.weights[x] * vxy;
      m1 += mass * i;
      m2 += mass * i * i;
    }
  }
  const double var = m2 - m1 * m1;
  return var > 0.0 ? var : 0.0;
}

double binary_entropy(double p) {
  if (!(p >= 0.0) || !(p <= 1.0)) throw DomainError("binary_entropy argument outside [0,1]");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
  return h;
}

Composition composition(std::span<const int> sequence, Index alphabet_size) {
  if (sequence.empty()) throw EmptySequence("empty sequence has no composition");
  if (alphabet_size <= 0) throw DomainError("alphabet size must be positive");
  Composition comp;
  comp.counts.assign(static_cast<std::size_t>(alphabet_size), 0);
  for (int s : sequence) {
    if (s < 0 || s >= alphabet_size) throw DomainError("symbol outside alphabet");
    ++comp.counts[static_cast<std::size_t>(s)];
  }
  Vector type(alphabet_size);
  const double n = static_cast<double>(sequence.size());
  for (Index x = 0; x < alphabet_size; ++x) {
    type[x] = static_cast<double>(comp.counts[static_cast<std::size_t>(x)]) / n;
  }
  comp.type = make_input_distribution(type);
  return comp;
}

}  // namespace mdcc
