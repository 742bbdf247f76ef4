#pragma once

#include <span>
#include <vector>

#include "mdcc/channel.hpp"

namespace mdcc {

/// Q(y) = sum_x P(x) V(y|x).
Vector output_distribution(const InputDistribution& p, const TestChannel& v);

/// I(P;V) in nats, with the 0 log 0 = 0 convention.
double mutual_information(const InputDistribution& p, const TestChannel& v);

/// D(V||W|P) = sum_x P(x) sum_y V(y|x) log(V(y|x)/W(y|x)).
/// Returns +infinity when V(y|x) > 0, W(y|x) = 0 for some x with P(x) > 0.
double conditional_kl(const TestChannel& v, const Channel& w, const InputDistribution& p);

/// Variance of the information density i(X,Y) = log(V(Y|X)/Q(Y)) under P x V.
double info_density_variance(const InputDistribution& p, const TestChannel& v);

/// h(p) = -p log p - (1-p) log(1-p) in nats.
double binary_entropy(double p);

struct Composition {
  std::vector<long> counts;
  InputDistribution type;
};

/// Empirical counts and type of a symbol sequence over {0, ..., alphabet_size-1}.
Composition composition(std::span<const int> sequence, Index alphabet_size);

}  // namespace mdcc
