#pragma once

#include <cstdint>
#include <string>

#include "mdcc/channel.hpp"

namespace mdcc {

/// E_o(rho, P) together with its first three rho-derivatives, all in nats.
struct EoEvaluation {
  double rho = 0.0;
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};

/// E_o(rho, P) = -log sum_y (sum_x P(x) W(y|x)^{1/(1+rho)})^{1+rho}.
double eo(double rho, const InputDistribution& p, const Channel& w);

/// Analytic derivatives assembled from the per-output closed forms; outputs
/// unreachable from the support of P contribute exactly zero.
EoEvaluation eo_derivatives(double rho, const InputDistribution& p, const Channel& w);

/// Heuristic global bound on |d3 E_o / d rho^3| over [0,1] x P(X).
struct ThirdDerivativeBound {
  double M = 0.0;
  std::string certified = "heuristic";
};

/// Probes a rho-grid crossed with structured and Dirichlet-sampled input
/// distributions, then refines the best probes by local ascent. Deterministic
/// for a fixed seed regardless of the worker count.
ThirdDerivativeBound third_derivative_bound(const Channel& w, int grid_density = 33,
                                            int restarts = 64, std::uint64_t seed = 1);

}  // namespace mdcc
