// Shared test oracles: frozen closed-form values (checked against an
// independent high-precision evaluation before being frozen), finite
// differences, direct long-double evaluation of the exponent kernel, and
// small random-instance generators. Everything here is deliberately
// independent of the library's computation paths.
#pragma once

#include <cmath>
#include <vector>

#include "mdcc/channel.hpp"
#include "mdcc/detail/rng.hpp"

namespace oracle {

// BSC(0.1): C = ln 2 - h(0.1), sigma^2 = p(1-p) ln^2((1-p)/p).
inline constexpr double kCBsc01 = 0.36806420716849707;
inline constexpr double kSigma2Bsc01 = 0.43450162589252951;
// BEC(0.5): sigma^2 = eps(1-eps) ln^2 2.
inline constexpr double kSigma2Bec05 = 0.12011325347955036;
inline constexpr double kH01 = 0.32508297339144824;         // h(0.1)
inline constexpr double kE0RhoOneBsc01 = 0.22314355131420976;  // ln(5/4)
inline constexpr double kPhiInv09 = 1.2815515655446004;
inline constexpr double kNormalRateBsc01N1000 = 0.34135064593628979;
inline constexpr double kDklBsc02Bsc01 = 0.044403007586882298;
inline constexpr double kCBsc005 = 0.49463193721407275;
inline constexpr double kTargetBsc01 = -1.1507436801253098;       // -1/(2 sigma^2)
inline constexpr double kGammaTargetBsc01 = -1.2786040890281220;  // target/0.9
inline constexpr double kLn2 = 0.69314718055994531;

inline mdcc::Matrix bsc_matrix(double p) {
  mdcc::Matrix m(2, 2);
  m << 1.0 - p, p, p, 1.0 - p;
  return m;
}

inline mdcc::Matrix bec_matrix(double eps) {
  mdcc::Matrix m(2, 3);
  m << 1.0 - eps, eps, 0.0, 0.0, eps, 1.0 - eps;
  return m;
}

inline mdcc::Matrix identity_matrix(mdcc::Index k) {
  return mdcc::Matrix::Identity(k, k);
}

// Rows 0 and 1 identical BSC(0.1) rows, row 2 the complementary row: the
// capacity achievers form a segment.
inline mdcc::Matrix duplicated_row_matrix() {
  mdcc::Matrix m(3, 2);
  m << 0.9, 0.1, 0.9, 0.1, 0.1, 0.9;
  return m;
}

// Random positive channel with entries bounded away from zero.
inline mdcc::Matrix random_channel_matrix(mdcc::detail::Rng& rng, mdcc::Index inputs,
                                          mdcc::Index outputs, double floor = 0.05) {
  mdcc::Matrix m(inputs, outputs);
  for (mdcc::Index x = 0; x < inputs; ++x) {
    mdcc::Vector row = mdcc::detail::dirichlet(rng, outputs);
    row = (row + mdcc::Vector::Constant(outputs, floor)) /
          (1.0 + floor * static_cast<double>(outputs));
    m.row(x) = row.transpose();
  }
  return m;
}

inline mdcc::Vector random_interior_point(mdcc::detail::Rng& rng, mdcc::Index k,
                                          double floor = 0.1) {
  mdcc::Vector p = mdcc::detail::dirichlet(rng, k);
  return (p + mdcc::Vector::Constant(k, floor)) / (1.0 + floor * static_cast<double>(k));
}

// Direct long-double evaluation of the exponent kernel from its definition,
// with no support-set machinery: an independent high-precision value oracle.
inline long double eo_direct(long double rho, const mdcc::Vector& p, const mdcc::Matrix& w) {
  long double total = 0.0L;
  for (mdcc::Index y = 0; y < w.cols(); ++y) {
    long double fy = 0.0L;
    for (mdcc::Index x = 0; x < w.rows(); ++x) {
      const long double wxy = static_cast<long double>(w(x, y));
      if (wxy > 0.0L && p[x] > 0.0) {
        fy += static_cast<long double>(p[x]) * std::pow(wxy, 1.0L / (1.0L + rho));
      }
    }
    if (fy > 0.0L) total += std::pow(fy, 1.0L + rho);
  }
  return -std::log(total);
}

template <typename F>
double central_d1(const F& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

template <typename F>
double central_d2(const F& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

template <typename F>
double central_d3(const F& f, double x, double h) {
  return (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) /
         (2.0 * h * h * h);
}

}  // namespace oracle
