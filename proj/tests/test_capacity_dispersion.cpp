#include <doctest.h>

#include <cmath>

#include "mdcc/capacity.hpp"
#include "mdcc/channel.hpp"
#include "mdcc/detail/rng.hpp"
#include "mdcc/errors.hpp"
#include "mdcc/gallager.hpp"
#include "mdcc/measures.hpp"
#include "oracles.hpp"

using namespace mdcc;

TEST_CASE("capacity of the standard channels") {
  for (Index k : {2, 3, 4}) {
    const CapacityResult cap = capacity(ingest_channel(oracle::identity_matrix(k)), 1e-10);
    CHECK(cap.C == doctest::Approx(std::log(static_cast<double>(k))).epsilon(1e-12));
    for (Index x = 0; x < k; ++x) {
      CHECK(cap.P_star.weights[x] ==
            doctest::Approx(1.0 / static_cast<double>(k)).epsilon(1e-9));
    }
  }
  {
    Matrix same(3, 2);
    same << 0.4, 0.6, 0.4, 0.6, 0.4, 0.6;
    const CapacityResult cap = capacity(ingest_channel(same));
    CHECK(cap.C == doctest::Approx(0.0).epsilon(1e-12));
  }
  {
    const CapacityResult cap = capacity(ingest_channel(oracle::bsc_matrix(0.1)), 1e-10);
    CHECK(std::abs(cap.C - oracle::kCBsc01) <= 1e-9);
    CHECK(cap.gap <= 1e-10);
  }
}

TEST_CASE("capacity result invariants on random channels") {
  auto rng = mdcc::detail::Rng::substream(41, {1});
  for (int trial = 0; trial < 15; ++trial) {
    const Index ki = 2 + static_cast<Index>(rng.below(3));
    const Index ko = 2 + static_cast<Index>(rng.below(3));
    const Channel w = ingest_channel(oracle::random_channel_matrix(rng, ki, ko, 0.01));
    const CapacityResult cap = capacity(w, 1e-9);
    CHECK(cap.gap <= 1e-9);
    CHECK(mutual_information(cap.P_star, as_test_channel(w)) >= cap.C - cap.gap);
    for (Index x = 0; x < ki; ++x) {
      double d = 0.0;
      for (Index y = 0; y < ko; ++y) {
        const double wxy = w.probabilities(x, y);
        if (wxy > 0.0) d += wxy * std::log(wxy / cap.Q_star[y]);
      }
      CHECK(d <= cap.C + cap.tol_kkt);
    }
  }
}

TEST_CASE("conditional dispersion matches the information-density variance") {
  const Channel bsc = ingest_channel(oracle::bsc_matrix(0.1));
  CHECK(conditional_dispersion(uniform_input(2), bsc) ==
        doctest::Approx(oracle::kSigma2Bsc01).epsilon(1e-12));
  CHECK(conditional_dispersion(uniform_input(2),
                               ingest_channel(oracle::identity_matrix(2))) ==
        doctest::Approx(0.0));
  Vector point(2);
  point << 1.0, 0.0;
  CHECK(conditional_dispersion(make_input_distribution(point), bsc) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("channel dispersion closed forms") {
  {
    const Channel w = ingest_channel(oracle::bsc_matrix(0.1));
    const CapacityResult cap = capacity(w, 1e-10);
    const DispersionResult disp = channel_dispersion(w, cap);
    CHECK(std::abs(disp.sigma_sq - oracle::kSigma2Bsc01) <= 1e-9);
    CHECK(disp.minimizer.weights[0] == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(disp.method == "lp");
  }
  {
    const Channel w = ingest_channel(oracle::bec_matrix(0.5));
    const CapacityResult cap = capacity(w, 1e-10);
    const DispersionResult disp = channel_dispersion(w, cap);
    CHECK(std::abs(disp.sigma_sq - oracle::kSigma2Bec05) <= 1e-9);
  }
  {
    const Channel w = ingest_channel(oracle::identity_matrix(3));
    const CapacityResult cap = capacity(w, 1e-10);
    const DispersionResult disp = channel_dispersion(w, cap);
    CHECK(disp.sigma_sq == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("dispersion invariants") {
  auto rng = mdcc::detail::Rng::substream(43, {2});
  for (int trial = 0; trial < 10; ++trial) {
    const Index ki = 2 + static_cast<Index>(rng.below(2));
    const Index ko = 2 + static_cast<Index>(rng.below(3));
    const Channel w = ingest_channel(oracle::random_channel_matrix(rng, ki, ko, 0.02));
    const CapacityResult cap = capacity(w, 1e-10);
    const DispersionResult disp = channel_dispersion(w, cap);

    CHECK(disp.sigma_sq >= 0.0);
    // Linear decomposition against the per-letter variances.
    CHECK(std::abs(disp.sigma_sq - disp.per_letter_variance.dot(disp.minimizer.weights)) <=
          1e-9);
    // The minimizer achieves capacity within the KKT tolerance.
    CHECK(std::abs(mutual_information(disp.minimizer, as_test_channel(w)) - cap.C) <=
          cap.tol_kkt + 1e-9);
    // Links the curvature at zero to the dispersion of the minimizer.
    CHECK(std::abs(-eo_derivatives(0.0, disp.minimizer, w).d2 -
                   conditional_dispersion(disp.minimizer, w)) <= 1e-9);
    // No capacity-achieving point does better.
    CHECK(disp.sigma_sq <= conditional_dispersion(cap.P_star, w) + 1e-9);
    // The variance decomposition holds for the capacity maximizer as well.
    const double direct = conditional_dispersion(disp.minimizer, w);
    CHECK(std::abs(direct - disp.sigma_sq) <= 1e-8);
  }
}

TEST_CASE("duplicated-row channel: LP agrees with a segment scan") {
  const Channel w = ingest_channel(oracle::duplicated_row_matrix());
  const CapacityResult cap = capacity(w, 1e-10);
  CHECK(std::abs(cap.C - oracle::kCBsc01) <= 1e-9);

  const DispersionResult lp = channel_dispersion(w, cap);
  // Scan the capacity-achieving segment P = (a, 1/2 - a, 1/2).
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 5000; ++i) {
    const double a = 0.5 * static_cast<double>(i) / 5000.0;
    Vector p(3);
    p << a, 0.5 - a, 0.5;
    best = std::min(best, conditional_dispersion(make_input_distribution(p), w));
  }
  CHECK(std::abs(lp.sigma_sq - best) <= 1e-6);
  // Lexicographic tie-break selects the smallest leading coordinate.
  CHECK(lp.minimizer.weights[0] <= 1e-8);
}

TEST_CASE("brute oracle agrees with the LP") {
  const Channel dup = ingest_channel(oracle::duplicated_row_matrix());
  const CapacityResult cap_dup = capacity(dup, 1e-10);
  CHECK(std::abs(channel_dispersion(dup, cap_dup).sigma_sq -
                 dispersion_brute(dup, cap_dup, 0.01).sigma_sq) <= 1e-6);

  auto rng = mdcc::detail::Rng::substream(47, {3});
  for (int trial = 0; trial < 10; ++trial) {
    const Index ki = 2 + static_cast<Index>(rng.below(2));
    const Index ko = 2 + static_cast<Index>(rng.below(2));
    const Channel w = ingest_channel(oracle::random_channel_matrix(rng, ki, ko, 0.02));
    const CapacityResult cap = capacity(w, 1e-10);
    const DispersionResult lp = channel_dispersion(w, cap);
    const DispersionResult brute = dispersion_brute(w, cap, 0.01);
    CHECK(brute.method == "brute");
    CHECK(std::abs(lp.sigma_sq - brute.sigma_sq) <= 1e-6);
  }

  CHECK_THROWS_AS(
      dispersion_brute(ingest_channel(Matrix::Identity(5, 5)), capacity(ingest_channel(
                           Matrix::Identity(5, 5))), 0.01),
      AlphabetTooLarge);
}

TEST_CASE("identity 3x3 brute dispersion is zero") {
  const Channel w = ingest_channel(oracle::identity_matrix(3));
  const CapacityResult cap = capacity(w, 1e-10);
  CHECK(dispersion_brute(w, cap, 0.02).sigma_sq == doctest::Approx(0.0).epsilon(1e-10));
}
