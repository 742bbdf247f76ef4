#include <doctest.h>

#include <cmath>
#include <vector>

#include "mdcc/capacity.hpp"
#include "mdcc/channel.hpp"
#include "mdcc/code_sim.hpp"
#include "mdcc/detail/parallel.hpp"
#include "mdcc/detail/rng.hpp"
#include "mdcc/errors.hpp"
#include "mdcc/measures.hpp"
#include "oracles.hpp"

using namespace mdcc;

namespace {

Codebook explicit_codebook(long n, std::vector<std::vector<int>> words) {
  Codebook cb;
  cb.n = n;
  cb.M = static_cast<long>(words.size());
  for (const auto& word : words) {
    REQUIRE(static_cast<long>(word.size()) == n);
    for (int s : word) cb.symbols.push_back(static_cast<std::uint8_t>(s));
  }
  return cb;
}

}  // namespace

TEST_CASE("ML decoding of the repetition code") {
  const Channel id = ingest_channel(oracle::identity_matrix(2));
  const Codebook cb = explicit_codebook(2, {{0, 0}, {1, 1}});
  const Decoder dec = ml_decoder(cb, id);
  CHECK(decode(cb, dec, std::vector<std::uint8_t>{0, 0}) == 0);
  CHECK(decode(cb, dec, std::vector<std::uint8_t>{1, 1}) == 1);

  // Majority vote under the BSC, checked against the hand enumeration.
  const Channel bsc = ingest_channel(oracle::bsc_matrix(0.1));
  const Codebook rep3 = explicit_codebook(3, {{0, 0, 0}, {1, 1, 1}});
  const Decoder mdec = ml_decoder(rep3, bsc);
  for (int y0 = 0; y0 < 2; ++y0) {
    for (int y1 = 0; y1 < 2; ++y1) {
      for (int y2 = 0; y2 < 2; ++y2) {
        const std::vector<std::uint8_t> y{static_cast<std::uint8_t>(y0),
                                          static_cast<std::uint8_t>(y1),
                                          static_cast<std::uint8_t>(y2)};
        const int majority = (y0 + y1 + y2 >= 2) ? 1 : 0;
        CHECK(decode(rep3, mdec, y) == majority);
      }
    }
  }
}

TEST_CASE("ties resolve to the lowest message index") {
  const Channel bsc = ingest_channel(oracle::bsc_matrix(0.1));
  const Codebook twin = explicit_codebook(2, {{0, 1}, {0, 1}});
  const Decoder dec = ml_decoder(twin, bsc);
  for (int y0 = 0; y0 < 2; ++y0) {
    for (int y1 = 0; y1 < 2; ++y1) {
      CHECK(decode(twin, dec,
                   std::vector<std::uint8_t>{static_cast<std::uint8_t>(y0),
                                             static_cast<std::uint8_t>(y1)}) == 0);
    }
  }
  // All mass decodes to message 0, so message 1 always errs.
  const CodeErrorReport report = exact_error(twin, dec, as_test_channel(bsc));
  CHECK(report.per_message[0] == doctest::Approx(0.0));
  CHECK(report.per_message[1] == doctest::Approx(1.0));
}

TEST_CASE("exact error of the repetition code and trivial codes") {
  const Channel bsc = ingest_channel(oracle::bsc_matrix(0.1));
  const Codebook rep3 = explicit_codebook(3, {{0, 0, 0}, {1, 1, 1}});
  const CodeErrorReport report = exact_error(rep3, ml_decoder(rep3, bsc), as_test_channel(bsc));
  CHECK(report.per_message[0] == doctest::Approx(0.028).epsilon(1e-14));
  CHECK(report.per_message[1] == doctest::Approx(0.028).epsilon(1e-14));
  CHECK(report.average == doctest::Approx(0.028).epsilon(1e-14));
  CHECK(report.maximal == doctest::Approx(0.028).epsilon(1e-14));
  CHECK(report.method == "exact");

  const Channel id = ingest_channel(oracle::identity_matrix(2));
  const Codebook distinct = explicit_codebook(3, {{0, 0, 0}, {1, 1, 0}});
  const CodeErrorReport clean = exact_error(distinct, ml_decoder(distinct, id),
                                            as_test_channel(id));
  CHECK(clean.average == 0.0);

  const Codebook single = explicit_codebook(2, {{0, 1}});
  const CodeErrorReport lone = exact_error(single, ml_decoder(single, bsc),
                                           as_test_channel(bsc));
  CHECK(lone.average == 0.0);  // its decoding region is everything

  Codebook big;
  big.n = 25;
  big.M = 1;
  big.symbols.assign(25, 0);
  CHECK_THROWS_AS(exact_error(big, ml_decoder(big, bsc), as_test_channel(bsc)),
                  EnumerationTooLarge);
}

TEST_CASE("exact error against an off-channel V and region partition") {
  const Channel w = ingest_channel(oracle::bsc_matrix(0.1));
  const Codebook rep4 = explicit_codebook(4, {{0, 0, 0, 0}, {1, 1, 1, 1}});
  const Decoder dec = ml_decoder(rep4, w);
  const TestChannel v = make_test_channel(oracle::bsc_matrix(0.3));
  const CodeErrorReport report = exact_error(rep4, dec, v);
  // Hand oracle: message 0 errs when 3+ flips, or 2 flips decoding to 1
  // (ties at two flips go to message 0, the lower index).
  const double p = 0.3;
  const double three = 4.0 * p * p * p * (1.0 - p);
  const double four = p * p * p * p;
  CHECK(report.per_message[0] == doctest::Approx(three + four).epsilon(1e-12));
}

TEST_CASE("random codebooks are reproducible and composition-correct") {
  const InputDistribution p = make_input_distribution((Vector(2) << 0.3, 0.7).finished());
  const Codebook a = random_codebook(p, 6, 4, 2024);
  const Codebook b = random_codebook(p, 6, 4, 2024);
  CHECK(a.symbols == b.symbols);
  mdcc::detail::set_thread_limit(1);
  const Codebook c = random_codebook(p, 6, 4, 2024);
  mdcc::detail::set_thread_limit(0);
  CHECK(a.symbols == c.symbols);
  const Codebook d = random_codebook(p, 6, 4, 2025);
  CHECK(a.symbols != d.symbols);

  const InputDistribution half = make_input_distribution((Vector(2) << 0.5, 0.5).finished());
  const Codebook cc = constant_composition_codebook(half, 4, 8, 7);
  REQUIRE(cc.composition_tag.has_value());
  for (long m = 0; m < cc.M; ++m) {
    int ones = 0;
    for (std::uint8_t s : cc.word(m)) ones += s;
    CHECK(ones == 2);
  }
  const InputDistribution thirds =
      make_input_distribution((Vector(2) << 1.0 / 3.0, 2.0 / 3.0).finished());
  CHECK_THROWS_AS(constant_composition_codebook(thirds, 4, 2, 7), NonIntegralComposition);
}

TEST_CASE("Monte Carlo matches the exact repetition error") {
  const Channel bsc = ingest_channel(oracle::bsc_matrix(0.1));
  const Codebook rep3 = explicit_codebook(3, {{0, 0, 0}, {1, 1, 1}});
  const Decoder dec = ml_decoder(rep3, bsc);

  const CodeErrorReport mc = monte_carlo_error(rep3, dec, bsc, 100000, 11);
  CHECK(mc.method == "monte_carlo");
  CHECK(mc.average_ci.low <= 0.028);
  CHECK(mc.average_ci.high >= 0.028);
  CHECK(std::abs(mc.average - 0.028) < 0.002);

  // Noiseless channel: exactly zero errors.
  const Channel id = ingest_channel(oracle::identity_matrix(2));
  const Codebook pair = explicit_codebook(3, {{0, 0, 0}, {1, 1, 1}});
  CHECK(monte_carlo_error(pair, ml_decoder(pair, id), id, 1000, 3).average == 0.0);

  // Interval width shrinks like the square root of the trial count.
  const CodeErrorReport narrow = monte_carlo_error(rep3, dec, bsc, 100000, 5);
  const CodeErrorReport wide = monte_carlo_error(rep3, dec, bsc, 100, 5);
  const double ratio = (wide.average_ci.high - wide.average_ci.low) /
                       (narrow.average_ci.high - narrow.average_ci.low);
  CHECK(ratio > 15.0);
  CHECK(ratio < 60.0);

  CHECK_THROWS_AS(monte_carlo_error(rep3, dec, bsc, 50, 5), DomainError);
}

TEST_CASE("Monte Carlo is deterministic across thread counts") {
  const Channel bsc = ingest_channel(oracle::bsc_matrix(0.05));
  const Codebook cb = random_codebook(uniform_input(2), 8, 4, 99);
  const Decoder dec = ml_decoder(cb, bsc);
  const CodeErrorReport a = monte_carlo_error(cb, dec, bsc, 5000, 42);
  mdcc::detail::set_thread_limit(1);
  const CodeErrorReport b = monte_carlo_error(cb, dec, bsc, 5000, 42);
  mdcc::detail::set_thread_limit(0);
  for (long m = 0; m < cb.M; ++m) CHECK(a.per_message[m] == b.per_message[m]);
  CHECK(a.average == b.average);
}

TEST_CASE("coverage of the Monte Carlo interval over seeded reruns") {
  const Channel bsc = ingest_channel(oracle::bsc_matrix(0.1));
  const Codebook rep3 = explicit_codebook(3, {{0, 0, 0}, {1, 1, 1}});
  const Decoder dec = ml_decoder(rep3, bsc);
  const double exact = 0.028;
  int covered = 0;
  const int reruns = 100;
  for (int s = 0; s < reruns; ++s) {
    const CodeErrorReport mc =
        monte_carlo_error(rep3, dec, bsc, 1500, 1000 + static_cast<std::uint64_t>(s));
    if (mc.average_ci.low <= exact && exact <= mc.average_ci.high) ++covered;
  }
  CHECK(covered >= 93);
}

TEST_CASE("strong-converse verification on a constructed instance") {
  // Rate ln(2)/6 with V = BSC(0.45): the mutual information is tiny, so a
  // positive delta satisfying the hypothesis exists.
  const Channel w = ingest_channel(oracle::bsc_matrix(0.1));
  const InputDistribution half = make_input_distribution((Vector(2) << 0.5, 0.5).finished());
  const Codebook cb = constant_composition_codebook(half, 6, 2, 31);
  const Decoder dec = ml_decoder(cb, w);
  const TestChannel v = make_test_channel(oracle::bsc_matrix(0.45));
  const ConverseConstants consts = make_converse_constants(constant_A(w, 16, 4), 0.1);

  const double rate = std::log(2.0) / 6.0;
  const double info = mutual_information(half, v);
  REQUIRE(info < rate);
  const double delta = 0.45 * (rate - info);

  const Lemma31Verdict verdict = verify_lemma31(cb, dec, v, delta, consts);
  CHECK(verdict.hypothesis_holds);
  CHECK(verdict.pass);
  CHECK(verdict.e_bar >= verdict.bound - 1e-12);
  CHECK(verdict.chebyshev_lhs_max <= verdict.chebyshev_rhs + 1e-12);

  // A high-information V breaks the hypothesis; the verdict records it.
  const TestChannel sharp = make_test_channel(oracle::bsc_matrix(0.01));
  const Lemma31Verdict failed = verify_lemma31(cb, dec, sharp, delta, consts);
  CHECK_FALSE(failed.hypothesis_holds);
}

TEST_CASE("log-sum inequality verification") {
  const Channel w = ingest_channel(oracle::bsc_matrix(0.1));
  const Codebook rep4 = explicit_codebook(4, {{0, 0, 0, 0}, {1, 1, 1, 1}});
  const Decoder dec = ml_decoder(rep4, w);

  // V = W: the divergence term vanishes and the verdict is still computed.
  {
    const Eq34Verdict verdict = verify_eq34(rep4, dec, 0, as_test_channel(w), w);
    CHECK_FALSE(verdict.degenerate);
    CHECK(verdict.divergence == doctest::Approx(0.0));
    CHECK(verdict.pass);
  }
  // Distinct V: strict positive margin expected.
  {
    const Eq34Verdict verdict =
        verify_eq34(rep4, dec, 1, make_test_channel(oracle::bsc_matrix(0.3)), w);
    CHECK_FALSE(verdict.degenerate);
    CHECK(verdict.pass);
    CHECK(verdict.margin > 0.0);
  }
  // A message with an empty decoding region degenerates the bound.
  {
    const Codebook twin = explicit_codebook(2, {{0, 1}, {0, 1}});
    const Decoder tdec = ml_decoder(twin, w);
    const Eq34Verdict verdict = verify_eq34(twin, tdec, 1, as_test_channel(w), w);
    CHECK(verdict.degenerate);
  }
}

TEST_CASE("verification corpus passes wholesale") {
  const auto corpus = make_verification_corpus(100, 2026);
  REQUIRE(corpus.size() == 100);
  int hypothesis_held = 0;
  for (const VerificationInstance& inst : corpus) {
    const Decoder dec = ml_decoder(inst.cb, inst.W);
    const Lemma31Verdict lemma = verify_lemma31(inst.cb, dec, inst.V, inst.delta, inst.consts);
    CHECK(lemma.pass);
    if (lemma.hypothesis_holds) ++hypothesis_held;
    for (long m = 0; m < inst.cb.M; ++m) {
      const Eq34Verdict eq = verify_eq34(inst.cb, dec, static_cast<int>(m), inst.V, inst.W);
      REQUIRE_FALSE(eq.degenerate);
      CHECK(eq.pass);
    }
  }
  // The corpus is built to exercise the hypothesis-true branch heavily.
  CHECK(hypothesis_held >= 50);
}

TEST_CASE("mdp experiment rows sit below the Gallager bound") {
  const Channel bsc = ingest_channel(oracle::bsc_matrix(0.05));
  const RateSchedule s = make_schedule(0.15, 1e-6);  // essentially constant eps
  const std::vector<long> ns{100, 200};
  const auto rows = mdp_experiment(s, ns, 4096, 400, 77, bsc);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.capped);
    CHECK(row.rate_effective <= row.rate_target + 1e-12);
    CHECK(row.estimate <= row.upper_bound + (row.ci.high - row.estimate) + 1e-12);
    CHECK(row.ci.low <= row.estimate);
    CHECK(row.ci.high >= row.estimate);
  }

  // Noiseless channel: zero errors everywhere.
  const Channel id = ingest_channel(oracle::identity_matrix(2));
  const auto clean = mdp_experiment(s, std::vector<long>{60}, 256, 300, 5, id);
  REQUIRE(clean.size() == 1);
  CHECK(clean[0].estimate == 0.0);

  // Determinism contract.
  const auto again = mdp_experiment(s, ns, 4096, 400, 77, bsc);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].estimate == again[i].estimate);
  }
}
