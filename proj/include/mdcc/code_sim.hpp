#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdcc/bounds.hpp"
#include "mdcc/channel.hpp"
#include "mdcc/detail/stats.hpp"
#include "mdcc/measures.hpp"
#include "mdcc/mdp.hpp"

namespace mdcc {

struct Codebook {
  long n = 0;
  long M = 0;
  std::vector<std::uint8_t> symbols;  // M x n, row-major
  std::optional<std::vector<long>> composition_tag;  // common per-letter counts

  std::span<const std::uint8_t> word(long m) const {
    return {symbols.data() + m * n, static_cast<std::size_t>(n)};
  }
};

/// Decoding rule. ML decoding scores sum_k log W(y_k | x_k(m)) with ties to
/// the lowest message index; explicit tables map flattened output sequences
/// (base-|Y| digits, position 0 most significant) to messages.
///
/// Mathematically equal scores summed in different position orders differ by
/// ulps, so the tie rule uses a tolerance at the accumulated-roundoff scale.
struct Decoder {
  enum class Rule { ml_under_w, explicit_table };
  Rule rule = Rule::ml_under_w;
  Matrix log_likelihood;          // |X| x |Y|, -inf where W = 0
  std::vector<int> table;         // explicit_table only
  Index output_size = 0;
  double tie_tolerance = 0.0;
};

Decoder ml_decoder(const Codebook& cb, const Channel& w);
Decoder table_decoder(std::vector<int> table, Index output_size, long n);

int decode(const Codebook& cb, const Decoder& dec, std::span<const std::uint8_t> y);

struct CodeErrorReport {
  Vector per_message;  // e_m
  double average = 0.0;
  double maximal = 0.0;
  std::string method;  // "exact" or "monte_carlo"
  long trials = 0;
  detail::Interval average_ci;
  std::vector<detail::Interval> per_message_ci;
};

/// Exact per-message error under V by full enumeration of output sequences.
/// Guarded at |Y|^n <= 2e7; enumeration parallelizes over output-prefix
/// blocks merged in fixed order.
CodeErrorReport exact_error(const Codebook& cb, const Decoder& dec, const TestChannel& v);

Codebook random_codebook(const InputDistribution& p, long n, long M, std::uint64_t seed);

/// Every codeword is an independent uniform shuffle of the composition
/// multiset; n * type must be integral.
Codebook constant_composition_codebook(const InputDistribution& type, long n, long M,
                                       std::uint64_t seed);

/// Seeded Monte Carlo estimate with Clopper-Pearson 95% intervals;
/// per-message trial substreams keep results independent of the worker count.
CodeErrorReport monte_carlo_error(const Codebook& cb, const Decoder& dec, const Channel& w,
                                  long trials, std::uint64_t seed);

struct Lemma31Verdict {
  bool hypothesis_holds = false;
  bool pass = false;
  double rate = 0.0;
  double delta = 0.0;
  double mutual_info = 0.0;     // I(P_n; V)
  double e_bar = 0.0;           // exact average error under V
  double bound = 0.0;           // 1 - A/(n delta^2) - exp(-n delta)
  double chebyshev_lhs_max = 0.0;  // max_m V^n{G(m) | x^n(m)}
  double chebyshev_rhs = 0.0;      // Var[i]/(n delta^2)
};

/// Checks the strong-converse bound and its inner Chebyshev step exactly on a
/// constant-composition code. A failed rate hypothesis is reported, not fatal.
Lemma31Verdict verify_lemma31(const Codebook& cb, const Decoder& dec, const TestChannel& v,
                              double delta, const ConverseConstants& consts);

struct Eq34Verdict {
  bool pass = false;
  bool degenerate = false;  // correct-decoding probability under W is zero
  double lhs = 0.0;         // V^n(miss) log(1/W^n(correct))
  double rhs = 0.0;         // D(V^n||W^n|x) + h(V^n(correct))
  double margin = 0.0;
  double v_correct = 0.0;
  double w_correct = 0.0;
  double divergence = 0.0;
};

/// Checks the log-sum-inequality step for one message by exact enumeration;
/// the conditional divergence is assembled per letter along the codeword.
Eq34Verdict verify_eq34(const Codebook& cb, const Decoder& dec, int m, const TestChannel& v,
                        const Channel& w);

struct MdpExperimentRow {
  long n = 0;
  double eps_n = 0.0;
  double rate_target = 0.0;
  long M = 0;
  bool capped = false;
  double rate_effective = 0.0;
  double estimate = 0.0;
  detail::Interval ci;
  double upper_bound = 0.0;
};

/// Draws random codebooks at rate C - eps_n (message count capped), estimates
/// the average ML error by Monte Carlo and compares with the Gallager bound.
std::vector<MdpExperimentRow> mdp_experiment(const RateSchedule& schedule,
                                             std::span<const long> n_list, long m_cap,
                                             long trials, std::uint64_t seed,
                                             const Channel& w);

/// One theorem-verification instance: a positive channel W, an auxiliary
/// channel V biased toward low mutual information, a constant-composition
/// code and a delta compatible with the strong-converse hypothesis whenever
/// the rate allows one.
struct VerificationInstance {
  Channel W;
  TestChannel V;
  Codebook cb;
  double delta = 0.0;
  ConverseConstants consts;
};

/// Seeded tiny-code corpus (n <= 6, alphabets <= 3, M <= 4) for exact
/// verification of the converse lemmas.
std::vector<VerificationInstance> make_verification_corpus(int count, std::uint64_t seed);

}  // namespace mdcc
