#include "mdcc/code_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mdcc/capacity.hpp"
#include "mdcc/detail/parallel.hpp"
#include "mdcc/detail/rng.hpp"
#include "mdcc/errors.hpp"

namespace mdcc {

namespace {

constexpr double kEnumerationGuard = 2e7;

double pow_count(Index base, long exp) {
  return std::pow(static_cast<double>(base), static_cast<double>(exp));
}

void check_enumeration(const Codebook& cb, Index output_size) {
  if (pow_count(output_size, cb.n) > kEnumerationGuard) {
    throw EnumerationTooLarge("output space exceeds the 2e7 enumeration guard");
  }
}

InputDistribution common_type(const Codebook& cb, Index input_size) {
  if (cb.composition_tag) {
    const auto& counts = *cb.composition_tag;
    Vector type = Vector::Zero(input_size);
    for (Index x = 0; x < input_size; ++x) {
      type[x] = static_cast<double>(counts[static_cast<std::size_t>(x)]) /
                static_cast<double>(cb.n);
    }
    return make_input_distribution(type);
  }
  std::vector<int> word0(cb.word(0).begin(), cb.word(0).end());
  const Composition base = composition(word0, input_size);
  for (long m = 1; m < cb.M; ++m) {
    std::vector<int> word(cb.word(m).begin(), cb.word(m).end());
    if (composition(word, input_size).counts != base.counts) {
      throw DomainError("codebook is not constant composition");
    }
  }
  return base.type;
}

// Prefix-block split for parallel enumeration: the block count depends only
// on the requested hint, never on the live thread count.
struct BlockSplit {
  long prefix_len = 0;
  std::size_t blocks = 1;
};

BlockSplit block_split(long n, Index ny, std::size_t hint) {
  BlockSplit split;
  while (split.prefix_len < n && split.blocks < hint) {
    split.blocks *= static_cast<std::size_t>(ny);
    ++split.prefix_len;
  }
  return split;
}

std::size_t default_block_hint() {
  return 4 * static_cast<std::size_t>(std::max(1, detail::thread_limit()));
}

// Full enumeration of output sequences, visiting each leaf with the
// per-message probability products under `prob` and the decoded message.
// Parallelizes over fixed-length prefixes; visitors receive a block index so
// accumulations can be merged in block order afterwards.
template <typename Leaf>
void enumerate_outputs(const Codebook& cb, const Decoder& dec, const Matrix& prob,
                       const BlockSplit& split, const Leaf& leaf) {
  const Index ny = dec.output_size;
  const long n = cb.n;
  const long m_count = cb.M;
  const long prefix_len = split.prefix_len;

  detail::parallel_for(split.blocks, [&](std::size_t block) {
    // Per-level probability products (prob) and score sums (ML decoding).
    Matrix vp(n + 1, m_count);
    Matrix score(n + 1, m_count);
    vp.row(0).setOnes();
    score.row(0).setZero();
    std::vector<std::uint8_t> y(static_cast<std::size_t>(n), 0);

    // Fix the prefix digits for this block (position 0 most significant).
    std::size_t rem = block;
    for (long pos = prefix_len - 1; pos >= 0; --pos) {
      y[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(rem % ny);
      rem /= static_cast<std::size_t>(ny);
    }
    for (long pos = 0; pos < prefix_len; ++pos) {
      const Index yy = y[static_cast<std::size_t>(pos)];
      for (long m = 0; m < m_count; ++m) {
        const Index x = cb.word(m)[static_cast<std::size_t>(pos)];
        vp(pos + 1, m) = vp(pos, m) * prob(x, yy);
        score(pos + 1, m) = score(pos, m) + dec.log_likelihood(x, yy);
      }
    }

    // Depth-first odometer over the remaining positions.
    long pos = prefix_len;
    std::vector<Index> digit(static_cast<std::size_t>(n), 0);
    for (;;) {
      if (pos == n) {
        int decoded;
        if (dec.rule == Decoder::Rule::ml_under_w) {
          decoded = 0;
          double best = score(n, 0);
          for (long m = 1; m < m_count; ++m) {
            if (score(n, m) > best) {
              best = score(n, m);
              decoded = static_cast<int>(m);
            }
          }
        } else {
          std::size_t flat = 0;
          for (long i = 0; i < n; ++i) {
            flat = flat * static_cast<std::size_t>(ny) + y[static_cast<std::size_t>(i)];
          }
          decoded = dec.table[flat];
        }
        leaf(block, y, vp.row(n), decoded);
        // Step the odometer.
        long back = n - 1;
        while (back >= prefix_len && digit[static_cast<std::size_t>(back)] + 1 == ny) {
          digit[static_cast<std::size_t>(back)] = 0;
          --back;
        }
        if (back < prefix_len) break;
        ++digit[static_cast<std::size_t>(back)];
        y[static_cast<std::size_t>(back)] =
            static_cast<std::uint8_t>(digit[static_cast<std::size_t>(back)]);
        pos = back;
        continue;
      }
      const Index yy = digit[static_cast<std::size_t>(pos)];
      y[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(yy);
      for (long m = 0; m < m_count; ++m) {
        const Index x = cb.word(m)[static_cast<std::size_t>(pos)];
        vp(pos + 1, m) = vp(pos, m) * prob(x, yy);
        score(pos + 1, m) = score(pos, m) + dec.log_likelihood(x, yy);
      }
      ++pos;
    }
  });
}

}  // namespace

Decoder ml_decoder(const Codebook& cb, const Channel& w) {
  Decoder dec;
  dec.rule = Decoder::Rule::ml_under_w;
  dec.output_size = w.output_size();
  dec.log_likelihood.resize(w.input_size(), w.output_size());
  double max_abs = 0.0;
  for (Index x = 0; x < w.input_size(); ++x) {
    for (Index y = 0; y < w.output_size(); ++y) {
      const double wxy = w.probabilities(x, y);
      dec.log_likelihood(x, y) =
          wxy > 0.0 ? std::log(wxy) : -std::numeric_limits<double>::infinity();
      if (wxy > 0.0) max_abs = std::max(max_abs, std::abs(dec.log_likelihood(x, y)));
    }
  }
  dec.tie_tolerance = 16.0 * std::numeric_limits<double>::epsilon() *
                      static_cast<double>(cb.n) * std::max(1.0, max_abs);
  return dec;
}

// Lowest message index whose score reaches best - tie_tolerance.
template <typename Scores>
int tie_break(const Scores& scores, long count, double tie_tolerance) {
  double best = scores[0];
  for (long m = 1; m < count; ++m) best = std::max(best, scores[m]);
  for (long m = 0; m < count; ++m) {
    if (scores[m] >= best - tie_tolerance) return static_cast<int>(m);
  }
  return 0;
}

Decoder table_decoder(std::vector<int> table, Index output_size, long n) {
  Decoder dec;
  dec.rule = Decoder::Rule::explicit_table;
  dec.output_size = output_size;
  if (pow_count(output_size, n) != static_cast<double>(table.size())) {
    throw ShapeMismatch("decoder table does not cover the output space");
  }
  dec.table = std::move(table);
  return dec;
}

int decode(const Codebook& cb, const Decoder& dec, std::span<const std::uint8_t> y) {
  if (static_cast<long>(y.size()) != cb.n) throw ShapeMismatch("output length mismatch");
  if (dec.rule == Decoder::Rule::explicit_table) {
    std::size_t flat = 0;
    for (std::uint8_t d : y) flat = flat * static_cast<std::size_t>(dec.output_size) + d;
    return dec.table[flat];
  }
  int best_m = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (long m = 0; m < cb.M; ++m) {
    double s = 0.0;
    const auto word = cb.word(m);
    for (long i = 0; i < cb.n; ++i) {
      s += dec.log_likelihood(word[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(i)]);
    }
    if (s > best) {
      best = s;
      best_m = static_cast<int>(m);
    }
  }
  return best_m;
}

CodeErrorReport exact_error(const Codebook& cb, const Decoder& dec, const TestChannel& v) {
  if (v.output_size() != dec.output_size) throw ShapeMismatch("decoder/channel mismatch");
  check_enumeration(cb, v.output_size());

  // Per-block partial sums, merged in block order below.
  const BlockSplit split = block_split(cb.n, v.output_size(), default_block_hint());
  Matrix err_part = Matrix::Zero(static_cast<Index>(split.blocks), cb.M);
  Matrix mass_part = Matrix::Zero(static_cast<Index>(split.blocks), cb.M);

  enumerate_outputs(cb, dec, v.probabilities, split,
                    [&](std::size_t block, const std::vector<std::uint8_t>&,
                        const Eigen::RowVectorXd& vp, int decoded) {
                      for (long m = 0; m < cb.M; ++m) {
                        mass_part(static_cast<Index>(block), m) += vp[m];
                        if (m != decoded) err_part(static_cast<Index>(block), m) += vp[m];
                      }
                    });

  CodeErrorReport report;
  report.method = "exact";
  report.per_message = Vector::Zero(cb.M);
  Vector mass = Vector::Zero(cb.M);
  for (Index b = 0; b < static_cast<Index>(split.blocks); ++b) {
    report.per_message += err_part.row(b).transpose();
    mass += mass_part.row(b).transpose();
  }
  for (long m = 0; m < cb.M; ++m) {
    if (std::abs(mass[m] - 1.0) > 1e-9) {
      throw Error("enumeration mass check failed: conditional law does not sum to 1");
    }
  }
  report.average = report.per_message.mean();
  report.maximal = report.per_message.maxCoeff();
  return report;
}

Codebook random_codebook(const InputDistribution& p, long n, long M, std::uint64_t seed) {
  if (n < 1 || M < 1) throw DomainError("codebook needs n >= 1 and M >= 1");
  if (p.size() > 256) throw AlphabetTooLarge("symbols are stored as bytes");
  Codebook cb;
  cb.n = n;
  cb.M = M;
  cb.symbols.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(M));
  detail::parallel_for(static_cast<std::size_t>(M), [&](std::size_t m) {
    auto rng = detail::Rng::substream(seed, {0xC0DEu, m});
    for (long i = 0; i < n; ++i) {
      cb.symbols[m * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)] =
          static_cast<std::uint8_t>(detail::sample_index(rng, p.weights));
    }
  });
  return cb;
}

Codebook constant_composition_codebook(const InputDistribution& type, long n, long M,
                                       std::uint64_t seed) {
  if (n < 1 || M < 1) throw DomainError("codebook needs n >= 1 and M >= 1");
  if (type.size() > 256) throw AlphabetTooLarge("symbols are stored as bytes");
  std::vector<long> counts(static_cast<std::size_t>(type.size()));
  long total = 0;
  for (Index x = 0; x < type.size(); ++x) {
    const double exact = type.weights[x] * static_cast<double>(n);
    const long rounded = std::lround(exact);
    if (std::abs(exact - static_cast<double>(rounded)) > 1e-9) {
      throw NonIntegralComposition("n * type(x) must be integral");
    }
    counts[static_cast<std::size_t>(x)] = rounded;
    total += rounded;
  }
  if (total != n) throw NonIntegralComposition("composition counts do not sum to n");

  std::vector<std::uint8_t> base;
  base.reserve(static_cast<std::size_t>(n));
  for (Index x = 0; x < type.size(); ++x) {
    base.insert(base.end(), static_cast<std::size_t>(counts[static_cast<std::size_t>(x)]),
                static_cast<std::uint8_t>(x));
  }

  Codebook cb;
  cb.n = n;
  cb.M = M;
  cb.composition_tag = counts;
  cb.symbols.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(M));
  detail::parallel_for(static_cast<std::size_t>(M), [&](std::size_t m) {
    auto rng = detail::Rng::substream(seed, {0xCC00u, m});
    std::vector<std::uint8_t> word = base;
    for (std::size_t i = word.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.below(i));
      std::swap(word[i - 1], word[j]);
    }
    std::copy(word.begin(), word.end(), cb.symbols.begin() + m * static_cast<std::size_t>(n));
  });
  return cb;
}

CodeErrorReport monte_carlo_error(const Codebook& cb, const Decoder& dec, const Channel& w,
                                  long trials, std::uint64_t seed) {
  if (trials < 100) throw DomainError("monte_carlo_error needs at least 100 trials");
  if (w.output_size() != dec.output_size) throw ShapeMismatch("decoder/channel mismatch");

  std::vector<long> errors(static_cast<std::size_t>(cb.M), 0);
  constexpr long kBlock = 1024;
  const long blocks_per_m = (trials + kBlock - 1) / kBlock;
  const std::size_t total_blocks =
      static_cast<std::size_t>(cb.M) * static_cast<std::size_t>(blocks_per_m);
  std::vector<long> block_errors(total_blocks, 0);

  detail::parallel_for(total_blocks, [&](std::size_t idx) {
    const long m = static_cast<long>(idx) / blocks_per_m;
    const long block = static_cast<long>(idx) % blocks_per_m;
    const long lo = block * kBlock;
    const long hi = std::min(trials, lo + kBlock);
    const auto word = cb.word(m);
    std::vector<std::uint8_t> y(static_cast<std::size_t>(cb.n));
    long count = 0;
    for (long t = lo; t < hi; ++t) {
      auto rng = detail::Rng::substream(seed, {0x3C0u, static_cast<std::uint64_t>(m),
                                               static_cast<std::uint64_t>(t)});
      for (long i = 0; i < cb.n; ++i) {
        const Index x = word[static_cast<std::size_t>(i)];
        const double u = rng.uniform();
        double acc = 0.0;
        Index picked = w.output_size() - 1;
        for (Index yy = 0; yy < w.output_size(); ++yy) {
          acc += w.probabilities(x, yy);
          if (u < acc) {
            picked = yy;
            break;
          }
        }
        y[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(picked);
      }
      if (decode(cb, dec, y) != static_cast<int>(m)) ++count;
    }
    block_errors[idx] = count;
  });
  for (std::size_t idx = 0; idx < total_blocks; ++idx) {
    errors[static_cast<std::size_t>(static_cast<long>(idx) / blocks_per_m)] +=
        block_errors[idx];
  }

  CodeErrorReport report;
  report.method = "monte_carlo";
  report.trials = trials;
  report.per_message = Vector::Zero(cb.M);
  report.per_message_ci.resize(static_cast<std::size_t>(cb.M));
  long total_errors = 0;
  for (long m = 0; m < cb.M; ++m) {
    report.per_message[m] =
        static_cast<double>(errors[static_cast<std::size_t>(m)]) / static_cast<double>(trials);
    report.per_message_ci[static_cast<std::size_t>(m)] =
        detail::clopper_pearson(errors[static_cast<std::size_t>(m)], trials);
    total_errors += errors[static_cast<std::size_t>(m)];
  }
  report.average = report.per_message.mean();
  report.maximal = report.per_message.maxCoeff();
  report.average_ci = detail::clopper_pearson(total_errors, trials * cb.M);
  return report;
}

Lemma31Verdict verify_lemma31(const Codebook& cb, const Decoder& dec, const TestChannel& v,
                              double delta, const ConverseConstants& consts) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  check_enumeration(cb, v.output_size());
  const InputDistribution type = common_type(cb, v.input_size());
  const double nd = static_cast<double>(cb.n);

  Lemma31Verdict verdict;
  verdict.delta = delta;
  verdict.rate = std::log(static_cast<double>(cb.M)) / nd;
  verdict.mutual_info = mutual_information(type, v);
  verdict.hypothesis_holds = verdict.mutual_info <= verdict.rate - 2.0 * delta;

  const CodeErrorReport exact = exact_error(cb, dec, v);
  verdict.e_bar = exact.average;
  verdict.bound = 1.0 - consts.A / (nd * delta * delta) - std::exp(-nd * delta);

  // Chebyshev step: V^n{ sum_k i(x_k, Y_k) > n (I + delta) | x^n(m) } must be
  // dominated by Var[i]/(n delta^2) for every message.
  const Vector q = output_distribution(type, v);
  const double threshold = nd * (verdict.mutual_info + delta);
  verdict.chebyshev_rhs = info_density_variance(type, v) / (nd * delta * delta);

  Matrix log_ratio(v.input_size(), v.output_size());
  for (Index x = 0; x < v.input_size(); ++x) {
    for (Index y = 0; y < v.output_size(); ++y) {
      const double vxy = v.probabilities(x, y);
      log_ratio(x, y) = (vxy > 0.0 && q[y] > 0.0)
                            ? std::log(vxy / q[y])
                            : -std::numeric_limits<double>::infinity();
    }
  }

  verdict.chebyshev_lhs_max = 0.0;
  for (long m = 0; m < cb.M; ++m) {
    const auto word = cb.word(m);
    double mass = 0.0;
    // Odometer over output sequences; zero-probability branches are skipped
    // because their contribution is zero.
    std::vector<Index> digit(static_cast<std::size_t>(cb.n), 0);
    std::vector<double> prob(static_cast<std::size_t>(cb.n) + 1, 1.0);
    std::vector<double> dens(static_cast<std::size_t>(cb.n) + 1, 0.0);
    long pos = 0;
    for (;;) {
      if (pos == cb.n) {
        if (prob[static_cast<std::size_t>(cb.n)] > 0.0 &&
            dens[static_cast<std::size_t>(cb.n)] > threshold) {
          mass += prob[static_cast<std::size_t>(cb.n)];
        }
        long back = cb.n - 1;
        while (back >= 0 && digit[static_cast<std::size_t>(back)] + 1 == v.output_size()) {
          digit[static_cast<std::size_t>(back)] = 0;
          --back;
        }
        if (back < 0) break;
        ++digit[static_cast<std::size_t>(back)];
        pos = back;
        continue;
      }
      const Index x = word[static_cast<std::size_t>(pos)];
      const Index yy = digit[static_cast<std::size_t>(pos)];
      prob[static_cast<std::size_t>(pos) + 1] =
          prob[static_cast<std::size_t>(pos)] * v.probabilities(x, yy);
      dens[static_cast<std::size_t>(pos) + 1] =
          dens[static_cast<std::size_t>(pos)] + log_ratio(x, yy);
      ++pos;
    }
    verdict.chebyshev_lhs_max = std::max(verdict.chebyshev_lhs_max, mass);
  }

  // The Chebyshev step is a theorem about V alone; the error bound is only
  // claimed under the rate hypothesis.
  const bool bound_ok = verdict.e_bar >= verdict.bound - 1e-12;
  const bool chebyshev_ok = verdict.chebyshev_lhs_max <= verdict.chebyshev_rhs + 1e-12;
  verdict.pass = chebyshev_ok && (!verdict.hypothesis_holds || bound_ok);
  return verdict;
}

Eq34Verdict verify_eq34(const Codebook& cb, const Decoder& dec, int m, const TestChannel& v,
                        const Channel& w) {
  if (m < 0 || m >= cb.M) throw DomainError("message index out of range");
  if (v.input_size() != w.input_size() || v.output_size() != w.output_size()) {
    throw ShapeMismatch("V and W have different shapes");
  }
  check_enumeration(cb, w.output_size());

  const BlockSplit split = block_split(cb.n, w.output_size(), default_block_hint());
  const long prefix_len = split.prefix_len;
  const std::size_t blocks = split.blocks;
  // Correct-region masses under V and under W, per block.
  std::vector<double> v_in(blocks, 0.0);
  std::vector<double> w_in(blocks, 0.0);

  // Enumerate under a stacked two-channel product: reuse the enumerator with
  // V as the probability channel and accumulate W along the way separately.
  const auto word = cb.word(m);
  detail::parallel_for(blocks, [&](std::size_t block) {
    std::vector<Index> digit(static_cast<std::size_t>(cb.n), 0);
    std::vector<std::uint8_t> y(static_cast<std::size_t>(cb.n), 0);
    std::size_t rem = block;
    for (long pos = prefix_len - 1; pos >= 0; --pos) {
      digit[static_cast<std::size_t>(pos)] = static_cast<Index>(rem % w.output_size());
      rem /= static_cast<std::size_t>(w.output_size());
    }
    std::vector<double> vp(static_cast<std::size_t>(cb.n) + 1, 1.0);
    std::vector<double> wp(static_cast<std::size_t>(cb.n) + 1, 1.0);
    long pos = 0;
    for (;;) {
      if (pos == cb.n) {
        for (long i = 0; i < cb.n; ++i) {
          y[static_cast<std::size_t>(i)] =
              static_cast<std::uint8_t>(digit[static_cast<std::size_t>(i)]);
        }
        if (decode(cb, dec, y) == m) {
          v_in[block] += vp[static_cast<std::size_t>(cb.n)];
          w_in[block] += wp[static_cast<std::size_t>(cb.n)];
        }
        long back = cb.n - 1;
        while (back >= prefix_len &&
               digit[static_cast<std::size_t>(back)] + 1 == w.output_size()) {
          digit[static_cast<std::size_t>(back)] = 0;
          --back;
        }
        if (back < prefix_len) break;
        ++digit[static_cast<std::size_t>(back)];
        pos = back;
        continue;
      }
      const Index x = word[static_cast<std::size_t>(pos)];
      const Index yy = digit[static_cast<std::size_t>(pos)];
      vp[static_cast<std::size_t>(pos) + 1] =
          vp[static_cast<std::size_t>(pos)] * v.probabilities(x, yy);
      wp[static_cast<std::size_t>(pos) + 1] =
          wp[static_cast<std::size_t>(pos)] * w.probabilities(x, yy);
      ++pos;
    }
  });

  Eq34Verdict verdict;
  verdict.v_correct = 0.0;
  verdict.w_correct = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    verdict.v_correct += v_in[b];
    verdict.w_correct += w_in[b];
  }

  if (verdict.w_correct <= 0.0) {
    verdict.degenerate = true;  // log(1/W^n(correct)) blows up
    return verdict;
  }

  // D(V^n || W^n | x^n(m)) is additive over the codeword letters.
  double divergence = 0.0;
  for (long i = 0; i < cb.n; ++i) {
    const Index x = word[static_cast<std::size_t>(i)];
    for (Index yy = 0; yy < w.output_size(); ++yy) {
      const double vxy = v.probabilities(x, yy);
      if (vxy == 0.0) continue;
      const double wxy = w.probabilities(x, yy);
      if (wxy == 0.0) {
        divergence = std::numeric_limits<double>::infinity();
        break;
      }
      divergence += vxy * std::log(vxy / wxy);
    }
    if (!std::isfinite(divergence)) break;
  }

  verdict.divergence = divergence;
  verdict.lhs = (1.0 - verdict.v_correct) * std::log(1.0 / verdict.w_correct);
  verdict.rhs = divergence + binary_entropy(std::clamp(verdict.v_correct, 0.0, 1.0));
  verdict.margin = verdict.rhs - verdict.lhs;
  verdict.pass = verdict.lhs <= verdict.rhs + 1e-12;
  return verdict;
}

std::vector<VerificationInstance> make_verification_corpus(int count, std::uint64_t seed) {
  if (count < 1) throw DomainError("corpus needs at least one instance");

  // A depends only on the alphabet sizes; cache it per shape.
  double a_cache[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  const auto cached_a = [&](Index kx, Index ky) -> double {
    double& slot = a_cache[kx - 2][ky - 2];
    if (slot == 0.0) {
      Matrix id = Matrix::Constant(kx, ky, 1e-3);
      for (Index x = 0; x < kx; ++x) id(x, x % ky) = 1.0;
      for (Index x = 0; x < kx; ++x) id.row(x) /= id.row(x).sum();
      slot = constant_A(ingest_channel(id), 32,
                        seed ^ (static_cast<std::uint64_t>(kx) << 8 |
                                static_cast<std::uint64_t>(ky)));
    }
    return slot;
  };

  std::vector<VerificationInstance> corpus;
  corpus.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    auto rng = detail::Rng::substream(seed, {0xC0B0u, static_cast<std::uint64_t>(i)});
    const Index kx = 2 + static_cast<Index>(rng.below(2));
    const Index ky = 2 + static_cast<Index>(rng.below(2));
    const long n = 4 + static_cast<long>(rng.below(3));
    const long M = 2 + static_cast<long>(rng.below(3));

    // Positive W keeps every conditional divergence finite and the
    // correct-decoding probabilities nonzero.
    Matrix wmat(kx, ky);
    for (Index x = 0; x < kx; ++x) {
      Vector row = detail::dirichlet(rng, ky);
      row = (row + Vector::Constant(ky, 0.05)) / (1.0 + 0.05 * static_cast<double>(ky));
      wmat.row(x) = row.transpose();
    }

    // V leans toward a common output law so the rate hypothesis of the
    // strong converse has room to hold.
    const double beta = 0.4 * rng.uniform();
    Vector common = detail::dirichlet(rng, ky);
    common = (common + Vector::Constant(ky, 0.05)) / (1.0 + 0.05 * static_cast<double>(ky));
    Matrix vmat(kx, ky);
    for (Index x = 0; x < kx; ++x) {
      Vector row = detail::dirichlet(rng, ky);
      vmat.row(x) = (beta * row + (1.0 - beta) * common).transpose();
      vmat.row(x) /= vmat.row(x).sum();
    }

    // Random composition with every count drawn as balls into bins.
    std::vector<long> counts(static_cast<std::size_t>(kx), 0);
    for (long b = 0; b < n; ++b) ++counts[static_cast<std::size_t>(rng.below(
        static_cast<std::uint64_t>(kx)))];
    Vector type(kx);
    for (Index x = 0; x < kx; ++x) {
      type[x] = static_cast<double>(counts[static_cast<std::size_t>(x)]) /
                static_cast<double>(n);
    }

    VerificationInstance inst;
    inst.W = ingest_channel(wmat);
    inst.V = make_test_channel(vmat);
    inst.cb = constant_composition_codebook(make_input_distribution(type), n, M,
                                            rng.next_u64());
    const double rate = std::log(static_cast<double>(M)) / static_cast<double>(n);
    const double info = mutual_information(inst.cb.composition_tag
                                               ? common_type(inst.cb, kx)
                                               : make_input_distribution(type),
                                           inst.V);
    if (rate > info) {
      inst.delta = (0.3 + 0.6 * rng.uniform()) * 0.5 * (rate - info);
    } else {
      inst.delta = 0.05;  // hypothesis fails; the Chebyshev step is still exact
    }
    inst.delta = std::max(inst.delta, 1e-4);
    inst.consts = make_converse_constants(cached_a(kx, ky), 0.1);
    corpus.push_back(std::move(inst));
  }
  return corpus;
}

std::vector<MdpExperimentRow> mdp_experiment(const RateSchedule& schedule,
                                             std::span<const long> n_list, long m_cap,
                                             long trials, std::uint64_t seed,
                                             const Channel& w) {
  if (m_cap < 2) throw DomainError("message cap must allow at least 2 messages");
  const CapacityResult cap = capacity(w);
  const DispersionResult disp = channel_dispersion(w, cap);

  std::vector<MdpExperimentRow> rows;
  for (long n : n_list) {
    MdpExperimentRow row;
    row.n = n;
    row.eps_n = schedule.eps(n);
    row.rate_target = cap.C - row.eps_n;
    if (!(row.rate_target > 0.0)) continue;  // below the applicability frontier

    const double log_m = static_cast<double>(n) * row.rate_target;
    if (log_m >= std::log(static_cast<double>(m_cap))) {
      row.M = m_cap;
      row.capped = true;
    } else {
      row.M = std::max<long>(2, static_cast<long>(std::ceil(std::exp(log_m))));
      row.capped = false;
    }
    row.rate_effective = std::log(static_cast<double>(row.M)) / static_cast<double>(n);

    const Codebook cb =
        random_codebook(disp.minimizer, n, row.M,
                        detail::Rng::substream(seed, {0xE0u, static_cast<std::uint64_t>(n)})
                            .next_u64());
    const Decoder dec = ml_decoder(cb, w);

    // Average error with the message drawn uniformly per trial.
    constexpr long kBlock = 64;
    const long blocks = (trials + kBlock - 1) / kBlock;
    std::vector<long> block_errors(static_cast<std::size_t>(blocks), 0);
    detail::parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t block) {
      const long lo = static_cast<long>(block) * kBlock;
      const long hi = std::min(trials, lo + kBlock);
      std::vector<std::uint8_t> y(static_cast<std::size_t>(n));
      long count = 0;
      for (long t = lo; t < hi; ++t) {
        auto rng = detail::Rng::substream(
            seed, {0xE1u, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t)});
        const long m = static_cast<long>(rng.below(static_cast<std::uint64_t>(row.M)));
        const auto word = cb.word(m);
        for (long i = 0; i < n; ++i) {
          const Index x = word[static_cast<std::size_t>(i)];
          const double u = rng.uniform();
          double acc = 0.0;
          Index picked = w.output_size() - 1;
          for (Index yy = 0; yy < w.output_size(); ++yy) {
            acc += w.probabilities(x, yy);
            if (u < acc) {
              picked = yy;
              break;
            }
          }
          y[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(picked);
        }
        if (decode(cb, dec, y) != static_cast<int>(m)) ++count;
      }
      block_errors[block] = count;
    });
    long total = 0;
    for (long c : block_errors) total += c;
    row.estimate = static_cast<double>(total) / static_cast<double>(trials);
    row.ci = detail::clopper_pearson(total, trials);
    row.upper_bound = gallager_upper(n, row.rate_effective, w);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mdcc
