#include "mdcc/channel.hpp"

#include <cmath>
#include <sstream>

#include "mdcc/errors.hpp"

namespace mdcc {

namespace {

constexpr double kRowSumTolerance = 1e-6;

// Rows whose sums already agree with 1 to a few ulps are left untouched so
// that ingesting an already-normalized matrix is the identity map.
void normalize_rows(Matrix& m) {
  for (Index x = 0; x < m.rows(); ++x) {
    const double sum = m.row(x).sum();
    if (std::abs(sum - 1.0) > 1e-14) m.row(x) /= sum;
  }
}

void check_raw(const Matrix& raw) {
  if (raw.rows() == 0 || raw.cols() == 0) throw EmptyMatrix("empty channel matrix");
  for (Index x = 0; x < raw.rows(); ++x) {
    for (Index y = 0; y < raw.cols(); ++y) {
      if (!(raw(x, y) >= 0.0)) {
        std::ostringstream msg;
        msg << "negative or non-finite entry at (" << x << "," << y << ")";
        throw NonStochasticRow(msg.str());
      }
    }
    const double sum = raw.row(x).sum();
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      std::ostringstream msg;
      msg << "row " << x << " sums to " << sum << ", outside 1e-6 of 1";
      throw NonStochasticRow(msg.str());
    }
  }
}

}  // namespace

Channel ingest_channel(const Matrix& raw) {
  check_raw(raw);

  std::vector<Index> kept;
  for (Index y = 0; y < raw.cols(); ++y) {
    if (raw.col(y).maxCoeff() > 0.0) kept.push_back(y);
  }

  Channel ch;
  ch.column_map = kept;
  ch.probabilities.resize(raw.rows(), static_cast<Index>(kept.size()));
  for (Index j = 0; j < static_cast<Index>(kept.size()); ++j) {
    ch.probabilities.col(j) = raw.col(kept[static_cast<std::size_t>(j)]);
  }
  normalize_rows(ch.probabilities);

  ch.support_by_output.resize(static_cast<std::size_t>(ch.output_size()));
  for (Index y = 0; y < ch.output_size(); ++y) {
    auto& sup = ch.support_by_output[static_cast<std::size_t>(y)];
    for (Index x = 0; x < ch.input_size(); ++x) {
      if (ch.probabilities(x, y) > 0.0) sup.push_back(x);
    }
  }
  return ch;
}

TestChannel make_test_channel(const Matrix& raw) {
  check_raw(raw);
  TestChannel v{raw};
  normalize_rows(v.probabilities);
  return v;
}

TestChannel as_test_channel(const Channel& w) { return TestChannel{w.probabilities}; }

InputDistribution make_input_distribution(const Vector& weights) {
  if (weights.size() == 0) throw EmptyMatrix("empty input distribution");
  for (Index x = 0; x < weights.size(); ++x) {
    if (!(weights[x] >= 0.0)) throw DomainError("negative weight in input distribution");
  }
  const double sum = weights.sum();
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "input distribution sums to " << sum << ", outside 1e-12 of 1";
    throw DomainError(msg.str());
  }
  InputDistribution p;
  p.weights = weights;
  if (std::abs(sum - 1.0) > 1e-15) p.weights /= sum;
  for (Index x = 0; x < p.weights.size(); ++x) {
    if (p.weights[x] > 0.0) p.support.push_back(x);
  }
  return p;
}

InputDistribution normalized_input(const Vector& weights) {
  if (weights.size() == 0) throw EmptyMatrix("empty input distribution");
  for (Index x = 0; x < weights.size(); ++x) {
    if (!(weights[x] >= 0.0)) throw DomainError("negative weight in input distribution");
  }
  const double sum = weights.sum();
  if (!(sum > 0.0)) throw DomainError("input distribution has zero mass");
  return make_input_distribution(weights / sum);
}

InputDistribution uniform_input(Index k) {
  if (k <= 0) throw DomainError("alphabet size must be positive");
  return make_input_distribution(Vector::Constant(k, 1.0 / static_cast<double>(k)));
}

}  // namespace mdcc
