#pragma once

#include <Eigen/Dense>

#include <vector>

namespace mdcc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Discrete memoryless channel. One row per input symbol, rows sum to one,
/// no all-zero output column (such columns are stripped at ingestion and
/// recorded in column_map).
struct Channel {
  Matrix probabilities;                          // |X| x |Y|
  std::vector<std::vector<Index>> support_by_output;  // X_y = {x : W(y|x) > 0}
  std::vector<Index> column_map;                 // kept column -> original column

  Index input_size() const { return probabilities.rows(); }
  Index output_size() const { return probabilities.cols(); }
};

/// Auxiliary channel used on the converse side. Same shape discipline as
/// Channel except all-zero output columns are permitted.
struct TestChannel {
  Matrix probabilities;  // |X| x |Y|

  Index input_size() const { return probabilities.rows(); }
  Index output_size() const { return probabilities.cols(); }
};

/// Point on the input simplex together with its support.
struct InputDistribution {
  Vector weights;
  std::vector<Index> support;  // {x : P(x) > 0}

  Index size() const { return weights.size(); }
};

/// Validates a raw matrix (entries >= 0, row sums within 1e-6 of one),
/// renormalizes rows exactly, strips all-zero output columns and computes
/// the per-output support sets.
Channel ingest_channel(const Matrix& raw);

/// Same validation as ingest_channel but keeps all-zero columns.
TestChannel make_test_channel(const Matrix& raw);

/// View a channel as a test channel (copies the matrix).
TestChannel as_test_channel(const Channel& w);

/// Validates a weight vector (sum within 1e-12 of one, entries >= 0) and
/// computes its support.
InputDistribution make_input_distribution(const Vector& weights);

/// Rescales an arbitrary nonnegative, nonzero vector onto the simplex.
InputDistribution normalized_input(const Vector& weights);

InputDistribution uniform_input(Index k);

}  // namespace mdcc
