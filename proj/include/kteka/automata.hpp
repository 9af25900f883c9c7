#pragma once

#include <cstddef>
#include <vector>

#include "kteka/core.hpp"
#include "kteka/elastic.hpp"

namespace kteka {

// Stochastic alignment automaton for a pair (x, y).
//
// States are the sample pairs (t, t'). Transitions follow the DTW stencil
// with probability 1/3 each, the single initial state is (0, 0) and every
// state emits b(x_t, y_t') = gamma * exp(-nu |x_t - y_t'|^2). The transition
// tensor is never materialized; predecessors and successors are implicit.
//
// Matrices are stored row-scaled: the true value of cell (t, t') is
// `values(t, t') * exp(row_log_scale[t])`. The recursions run in linear
// arithmetic with exact power-of-two row rescaling and fall back to a
// log-domain evaluation when a row would underflow or overflow.

struct AutomatonOptions {
  /// Emission normalizer gamma; 1 inside every kernel computation.
  double emission_scale = 1.0;
};

struct ScaledMatrix {
  Matrix values;
  std::vector<double> row_log_scale;

  std::size_t rows() const noexcept { return values.rows(); }
  std::size_t cols() const noexcept { return values.cols(); }
  /// True (unscaled) value; may underflow to 0 or overflow to inf.
  double value(std::size_t t, std::size_t u) const;
  /// Natural log of the true value (-inf for an exact zero).
  double log_value(std::size_t t, std::size_t u) const;
};

struct AlignmentMatrices {
  ScaledMatrix forward;    ///< alpha
  ScaledMatrix backward;   ///< beta
  ScaledMatrix posterior;  ///< alpha * beta, unnormalized
  bool log_domain = false; ///< true when the log-domain fallback was used

  /// log alpha at the terminal state, log P(x, y | theta).
  double log_likelihood() const {
    return forward.log_value(forward.rows() - 1, forward.cols() - 1);
  }
};

/// Forward pass; alpha(n-1, n'-1) equals the KDTW K term.
ScaledMatrix forward(const TimeSeries& x, const TimeSeries& y, const KdtwParams& p,
                     const AutomatonOptions& opts = {});

/// Backward pass with beta(n-1, n'-1) = 1 and
/// beta(t, t') = sum over successors of beta * (1/3) * b(x_t, y_t').
ScaledMatrix backward(const TimeSeries& x, const TimeSeries& y, const KdtwParams& p,
                      const AutomatonOptions& opts = {});

/// Forward, backward and their cell-wise product. The likelihood
/// denominator is not applied; it cancels in row_conditionals().
AlignmentMatrices posterior(const TimeSeries& x, const TimeSeries& y, const KdtwParams& p,
                            const AutomatonOptions& opts = {});

/// P(t, t') = posterior(t, t') / sum_t' posterior(t, t'). Each row sums to
/// one. Throws DegenerateError naming the row when a row has no mass.
Matrix row_conditionals(const ScaledMatrix& posterior);
Matrix row_conditionals(const AlignmentMatrices& m);

}  // namespace kteka
