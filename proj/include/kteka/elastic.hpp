#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "kteka/core.hpp"

namespace kteka {

/// Monotone alignment path between two series, as 0-based (i, j) pairs from
/// (0, 0) to (n-1, m-1); consecutive steps move by (1,0), (0,1) or (1,1).
struct WarpPath {
  std::vector<std::pair<std::size_t, std::size_t>> steps;

  std::size_t size() const noexcept { return steps.size(); }
  bool valid_for(std::size_t n, std::size_t m) const;
};

/// Stiffness of the local kernel exp(-nu * |x - y|^2).
struct KdtwParams {
  double nu = 1.0;

  explicit KdtwParams(double stiffness);
};

struct DtwResult {
  double cost;
  WarpPath path;
};

/// DTW with squared-Euclidean local cost and one optimal path. On equal
/// predecessor costs backtracking prefers the diagonal, then (i-1, j), then
/// (i, j-1).
DtwResult dtw(const TimeSeries& x, const TimeSeries& y);

/// Same cost as dtw() using two rolling rows and no path.
double dtw_cost(const TimeSeries& x, const TimeSeries& y);

/// Sample-wise mean along the optimal DTW path; length equals the path length.
TimeSeries pairwise_dtw_average(const TimeSeries& x, const TimeSeries& y);

struct KdtwResult {
  double total;
  double k_term;
  double kp_term;
};

/// Natural logarithms of the three KdtwResult quantities.
struct KdtwLog {
  double total;
  double k_term;
  double kp_term;
};

/// Regularized DTW kernel, all-paths sum in linear arithmetic.
///
/// The K term sums (1/3)^{#cells} * prod exp(-nu d^2) over every warping
/// path; the K' term follows the Kronecker-diagonal recursion, where the
/// diagonal local kernel at index k pairs x_k with y_k (the shorter series
/// is held at its last sample past its end). Throws NumericError when the
/// total underflows to zero; lower nu or use kdtw_log().
KdtwResult kdtw(const TimeSeries& x, const TimeSeries& y, const KdtwParams& p);

/// kdtw() without the underflow check.
KdtwResult kdtw_unchecked(const TimeSeries& x, const TimeSeries& y, const KdtwParams& p);

/// Logarithm of kdtw(), computed with per-row power-of-two rescaling and a
/// log-domain fallback, so it stays finite when the linear value underflows.
KdtwLog kdtw_log(const TimeSeries& x, const TimeSeries& y, const KdtwParams& p);

/// Symmetric Gram matrix of kdtw totals, computed for i <= j and mirrored.
/// Off-diagonal entries that underflow are stored as 0; an underflowing
/// diagonal entry throws NumericError naming the series index.
Matrix gram(const std::vector<TimeSeries>& series, const KdtwParams& p, unsigned jobs = 1);

}  // namespace kteka
