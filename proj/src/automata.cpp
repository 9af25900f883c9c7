#include "kteka/automata.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "kteka/error.hpp"
#include "logmath.hpp"

namespace kteka {

namespace {

constexpr double kTransition = 1.0 / 3.0;

Matrix squared_distances(const TimeSeries& x, const TimeSeries& y) {
  if (x.dim() != y.dim())
    throw InputError("alignment: dimension mismatch (" + std::to_string(x.dim()) + " vs " +
                     std::to_string(y.dim()) + ")");
  Matrix sq(x.length(), y.length());
  for (std::size_t t = 0; t < x.length(); ++t)
    for (std::size_t u = 0; u < y.length(); ++u) sq(t, u) = l2_sq(x.sample(t), y.sample(u));
  return sq;
}

double check_gamma(const AutomatonOptions& opts) {
  if (!(opts.emission_scale > 0.0) || !std::isfinite(opts.emission_scale))
    throw InputError("emission scale must be finite and positive");
  return opts.emission_scale;
}

Matrix emissions(const Matrix& sq, double nu, double gamma) {
  Matrix b(sq.rows(), sq.cols());
  auto src = sq.data();
  auto dst = b.data();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = gamma * std::exp(-nu * src[k]);
  return b;
}

// alpha(t,u) = b(t,u) * sum_{pred} alpha(pred) * a(pred -> (t,u)); the initial
// state (0,0) is entered from the start distribution with the same 1/3
// weight, which makes alpha coincide with the K-term recursion.
std::optional<ScaledMatrix> forward_scaled(const Matrix& b) {
  const std::size_t n = b.rows(), m = b.cols();
  ScaledMatrix out{Matrix(n, m), std::vector<double>(n)};
  Matrix& a = out.values;
  long exponent = 0;
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t u = 0; u < m; ++u) {
      double inflow;
      if (t == 0 && u == 0) {
        inflow = kTransition;
      } else {
        const double up = t > 0 ? a(t - 1, u) : 0.0;
        const double left = u > 0 ? a(t, u - 1) : 0.0;
        const double diag = t > 0 && u > 0 ? a(t - 1, u - 1) : 0.0;
        inflow = ((up + left) + diag) * kTransition;
      }
      a(t, u) = b(t, u) * inflow;
    }
    if (!renormalize_row(a.row(t), exponent)) return std::nullopt;
    out.row_log_scale[t] = static_cast<double>(exponent) * kLn2;
  }
  return out;
}

std::optional<ScaledMatrix> backward_scaled(const Matrix& b) {
  const std::size_t n = b.rows(), m = b.cols();
  ScaledMatrix out{Matrix(n, m), std::vector<double>(n)};
  Matrix& be = out.values;
  long exponent = 0;
  for (std::size_t t = n; t-- > 0;) {
    for (std::size_t u = m; u-- > 0;) {
      if (t == n - 1 && u == m - 1) {
        be(t, u) = 1.0;
        continue;
      }
      const double down = t + 1 < n ? be(t + 1, u) : 0.0;
      const double right = u + 1 < m ? be(t, u + 1) : 0.0;
      const double diag = t + 1 < n && u + 1 < m ? be(t + 1, u + 1) : 0.0;
      be(t, u) = ((down + right) + diag) * kTransition * b(t, u);
    }
    if (!renormalize_row(be.row(t), exponent)) return std::nullopt;
    out.row_log_scale[t] = static_cast<double>(exponent) * kLn2;
  }
  return out;
}

std::optional<ScaledMatrix> product_scaled(const ScaledMatrix& fw, const ScaledMatrix& bw) {
  const std::size_t n = fw.rows(), m = fw.cols();
  ScaledMatrix out{Matrix(n, m), std::vector<double>(n)};
  for (std::size_t t = 0; t < n; ++t) {
    auto row = out.values.row(t);
    for (std::size_t u = 0; u < m; ++u) row[u] = fw.values(t, u) * bw.values(t, u);
    long exponent = 0;
    if (!renormalize_row(row, exponent)) return std::nullopt;
    out.row_log_scale[t] = fw.row_log_scale[t] + bw.row_log_scale[t] + static_cast<double>(exponent) * kLn2;
  }
  return out;
}

Matrix log_emissions(const Matrix& sq, double nu, double gamma) {
  Matrix lb(sq.rows(), sq.cols());
  const double lg = std::log(gamma);
  auto src = sq.data();
  auto dst = lb.data();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = lg - nu * src[k];
  return lb;
}

Matrix forward_log(const Matrix& lb) {
  const std::size_t n = lb.rows(), m = lb.cols();
  Matrix la(n, m, kNegInf);
  const double la_t = -kLog3;
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t u = 0; u < m; ++u) {
      double inflow;
      if (t == 0 && u == 0) {
        inflow = la_t;
      } else {
        const double up = t > 0 ? la(t - 1, u) : kNegInf;
        const double left = u > 0 ? la(t, u - 1) : kNegInf;
        const double diag = t > 0 && u > 0 ? la(t - 1, u - 1) : kNegInf;
        inflow = log_add(log_add(up, left), diag) + la_t;
      }
      la(t, u) = lb(t, u) + inflow;
    }
  return la;
}

Matrix backward_log(const Matrix& lb) {
  const std::size_t n = lb.rows(), m = lb.cols();
  Matrix lbe(n, m, kNegInf);
  for (std::size_t t = n; t-- > 0;)
    for (std::size_t u = m; u-- > 0;) {
      if (t == n - 1 && u == m - 1) {
        lbe(t, u) = 0.0;
        continue;
      }
      const double down = t + 1 < n ? lbe(t + 1, u) : kNegInf;
      const double right = u + 1 < m ? lbe(t, u + 1) : kNegInf;
      const double diag = t + 1 < n && u + 1 < m ? lbe(t + 1, u + 1) : kNegInf;
      lbe(t, u) = log_add(log_add(down, right), diag) - kLog3 + lb(t, u);
    }
  return lbe;
}

ScaledMatrix from_log(const Matrix& logs) {
  const std::size_t n = logs.rows(), m = logs.cols();
  ScaledMatrix out{Matrix(n, m), std::vector<double>(n, 0.0)};
  for (std::size_t t = 0; t < n; ++t) {
    auto src = logs.row(t);
    double mx = kNegInf;
    for (double v : src) mx = std::max(mx, v);
    if (mx == kNegInf) continue;
    auto dst = out.values.row(t);
    for (std::size_t u = 0; u < m; ++u) dst[u] = std::exp(src[u] - mx);
    out.row_log_scale[t] = mx;
  }
  return out;
}

AlignmentMatrices posterior_log(const Matrix& sq, double nu, double gamma) {
  const Matrix lb = log_emissions(sq, nu, gamma);
  const Matrix la = forward_log(lb);
  const Matrix lbe = backward_log(lb);
  Matrix lp(la.rows(), la.cols());
  for (std::size_t k = 0; k < lp.data().size(); ++k) lp.data()[k] = la.data()[k] + lbe.data()[k];
  return {from_log(la), from_log(lbe), from_log(lp), true};
}

}  // namespace

double ScaledMatrix::value(std::size_t t, std::size_t u) const {
  return values(t, u) * std::exp(row_log_scale[t]);
}

double ScaledMatrix::log_value(std::size_t t, std::size_t u) const {
  return std::log(values(t, u)) + row_log_scale[t];
}

ScaledMatrix forward(const TimeSeries& x, const TimeSeries& y, const KdtwParams& p,
                     const AutomatonOptions& opts) {
  const double gamma = check_gamma(opts);
  const Matrix sq = squared_distances(x, y);
  if (auto fw = forward_scaled(emissions(sq, p.nu, gamma))) return std::move(*fw);
  return from_log(forward_log(log_emissions(sq, p.nu, gamma)));
}

ScaledMatrix backward(const TimeSeries& x, const TimeSeries& y, const KdtwParams& p,
                      const AutomatonOptions& opts) {
  const double gamma = check_gamma(opts);
  const Matrix sq = squared_distances(x, y);
  if (auto bw = backward_scaled(emissions(sq, p.nu, gamma))) return std::move(*bw);
  return from_log(backward_log(log_emissions(sq, p.nu, gamma)));
}

AlignmentMatrices posterior(const TimeSeries& x, const TimeSeries& y, const KdtwParams& p,
                            const AutomatonOptions& opts) {
  const double gamma = check_gamma(opts);
  const Matrix sq = squared_distances(x, y);
  const Matrix b = emissions(sq, p.nu, gamma);
  auto fw = forward_scaled(b);
  if (fw) {
    auto bw = backward_scaled(b);
    if (bw) {
      if (auto post = product_scaled(*fw, *bw))
        return {std::move(*fw), std::move(*bw), std::move(*post), false};
    }
  }
  return posterior_log(sq, p.nu, gamma);
}

Matrix row_conditionals(const ScaledMatrix& post) {
  const std::size_t n = post.rows(), m = post.cols();
  Matrix out(n, m);
  for (std::size_t t = 0; t < n; ++t) {
    auto src = post.values.row(t);
    double sum = 0.0;
    for (double v : src) sum += v;
    if (!(sum > 0.0) || !std::isfinite(sum))
      throw DegenerateError("alignment row " + std::to_string(t) + " has no posterior mass");
    auto dst = out.row(t);
    for (std::size_t u = 0; u < m; ++u) dst[u] = src[u] / sum;
  }
  return out;
}

Matrix row_conditionals(const AlignmentMatrices& m) { return row_conditionals(m.posterior); }

}  // namespace kteka
