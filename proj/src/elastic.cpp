#include "kteka/elastic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kteka/error.hpp"
#include "kteka/parallel.hpp"
#include "logmath.hpp"

namespace kteka {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kThird = 1.0 / 3.0;

void require_same_dim(const TimeSeries& x, const TimeSeries& y, const char* what) {
  if (x.dim() != y.dim())
    throw InputError(std::string(what) + ": dimension mismatch (" + std::to_string(x.dim()) + " vs " +
                     std::to_string(y.dim()) + ")");
}

// Squared distances between x_k and y_k for k = 0..max(n,m)-1, the shorter
// series held at its last sample.
std::vector<double> diagonal_sq(const TimeSeries& x, const TimeSeries& y) {
  const std::size_t n = x.length(), m = y.length();
  std::vector<double> d(std::max(n, m));
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = l2_sq(x.sample(std::min(k, n - 1)), y.sample(std::min(k, m - 1)));
  return d;
}

// Scaled linear recursion for the K term; nullopt when a row loses all mass.
std::optional<double> log_k_term_scaled(const TimeSeries& x, const TimeSeries& y, double nu) {
  const std::size_t n = x.length(), m = y.length();
  std::vector<double> prev(m + 1, 0.0), cur(m + 1, 0.0);
  prev[0] = 1.0;
  long exponent = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = 0.0;
    for (std::size_t j = 1; j <= m; ++j) {
      double b = std::exp(-nu * l2_sq(x.sample(i - 1), y.sample(j - 1)));
      cur[j] = b * ((prev[j] + cur[j - 1]) + prev[j - 1]) * kThird;
    }
    if (!renormalize_row(std::span(cur).subspan(1), exponent)) return std::nullopt;
    std::swap(prev, cur);
  }
  if (!(prev[m] > 0.0)) return std::nullopt;
  return std::log(prev[m]) + static_cast<double>(exponent) * kLn2;
}

double log_k_term_logdomain(const TimeSeries& x, const TimeSeries& y, double nu) {
  const std::size_t n = x.length(), m = y.length();
  std::vector<double> prev(m + 1, kNegInf), cur(m + 1, kNegInf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = kNegInf;
    for (std::size_t j = 1; j <= m; ++j) {
      double lb = -nu * l2_sq(x.sample(i - 1), y.sample(j - 1));
      cur[j] = lb - kLog3 + log_add(log_add(prev[j], cur[j - 1]), prev[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

std::optional<double> log_kp_term_scaled(const TimeSeries& x, const TimeSeries& y, double nu,
                                         const std::vector<double>& diag) {
  const std::size_t n = x.length(), m = y.length();
  std::vector<double> dk(diag.size());
  for (std::size_t k = 0; k < diag.size(); ++k) dk[k] = std::exp(-nu * diag[k]);
  std::vector<double> prev(m + 1, 0.0), cur(m + 1, 0.0);
  prev[0] = 1.0;
  long exponent = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = 0.0;
    const double di = dk[i - 1];
    for (std::size_t j = 1; j <= m; ++j) {
      double v = prev[j] * di + cur[j - 1] * dk[j - 1];
      if (i == j) v += prev[j - 1] * std::exp(-nu * l2_sq(x.sample(i - 1), y.sample(j - 1)));
      cur[j] = v * kThird;
    }
    if (!renormalize_row(std::span(cur).subspan(1), exponent)) return std::nullopt;
    std::swap(prev, cur);
  }
  if (!(prev[m] > 0.0)) return std::nullopt;
  return std::log(prev[m]) + static_cast<double>(exponent) * kLn2;
}

double log_kp_term_logdomain(const TimeSeries& x, const TimeSeries& y, double nu,
                             const std::vector<double>& diag) {
  const std::size_t n = x.length(), m = y.length();
  std::vector<double> prev(m + 1, kNegInf), cur(m + 1, kNegInf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = kNegInf;
    const double li = -nu * diag[i - 1];
    for (std::size_t j = 1; j <= m; ++j) {
      double v = log_add(prev[j] + li, cur[j - 1] - nu * diag[j - 1]);
      if (i == j) v = log_add(v, prev[j - 1] - nu * l2_sq(x.sample(i - 1), y.sample(j - 1)));
      cur[j] = v - kLog3;
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace

bool WarpPath::valid_for(std::size_t n, std::size_t m) const {
  if (steps.empty() || steps.front() != std::pair<std::size_t, std::size_t>{0, 0} ||
      steps.back() != std::pair<std::size_t, std::size_t>{n - 1, m - 1})
    return false;
  for (std::size_t k = 1; k < steps.size(); ++k) {
    auto di = steps[k].first - steps[k - 1].first;
    auto dj = steps[k].second - steps[k - 1].second;
    bool ok = (di == 1 && dj == 0) || (di == 0 && dj == 1) || (di == 1 && dj == 1);
    if (!ok || steps[k].first < steps[k - 1].first || steps[k].second < steps[k - 1].second) return false;
  }
  return true;
}

KdtwParams::KdtwParams(double stiffness) : nu(stiffness) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw InputError("nu must be finite and positive");
}

DtwResult dtw(const TimeSeries& x, const TimeSeries& y) {
  require_same_dim(x, y, "dtw");
  const std::size_t n = x.length(), m = y.length();
  Matrix acc(n + 1, m + 1, kInf);
  acc(0, 0) = 0.0;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      acc(i, j) = l2_sq(x.sample(i - 1), y.sample(j - 1)) +
                  std::min({acc(i - 1, j - 1), acc(i - 1, j), acc(i, j - 1)});

  WarpPath path;
  std::size_t i = n, j = m;
  path.steps.emplace_back(i - 1, j - 1);
  while (i > 1 || j > 1) {
    const double diag = acc(i - 1, j - 1), up = acc(i - 1, j), left = acc(i, j - 1);
    if (diag <= up && diag <= left) {
      --i;
      --j;
    } else if (up <= left) {
      --i;
    } else {
      --j;
    }
    path.steps.emplace_back(i - 1, j - 1);
  }
  std::reverse(path.steps.begin(), path.steps.end());
  return {acc(n, m), std::move(path)};
}

double dtw_cost(const TimeSeries& x, const TimeSeries& y) {
  require_same_dim(x, y, "dtw");
  const std::size_t n = x.length(), m = y.length();
  std::vector<double> prev(m + 1, kInf), cur(m + 1, kInf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = kInf;
    for (std::size_t j = 1; j <= m; ++j)
      cur[j] = l2_sq(x.sample(i - 1), y.sample(j - 1)) + std::min({prev[j - 1], prev[j], cur[j - 1]});
    std::swap(prev, cur);
  }
  return prev[m];
}

TimeSeries pairwise_dtw_average(const TimeSeries& x, const TimeSeries& y) {
  const auto result = dtw(x, y);
  const std::size_t d = x.dim();
  std::vector<double> out;
  out.reserve(result.path.size() * d);
  for (auto [i, j] : result.path.steps) {
    auto xs = x.sample(i);
    auto ys = y.sample(j);
    for (std::size_t k = 0; k < d; ++k) out.push_back(0.5 * (xs[k] + ys[k]));
  }
  return TimeSeries(result.path.size(), d, std::move(out));
}

KdtwResult kdtw_unchecked(const TimeSeries& x, const TimeSeries& y, const KdtwParams& p) {
  require_same_dim(x, y, "kdtw");
  const std::size_t n = x.length(), m = y.length();
  const double nu = p.nu;
  const auto diag = diagonal_sq(x, y);
  std::vector<double> dk(diag.size());
  for (std::size_t k = 0; k < diag.size(); ++k) dk[k] = std::exp(-nu * diag[k]);

  std::vector<double> k_prev(m + 1, 0.0), k_cur(m + 1, 0.0);
  std::vector<double> kp_prev(m + 1, 0.0), kp_cur(m + 1, 0.0);
  k_prev[0] = kp_prev[0] = 1.0;
  for (std::size_t i = 1; i <= n; ++i) {
    k_cur[0] = kp_cur[0] = 0.0;
    const double di = dk[i - 1];
    for (std::size_t j = 1; j <= m; ++j) {
      const double b = std::exp(-nu * l2_sq(x.sample(i - 1), y.sample(j - 1)));
      k_cur[j] = b * ((k_prev[j] + k_cur[j - 1]) + k_prev[j - 1]) * kThird;
      double v = kp_prev[j] * di + kp_cur[j - 1] * dk[j - 1];
      if (i == j) v += kp_prev[j - 1] * b;
      kp_cur[j] = v * kThird;
    }
    std::swap(k_prev, k_cur);
    std::swap(kp_prev, kp_cur);
  }
  return {k_prev[m] + kp_prev[m], k_prev[m], kp_prev[m]};
}

KdtwResult kdtw(const TimeSeries& x, const TimeSeries& y, const KdtwParams& p) {
  auto r = kdtw_unchecked(x, y, p);
  if (!(r.total > 0.0))
    throw NumericError("kdtw underflowed to zero at nu=" + std::to_string(p.nu) +
                       " for lengths " + std::to_string(x.length()) + "x" + std::to_string(y.length()) +
                       "; use a smaller nu");
  return r;
}

KdtwLog kdtw_log(const TimeSeries& x, const TimeSeries& y, const KdtwParams& p) {
  require_same_dim(x, y, "kdtw");
  const auto diag = diagonal_sq(x, y);
  double lk;
  if (auto v = log_k_term_scaled(x, y, p.nu))
    lk = *v;
  else
    lk = log_k_term_logdomain(x, y, p.nu);
  double lkp;
  if (auto v = log_kp_term_scaled(x, y, p.nu, diag))
    lkp = *v;
  else
    lkp = log_kp_term_logdomain(x, y, p.nu, diag);
  return {log_add(lk, lkp), lk, lkp};
}

Matrix gram(const std::vector<TimeSeries>& series, const KdtwParams& p, unsigned jobs) {
  const std::size_t count = series.size();
  for (const auto& s : series)
    if (s.dim() != series.front().dim()) throw InputError("gram: series dimensions differ");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = i; j < count; ++j) pairs.emplace_back(i, j);

  Matrix g(count, count);
  parallel_for(pairs.size(), jobs, [&](std::size_t k) {
    auto [i, j] = pairs[k];
    double v = kdtw_unchecked(series[i], series[j], p).total;
    if (i == j && !(v > 0.0))
      throw NumericError("gram: self-similarity of series " + std::to_string(i) +
                         " underflowed; use a smaller nu");
    g(i, j) = v;
    g(j, i) = v;
  });
  return g;
}

}  // namespace kteka
