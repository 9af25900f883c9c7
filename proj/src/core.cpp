#include "kteka/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kteka/error.hpp"

namespace kteka {

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Piecewise-linear evaluation of (xs, ys) at `u`; xs sorted ascending,
// u within [xs.front(), xs.back()].
double interpolate(std::span<const double> xs, std::span<const double> ys, double u) {
  if (u >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), u);
  std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  std::size_t lo = hi - 1;
  double w = (u - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + w * (ys[hi] - ys[lo]);
}

}  // namespace

TimeSeries::TimeSeries(std::size_t length, std::size_t dim, std::vector<double> samples,
                       std::optional<std::vector<double>> timestamps)
    : length_(length), dim_(dim), samples_(std::move(samples)), timestamps_(std::move(timestamps)) {
  if (length_ == 0 || dim_ == 0) throw InputError("time series needs n >= 1 samples and d >= 1");
  if (samples_.size() != length_ * dim_)
    throw InputError("time series: sample buffer holds " + std::to_string(samples_.size()) +
                     " values, expected n*d = " + std::to_string(length_ * dim_));
  if (!all_finite(samples_)) throw InputError("time series contains non-finite values");
  if (timestamps_) {
    if (timestamps_->size() != length_)
      throw InputError("time series: timestamp count differs from sample count");
    if (!all_finite(*timestamps_)) throw InputError("time series contains non-finite timestamps");
  }
}

TimeSeries TimeSeries::scalar(std::vector<double> values) {
  std::size_t n = values.size();
  return TimeSeries(n, 1, std::move(values));
}

TimeSeries TimeSeries::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InputError("time series needs at least one sample");
  std::size_t d = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw InputError("time series rows have inconsistent dimension");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return TimeSeries(rows.size(), d, std::move(flat));
}

std::vector<double> TimeSeries::channel(std::size_t k) const {
  if (k >= dim_) throw InputError("channel index out of range");
  std::vector<double> out(length_);
  for (std::size_t i = 0; i < length_; ++i) out[i] = (*this)(i, k);
  return out;
}

TimeSeries TimeSeries::reversed() const {
  std::vector<double> flat;
  flat.reserve(samples_.size());
  for (std::size_t i = length_; i-- > 0;) {
    auto s = sample(i);
    flat.insert(flat.end(), s.begin(), s.end());
  }
  std::optional<std::vector<double>> ts;
  if (timestamps_) ts = std::vector<double>(timestamps_->rbegin(), timestamps_->rend());
  return TimeSeries(length_, dim_, std::move(flat), std::move(ts));
}

LabeledDataset::LabeledDataset(std::vector<TimeSeries> s, std::vector<int> l, std::string n,
                               std::vector<std::string> names)
    : series(std::move(s)), labels(std::move(l)), class_names(std::move(names)), name(std::move(n)) {
  if (series.empty()) throw InputError("dataset is empty");
  if (series.size() != labels.size()) throw InputError("dataset: series and label counts differ");
  std::size_t d = series.front().dim();
  for (const auto& ts : series)
    if (ts.dim() != d) throw InputError("dataset: series dimensions differ");
  for (int lab : labels)
    if (lab < 0) throw InputError("dataset: labels must be non-negative");
  if (class_names.empty()) {
    for (int c = 0; c < num_classes(); ++c) class_names.push_back(std::to_string(c));
  } else if (static_cast<int>(class_names.size()) < num_classes()) {
    throw InputError("dataset: fewer class names than classes");
  }
}

int LabeledDataset::num_classes() const {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

std::vector<TimeSeries> LabeledDataset::of_class(int label) const {
  std::vector<TimeSeries> out;
  for (std::size_t i = 0; i < series.size(); ++i)
    if (labels[i] == label) out.push_back(series[i]);
  return out;
}

Centroid::Centroid(TimeSeries v, std::vector<double> t) : values(std::move(v)), times(std::move(t)) {
  if (times.size() != values.length()) throw InputError("centroid: times and values lengths differ");
  if (!all_finite(times)) throw InputError("centroid: non-finite times");
}

double l2_sq(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw InputError("l2_sq: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double diff = x[i] - y[i];
    acc += diff * diff;
  }
  return acc;
}

std::vector<double> uniform_abscissae(double lo, double hi, std::size_t count) {
  std::vector<double> u(count);
  if (count == 1) {
    u[0] = lo;
    return u;
  }
  double span = static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) {
    double kk = static_cast<double>(k);
    // Convex form keeps integer grids exact and hits both end points.
    u[k] = (lo * (span - kk) + hi * kk) / span;
  }
  return u;
}

TimeSeries resample_uniform(const Centroid& c) {
  const std::size_t L = c.length();
  const std::size_t d = c.values.dim();
  if (L < 2) throw InputError("resample_uniform: need at least two samples");

  std::vector<std::size_t> order(L);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return c.times[a] < c.times[b]; });

  std::vector<double> xs(L);
  for (std::size_t i = 0; i < L; ++i) xs[i] = c.times[order[i]];
  const double lo = xs.front();
  const double hi = xs.back();
  if (!(hi > lo)) throw DegenerateError("resample_uniform: all timestamps are equal");

  const auto grid = uniform_abscissae(lo, hi, L);
  std::vector<double> out(L * d);
  std::vector<double> ys(L);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < L; ++i) ys[i] = c.values(order[i], k);
    for (std::size_t i = 0; i < L; ++i) out[i * d + k] = interpolate(xs, ys, grid[i]);
  }
  return TimeSeries(L, d, std::move(out));
}

TimeSeries resample_length(const TimeSeries& s, std::size_t length) {
  if (length == 0) throw InputError("resample_length: target length must be positive");
  const std::size_t n = s.length();
  const std::size_t d = s.dim();
  if (n == length) return TimeSeries(n, d, std::vector<double>(s.values().begin(), s.values().end()));
  if (n == 1) {
    std::vector<double> out;
    for (std::size_t i = 0; i < length; ++i) out.insert(out.end(), s.values().begin(), s.values().end());
    return TimeSeries(length, d, std::move(out));
  }
  std::vector<double> xs(n);
  std::iota(xs.begin(), xs.end(), 0.0);
  const auto grid = uniform_abscissae(0.0, static_cast<double>(n - 1), length);
  std::vector<double> out(length * d);
  for (std::size_t k = 0; k < d; ++k) {
    auto ys = s.channel(k);
    for (std::size_t i = 0; i < length; ++i) out[i * d + k] = interpolate(xs, ys, grid[i]);
  }
  return TimeSeries(length, d, std::move(out));
}

}  // namespace kteka
