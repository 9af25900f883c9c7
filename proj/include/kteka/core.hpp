#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kteka {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// An ordered sequence of `length()` samples in R^dim().
///
/// Samples are stored sample-major. Optional timestamps are expressed in
/// sample-index units (1..n for a uniformly sampled series). Instances are
/// immutable once built; the constructor enforces n >= 1, d >= 1 and finite
/// values.
class TimeSeries {
 public:
  TimeSeries(std::size_t length, std::size_t dim, std::vector<double> samples,
             std::optional<std::vector<double>> timestamps = std::nullopt);

  /// Scalar (d = 1) series.
  static TimeSeries scalar(std::vector<double> values);
  /// One inner vector per sample.
  static TimeSeries from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t length() const noexcept { return length_; }
  std::size_t dim() const noexcept { return dim_; }

  double operator()(std::size_t i, std::size_t k) const { return samples_[i * dim_ + k]; }
  std::span<const double> sample(std::size_t i) const { return {samples_.data() + i * dim_, dim_}; }
  std::span<const double> values() const noexcept { return samples_; }
  const std::optional<std::vector<double>>& timestamps() const noexcept { return timestamps_; }

  std::vector<double> channel(std::size_t k) const;
  TimeSeries reversed() const;

  bool operator==(const TimeSeries&) const = default;

 private:
  std::size_t length_;
  std::size_t dim_;
  std::vector<double> samples_;
  std::optional<std::vector<double>> timestamps_;
};

/// Labelled collection of series sharing one dimension (lengths may differ).
///
/// Labels are contiguous 0-based class indices; `class_names[c]` keeps the
/// token under which class c appeared in the source file.
struct LabeledDataset {
  std::vector<TimeSeries> series;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::string name;

  LabeledDataset(std::vector<TimeSeries> series, std::vector<int> labels,
                 std::string name = {}, std::vector<std::string> class_names = {});

  std::size_t size() const noexcept { return series.size(); }
  std::size_t dim() const { return series.front().dim(); }
  int num_classes() const;
  /// Series whose label equals `label`, in dataset order.
  std::vector<TimeSeries> of_class(int label) const;
};

/// Averaging output: sample values paired with their expected times of
/// occurrence. Times are not required to be monotone.
struct Centroid {
  TimeSeries values;
  std::vector<double> times;

  Centroid(TimeSeries values, std::vector<double> times);
  std::size_t length() const noexcept { return times.size(); }
};

/// Squared Euclidean distance. Throws InputError on dimension mismatch.
double l2_sq(std::span<const double> x, std::span<const double> y);

/// `count` equally spaced abscissae from `lo` to `hi` inclusive.
std::vector<double> uniform_abscissae(double lo, double hi, std::size_t count);

/// Stable-sort the centroid samples by time, then interpolate each channel
/// linearly onto L uniformly spaced points spanning [min time, max time].
/// Requires L >= 2; throws DegenerateError when all times coincide.
TimeSeries resample_uniform(const Centroid& c);

/// Linear resampling of a uniformly sampled series onto `length` points with
/// the same end points. Used to compare series of different lengths.
TimeSeries resample_length(const TimeSeries& s, std::size_t length);

}  // namespace kteka
