#include "kteka/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "kteka/error.hpp"

namespace kteka {

namespace {

std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t group, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(group), static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

void standardize(std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double& x : v) {
    x -= mean;
    var += x * x;
  }
  var /= static_cast<double>(v.size());
  if (!(var > 0.0)) throw DegenerateError("rosette: constant channel cannot be normalized");
  const double s = 1.0 / std::sqrt(var);
  for (double& x : v) x *= s;
}

double energy(const std::vector<double>& v) {
  double e = 0.0;
  for (double x : v) e += x * x;
  return e;
}

}  // namespace

void CbfSpec::validate() const {
  if (per_class < 1) throw ConfigError("cbf: per_class must be >= 1");
  if (length < 97) throw ConfigError("cbf: length must be >= 97");
}

CbfSample gen_cbf_detailed(const CbfSpec& spec) {
  spec.validate();
  std::vector<TimeSeries> series;
  std::vector<int> labels;
  std::vector<CbfEvent> events;
  const int len = static_cast<int>(spec.length);
  for (int label = 0; label < 3; ++label) {
    for (std::size_t i = 0; i < spec.per_class; ++i) {
      auto rng = instance_rng(spec.seed, static_cast<std::uint64_t>(label), i);
      std::uniform_int_distribution<int> onset(16, 32), width(32, 96);
      std::normal_distribution<double> normal(0.0, 1.0);
      const int a = onset(rng);
      const int b = std::min(a + width(rng), len);
      const double eta = spec.noise_free ? 0.0 : normal(rng);
      std::vector<double> v(spec.length);
      for (int t = 1; t <= len; ++t) {
        const double eps = spec.noise_free ? 0.0 : normal(rng);
        double shape = 0.0;
        if (t >= a && t <= b) {
          const double span = static_cast<double>(b - a);
          if (label == 0) shape = 1.0;
          else if (label == 1) shape = (t - a) / span;
          else shape = (b - t) / span;
        }
        v[t - 1] = (6.0 + eta) * shape + eps;
      }
      series.push_back(TimeSeries::scalar(std::move(v)));
      labels.push_back(label);
      events.push_back({label, a, b, eta});
    }
  }
  LabeledDataset ds(std::move(series), std::move(labels), "CBF", {"1", "2", "3"});
  return {std::move(ds), std::move(events)};
}

LabeledDataset gen_cbf(const CbfSpec& spec) { return gen_cbf_detailed(spec).data; }

void RosetteSpec::validate() const {
  if (n_instances < 1) throw ConfigError("rosette: n_instances must be >= 1");
  if (!(f0 > 0.0) || !std::isfinite(f0)) throw ConfigError("rosette: f0 must be positive");
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw ConfigError("rosette: amplitude must be positive");
  if (!(sample_rate > 12.0 * f0) || !std::isfinite(sample_rate))
    throw ConfigError("rosette: sample_rate must exceed 12*f0 (" + std::to_string(12.0 * f0) + " Hz)");
  if (duration < 0.0 || !std::isfinite(duration)) throw ConfigError("rosette: duration must be >= 0");
  if (!std::isfinite(snr_db)) throw ConfigError("rosette: snr_db must be finite");
  if (samples() < 2) throw ConfigError("rosette: fewer than 2 samples");
}

std::size_t RosetteSpec::samples() const {
  const double dur = duration > 0.0 ? duration : 2.0 / f0;
  return static_cast<std::size_t>(std::llround(dur * sample_rate));
}

RosetteSet gen_rosette(const RosetteSpec& spec) {
  spec.validate();
  const std::size_t n = spec.samples();
  const double a0 = spec.amplitude;
  const double w0 = 2.0 * std::numbers::pi * spec.f0;
  const double noise_scale = std::pow(10.0, -spec.snr_db / 20.0);
  RosetteSet out;
  for (std::size_t k = 0; k < spec.n_instances; ++k) {
    auto rng = instance_rng(spec.seed, 0x726f7365u, k);
    std::uniform_real_distribution<double> amp(0.0, a0 / 10.0);
    std::uniform_real_distribution<double> freq(-w0 / 6.67, w0 / 6.67);
    const double wn = w0 / spec.sample_rate;
    std::uniform_real_distribution<double> phase(-wn / 10.0, wn / 10.0);
    double ak = amp(rng), bk = amp(rng), wk = freq(rng), phik = phase(rng);
    if (spec.no_perturbation) ak = bk = wk = phik = 0.0;
    const double amp_k = a0 + ak;
    const double comb_k = spec.no_comb ? 0.0 : (a0 + 5.0) + bk;
    const double omega = w0 + wk;

    // Spikes at t = 2*pi*i / (6*omega), snapped to the nearest sample.
    std::vector<double> spike(n, 0.0);
    const double spacing = 2.0 * std::numbers::pi / (6.0 * omega) * spec.sample_rate;
    for (std::size_t i = 1;; ++i) {
      const auto s = std::llround(static_cast<double>(i) * spacing);
      if (s >= static_cast<long long>(n)) break;
      spike[static_cast<std::size_t>(s)] += 1.0;
    }

    std::vector<double> x(n), y(n);
    for (std::size_t s = 0; s < n; ++s) {
      const double t = static_cast<double>(s) / spec.sample_rate;
      const double gain = amp_k + comb_k * spike[s];
      x[s] = gain * std::cos(omega * t + phik);
      y[s] = gain * std::sin(omega * t + phik);
    }
    standardize(x);
    standardize(y);

    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> ex(n), ey(n);
    for (std::size_t s = 0; s < n; ++s) {
      ex[s] = normal(rng);
      ey[s] = normal(rng);
    }
    const double gx = noise_scale * std::sqrt(energy(x) / energy(ex));
    const double gy = noise_scale * std::sqrt(energy(y) / energy(ey));

    std::vector<double> clean(2 * n), noisy(2 * n);
    for (std::size_t s = 0; s < n; ++s) {
      clean[2 * s] = x[s];
      clean[2 * s + 1] = y[s];
      noisy[2 * s] = x[s] + gx * ex[s];
      noisy[2 * s + 1] = y[s] + gy * ey[s];
    }
    out.clean.emplace_back(n, 2, std::move(clean));
    out.noisy.emplace_back(n, 2, std::move(noisy));
  }
  return out;
}

}  // namespace kteka
