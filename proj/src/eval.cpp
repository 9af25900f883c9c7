#include "kteka/eval.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "kteka/error.hpp"
#include "kteka/parallel.hpp"

namespace kteka {

namespace {

int max_label(const std::vector<LabeledPrototype>& protos) {
  int mx = -1;
  for (const auto& p : protos) mx = std::max(mx, p.label);
  return mx;
}

// Direct DFT bins 0..n/2 of a real signal; the twiddle index k*t is reduced
// mod n before the trig call to keep the argument small.
std::vector<std::pair<double, double>> dft_half(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 2) throw InputError("spectrum needs at least 2 samples");
  const std::size_t bins = n / 2 + 1;
  std::vector<double> c(n), s(n);
  for (std::size_t q = 0; q < n; ++q) {
    const double ang = 2.0 * std::numbers::pi * static_cast<double>(q) / static_cast<double>(n);
    c[q] = std::cos(ang);
    s[q] = std::sin(ang);
  }
  std::vector<std::pair<double, double>> out(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t q = (k * t) % n;
      re += x[t] * c[q];
      im -= x[t] * s[q];
    }
    out[k] = {re, im};
  }
  return out;
}

double spectral_snr(const std::vector<double>& clean_mag, const std::vector<double>& mag) {
  double sig = 0.0, res = 0.0;
  for (std::size_t k = 0; k < clean_mag.size(); ++k) {
    sig += clean_mag[k] * clean_mag[k];
    const double r = mag[k] - clean_mag[k];
    res += r * r;
  }
  if (!(res > 0.0)) return kSnrCap;
  return std::min(kSnrCap, 10.0 * std::log10(sig / res));
}

}  // namespace

const std::vector<double>& paper_nu_grid() {
  static const std::vector<double> grid{.01, .05, .1, .25, .5, .75, 1, 2, 5, 10, 15, 20, 25, 50, 100};
  return grid;
}

int predict_1nc(const std::vector<LabeledPrototype>& prototypes, const TimeSeries& x, Measure measure,
                const KdtwParams& p) {
  if (prototypes.empty()) throw ConfigError("no prototypes");
  const int classes = max_label(prototypes) + 1;
  std::vector<std::optional<double>> best(static_cast<std::size_t>(classes));
  for (const auto& proto : prototypes) {
    const double s = measure == Measure::Dtw ? -dtw_cost(x, proto.series) : kdtw_log(x, proto.series, p).total;
    auto& slot = best[static_cast<std::size_t>(proto.label)];
    if (!slot || s > *slot) slot = s;
  }
  int label = -1;
  double score = 0.0;
  for (int c = 0; c < classes; ++c) {
    const auto& slot = best[static_cast<std::size_t>(c)];
    if (slot && (label < 0 || *slot > score)) {
      label = c;
      score = *slot;
    }
  }
  return label;
}

void fill_metrics(EvalReport& report, const std::vector<int>& truth, const std::vector<int>& predicted,
                  int num_classes) {
  const auto nc = static_cast<std::size_t>(num_classes);
  report.confusion.assign(nc, std::vector<long>(nc, 0));
  long correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++report.confusion[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
    if (truth[i] == predicted[i]) ++correct;
  }
  report.predictions = predicted;
  report.error_rate = truth.empty() ? 0.0 : 1.0 - static_cast<double>(correct) / static_cast<double>(truth.size());

  double psum = 0.0, rsum = 0.0;
  std::size_t present = 0;
  report.class_precision.assign(nc, 0.0);
  report.class_recall.assign(nc, 0.0);
  report.class_f1.assign(nc, 0.0);
  for (std::size_t c = 0; c < nc; ++c) {
    long row = 0, col = 0;
    for (std::size_t k = 0; k < nc; ++k) {
      row += report.confusion[c][k];
      col += report.confusion[k][c];
    }
    if (row == 0) continue;  // class absent from the test labels
    ++present;
    const double tp = static_cast<double>(report.confusion[c][c]);
    const double r = tp / static_cast<double>(row);
    const double p = col > 0 ? tp / static_cast<double>(col) : 0.0;
    report.class_recall[c] = r;
    report.class_precision[c] = p;
    report.class_f1[c] = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    rsum += r;
    psum += p;
  }
  report.precision = present ? psum / static_cast<double>(present) : 0.0;
  report.recall = present ? rsum / static_cast<double>(present) : 0.0;
  const double pr = report.precision + report.recall;
  report.f1 = pr > 0.0 ? 2.0 * report.precision * report.recall / pr : 0.0;
}

EvalReport classify_1nc(const std::vector<LabeledPrototype>& prototypes, const LabeledDataset& test,
                        Measure measure, const KdtwParams& p, unsigned jobs) {
  if (prototypes.empty()) throw ConfigError("no prototypes");
  const int classes = std::max(test.num_classes(), max_label(prototypes) + 1);
  std::vector<bool> have(static_cast<std::size_t>(classes), false);
  for (const auto& proto : prototypes) {
    if (proto.label < 0) throw ConfigError("prototype label must be >= 0");
    have[static_cast<std::size_t>(proto.label)] = true;
  }
  for (int label : test.labels)
    if (!have[static_cast<std::size_t>(label)])
      throw ConfigError("no prototype for class " + std::to_string(label) + " present in the test set");

  std::vector<int> predicted(test.size());
  parallel_for(test.size(), jobs,
               [&](std::size_t i) { predicted[i] = predict_1nc(prototypes, test.series[i], measure, p); });
  EvalReport report;
  report.measure = to_string(measure);
  report.nu_selected = p.nu;
  fill_metrics(report, test.labels, predicted, classes);
  return report;
}

std::vector<LabeledPrototype> build_prototypes(const LabeledDataset& train, const AveragingConfig& cfg) {
  std::vector<LabeledPrototype> out;
  for (int c = 0; c < train.num_classes(); ++c) {
    auto members = train.of_class(c);
    if (members.empty()) continue;
    out.push_back({average(members, cfg).series, c});
  }
  return out;
}

LooResult loo_select_nu(const LabeledDataset& train, Method method, const std::vector<double>& grid,
                        const LooOptions& opts) {
  if (grid.empty()) throw ConfigError("empty nu grid");
  std::vector<double> candidates = grid;
  if (!uses_nu(method) && opts.measure.value_or(default_measure(method)) == Measure::Dtw)
    candidates = {*std::min_element(grid.begin(), grid.end())};

  const unsigned jobs = resolve_jobs(opts.jobs);
  const Measure measure = opts.measure.value_or(default_measure(method));
  const std::size_t count = train.size();
  std::vector<std::size_t> class_size(static_cast<std::size_t>(train.num_classes()), 0);
  for (int l : train.labels) ++class_size[static_cast<std::size_t>(l)];

  LooResult result{candidates.front(), 1.0, {}, {}};
  if (!opts.fast)
    for (std::size_t i = 0; i < count; ++i)
      if (class_size[static_cast<std::size_t>(train.labels[i])] < 2)
        result.warnings.push_back("fold " + std::to_string(i) + " skipped: class " +
                                  std::to_string(train.labels[i]) + " has a single member");

  bool first = true;
  for (double nu : candidates) {
    AveragingConfig cfg{nu, opts.max_iter, method, 1};
    const KdtwParams p(nu);
    AveragingConfig outer = cfg;
    outer.jobs = jobs;
    const auto full = build_prototypes(train, outer);

    std::vector<int> verdict(count, -1);  // 1 wrong, 0 right, -1 skipped
    parallel_for(count, jobs, [&](std::size_t i) {
      const int label = train.labels[i];
      if (opts.fast) {
        verdict[i] = predict_1nc(full, train.series[i], measure, p) != label;
        return;
      }
      if (class_size[static_cast<std::size_t>(label)] < 2) return;
      std::vector<TimeSeries> rest;
      for (std::size_t j = 0; j < count; ++j)
        if (j != i && train.labels[j] == label) rest.push_back(train.series[j]);
      auto protos = full;
      for (auto& proto : protos)
        if (proto.label == label) proto.series = average(rest, cfg).series;
      verdict[i] = predict_1nc(protos, train.series[i], measure, p) != label;
    });

    long wrong = 0, used = 0;
    for (int v : verdict)
      if (v >= 0) {
        ++used;
        wrong += v;
      }
    const double err = used ? static_cast<double>(wrong) / static_cast<double>(used) : 1.0;
    result.errors.push_back(err);
    if (first || err < result.loo_error || (err == result.loo_error && nu < result.nu)) {
      result.nu = nu;
      result.loo_error = err;
      first = false;
    }
  }
  return result;
}

std::vector<double> magnitude_spectrum(const std::vector<double>& x) {
  auto bins = dft_half(x);
  std::vector<double> out(bins.size());
  for (std::size_t k = 0; k < bins.size(); ++k) out[k] = std::hypot(bins[k].first, bins[k].second);
  return out;
}

std::vector<double> power_spectrum_linear(const std::vector<double>& x) {
  const std::size_t n = x.size();
  auto bins = dft_half(x);
  std::vector<double> out(bins.size());
  for (std::size_t k = 0; k < bins.size(); ++k) {
    const double p = (bins[k].first * bins[k].first + bins[k].second * bins[k].second) / static_cast<double>(n);
    const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
    out[k] = edge ? p : 2.0 * p;
  }
  return out;
}

std::vector<double> power_spectrum(const std::vector<double>& x) {
  auto p = power_spectrum_linear(x);
  for (double& v : p) v = 10.0 * std::log10(std::max(v, DBL_MIN));
  return p;
}

double snr_gain(const TimeSeries& clean, const TimeSeries& estimate, const TimeSeries& noisy_ref) {
  if (clean.dim() != estimate.dim() || clean.dim() != noisy_ref.dim())
    throw InputError("snr_gain: dimension mismatch");
  if (noisy_ref.length() != clean.length()) throw InputError("snr_gain: reference length differs from clean");
  const TimeSeries est = estimate.length() == clean.length() ? estimate : resample_length(estimate, clean.length());
  double acc = 0.0;
  for (std::size_t k = 0; k < clean.dim(); ++k) {
    const auto cm = magnitude_spectrum(clean.channel(k));
    double sig = 0.0;
    for (double v : cm) sig += v * v;
    if (!(sig > 0.0)) throw InputError("snr_gain: clean spectrum of channel " + std::to_string(k) + " is zero");
    acc += spectral_snr(cm, magnitude_spectrum(est.channel(k))) -
           spectral_snr(cm, magnitude_spectrum(noisy_ref.channel(k)));
  }
  return acc / static_cast<double>(clean.dim());
}

Support support_interval(const std::vector<double>& values, const std::vector<double>& axis, double fraction) {
  if (values.empty() || values.size() != axis.size()) throw InputError("support_interval: size mismatch");
  const auto peak_it = std::max_element(values.begin(), values.end());
  const double thr = fraction * *peak_it;
  std::size_t lo = static_cast<std::size_t>(peak_it - values.begin()), hi = lo;
  while (lo > 0 && values[lo - 1] > thr) --lo;
  while (hi + 1 < values.size() && values[hi + 1] > thr) ++hi;
  return {axis[lo], axis[hi]};
}

std::vector<double> resampled_axis(const Centroid& estimate) {
  const auto [lo, hi] = std::minmax_element(estimate.times.begin(), estimate.times.end());
  return uniform_abscissae(*lo, *hi, estimate.length());
}

DenoiseResult denoise_experiment(const DenoiseConfig& cfg) {
  DenoiseResult out{gen_rosette(cfg.rosette), {}};
  for (Method m : cfg.methods) {
    AveragingConfig acfg{cfg.nu, cfg.max_iter, m, cfg.jobs};
    TimeSeries c = average(out.data.noisy, acfg).series;
    double gain = 0.0;
    for (std::size_t k = 0; k < out.data.clean.size(); ++k) gain += snr_gain(out.data.clean[k], c, out.data.noisy[k]);
    gain /= static_cast<double>(out.data.clean.size());
    out.entries.push_back({m, gain, std::move(c)});
  }
  return out;
}

}  // namespace kteka
