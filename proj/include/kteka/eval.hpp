#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kteka/averaging.hpp"
#include "kteka/core.hpp"
#include "kteka/datagen.hpp"
#include "kteka/elastic.hpp"

namespace kteka {

/// Stiffness values searched by default during leave-one-out selection.
const std::vector<double>& paper_nu_grid();

struct LabeledPrototype {
  TimeSeries series;
  int label;
};

struct EvalReport {
  double error_rate = 0.0;
  double precision = 0.0;  ///< macro average over classes
  double recall = 0.0;     ///< macro average over classes
  double f1 = 0.0;         ///< 2PR/(P+R) of the macro averages
  std::vector<double> class_precision;
  std::vector<double> class_recall;
  std::vector<double> class_f1;
  std::vector<std::vector<long>> confusion;  ///< [true][predicted]
  std::vector<int> predictions;
  double nu_selected = 0.0;
  std::string method;
  std::string measure;
  std::uint64_t seed = 0;
  double loo_error = 0.0;
  std::vector<double> grid;
  std::vector<double> grid_errors;
  std::vector<std::string> warnings;
};

/// Label of the closest (dtw) or most similar (kdtw) prototype. Scores are
/// reduced per class first, so ties go to the lowest class index whatever
/// the prototype order.
int predict_1nc(const std::vector<LabeledPrototype>& prototypes, const TimeSeries& x, Measure measure,
                const KdtwParams& p);

/// Nearest-centroid classification of every test series. Throws ConfigError
/// when a class present in the test labels has no prototype.
EvalReport classify_1nc(const std::vector<LabeledPrototype>& prototypes, const LabeledDataset& test,
                        Measure measure, const KdtwParams& p, unsigned jobs = 1);

/// Fills the metric fields of `report` from true and predicted labels.
void fill_metrics(EvalReport& report, const std::vector<int>& truth, const std::vector<int>& predicted,
                  int num_classes);

/// One prototype per class of `train`, built with cfg.
std::vector<LabeledPrototype> build_prototypes(const LabeledDataset& train, const AveragingConfig& cfg);

struct LooOptions {
  bool fast = false;  ///< reuse full-train prototypes (approximate)
  std::optional<Measure> measure;  ///< default_measure(method) when unset
  int max_iter = 10;
  unsigned jobs = 1;
};

struct LooResult {
  double nu;
  double loo_error;
  std::vector<double> errors;  ///< per grid value
  std::vector<std::string> warnings;
};

/// Leave-one-out stiffness selection on the training set. In the default
/// mode each fold rebuilds the held-out item's class prototype without it.
/// Ties go to the smaller nu. Folds whose class has a single member are
/// skipped with a warning. Methods that ignore nu are evaluated once.
LooResult loo_select_nu(const LabeledDataset& train, Method method, const std::vector<double>& grid,
                        const LooOptions& opts = {});

/// One-sided power spectrum, 10*log10 of P_k, k = 0..n/2, by direct DFT with
/// a rectangular window. P_k = |X_k|^2 / n with interior bins doubled, so the
/// bins add up to the time-domain energy. Zero power is floored at DBL_MIN.
std::vector<double> power_spectrum(const std::vector<double>& x);
/// Linear P_k as above.
std::vector<double> power_spectrum_linear(const std::vector<double>& x);
/// One-sided DFT magnitudes |X_k|, k = 0..n/2.
std::vector<double> magnitude_spectrum(const std::vector<double>& x);

/// Returned for a zero spectral residual.
inline constexpr double kSnrCap = 300.0;

/// Phase-blind spectral SNR gain (dB) of `estimate` over `noisy_ref`, both
/// judged against `clean`; the mean over channels of
/// 10 log10(sum |C|^2 / sum (|S| - |C|)^2) for S = estimate minus the same
/// for S = noisy_ref. A differing estimate length is linearly resampled.
double snr_gain(const TimeSeries& clean, const TimeSeries& estimate, const TimeSeries& noisy_ref);

struct Support {
  double onset;
  double offset;
};

/// Contiguous run of samples above `fraction` times the peak value that
/// contains the (first) peak, reported on `axis` (one abscissa per sample).
Support support_interval(const std::vector<double>& values, const std::vector<double>& axis,
                         double fraction = 0.1);

/// Abscissae of a resampled TEKA estimate: L uniform points on [min tau, max tau].
std::vector<double> resampled_axis(const Centroid& estimate);

struct DenoiseConfig {
  RosetteSpec rosette;
  double nu = 0.25;
  int max_iter = 10;
  unsigned jobs = 1;
  std::vector<Method> methods{Method::Teka, Method::Euclidean, Method::Dba};
};

struct DenoiseEntry {
  Method method;
  double gain;  ///< mean over instances k of snr_gain(clean_k, centroid, noisy_k)
  TimeSeries centroid;
};

struct DenoiseResult {
  RosetteSet data;
  std::vector<DenoiseEntry> entries;
};

DenoiseResult denoise_experiment(const DenoiseConfig& cfg);

}  // namespace kteka
