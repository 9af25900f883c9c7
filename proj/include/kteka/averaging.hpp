#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kteka/core.hpp"
#include "kteka/elastic.hpp"

namespace kteka {

enum class Method { Teka, Dba, MedoidDtw, MedoidKdtw, Euclidean };
enum class Measure { Dtw, Kdtw };

std::string to_string(Method m);
std::string to_string(Measure m);
Method parse_method(std::string_view name);
Measure parse_measure(std::string_view name);
/// Measure the method is paired with for 1-NC classification.
Measure default_measure(Method m);
/// True when the method's prototypes depend on nu.
bool uses_nu(Method m);

struct AveragingConfig {
  double nu = 1.0;
  int max_iter = 10;
  Method method = Method::Teka;
  unsigned jobs = 1;

  void validate() const;
};

/// Expected aligned values and expected times of occurrence (1-based) of o
/// given each sample of r.
struct PairExpectations {
  TimeSeries values;
  std::vector<double> times;
};

PairExpectations pair_expectations(const TimeSeries& r, const TimeSeries& o, const KdtwParams& p);

/// Expectations from precomputed row conditionals P (rows: r, columns: o).
PairExpectations expectations_from_conditionals(const Matrix& conditionals, const TimeSeries& o);

/// One centroid refinement against reference r: the mean over the set of
/// pair_expectations(r, o_k), values and times alike.
Centroid teka_update(const TimeSeries& r, const std::vector<TimeSeries>& set, const KdtwParams& p,
                     unsigned jobs = 1);

/// log((1/N) * sum_k kdtw(c, o_k)), evaluated with kdtw_log().
double log_mean_kdtw(const TimeSeries& c, const std::vector<TimeSeries>& set, const KdtwParams& p,
                     unsigned jobs = 1);

struct TekaResult {
  TimeSeries centroid;           ///< uniformly resampled estimate
  Centroid estimate;             ///< retained (values, times) before resampling
  std::vector<double> log_mean_k;  ///< log MeanK of every retained iteration
  std::size_t iterations = 0;    ///< updates evaluated, including a rejected one
  std::size_t medoid_index = 0;  ///< initial reference
};

/// Iterative time-elastic kernel averaging.
///
/// Starts from the KDTW medoid and alternates teka_update() with the mean
/// similarity MeanK = (1/N) sum_k kdtw(c, o_k). Stops at the first update
/// whose MeanK falls below the previous one (that update is discarded) or
/// after cfg.max_iter updates, then resamples the retained estimate.
TekaResult teka(const std::vector<TimeSeries>& set, const AveragingConfig& cfg);

struct DbaResult {
  TimeSeries centroid;
  std::vector<double> inertia;  ///< sum of DTW costs of every retained candidate
  std::size_t iterations = 0;
  std::size_t medoid_index = 0;
};

/// DTW barycenter averaging from the DTW medoid. Each series is stretched
/// or compressed onto the current centroid along its optimal path, then the
/// warped series are averaged sample-wise. Stops when the inertia no longer
/// decreases or after cfg.max_iter updates; returns the best candidate.
DbaResult dba(const std::vector<TimeSeries>& set, const AveragingConfig& cfg);

struct MedoidResult {
  std::size_t index;
  TimeSeries series;
};

/// DTW: minimal summed cost to the other members. KDTW: maximal summed
/// similarity to the other members. Ties go to the lowest index.
MedoidResult medoid(const std::vector<TimeSeries>& set, Measure measure, const KdtwParams& p,
                    unsigned jobs = 1);

/// Sample-wise arithmetic mean of equal-length series.
TimeSeries euclidean_centroid(const std::vector<TimeSeries>& set);

struct Prototype {
  TimeSeries series;
  std::vector<double> trace;  ///< log MeanK (teka) or inertia (dba); empty otherwise
};

/// Builds one prototype for `set` with the configured method.
Prototype average(const std::vector<TimeSeries>& set, const AveragingConfig& cfg);

}  // namespace kteka
