#include "kteka/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <string>

#include "kteka/automata.hpp"
#include "kteka/error.hpp"
#include "kteka/parallel.hpp"
#include "logmath.hpp"

namespace kteka {

namespace {

void require_nonempty(const std::vector<TimeSeries>& set, const char* what) {
  if (set.empty()) throw InputError(std::string(what) + ": empty series set");
  for (const auto& s : set)
    if (s.dim() != set.front().dim()) throw InputError(std::string(what) + ": series dimensions differ");
}

// Re-throw an error raised for member k with its index attached.
[[noreturn]] void rethrow_with_index(std::size_t k) {
  try {
    throw;
  } catch (const DegenerateError& e) {
    throw DegenerateError("series " + std::to_string(k) + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError("series " + std::to_string(k) + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError("series " + std::to_string(k) + ": " + e.what());
  }
}

// Stretch/compress o onto the L samples of c along the DTW path.
std::vector<double> warp_onto(const TimeSeries& c, const TimeSeries& o, const WarpPath& path) {
  const std::size_t len = c.length(), d = c.dim();
  std::vector<double> sum(len * d, 0.0);
  std::vector<std::size_t> count(len, 0);
  for (auto [i, j] : path.steps) {
    auto s = o.sample(j);
    for (std::size_t k = 0; k < d; ++k) sum[i * d + k] += s[k];
    ++count[i];
  }
  for (std::size_t i = 0; i < len; ++i)
    for (std::size_t k = 0; k < d; ++k) sum[i * d + k] /= static_cast<double>(count[i]);
  return sum;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::Teka: return "teka";
    case Method::Dba: return "dba";
    case Method::MedoidDtw: return "medoid_dtw";
    case Method::MedoidKdtw: return "medoid_kdtw";
    case Method::Euclidean: return "euclidean";
  }
  return "?";
}

std::string to_string(Measure m) { return m == Measure::Dtw ? "dtw" : "kdtw"; }

Method parse_method(std::string_view name) {
  for (Method m : {Method::Teka, Method::Dba, Method::MedoidDtw, Method::MedoidKdtw, Method::Euclidean})
    if (name == to_string(m)) return m;
  throw ConfigError("unknown method '" + std::string(name) +
                    "' (expected teka, dba, medoid_dtw, medoid_kdtw or euclidean)");
}

Measure parse_measure(std::string_view name) {
  if (name == "dtw") return Measure::Dtw;
  if (name == "kdtw") return Measure::Kdtw;
  throw ConfigError("unknown measure '" + std::string(name) + "' (expected dtw or kdtw)");
}

Measure default_measure(Method m) {
  switch (m) {
    case Method::Teka:
    case Method::MedoidKdtw: return Measure::Kdtw;
    default: return Measure::Dtw;
  }
}

bool uses_nu(Method m) { return m == Method::Teka || m == Method::MedoidKdtw; }

void AveragingConfig::validate() const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw ConfigError("nu must be finite and positive");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
}

PairExpectations expectations_from_conditionals(const Matrix& P, const TimeSeries& o) {
  if (P.cols() != o.length()) throw InputError("conditionals do not match series length");
  const std::size_t len = P.rows(), d = o.dim();
  std::vector<double> vals(len * d, 0.0), times(len, 0.0);
  for (std::size_t t = 0; t < len; ++t) {
    auto row = P.row(t);
    double et = 0.0;
    for (std::size_t u = 0; u < row.size(); ++u) {
      auto s = o.sample(u);
      for (std::size_t k = 0; k < d; ++k) vals[t * d + k] += row[u] * s[k];
      et += row[u] * static_cast<double>(u + 1);
    }
    times[t] = et;
  }
  return {TimeSeries(len, d, std::move(vals)), std::move(times)};
}

PairExpectations pair_expectations(const TimeSeries& r, const TimeSeries& o, const KdtwParams& p) {
  return expectations_from_conditionals(row_conditionals(posterior(r, o, p)), o);
}

Centroid teka_update(const TimeSeries& r, const std::vector<TimeSeries>& set, const KdtwParams& p,
                     unsigned jobs) {
  require_nonempty(set, "teka_update");
  std::vector<std::optional<PairExpectations>> parts(set.size());
  parallel_for(set.size(), jobs, [&](std::size_t k) {
    try {
      parts[k] = pair_expectations(r, set[k], p);
    } catch (const Error&) {
      rethrow_with_index(k);
    }
  });

  const std::size_t len = r.length(), d = r.dim();
  std::vector<double> vals(len * d, 0.0), times(len, 0.0);
  for (const auto& part : parts) {
    auto v = part->values.values();
    for (std::size_t q = 0; q < vals.size(); ++q) vals[q] += v[q];
    for (std::size_t t = 0; t < len; ++t) times[t] += part->times[t];
  }
  const double inv = 1.0 / static_cast<double>(set.size());
  for (double& v : vals) v *= inv;
  for (double& t : times) t *= inv;
  return Centroid(TimeSeries(len, d, std::move(vals)), std::move(times));
}

double log_mean_kdtw(const TimeSeries& c, const std::vector<TimeSeries>& set, const KdtwParams& p,
                     unsigned jobs) {
  require_nonempty(set, "log_mean_kdtw");
  std::vector<double> logs(set.size());
  parallel_for(set.size(), jobs, [&](std::size_t k) { logs[k] = kdtw_log(c, set[k], p).total; });
  double acc = kNegInf;
  for (double v : logs) acc = log_add(acc, v);
  return acc - std::log(static_cast<double>(set.size()));
}

MedoidResult medoid(const std::vector<TimeSeries>& set, Measure measure, const KdtwParams& p,
                    unsigned jobs) {
  require_nonempty(set, "medoid");
  const std::size_t count = set.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = i + 1; j < count; ++j) pairs.emplace_back(i, j);
  std::vector<double> score(pairs.size());
  parallel_for(pairs.size(), jobs, [&](std::size_t q) {
    auto [i, j] = pairs[q];
    score[q] = measure == Measure::Dtw ? dtw_cost(set[i], set[j]) : kdtw_log(set[i], set[j], p).total;
  });
  Matrix m(count, count, measure == Measure::Dtw ? 0.0 : kNegInf);
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    auto [i, j] = pairs[q];
    m(i, j) = m(j, i) = score[q];
  }

  std::size_t best = 0;
  double best_score = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    double s = measure == Measure::Dtw ? 0.0 : kNegInf;
    for (std::size_t j = 0; j < count; ++j) {
      if (j == i) continue;
      s = measure == Measure::Dtw ? s + m(i, j) : log_add(s, m(i, j));
    }
    const bool better = measure == Measure::Dtw ? s < best_score : s > best_score;
    if (i == 0 || better) {
      best = i;
      best_score = s;
    }
  }
  return {best, set[best]};
}

TimeSeries euclidean_centroid(const std::vector<TimeSeries>& set) {
  require_nonempty(set, "euclidean_centroid");
  const std::size_t len = set.front().length(), d = set.front().dim();
  std::vector<double> acc(len * d, 0.0);
  for (const auto& s : set) {
    if (s.length() != len) throw InputError("euclidean_centroid: series lengths differ");
    auto v = s.values();
    for (std::size_t q = 0; q < acc.size(); ++q) acc[q] += v[q];
  }
  const double inv = 1.0 / static_cast<double>(set.size());
  for (double& v : acc) v *= inv;
  return TimeSeries(len, d, std::move(acc));
}

TekaResult teka(const std::vector<TimeSeries>& set, const AveragingConfig& cfg) {
  require_nonempty(set, "teka");
  cfg.validate();
  const KdtwParams p(cfg.nu);
  const auto init = medoid(set, Measure::Kdtw, p, cfg.jobs);

  const TimeSeries& m0 = init.series;
  std::vector<double> t0(m0.length());
  for (std::size_t t = 0; t < t0.size(); ++t) t0[t] = static_cast<double>(t + 1);
  Centroid current(m0, std::move(t0));
  double mean0 = kNegInf;

  TekaResult out{m0, current, {}, 0, init.index};
  for (int it = 0; it < cfg.max_iter; ++it) {
    Centroid next = teka_update(current.values, set, p, cfg.jobs);
    const double mean = log_mean_kdtw(next.values, set, p, cfg.jobs);
    ++out.iterations;
    if (mean < mean0) break;
    out.log_mean_k.push_back(mean);
    mean0 = mean;
    current = std::move(next);
  }
  out.estimate = current;
  if (current.length() < 2) {
    out.centroid = current.values;
  } else {
    out.centroid = resample_uniform(current);
  }
  return out;
}

DbaResult dba(const std::vector<TimeSeries>& set, const AveragingConfig& cfg) {
  require_nonempty(set, "dba");
  cfg.validate();
  const auto init = medoid(set, Measure::Dtw, KdtwParams(cfg.nu), cfg.jobs);
  TimeSeries best = init.series;
  double best_inertia = std::numeric_limits<double>::infinity();
  DbaResult out{best, {}, 0, init.index};

  TimeSeries c = best;
  for (int it = 0; it < cfg.max_iter; ++it) {
    std::vector<double> cost(set.size());
    std::vector<std::vector<double>> warped(set.size());
    parallel_for(set.size(), cfg.jobs, [&](std::size_t k) {
      auto r = dtw(c, set[k]);
      cost[k] = r.cost;
      warped[k] = warp_onto(c, set[k], r.path);
    });
    double inertia = 0.0;
    for (double v : cost) inertia += v;
    ++out.iterations;
    if (!(inertia < best_inertia)) break;
    best_inertia = inertia;
    best = c;
    out.inertia.push_back(inertia);

    std::vector<double> acc(c.length() * c.dim(), 0.0);
    for (const auto& w : warped)
      for (std::size_t q = 0; q < acc.size(); ++q) acc[q] += w[q];
    const double inv = 1.0 / static_cast<double>(set.size());
    for (double& v : acc) v *= inv;
    c = TimeSeries(c.length(), c.dim(), std::move(acc));
  }
  out.centroid = best;
  return out;
}

Prototype average(const std::vector<TimeSeries>& set, const AveragingConfig& cfg) {
  cfg.validate();
  switch (cfg.method) {
    case Method::Teka: {
      auto r = teka(set, cfg);
      return {std::move(r.centroid), std::move(r.log_mean_k)};
    }
    case Method::Dba: {
      auto r = dba(set, cfg);
      return {std::move(r.centroid), std::move(r.inertia)};
    }
    case Method::MedoidDtw: return {medoid(set, Measure::Dtw, KdtwParams(cfg.nu), cfg.jobs).series, {}};
    case Method::MedoidKdtw: return {medoid(set, Measure::Kdtw, KdtwParams(cfg.nu), cfg.jobs).series, {}};
    case Method::Euclidean: return {euclidean_centroid(set), {}};
  }
  throw ConfigError("unknown method");
}

}  // namespace kteka
