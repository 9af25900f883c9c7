// Acceptance runner: one PASS/FAIL line per criterion.
//
//   kteka_acceptance                  run every criterion
//   kteka_acceptance --criterion ID   run one (exit 0 pass, 1 fail, 77 skip)
//   kteka_acceptance --list

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "kteka/automata.hpp"
#include "kteka/averaging.hpp"
#include "kteka/datagen.hpp"
#include "kteka/elastic.hpp"
#include "kteka/error.hpp"
#include "kteka/eval.hpp"
#include "kteka/io.hpp"
#include "oracle.hpp"

using namespace kteka;
namespace fs = std::filesystem;

namespace {

constexpr int kPass = 0, kFail = 1, kSkip = 77;

struct Outcome {
  int code;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome dtw_oracle() {
  std::mt19937_64 rng(1001);
  const auto t0 = Clock::now();
  int mismatches = 0;
  for (int k = 0; k < 200; ++k) {
    const std::size_t d = testgen::uniform(rng, 1, 2);
    auto x = testgen::random_series(rng, testgen::uniform(rng, 1, 5), d);
    auto y = testgen::random_series(rng, testgen::uniform(rng, 1, 5), d);
    if (dtw(x, y).cost != oracle::dtw_min(x, y)) ++mismatches;
  }
  const double dt = seconds_since(t0);
  return {mismatches == 0 && dt < 5.0 ? kPass : kFail,
          std::to_string(mismatches) + "/200 mismatches, " + fmt("%.3f", dt) + " s (limit 5 s)"};
}

Outcome kdtw_oracle() {
  std::mt19937_64 rng(1002);
  double worst = 0.0, worst_kp = 0.0;
  for (int k = 0; k < 200; ++k) {
    const std::size_t d = testgen::uniform(rng, 1, 2);
    auto x = testgen::random_series(rng, testgen::uniform(rng, 1, 4), d);
    auto y = testgen::random_series(rng, testgen::uniform(rng, 1, 4), d);
    const double nu = paper_nu_grid()[testgen::uniform(rng, 0, 6)];
    auto r = kdtw_unchecked(x, y, KdtwParams(nu));
    worst = std::max(worst, testgen::rel_err(r.k_term, oracle::k_term(x, y, nu)));
    worst_kp = std::max(worst_kp, testgen::rel_err(r.kp_term, oracle::kp_term(x, y, nu)));
  }
  return {worst <= 1e-12 ? kPass : kFail,
          "max rel err k_term " + fmt("%.2e", worst) + " (limit 1e-12); kp_term " + fmt("%.2e", worst_kp)};
}

Outcome forward_identity() {
  std::mt19937_64 rng(1003);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t d = testgen::uniform(rng, 1, 3);
    auto x = testgen::random_series(rng, testgen::uniform(rng, 1, 30), d);
    auto y = testgen::random_series(rng, testgen::uniform(rng, 1, 30), d);
    KdtwParams p(std::uniform_real_distribution<double>(0.01, 1.0)(rng));
    const auto a = forward(x, y, p);
    const double lk = kdtw_log(x, y, p).k_term;
    // Compare in the log domain: relative error of the value is |delta log|.
    worst = std::max(worst, std::abs(a.log_value(x.length() - 1, y.length() - 1) - lk));
  }
  return {worst <= 1e-12 ? kPass : kFail, "max rel err " + fmt("%.2e", worst) + " over 100 pairs (limit 1e-12)"};
}

Outcome row_normalization() {
  std::mt19937_64 rng(1004);
  double worst_sum = 0.0, worst_scale = 0.0;
  for (int k = 0; k < 50; ++k) {
    auto x = testgen::random_series(rng, testgen::uniform(rng, 2, 40), 1);
    auto y = testgen::random_series(rng, testgen::uniform(rng, 2, 40), 1);
    KdtwParams p(paper_nu_grid()[testgen::uniform(rng, 0, 8)]);
    const Matrix base = row_conditionals(posterior(x, y, p));
    for (std::size_t t = 0; t < base.rows(); ++t) {
      double s = 0.0;
      for (double v : base.row(t)) s += v;
      worst_sum = std::max(worst_sum, std::abs(s - 1.0));
    }
    for (double lambda : {1e-6, 1.0, 1e6}) {
      const Matrix P = row_conditionals(posterior(x, y, p, AutomatonOptions{lambda}));
      for (std::size_t i = 0; i < P.data().size(); ++i)
        worst_scale = std::max(worst_scale, std::abs(P.data()[i] - base.data()[i]));
    }
  }
  const bool ok = worst_sum <= 1e-12 && worst_scale <= 1e-10;
  return {ok ? kPass : kFail, "max |row sum - 1| " + fmt("%.2e", worst_sum) + " (limit 1e-12); max change under " +
                                  "emission scale 1e-6/1/1e6 " + fmt("%.2e", worst_scale) + " (limit 1e-10)"};
}

Outcome psd() {
  std::mt19937_64 rng(1005);
  int failures = 0;
  double min_eig = INFINITY;
  for (int s = 0; s < 50; ++s) {
    const std::size_t n = testgen::uniform(rng, 1, 10);
    const std::size_t d = testgen::uniform(rng, 1, 2);
    std::vector<TimeSeries> set;
    for (std::size_t i = 0; i < n; ++i) set.push_back(testgen::random_series(rng, testgen::uniform(rng, 1, 20), d));
    const double nu = paper_nu_grid()[testgen::uniform(rng, 0, paper_nu_grid().size() - 1)];
    const Matrix g = gram(set, KdtwParams(nu));
    Eigen::MatrixXd G(n, n);
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) G(i, j) = g(i, j);
      trace += g(i, i);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G / (trace / static_cast<double>(n)), Eigen::EigenvaluesOnly);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    G.diagonal().array() += 1e-10 * trace / static_cast<double>(n);
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) ++failures;
  }
  return {failures == 0 ? kPass : kFail, std::to_string(failures) + "/50 Cholesky failures; smallest normalized " +
                                             "eigenvalue " + fmt("%.3e", min_eig)};
}

Outcome cbf_events() {
  const auto t0 = Clock::now();
  CbfSpec spec;
  spec.per_class = 100;
  spec.seed = 7;
  const auto ds = gen_cbf(spec);
  LooOptions lo;
  lo.fast = true;
  const auto sel = loo_select_nu(ds, Method::Teka, paper_nu_grid(), lo);
  AveragingConfig cfg;
  cfg.nu = sel.nu;
  bool ok = true;
  std::string detail = "nu " + fmt("%g", sel.nu) + " (fast LOO error " + fmt("%.4f", sel.loo_error) + ");";
  const char* names[3] = {"cylinder", "bell", "funnel"};
  for (int c = 0; c < 3; ++c) {
    const auto r = teka(ds.of_class(c), cfg);
    const auto sup = support_interval(r.centroid.channel(0), resampled_axis(r.estimate), 0.1);
    const bool on_ok = std::abs(sup.onset - 24.0) <= 4.0, off_ok = std::abs(sup.offset - 88.0) <= 4.0;
    ok = ok && on_ok && off_ok;
    detail += std::string(" ") + names[c] + " onset " + fmt("%.1f", sup.onset) + (on_ok ? "" : "(!)") + " offset " +
              fmt("%.1f", sup.offset) + (off_ok ? "" : "(!)") + ";";
  }
  const double dt = seconds_since(t0);
  ok = ok && dt < 600.0;
  return {ok ? kPass : kFail, detail + " target 24+-4 / 88+-4; " + fmt("%.1f", dt) + " s (limit 600 s)"};
}

std::optional<std::pair<LabeledDataset, LabeledDataset>> load_ucr(const fs::path& root,
                                                                 const std::vector<std::string>& names) {
  for (const auto& n : names)
    for (const char* ext : {".tsv", ".txt", ""}) {
      const fs::path tr = root / n / (n + "_TRAIN" + ext), te = root / n / (n + "_TEST" + ext);
      if (fs::exists(tr) && fs::exists(te)) return std::make_pair(parse_ucr(tr), parse_ucr(te));
    }
  return std::nullopt;
}

// Test labels follow the train token map.
LabeledDataset align_labels(const LabeledDataset& train, const LabeledDataset& test) {
  std::vector<int> labels;
  for (int l : test.labels) {
    auto it = std::find(train.class_names.begin(), train.class_names.end(), test.class_names[l]);
    if (it == train.class_names.end()) throw InputError("test class missing from train");
    labels.push_back(static_cast<int>(it - train.class_names.begin()));
  }
  return LabeledDataset(test.series, labels, test.name, train.class_names);
}

double test_error(const LabeledDataset& train, const LabeledDataset& test, Method m, bool fast) {
  LooOptions lo;
  lo.fast = fast;
  const auto sel = loo_select_nu(train, m, paper_nu_grid(), lo);
  AveragingConfig cfg;
  cfg.method = m;
  cfg.nu = sel.nu;
  return classify_1nc(build_prototypes(train, cfg), test, default_measure(m), KdtwParams(sel.nu)).error_rate;
}

Outcome table1() {
  const char* dir = std::getenv("KTEKA_UCR_DIR");
  if (!dir || !fs::is_directory(dir)) {
    // Informational proxy on generated data; not asserted.
    CbfSpec tr, te;
    tr.per_class = 10;
    tr.seed = 1;
    te.per_class = 100;
    te.seed = 2;
    const auto train = gen_cbf(tr), test = gen_cbf(te);
    const double e_teka = test_error(train, test, Method::Teka, true);
    const double e_dtwm = test_error(train, test, Method::MedoidDtw, true);
    return {kSkip, "KTEKA_UCR_DIR not set; generated-CBF proxy (30 train / 300 test): TEKA " +
                       fmt("%.2f%%", 100 * e_teka) + ", DTW-M " + fmt("%.2f%%", 100 * e_dtwm)};
  }
  const auto cbf = load_ucr(dir, {"CBF"});
  const auto sc = load_ucr(dir, {"SyntheticControl", "Synthetic_Control", "synthetic_control"});
  if (!cbf || !sc) return {kSkip, std::string("CBF or SyntheticControl not found under ") + dir};
  const auto cbf_test = align_labels(cbf->first, cbf->second);
  const auto sc_test = align_labels(sc->first, sc->second);
  const double cbf_teka = test_error(cbf->first, cbf_test, Method::Teka, false);
  const double cbf_dtwm = test_error(cbf->first, cbf_test, Method::MedoidDtw, false);
  const double sc_teka = test_error(sc->first, sc_test, Method::Teka, true);
  const bool ok = cbf_teka <= 0.06 && std::abs(100 * cbf_dtwm - 7.89) <= 3.0 && cbf_teka < cbf_dtwm && sc_teka <= 0.05;
  return {ok ? kPass : kFail, "CBF TEKA " + fmt("%.2f%%", 100 * cbf_teka) + " (<= 6%), CBF DTW-M " +
                                  fmt("%.2f%%", 100 * cbf_dtwm) + " (7.89 +- 3), SyntheticControl TEKA " +
                                  fmt("%.2f%%", 100 * sc_teka) + " (<= 5%, fast LOO)"};
}

Outcome denoising() {
  std::vector<double> teka_gains;
  int ordered = 0;
  double mean_e = 0.0, mean_d = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    DenoiseConfig cfg;
    cfg.rosette.seed = seed;
    const auto r = denoise_experiment(cfg);
    double g[3];
    for (int m = 0; m < 3; ++m) g[m] = r.entries[m].gain;
    teka_gains.push_back(g[0]);
    mean_e += g[1] / 10.0;
    mean_d += g[2] / 10.0;
    if (g[0] > g[1] && g[1] > g[2]) ++ordered;
  }
  auto sorted = teka_gains;
  std::sort(sorted.begin(), sorted.end());
  const double med = 0.5 * (sorted[4] + sorted[5]);
  const bool ok = med >= 3.0 && ordered >= 8;
  return {ok ? kPass : kFail, "median TEKA gain " + fmt("%.2f", med) + " dB (>= 3), ordering TEKA>Euclidean>DBA in " +
                                  std::to_string(ordered) + "/10 (>= 8); mean Euclidean " + fmt("%.2f", mean_e) +
                                  " dB, mean DBA " + fmt("%.2f", mean_d) + " dB (reference 3.88/1.58/1.17)"};
}

Outcome complexity() {
  // Random walks drift apart with L and push a growing share of pairs onto
  // the log-domain path, which measures the mix rather than the cost per cell.
  const KdtwParams p(1.0);
  std::vector<double> times;
  for (std::size_t len : {128u, 256u, 512u}) {
    CbfSpec spec;
    spec.per_class = 10;
    spec.length = len;
    spec.seed = 1009;
    const auto set = gen_cbf(spec).of_class(0);
    double best = INFINITY;
    for (int rep = 0; rep < 5; ++rep) {
      const auto t0 = Clock::now();
      const Centroid c = teka_update(set[0], set, p, 1);
      const double mk = log_mean_kdtw(c.values, set, p, 1);
      best = std::min(best, seconds_since(t0));
      if (!std::isfinite(mk)) return {kFail, "non-finite MeanK"};
    }
    times.push_back(best);
  }
  const double r1 = times[1] / times[0], r2 = times[2] / times[1];
  const bool ok = std::abs(r1 - 4.0) <= 1.2 && std::abs(r2 - 4.0) <= 1.2;
  return {ok ? kPass : kFail, "iteration time " + fmt("%.3f", times[0]) + "/" + fmt("%.3f", times[1]) + "/" +
                                  fmt("%.3f", times[2]) + " s; ratios " + fmt("%.2f", r1) + ", " + fmt("%.2f", r2) +
                                  " (4 +- 30%)"};
}

Outcome loop_contracts() {
  std::vector<std::vector<TimeSeries>> sets;
  CbfSpec spec;
  spec.per_class = 20;
  spec.seed = 11;
  const auto ds = gen_cbf(spec);
  for (int c = 0; c < 3; ++c) sets.push_back(ds.of_class(c));
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    RosetteSpec rs;
    rs.seed = seed;
    sets.push_back(gen_rosette(rs).noisy);
  }
  int violations = 0;
  std::size_t max_teka = 0, max_dba = 0;
  for (const auto& set : sets)
    for (double nu : {0.1, 1.0}) {
      AveragingConfig cfg;
      cfg.nu = nu;
      const auto t = teka(set, cfg);
      for (std::size_t i = 1; i < t.log_mean_k.size(); ++i) violations += t.log_mean_k[i] < t.log_mean_k[i - 1];
      violations += t.iterations > 10 || t.log_mean_k.size() > 10;
      max_teka = std::max(max_teka, t.iterations);
      const auto d = dba(set, cfg);
      for (std::size_t i = 1; i < d.inertia.size(); ++i) violations += d.inertia[i] > d.inertia[i - 1];
      violations += d.iterations > 10;
      max_dba = std::max(max_dba, d.iterations);
    }
  return {violations == 0 ? kPass : kFail, std::to_string(violations) + " violations over " +
                                               std::to_string(2 * sets.size()) + " runs; max iterations TEKA " +
                                               std::to_string(max_teka) + ", DBA " + std::to_string(max_dba) +
                                               " (cap 10)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("kteka_accept_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  auto P = [&](const std::string& n) { return (dir / n).string(); };
  std::ostringstream sink;
  auto run = [&](std::vector<std::string> args) { return kteka::cli::cmd_dispatch(args, sink, sink); };

  struct Case {
    std::string name;
    std::vector<std::string> args;  // with "@" standing for the output stem
    std::vector<std::string> outputs;
  };
  // Inputs shared by the commands below.
  if (run({"gen", "cbf", "--per-class", "6", "--seed", "5", "--out", P("train.tsv")}) ||
      run({"gen", "cbf", "--per-class", "6", "--seed", "6", "--out", P("test.tsv")}) ||
      run({"gen", "rosette", "--instances", "4", "--clean", P("ros_clean.csv"), "--noisy", P("ros_noisy.csv")}))
    return {kFail, "could not generate inputs: " + sink.str()};

  const std::vector<Case> cases{
      {"gen cbf", {"gen", "cbf", "--per-class", "10", "--seed", "9", "--out", "@.tsv", "--events", "@.ev.csv"},
       {".tsv", ".ev.csv"}},
      {"gen rosette", {"gen", "rosette", "--seed", "3", "--noisy", "@.noisy.csv", "--clean", "@.clean.csv"},
       {".noisy.csv", ".clean.csv"}},
      {"average", {"average", "--method", "teka", "--nu", "0.5", "--in", P("train.tsv"), "--label", "2", "--out",
                   "@.csv"}, {".csv", ".csv.trace.json"}},
      {"classify", {"classify", "--method", "teka", "--train", P("train.tsv"), "--test", P("test.tsv"), "--grid",
                    "0.1,1", "--max-iter", "3", "--out", "@.json", "--csv", "@.csv"}, {".json", ".csv"}},
      {"posterior", {"posterior", "--demo", "--demo-length", "40", "--kind", "log", "--out", "@.csv", "--pgm",
                     "@.pgm"}, {".csv", ".pgm"}},
      {"denoise", {"denoise", "--instances", "4", "--max-iter", "3", "--out", "@.json", "--centroids", "@.c"},
       {".json", ".c_teka.csv", ".c_euclidean.csv", ".c_dba.csv"}},
      {"spectra", {"spectra", "--in", P("ros_clean.csv"), "--dim", "2", "--channel", "1", "--out", "@.csv"},
       {".csv"}},
  };

  int bad = 0;
  std::string detail;
  for (const auto& c : cases) {
    auto subst = [&](const std::string& stem) {
      std::vector<std::string> a{"--jobs", "1"};
      for (auto s : c.args) {
        if (!s.empty() && s[0] == '@') s = P(stem) + s.substr(1);
        a.push_back(s);
      }
      return a;
    };
    const std::string stem = c.name.substr(c.name.find_last_of(' ') + 1) + "_a";
    const std::string stem_b = c.name.substr(c.name.find_last_of(' ') + 1) + "_b";
    if (run(subst(stem)) != 0) {
      ++bad;
      detail += " " + c.name + ": first run failed;";
      continue;
    }
    // The manifest sits next to the first recorded output.
    fs::path manifest = P(stem) + c.outputs.front() + ".manifest.json";
    if (!fs::exists(manifest)) {
      ++bad;
      detail += " " + c.name + ": no manifest;";
      continue;
    }
    // Replay with 4 workers, redirecting every output option to the b stem.
    std::vector<std::string> replay{"--from-manifest", manifest.string(), "--jobs", "4",
                                    "--manifest", P(stem_b) + ".manifest.json"};
    const auto first = subst(stem);
    for (std::size_t i = 0; i + 1 < first.size(); ++i)
      if (first[i].rfind("--", 0) == 0 && first[i + 1].rfind(P(stem), 0) == 0) {
        replay.push_back(first[i]);
        replay.push_back(P(stem_b) + first[i + 1].substr(P(stem).size()));
      }
    if (run(replay) != 0) {
      ++bad;
      detail += " " + c.name + ": replay failed;";
      continue;
    }
    for (const auto& o : c.outputs)
      if (slurp(P(stem) + o) != slurp(P(stem_b) + o) || slurp(P(stem) + o).empty()) {
        ++bad;
        detail += " " + c.name + ": " + o + " differs;";
      }
  }
  fs::remove_all(dir);
  return {bad == 0 ? kPass : kFail,
          std::to_string(cases.size()) + " commands replayed from manifests with --jobs 4 vs 1;" +
              (bad ? detail : std::string(" all outputs bitwise identical"))};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& registry() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> r{
      {"dtw_oracle", dtw_oracle},         {"kdtw_oracle", kdtw_oracle}, {"forward_identity", forward_identity},
      {"row_normalization", row_normalization}, {"psd", psd},           {"cbf_events", cbf_events},
      {"table1", table1},                 {"denoising", denoising},     {"complexity", complexity},
      {"loop_contracts", loop_contracts}, {"determinism", determinism},
  };
  return r;
}

int report(const std::string& id, const std::function<Outcome()>& fn) {
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {kFail, std::string("exception: ") + e.what()};
  }
  const char* tag = o.code == kPass ? "PASS" : o.code == kSkip ? "SKIP" : "FAIL";
  std::cout << tag << ' ' << id << ": " << o.detail << std::endl;
  return o.code;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.size() == 1 && args[0] == "--list") {
    for (const auto& [id, fn] : registry()) std::cout << id << '\n';
    return 0;
  }
  if (args.size() == 2 && args[0] == "--criterion") {
    for (const auto& [id, fn] : registry())
      if (id == args[1]) return report(id, fn);
    std::cerr << "unknown criterion '" << args[1] << "'\n";
    return 2;
  }
  if (!args.empty()) {
    std::cerr << "usage: kteka_acceptance [--list | --criterion ID]\n";
    return 2;
  }
  int failed = 0;
  for (const auto& [id, fn] : registry()) failed += report(id, fn) == kFail;
  return failed ? 1 : 0;
}
