#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kteka/automata.hpp"
#include "kteka/averaging.hpp"
#include "kteka/datagen.hpp"
#include "kteka/error.hpp"
#include "kteka/eval.hpp"
#include "kteka/io.hpp"
#include "kteka/parallel.hpp"

namespace kteka::cli {

namespace {

using nlohmann::json;

// Writes to `path`, or to `fallback` when path is empty or "-".
void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& fn) {
  if (path.empty() || path == "-") {
    fn(fallback);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open '" + path + "' for writing");
  fn(f);
  if (!f) throw InputError("write failed for '" + path + "'");
}

void emit_json(const std::string& path, std::ostream& fallback, const json& j) {
  emit(path, fallback, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

LabeledDataset load(const std::string& path, std::size_t dim) {
  if (dim == 0) throw ConfigError("--dim must be >= 1");
  return dim == 1 ? parse_ucr(path) : parse_multivariate_csv(path, dim);
}

char separator_for(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".tsv") == 0 ? '\t' : ',';
}

std::vector<double> parse_grid(const std::string& text) {
  if (text == "paper") return paper_nu_grid();
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad --grid value '" + tok + "'");
    }
    if (used != tok.size() || !(v > 0.0) || !std::isfinite(v)) throw ConfigError("bad --grid value '" + tok + "'");
    grid.push_back(v);
  }
  if (grid.empty()) throw ConfigError("empty --grid");
  return grid;
}

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(parse_method(tok));
  if (out.empty()) throw ConfigError("empty --methods");
  return out;
}

json report_json(const EvalReport& r) {
  return json{{"error_rate", r.error_rate},
              {"precision", r.precision},
              {"recall", r.recall},
              {"f1", r.f1},
              {"class_precision", r.class_precision},
              {"class_recall", r.class_recall},
              {"class_f1", r.class_f1},
              {"confusion", r.confusion},
              {"predictions", r.predictions},
              {"nu_selected", r.nu_selected},
              {"method", r.method},
              {"measure", r.measure},
              {"seed", r.seed},
              {"loo_error", r.loo_error},
              {"grid", r.grid},
              {"grid_errors", r.grid_errors},
              {"warnings", r.warnings}};
}

void report_csv(std::ostream& o, const EvalReport& r, const std::vector<std::string>& names) {
  o << "metric,value\n";
  o << "error_rate," << format_double(r.error_rate) << '\n';
  o << "precision," << format_double(r.precision) << '\n';
  o << "recall," << format_double(r.recall) << '\n';
  o << "f1," << format_double(r.f1) << '\n';
  o << "nu_selected," << format_double(r.nu_selected) << '\n';
  o << "loo_error," << format_double(r.loo_error) << '\n';
  for (std::size_t c = 0; c < r.confusion.size(); ++c) {
    const std::string name = c < names.size() ? names[c] : std::to_string(c);
    o << "precision[" << name << "]," << format_double(r.class_precision[c]) << '\n';
    o << "recall[" << name << "]," << format_double(r.class_recall[c]) << '\n';
    for (std::size_t k = 0; k < r.confusion.size(); ++k) {
      const std::string pred = k < names.size() ? names[k] : std::to_string(k);
      o << "confusion[" << name << "][" << pred << "]," << r.confusion[c][k] << '\n';
    }
  }
}

// Positive half-wave against one period of a sine, both on `len` samples.
std::pair<TimeSeries, TimeSeries> demo_pair(std::size_t len) {
  std::vector<double> half(len), sine(len);
  for (std::size_t t = 0; t < len; ++t) {
    const double u = static_cast<double>(t) / static_cast<double>(len - 1);
    half[t] = std::max(0.0, std::sin(2.0 * std::numbers::pi * u));
    sine[t] = std::sin(2.0 * std::numbers::pi * u);
  }
  return {TimeSeries::scalar(std::move(half)), TimeSeries::scalar(std::move(sine))};
}

void write_matrix_csv(std::ostream& o, const Matrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) o << ',';
      o << format_double(m(r, c));
    }
    o << '\n';
  }
}

// Binary 8-bit PGM; finite log values mapped linearly from [min, max] to
// [0, 255], -inf to 0.
void write_pgm(std::ostream& o, const Matrix& logs) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : logs.data())
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  o << "P5\n" << logs.cols() << ' ' << logs.rows() << "\n255\n";
  for (std::size_t r = 0; r < logs.rows(); ++r)
    for (std::size_t c = 0; c < logs.cols(); ++c) {
      const double v = logs(r, c);
      long g = 0;
      if (std::isfinite(v)) g = hi > lo ? std::lround(255.0 * (v - lo) / (hi - lo)) : 255;
      o.put(static_cast<char>(static_cast<unsigned char>(std::clamp(g, 0L, 255L))));
    }
}

struct Manifest {
  std::string path;
  std::string command;
  std::vector<std::string> argv;
  std::optional<std::uint64_t> seed;
};

json options_json(const CLI::App* app) {
  json cfg = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = opt->get_name();
    if (name.empty() || name == "--help" || name == "-h" || name == "--help-all") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      cfg[name] = res.size() == 1 ? json(res.front()) : json(res);
    } else {
      cfg[name] = opt->get_default_str();
    }
  }
  return cfg;
}

std::vector<std::string> expand_manifest(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--from-manifest") {
      if (i + 1 >= args.size()) throw ConfigError("--from-manifest needs a file");
      path = args[++i];
    } else if (args[i].rfind("--from-manifest=", 0) == 0) {
      path = args[i].substr(16);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!path) return args;
  std::ifstream f(*path);
  if (!f) throw InputError("cannot open manifest '" + *path + "'");
  json m;
  try {
    f >> m;
  } catch (const json::exception& e) {
    throw InputError("manifest '" + *path + "' is not valid JSON: " + e.what());
  }
  if (!m.contains("argv") || !m["argv"].is_array()) throw InputError("manifest '" + *path + "' has no argv");
  std::vector<std::string> out = m["argv"].get<std::vector<std::string>>();
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

void set_policy(CLI::App* app) {
  app->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app->fallthrough();
}

void error_line(std::ostream& err, const char* kind, const std::string& msg) {
  err << json{{"error", kind}, {"message", msg}}.dump() << '\n';
}

}  // namespace

int cmd_dispatch(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  try {
    args = expand_manifest(raw_args);
  } catch (const Error& e) {
    error_line(err, "input", e.what());
    return kExitInput;
  }

  CLI::App app{"Time-elastic averaging toolkit: KDTW, forward-backward alignment, TEKA", "kteka"};
  set_policy(&app);
  app.require_subcommand(1);
  unsigned jobs_opt = 0;
  std::string manifest_opt;
  std::string from_manifest_unused;
  app.add_option("--jobs,-j", jobs_opt, "Worker threads (0: KTEKA_JOBS or hardware concurrency)");
  app.add_option("--manifest", manifest_opt, "Manifest path (default: <output>.manifest.json)");
  app.add_option("--from-manifest", from_manifest_unused, "Replay the arguments recorded in a manifest");
  app.set_version_flag("--version", std::string(KTEKA_VERSION));

  // gen
  auto* gen = app.add_subcommand("gen", "Generate synthetic data sets");
  set_policy(gen);
  gen->require_subcommand(1);

  CbfSpec cbf;
  std::string cbf_out, cbf_events;
  auto* gen_cbf_cmd = gen->add_subcommand("cbf", "Cylinder-Bell-Funnel series (UCR format)");
  set_policy(gen_cbf_cmd);
  gen_cbf_cmd->add_option("--per-class", cbf.per_class, "Instances per class")->capture_default_str();
  gen_cbf_cmd->add_option("--length", cbf.length, "Series length")->capture_default_str();
  gen_cbf_cmd->add_option("--seed", cbf.seed, "Random seed")->capture_default_str();
  gen_cbf_cmd->add_flag("--noise-free", cbf.noise_free, "Force eta = 0 and epsilon = 0");
  gen_cbf_cmd->add_option("--out,-o", cbf_out, "Output file (.tsv: tab separated); default stdout");
  gen_cbf_cmd->add_option("--events", cbf_events, "Optional CSV of the drawn (label, a, b, eta)");

  RosetteSpec ros;
  std::string ros_clean, ros_noisy;
  auto add_rosette_opts = [&](CLI::App* sub) {
    sub->add_option("--instances", ros.n_instances, "Number of instances")->capture_default_str();
    sub->add_option("--f0", ros.f0, "Base frequency (Hz)")->capture_default_str();
    sub->add_option("--amplitude", ros.amplitude, "A0")->capture_default_str();
    sub->add_option("--sample-rate", ros.sample_rate, "Sampling rate (Hz)")->capture_default_str();
    sub->add_option("--duration", ros.duration, "Seconds (0: two periods)")->capture_default_str();
    sub->add_option("--snr-db", ros.snr_db, "Input SNR (dB)")->capture_default_str();
    sub->add_option("--seed", ros.seed, "Random seed")->capture_default_str();
    sub->add_flag("--no-perturbation", ros.no_perturbation, "Zero amplitude/frequency/phase perturbations");
    sub->add_flag("--no-comb", ros.no_comb, "Drop the spike comb");
  };
  auto* gen_ros_cmd = gen->add_subcommand("rosette", "Noisy 2-D periodic signal instances (d = 2 CSV)");
  set_policy(gen_ros_cmd);
  add_rosette_opts(gen_ros_cmd);
  gen_ros_cmd->add_option("--clean", ros_clean, "Clean instances output");
  gen_ros_cmd->add_option("--noisy", ros_noisy, "Noisy instances output (default stdout)");

  // average
  std::string avg_in, avg_label, avg_out, avg_trace, avg_method = "teka";
  std::size_t avg_dim = 1;
  double avg_nu = 1.0;
  int avg_iter = 10;
  auto* average_cmd = app.add_subcommand("average", "Average the series of one class");
  set_policy(average_cmd);
  average_cmd->add_option("--in,-i", avg_in, "Input data set")->required();
  average_cmd->add_option("--dim", avg_dim, "Sample dimension")->capture_default_str();
  average_cmd->add_option("--label", avg_label, "Class token to average (default: all series)");
  average_cmd->add_option("--method", avg_method, "teka, dba, medoid_dtw, medoid_kdtw or euclidean")
      ->capture_default_str();
  average_cmd->add_option("--nu", avg_nu, "Kernel stiffness")->capture_default_str();
  average_cmd->add_option("--max-iter", avg_iter, "Iteration cap")->capture_default_str();
  average_cmd->add_option("--out,-o", avg_out, "Centroid CSV")->required();
  average_cmd->add_option("--trace", avg_trace, "Trace JSON (default: <out>.trace.json)");

  // classify
  std::string cls_train, cls_test, cls_method = "teka", cls_measure, cls_grid, cls_out, cls_csv;
  std::size_t cls_dim = 1;
  double cls_nu = 1.0;
  int cls_iter = 10;
  bool cls_fast = false;
  std::uint64_t cls_seed = 0;
  auto* classify_cmd = app.add_subcommand("classify", "1-NC classification with LOO stiffness selection");
  set_policy(classify_cmd);
  classify_cmd->add_option("--train", cls_train, "Training set")->required();
  classify_cmd->add_option("--test", cls_test, "Test set")->required();
  classify_cmd->add_option("--dim", cls_dim, "Sample dimension")->capture_default_str();
  classify_cmd->add_option("--method", cls_method, "Prototype method")->capture_default_str();
  classify_cmd->add_option("--measure", cls_measure, "dtw or kdtw (default follows the method)");
  auto* nu_opt = classify_cmd->add_option("--nu", cls_nu, "Fixed stiffness (skips LOO)");
  auto* grid_opt = classify_cmd->add_option("--grid", cls_grid, "'paper' or comma list (default paper)");
  nu_opt->excludes(grid_opt);
  grid_opt->excludes(nu_opt);
  classify_cmd->add_flag("--fast-loo", cls_fast, "Approximate LOO reusing full-train prototypes");
  classify_cmd->add_option("--max-iter", cls_iter, "Iteration cap")->capture_default_str();
  classify_cmd->add_option("--seed", cls_seed, "Recorded in the report")->capture_default_str();
  classify_cmd->add_option("--out,-o", cls_out, "JSON report (default stdout)");
  classify_cmd->add_option("--csv", cls_csv, "CSV report");

  // posterior
  std::string post_x, post_y, post_out, post_pgm, post_kind = "posterior";
  std::size_t post_dim = 1, post_xi = 0, post_yi = 0, post_len = 64;
  double post_nu = 1.0;
  bool post_demo = false;
  auto* posterior_cmd = app.add_subcommand("posterior", "Forward-backward alignment matrix of one pair");
  set_policy(posterior_cmd);
  posterior_cmd->add_option("--x", post_x, "Data set holding x");
  posterior_cmd->add_option("--y", post_y, "Data set holding y");
  posterior_cmd->add_option("--x-index", post_xi, "Row of x in its file")->capture_default_str();
  posterior_cmd->add_option("--y-index", post_yi, "Row of y in its file")->capture_default_str();
  posterior_cmd->add_option("--dim", post_dim, "Sample dimension")->capture_default_str();
  posterior_cmd->add_flag("--demo", post_demo, "Positive half-wave against a sine wave");
  posterior_cmd->add_option("--demo-length", post_len, "Demo series length")->capture_default_str();
  posterior_cmd->add_option("--nu", post_nu, "Kernel stiffness")->capture_default_str();
  posterior_cmd->add_option("--kind", post_kind, "posterior, conditional or log")->capture_default_str();
  posterior_cmd->add_option("--out,-o", post_out, "Matrix CSV (default stdout)");
  posterior_cmd->add_option("--pgm", post_pgm, "8-bit PGM of the log posterior");

  // denoise
  DenoiseConfig dn;
  std::string dn_methods = "teka,euclidean,dba", dn_out, dn_centroids;
  auto* denoise_cmd = app.add_subcommand("denoise", "Rosette denoising experiment");
  set_policy(denoise_cmd);
  add_rosette_opts(denoise_cmd);
  denoise_cmd->add_option("--nu", dn.nu, "Kernel stiffness")->capture_default_str();
  denoise_cmd->add_option("--max-iter", dn.max_iter, "Iteration cap")->capture_default_str();
  denoise_cmd->add_option("--methods", dn_methods, "Comma separated methods")->capture_default_str();
  denoise_cmd->add_option("--out,-o", dn_out, "JSON report (default stdout)");
  denoise_cmd->add_option("--centroids", dn_centroids, "Write <prefix>_<method>.csv centroids");

  // spectra
  std::string sp_in, sp_out;
  std::size_t sp_dim = 1, sp_index = 0, sp_channel = 0;
  double sp_rate = 1.0;
  auto* spectra_cmd = app.add_subcommand("spectra", "Log power spectrum of one channel (Hz, dB)");
  set_policy(spectra_cmd);
  spectra_cmd->add_option("--in,-i", sp_in, "Data set")->required();
  spectra_cmd->add_option("--dim", sp_dim, "Sample dimension")->capture_default_str();
  spectra_cmd->add_option("--index", sp_index, "Series row")->capture_default_str();
  spectra_cmd->add_option("--channel", sp_channel, "Channel")->capture_default_str();
  spectra_cmd->add_option("--sample-rate", sp_rate, "Sampling rate (Hz)")->capture_default_str();
  spectra_cmd->add_option("--out,-o", sp_out, "CSV output (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << KTEKA_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    error_line(err, "usage", e.what());
    err << app.help();
    return kExitInput;
  }

  Manifest manifest;
  manifest.argv = args;
  const unsigned jobs = resolve_jobs(jobs_opt);
  const CLI::App* active = nullptr;

  try {
    if (gen_cbf_cmd->parsed()) {
      active = gen_cbf_cmd;
      manifest.command = "gen cbf";
      manifest.seed = cbf.seed;
      manifest.path = cbf_out;
      const auto sample = gen_cbf_detailed(cbf);
      emit(cbf_out, out, [&](std::ostream& o) { write_dataset(o, sample.data, separator_for(cbf_out)); });
      if (!cbf_events.empty())
        emit(cbf_events, out, [&](std::ostream& o) {
          o << "label,a,b,eta\n";
          for (const auto& e : sample.events)
            o << sample.data.class_names[static_cast<std::size_t>(e.label)] << ',' << e.a << ',' << e.b << ','
              << format_double(e.eta) << '\n';
        });
    } else if (gen_ros_cmd->parsed()) {
      active = gen_ros_cmd;
      manifest.command = "gen rosette";
      manifest.seed = ros.seed;
      manifest.path = !ros_noisy.empty() ? ros_noisy : ros_clean;
      const auto set = gen_rosette(ros);
      auto as_dataset = [](const std::vector<TimeSeries>& s) {
        return LabeledDataset(s, std::vector<int>(s.size(), 0), "rosette");
      };
      if (!ros_clean.empty()) write_dataset(ros_clean, as_dataset(set.clean));
      if (!ros_noisy.empty() || ros_clean.empty())
        emit(ros_noisy, out, [&](std::ostream& o) { write_dataset(o, as_dataset(set.noisy)); });
    } else if (average_cmd->parsed()) {
      active = average_cmd;
      manifest.command = "average";
      manifest.path = avg_out;
      const auto ds = load(avg_in, avg_dim);
      std::vector<TimeSeries> members;
      if (avg_label.empty()) {
        members = ds.series;
      } else {
        auto it = std::find(ds.class_names.begin(), ds.class_names.end(), avg_label);
        if (it == ds.class_names.end()) throw ConfigError("label '" + avg_label + "' not found in " + avg_in);
        members = ds.of_class(static_cast<int>(it - ds.class_names.begin()));
      }
      AveragingConfig cfg{avg_nu, avg_iter, parse_method(avg_method), jobs};
      const auto proto = average(members, cfg);
      write_series_csv(avg_out, {proto.series});
      json trace{{"method", to_string(cfg.method)},
                 {"nu", avg_nu},
                 {"max_iter", avg_iter},
                 {"members", members.size()},
                 {"kind", cfg.method == Method::Teka ? "log_mean_k" : cfg.method == Method::Dba ? "inertia" : "none"},
                 {"trace", proto.trace}};
      emit_json(avg_trace.empty() ? avg_out + ".trace.json" : avg_trace, out, trace);
    } else if (classify_cmd->parsed()) {
      active = classify_cmd;
      manifest.command = "classify";
      manifest.seed = cls_seed;
      manifest.path = cls_out.empty() ? cls_csv : cls_out;
      const auto train = load(cls_train, cls_dim);
      auto test = load(cls_test, cls_dim);
      if (train.class_names != test.class_names) {
        // Align test labels on the training label tokens.
        std::vector<int> relabel;
        for (int l : test.labels) {
          const auto& tok = test.class_names[static_cast<std::size_t>(l)];
          auto it = std::find(train.class_names.begin(), train.class_names.end(), tok);
          if (it == train.class_names.end()) throw ConfigError("test class '" + tok + "' absent from training set");
          relabel.push_back(static_cast<int>(it - train.class_names.begin()));
        }
        test.labels = relabel;
        test.class_names = train.class_names;
      }
      const Method method = parse_method(cls_method);
      const Measure measure = cls_measure.empty() ? default_measure(method) : parse_measure(cls_measure);
      double nu = cls_nu;
      LooResult loo{cls_nu, 0.0, {}, {}};
      std::vector<double> grid;
      if (nu_opt->count() == 0) {
        grid = parse_grid(cls_grid.empty() ? "paper" : cls_grid);
        LooOptions lopts;
        lopts.fast = cls_fast;
        lopts.measure = measure;
        lopts.max_iter = cls_iter;
        lopts.jobs = jobs;
        loo = loo_select_nu(train, method, grid, lopts);
        nu = loo.nu;
      }
      AveragingConfig cfg{nu, cls_iter, method, jobs};
      const auto protos = build_prototypes(train, cfg);
      EvalReport report = classify_1nc(protos, test, measure, KdtwParams(nu), jobs);
      report.method = to_string(method);
      report.seed = cls_seed;
      report.loo_error = loo.loo_error;
      report.grid = grid;
      report.grid_errors = loo.errors;
      report.warnings = loo.warnings;
      if (cls_fast) report.warnings.push_back("fast LOO: full-train prototypes reused (approximate)");
      json j = report_json(report);
      j["train"] = train.name;
      j["test"] = test.name;
      j["class_names"] = train.class_names;
      emit_json(cls_out, out, j);
      if (!cls_csv.empty()) emit(cls_csv, out, [&](std::ostream& o) { report_csv(o, report, train.class_names); });
    } else if (posterior_cmd->parsed()) {
      active = posterior_cmd;
      manifest.command = "posterior";
      manifest.path = post_out.empty() ? post_pgm : post_out;
      std::optional<TimeSeries> x, y;
      if (post_demo) {
        auto pr = demo_pair(post_len);
        x = pr.first;
        y = pr.second;
      } else {
        if (post_x.empty() || post_y.empty()) throw ConfigError("posterior needs --x and --y, or --demo");
        const auto dx = load(post_x, post_dim);
        const auto dy = load(post_y, post_dim);
        if (post_xi >= dx.size() || post_yi >= dy.size()) throw ConfigError("series index out of range");
        x = dx.series[post_xi];
        y = dy.series[post_yi];
      }
      const auto m = posterior(*x, *y, KdtwParams(post_nu));
      const double ll = m.log_likelihood();
      Matrix logs(m.posterior.rows(), m.posterior.cols());
      for (std::size_t t = 0; t < logs.rows(); ++t)
        for (std::size_t u = 0; u < logs.cols(); ++u) logs(t, u) = m.posterior.log_value(t, u) - ll;
      Matrix shown;
      if (post_kind == "conditional") {
        shown = row_conditionals(m);
      } else if (post_kind == "log") {
        shown = logs;
      } else if (post_kind == "posterior") {
        shown = Matrix(logs.rows(), logs.cols());
        for (std::size_t k = 0; k < logs.data().size(); ++k) shown.data()[k] = std::exp(logs.data()[k]);
      } else {
        throw ConfigError("unknown --kind '" + post_kind + "'");
      }
      if (!post_out.empty() || post_pgm.empty()) emit(post_out, out, [&](std::ostream& o) { write_matrix_csv(o, shown); });
      if (!post_pgm.empty()) emit(post_pgm, out, [&](std::ostream& o) { write_pgm(o, logs); });
    } else if (denoise_cmd->parsed()) {
      active = denoise_cmd;
      manifest.command = "denoise";
      manifest.seed = ros.seed;
      manifest.path = dn_out;
      dn.rosette = ros;
      dn.jobs = jobs;
      dn.methods = parse_methods(dn_methods);
      const auto res = denoise_experiment(dn);
      json gains = json::object();
      for (const auto& e : res.entries) {
        gains[to_string(e.method)] = e.gain;
        if (!dn_centroids.empty()) write_series_csv(dn_centroids + "_" + to_string(e.method) + ".csv", {e.centroid});
      }
      emit_json(dn_out, out,
                json{{"seed", ros.seed},
                     {"nu", dn.nu},
                     {"instances", ros.n_instances},
                     {"samples", ros.samples()},
                     {"sample_rate", ros.sample_rate},
                     {"snr_db", ros.snr_db},
                     {"gain_db", gains}});
    } else if (spectra_cmd->parsed()) {
      active = spectra_cmd;
      manifest.command = "spectra";
      manifest.path = sp_out;
      const auto ds = load(sp_in, sp_dim);
      if (sp_index >= ds.size()) throw ConfigError("--index out of range");
      const auto& s = ds.series[sp_index];
      if (sp_channel >= s.dim()) throw ConfigError("--channel out of range");
      if (!(sp_rate > 0.0)) throw ConfigError("--sample-rate must be positive");
      const auto db = power_spectrum(s.channel(sp_channel));
      emit(sp_out, out, [&](std::ostream& o) {
        o << "hz,db\n";
        for (std::size_t k = 0; k < db.size(); ++k)
          o << format_double(static_cast<double>(k) * sp_rate / static_cast<double>(s.length())) << ','
            << format_double(db[k]) << '\n';
      });
    }

    const std::string mpath = !manifest_opt.empty()                           ? manifest_opt
                              : (!manifest.path.empty() && manifest.path != "-") ? manifest.path + ".manifest.json"
                                                                                  : std::string();
    if (!mpath.empty()) {
      json m{{"tool", "kteka"},
             {"version", KTEKA_VERSION},
             {"command", manifest.command},
             {"argv", manifest.argv},
             {"config", active ? options_json(active) : json::object()}};
      m["seed"] = manifest.seed ? json(*manifest.seed) : json(nullptr);
      emit_json(mpath, out, m);
    }
  } catch (const NumericError& e) {
    error_line(err, "numeric", e.what());
    return kExitNumeric;
  } catch (const Error& e) {
    error_line(err, "input", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    error_line(err, "input", e.what());
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace kteka::cli
