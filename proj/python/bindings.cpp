#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "kteka/automata.hpp"
#include "kteka/averaging.hpp"
#include "kteka/datagen.hpp"
#include "kteka/elastic.hpp"
#include "kteka/error.hpp"
#include "kteka/eval.hpp"

namespace py = pybind11;
using namespace kteka;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

TimeSeries to_series(const Array& a) {
  if (a.ndim() == 1) {
    const double* p = a.data();
    return TimeSeries::scalar(std::vector<double>(p, p + a.shape(0)));
  }
  if (a.ndim() == 2) {
    const double* p = a.data();
    const auto n = static_cast<std::size_t>(a.shape(0)), d = static_cast<std::size_t>(a.shape(1));
    return TimeSeries(n, d, std::vector<double>(p, p + n * d));
  }
  throw InputError("series must be a 1-D or 2-D array, got " + std::to_string(a.ndim()) + " dimensions");
}

std::vector<TimeSeries> to_set(const std::vector<Array>& arrays) {
  std::vector<TimeSeries> out;
  out.reserve(arrays.size());
  for (const auto& a : arrays) out.push_back(to_series(a));
  return out;
}

// Scalar series come back 1-D, multivariate ones as (length, dim).
py::array_t<double> to_array(const TimeSeries& s) {
  auto v = s.values();
  if (s.dim() == 1) {
    py::array_t<double> out(static_cast<py::ssize_t>(s.length()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
  }
  py::array_t<double> out({static_cast<py::ssize_t>(s.length()), static_cast<py::ssize_t>(s.dim())});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> to_array(const Matrix& m) {
  py::array_t<double> out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> log_matrix(const ScaledMatrix& s) {
  Matrix m(s.rows(), s.cols());
  for (std::size_t t = 0; t < s.rows(); ++t)
    for (std::size_t u = 0; u < s.cols(); ++u) m(t, u) = s.log_value(t, u);
  return to_array(m);
}

py::dict kdtw_dict(double total, double k, double kp) {
  py::dict d;
  d["total"] = total;
  d["k"] = k;
  d["kp"] = kp;
  return d;
}

AveragingConfig config(const std::string& method, double nu, int max_iter, unsigned jobs) {
  AveragingConfig cfg;
  cfg.method = parse_method(method);
  cfg.nu = nu;
  cfg.max_iter = max_iter;
  cfg.jobs = jobs;
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_kteka, m) {
  m.doc() = "Native core of the kteka package";
  m.attr("__version__") = KTEKA_VERSION;

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  (void)error;

  m.def(
      "dtw",
      [](const Array& x, const Array& y) {
        auto r = dtw(to_series(x), to_series(y));
        return py::make_tuple(r.cost, r.path.steps);
      },
      py::arg("x"), py::arg("y"), "DTW cost and the optimal warping path as (i, j) pairs.");
  m.def(
      "dtw_cost", [](const Array& x, const Array& y) { return dtw_cost(to_series(x), to_series(y)); },
      py::arg("x"), py::arg("y"));

  m.def(
      "kdtw",
      [](const Array& x, const Array& y, double nu) {
        auto r = kdtw(to_series(x), to_series(y), KdtwParams(nu));
        return kdtw_dict(r.total, r.k_term, r.kp_term);
      },
      py::arg("x"), py::arg("y"), py::arg("nu") = 1.0, "KDTW similarity with its K and K' terms.");
  m.def(
      "kdtw_log",
      [](const Array& x, const Array& y, double nu) {
        auto r = kdtw_log(to_series(x), to_series(y), KdtwParams(nu));
        return kdtw_dict(r.total, r.k_term, r.kp_term);
      },
      py::arg("x"), py::arg("y"), py::arg("nu") = 1.0, "Natural logs of the KDTW terms.");
  m.def(
      "gram",
      [](const std::vector<Array>& set, double nu, unsigned jobs) {
        return to_array(gram(to_set(set), KdtwParams(nu), jobs));
      },
      py::arg("series"), py::arg("nu") = 1.0, py::arg("jobs") = 1u, "Symmetric matrix of KDTW totals.");

  m.def(
      "forward",
      [](const Array& x, const Array& y, double nu) {
        return log_matrix(forward(to_series(x), to_series(y), KdtwParams(nu)));
      },
      py::arg("x"), py::arg("y"), py::arg("nu") = 1.0, "log alpha.");
  m.def(
      "backward",
      [](const Array& x, const Array& y, double nu) {
        return log_matrix(backward(to_series(x), to_series(y), KdtwParams(nu)));
      },
      py::arg("x"), py::arg("y"), py::arg("nu") = 1.0, "log beta.");
  m.def(
      "log_posterior",
      [](const Array& x, const Array& y, double nu) {
        return log_matrix(posterior(to_series(x), to_series(y), KdtwParams(nu)).posterior);
      },
      py::arg("x"), py::arg("y"), py::arg("nu") = 1.0, "log(alpha * beta), unnormalized.");
  m.def(
      "row_conditionals",
      [](const Array& x, const Array& y, double nu) {
        return to_array(row_conditionals(posterior(to_series(x), to_series(y), KdtwParams(nu))));
      },
      py::arg("x"), py::arg("y"), py::arg("nu") = 1.0, "Alignment posterior normalized along each row of x.");

  m.def(
      "teka",
      [](const std::vector<Array>& set, double nu, int max_iter, unsigned jobs) {
        auto r = teka(to_set(set), config("teka", nu, max_iter, jobs));
        py::dict d;
        d["centroid"] = to_array(r.centroid);
        d["values"] = to_array(r.estimate.values);
        d["times"] = to_array(r.estimate.times);
        d["log_mean_k"] = to_array(r.log_mean_k);
        d["iterations"] = r.iterations;
        d["medoid_index"] = r.medoid_index;
        return d;
      },
      py::arg("series"), py::arg("nu") = 1.0, py::arg("max_iter") = 10, py::arg("jobs") = 1u);
  m.def(
      "dba",
      [](const std::vector<Array>& set, int max_iter, unsigned jobs) {
        auto r = dba(to_set(set), config("dba", 1.0, max_iter, jobs));
        py::dict d;
        d["centroid"] = to_array(r.centroid);
        d["inertia"] = to_array(r.inertia);
        d["iterations"] = r.iterations;
        d["medoid_index"] = r.medoid_index;
        return d;
      },
      py::arg("series"), py::arg("max_iter") = 10, py::arg("jobs") = 1u);
  m.def(
      "medoid",
      [](const std::vector<Array>& set, const std::string& measure, double nu) {
        return medoid(to_set(set), parse_measure(measure), KdtwParams(nu)).index;
      },
      py::arg("series"), py::arg("measure") = "dtw", py::arg("nu") = 1.0, "Index of the medoid.");
  m.def(
      "average",
      [](const std::vector<Array>& set, const std::string& method, double nu, int max_iter, unsigned jobs) {
        auto r = average(to_set(set), config(method, nu, max_iter, jobs));
        return py::make_tuple(to_array(r.series), to_array(r.trace));
      },
      py::arg("series"), py::arg("method") = "teka", py::arg("nu") = 1.0, py::arg("max_iter") = 10,
      py::arg("jobs") = 1u, "Prototype of a set and its convergence trace.");

  m.def(
      "gen_cbf",
      [](std::size_t per_class, std::size_t length, std::uint64_t seed, bool noise_free) {
        CbfSpec spec;
        spec.per_class = per_class;
        spec.length = length;
        spec.seed = seed;
        spec.noise_free = noise_free;
        auto ds = gen_cbf(spec);
        py::array_t<double> x({static_cast<py::ssize_t>(ds.size()), static_cast<py::ssize_t>(length)});
        double* out = x.mutable_data();
        for (const auto& s : ds.series) out = std::copy(s.values().begin(), s.values().end(), out);
        std::vector<int> labels;
        for (int l : ds.labels) labels.push_back(std::stoi(ds.class_names[static_cast<std::size_t>(l)]));
        return py::make_tuple(x, labels);
      },
      py::arg("per_class") = 100, py::arg("length") = 128, py::arg("seed") = 0, py::arg("noise_free") = false,
      "CBF data as an (N, length) array and labels 1, 2, 3.");
  m.def(
      "gen_rosette",
      [](std::size_t n_instances, double snr_db, std::uint64_t seed) {
        RosetteSpec spec;
        spec.n_instances = n_instances;
        spec.snr_db = snr_db;
        spec.seed = seed;
        auto r = gen_rosette(spec);
        py::list clean, noisy;
        for (const auto& s : r.clean) clean.append(to_array(s));
        for (const auto& s : r.noisy) noisy.append(to_array(s));
        return py::make_tuple(clean, noisy);
      },
      py::arg("n_instances") = 8, py::arg("snr_db") = 0.0, py::arg("seed") = 0,
      "Clean and noisy planar rosette instances, each (samples, 2).");

  m.def(
      "snr_gain",
      [](const Array& clean, const Array& estimate, const Array& noisy) {
        return snr_gain(to_series(clean), to_series(estimate), to_series(noisy));
      },
      py::arg("clean"), py::arg("estimate"), py::arg("noisy"));
  m.def(
      "power_spectrum", [](const std::vector<double>& x) { return to_array(power_spectrum(x)); }, py::arg("x"),
      "Log power spectrum in dB.");
  m.def("paper_nu_grid", &paper_nu_grid);
}
