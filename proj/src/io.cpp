#include "kteka/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include "kteka/error.hpp"

namespace kteka {

namespace {

enum class Separator { Comma, Tab, Space };

Separator detect_separator(std::string_view line) {
  if (line.find(',') != std::string_view::npos) return Separator::Comma;
  if (line.find('\t') != std::string_view::npos) return Separator::Tab;
  return Separator::Space;
}

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line, Separator sep) {
  std::vector<std::string_view> fields;
  if (sep == Separator::Space) {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      if (j > i) fields.push_back(line.substr(i, j - i));
      i = j;
    }
    return fields;
  }
  const char c = sep == Separator::Comma ? ',' : '\t';
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(c, start);
    fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  while (!fields.empty() && fields.back().empty()) fields.pop_back();
  return fields;
}

double parse_number(std::string_view field, std::size_t line_no) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw ParseError("non-numeric field '" + std::string(field) + "'", line_no);
  if (!std::isfinite(v)) throw ParseError("non-finite field '" + std::string(field) + "'", line_no);
  return v;
}

LabeledDataset parse_records(std::istream& in, std::size_t dim, const std::string& name) {
  if (dim == 0) throw InputError("dimension must be positive");
  std::vector<TimeSeries> series;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::map<double, int> label_index;

  std::string raw;
  std::size_t line_no = 0;
  bool have_sep = false;
  Separator sep = Separator::Comma;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (!have_sep) {
      sep = detect_separator(line);
      have_sep = true;
    }
    auto fields = split(line, sep);
    if (fields.size() < 2) throw ParseError("record needs a label and at least one value", line_no);
    for (std::size_t f = 1; f < fields.size(); ++f)
      if (fields[f].empty()) throw ParseError("empty field", line_no);

    double label_value = parse_number(fields[0], line_no);
    auto [it, inserted] = label_index.try_emplace(label_value, static_cast<int>(class_names.size()));
    if (inserted) class_names.emplace_back(fields[0]);

    const std::size_t count = fields.size() - 1;
    if (count % dim != 0)
      throw ParseError(std::to_string(count) + " values is not a multiple of d=" + std::to_string(dim),
                       line_no);
    std::vector<double> values(count);
    for (std::size_t f = 0; f < count; ++f) values[f] = parse_number(fields[f + 1], line_no);
    series.emplace_back(count / dim, dim, std::move(values));
    labels.push_back(it->second);
  }
  if (series.empty()) throw InputError("input '" + name + "' contains no records");
  return LabeledDataset(std::move(series), std::move(labels), name, std::move(class_names));
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

LabeledDataset parse_ucr(std::istream& in, const std::string& name) { return parse_records(in, 1, name); }

LabeledDataset parse_multivariate_csv(std::istream& in, std::size_t dim, const std::string& name) {
  return parse_records(in, dim, name);
}

LabeledDataset parse_ucr(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_records(in, 1, path.stem().string());
}

LabeledDataset parse_multivariate_csv(const std::filesystem::path& path, std::size_t dim) {
  auto in = open_input(path);
  return parse_records(in, dim, path.stem().string());
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

void write_dataset(std::ostream& out, const LabeledDataset& ds, char sep) {
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << ds.class_names[static_cast<std::size_t>(ds.labels[i])];
    for (double v : ds.series[i].values()) out << sep << format_double(v);
    out << '\n';
  }
}

void write_dataset(const std::filesystem::path& path, const LabeledDataset& ds, char sep) {
  auto out = open_output(path);
  write_dataset(out, ds, sep);
}

void write_series_csv(std::ostream& out, const std::vector<TimeSeries>& series) {
  for (const auto& s : series) {
    bool first = true;
    for (double v : s.values()) {
      if (!first) out << ',';
      out << format_double(v);
      first = false;
    }
    out << '\n';
  }
}

void write_series_csv(const std::filesystem::path& path, const std::vector<TimeSeries>& series) {
  auto out = open_output(path);
  write_series_csv(out, series);
}

}  // namespace kteka
