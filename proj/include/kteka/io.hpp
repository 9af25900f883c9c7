#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "kteka/core.hpp"

namespace kteka {

// Text formats
// ------------
// UCR: one series per line, `label<sep>v1<sep>v2...`, with the separator
// detected per file among comma, tab and blank space. Multivariate CSV uses
// the same record layout with n*d values stored sample-major. Trailing empty
// fields are ignored. Class labels are remapped to 0-based indices in order
// of first appearance; the original tokens are kept in `class_names`.

LabeledDataset parse_ucr(const std::filesystem::path& path);
LabeledDataset parse_multivariate_csv(const std::filesystem::path& path, std::size_t dim);

/// Stream variants; `name` becomes the dataset name.
LabeledDataset parse_ucr(std::istream& in, const std::string& name);
LabeledDataset parse_multivariate_csv(std::istream& in, std::size_t dim, const std::string& name);

/// Shortest representation carrying 17 significant digits.
std::string format_double(double v);

/// Writes `label,v...` records (sample-major for d > 1) using class_names.
void write_dataset(std::ostream& out, const LabeledDataset& ds, char sep = ',');
void write_dataset(const std::filesystem::path& path, const LabeledDataset& ds, char sep = ',');

/// One series per line, comma separated, sample-major, no label.
void write_series_csv(std::ostream& out, const std::vector<TimeSeries>& series);
void write_series_csv(const std::filesystem::path& path, const std::vector<TimeSeries>& series);

}  // namespace kteka
