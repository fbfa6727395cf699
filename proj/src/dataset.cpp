#include "llmbi/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "llmbi/error.hpp"
#include "llmbi/spec_schema.hpp"

namespace llmbi {

void Dataset::add_column(std::string name, std::vector<double> values) {
  if (!is_identifier(name)) {
    throw Error(ErrorCode::InvalidDataset, "column name '" + name + "' is not a valid identifier");
  }
  if (has_column(name)) throw Error(ErrorCode::InvalidDataset, "duplicate column '" + name + "'");
  if (!names_.empty() && values.size() != n_rows_) {
    throw Error(ErrorCode::InvalidDataset, "column '" + name + "' has " + std::to_string(values.size()) +
                                               " rows, expected " + std::to_string(n_rows_));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::InvalidDataset,
                  "column '" + name + "' row " + std::to_string(i + 1) + " is not finite");
    }
  }
  n_rows_ = values.size();
  names_.push_back(std::move(name));
  columns_.push_back(std::move(values));
}

bool Dataset::has_column(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::span<const double> Dataset::column(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error(ErrorCode::InvalidDataset, "no column '" + std::string(name) + "'");
  return columns_[static_cast<std::size_t>(it - names_.begin())];
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  end = std::min(end, n_rows_);
  begin = std::min(begin, end);
  Dataset out;
  for (std::size_t c = 0; c < names_.size(); ++c) {
    out.names_.push_back(names_[c]);
    out.columns_.emplace_back(columns_[c].begin() + static_cast<std::ptrdiff_t>(begin),
                              columns_[c].begin() + static_cast<std::ptrdiff_t>(end));
  }
  out.n_rows_ = end - begin;
  return out;
}

}  // namespace llmbi
