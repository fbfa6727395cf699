#pragma once

#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace llmbi {

/// Named numeric columns of equal length. All entries finite.
class Dataset {
 public:
  Dataset() = default;

  /// Throws Error(InvalidDataset) on a duplicate or invalid name, a length
  /// mismatch with existing columns, or a non-finite entry.
  void add_column(std::string name, std::vector<double> values);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_columns() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  std::set<std::string> name_set() const { return {names_.begin(), names_.end()}; }

  bool has_column(std::string_view name) const;
  /// Throws Error(InvalidDataset) if absent.
  std::span<const double> column(std::string_view name) const;

  /// Rows [begin, end) as a new dataset.
  Dataset slice(std::size_t begin, std::size_t end) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
  std::size_t n_rows_ = 0;
};

}  // namespace llmbi
