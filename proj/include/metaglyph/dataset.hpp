#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "metaglyph/regions.hpp"

namespace metaglyph {

namespace semantics {
class TextEmbeddingBackend;
}

enum class DataType { Numerical, Categorical, Temporal, Geospatial };

std::string_view to_string(DataType t);
DataType data_type_from_string(std::string_view s);

struct DataDimension {
  std::string name;
  DataType type{DataType::Categorical};
  std::vector<std::string> raw;  // cells as read
  /// Numerical: parsed values, missing cells imputed with the column mean.
  /// Temporal: days since 1970-01-01 (fractional for times of day).
  /// Empty for categorical and geospatial columns.
  std::vector<double> numeric;
  std::vector<bool> imputed;  // per row, true when numeric[row] is an imputation
  std::optional<double> importance;

  bool has_numeric() const { return !numeric.empty(); }
  bool non_negative() const;
  std::pair<double, double> range() const;

  friend bool operator==(const DataDimension&, const DataDimension&) = default;
};

struct DataGroup {
  std::string name;
  std::vector<std::size_t> members;  // dimension indices, size >= 2
  std::optional<double> importance;

  friend bool operator==(const DataGroup&, const DataGroup&) = default;
};

/// Typed table plus topic. Immutable once built; copy to modify.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::string topic, std::vector<DataDimension> dims, std::vector<DataGroup> groups = {});

  const std::string& topic() const { return topic_; }
  const std::vector<DataDimension>& dimensions() const { return dims_; }
  const std::vector<DataGroup>& groups() const { return groups_; }
  std::size_t rows() const { return rows_; }

  const DataDimension& dimension(std::size_t i) const { return dims_.at(i); }
  /// Index of the group containing dimension i, if any.
  std::optional<std::size_t> group_of(std::size_t i) const;
  /// Dimensions that are not members of any group, in column order.
  std::vector<std::size_t> ungrouped() const;

  /// Copy with replaced groups. Throws Error{InvalidGroup} when a group has
  /// fewer than two members, a non-numerical member, or shares a member.
  Dataset with_groups(std::vector<DataGroup> groups) const;
  /// Copy with importance scores set; groups get the mean of their members.
  Dataset with_importance(std::span<const double> dimension_scores, std::span<const double> group_scores) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  void validate() const;

  std::string topic_;
  std::vector<DataDimension> dims_;
  std::vector<DataGroup> groups_;
  std::size_t rows_{0};
};

/// Topic derived from a file name: directory and extension stripped,
/// '_' '-' '.' replaced by spaces.
std::string topic_from_name(std::string_view name);

/// Parse a delimiter-separated table (comma, tab or semicolon, detected from
/// the header row) with RFC-4180 quoting.
Dataset load_spreadsheet(std::string_view bytes, std::string_view name,
                         const RegionTable& regions = RegionTable::builtin());

DataType infer_dimension_type(std::span<const std::string> values,
                              const RegionTable& regions = RegionTable::builtin());

/// Cell parsers shared with placement code.
std::optional<double> parse_number(std::string_view cell);
std::optional<double> parse_temporal(std::string_view cell);  // days since epoch
bool is_missing(std::string_view cell);

/// Maximal sets (cliques) of >= 2 numerical dimensions whose pairwise name
/// similarity reaches the threshold. Ordered by smallest member index.
std::vector<DataGroup> propose_groups(const Dataset& ds, semantics::TextEmbeddingBackend& backend,
                                      double similarity_threshold = 0.8);

std::string to_csv(const Dataset& ds);
nlohmann::json to_json(const Dataset& ds);
Dataset dataset_from_json(const nlohmann::json& j);

}  // namespace metaglyph
