#pragma once

#include "golap/schema.hpp"
#include "golap/value.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace golap {

/// A raw tabular file: a header row and string fields.
struct Table {
   std::vector<std::string> columns;
   std::vector<std::vector<std::string>> rows;
};

/// RFC 4180 style CSV: comma separated, double-quote escaping, optional BOM,
/// LF or CRLF line ends.
Table parse_csv(std::string_view text);

/// Instances of one dimension. Values are aligned with Dimension::attributes
/// (All included, always "all").
struct DimensionTable {
   std::vector<std::vector<Value>> rows;
   std::map<Value, std::size_t, ValueLess> by_id;
};

/// Instances of one fact. `links[i][k]` is the row, in the dimension table, of
/// the k-th starred dimension of instance i.
struct FactTable {
   std::vector<std::vector<double>> measures;
   std::vector<std::vector<std::size_t>> links;

   std::size_t size() const { return measures.size(); }
};

/// Dimension and fact instances with verified referential integrity.
/// Immutable after construction.
class Dataset {
   public:
   /// `tables` maps dimension and fact names (as spelled in the schema) to
   /// their raw contents.
   static Dataset load(Constellation c, const std::map<std::string, Table>& tables);

   const Constellation& constellation() const { return *constellation_; }
   std::shared_ptr<const Constellation> constellation_ptr() const { return constellation_; }

   const DimensionTable& dimension_table(std::string_view dimension) const;
   const FactTable& fact_table(std::string_view fact) const;
   std::size_t fact_count(std::string_view fact) const { return fact_table(fact).size(); }

   /// Value of `attribute` for row `row` of `dimension`.
   const Value& value(std::string_view dimension, std::size_t row, std::string_view attribute) const;

   /// Distinct value tuples of `path` over the dimension's instances, in
   /// ascending order (tuples compared component-wise).
   std::vector<std::vector<Value>> member_values(std::string_view dimension,
                                                 const std::vector<std::string>& path) const;

   private:
   std::shared_ptr<const Constellation> constellation_;
   std::vector<DimensionTable> dimensions_;
   std::vector<FactTable> facts_;
};

/// Reads `<dir>/*.schema` (exactly one) plus one `<name>.csv` per dimension and
/// fact.
Dataset load_dataset_dir(const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);

} // namespace golap
