#pragma once

#include "golap/model.hpp"
#include "golap/operation.hpp"

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace golap {

class Dataset;

/// T = (S, L, C, R) plus the display state the operators maintain: value
/// orders, active subtotals and the operation log. Values are immutable in
/// practice; every operator returns a new table.
struct MultidimensionalTable {
   std::string constellation;
   SubjectSpec subject;
   AxisSpec line;
   AxisSpec column;
   Predicate restriction;
   /// Explicit value orders set by SWITCH/ORDER. Attributes without an entry
   /// use the ascending default order.
   std::map<AttributeKey, std::vector<Value>> domain_orders;
   std::vector<AggregateSpec> aggregates;
   std::vector<OperationRecord> history;

   const AxisSpec* axis_of(std::string_view dimension) const;
   AxisSpec* axis_of(std::string_view dimension);
   std::vector<MeasureTerm> measures() const;
   /// Every (dimension, attribute) shown on either axis.
   std::vector<AttributeKey> displayed_attributes() const;
};

using TM = MultidimensionalTable;

/// Invariant violations of `tm` against `ds`; empty when valid.
std::vector<std::string> check_tm(const TM& tm, const Dataset& ds);
/// Throws InvalidTable when check_tm reports anything.
void require_valid(const TM& tm, const Dataset& ds);

/// Effective order of an attribute's values: the explicit order when set,
/// otherwise ascending over the dimension's instances.
std::vector<Value> effective_order(const TM& tm, const Dataset& ds, const AttributeKey& key);

// ---------------------------------------------------------------------------
// Grid

using Member = std::vector<Value>;

/// One leaf of a header tree, given as its full path of members. Subtotal
/// leaves carry the path of the aggregated block and the subtotal function.
struct HeaderLeaf {
   std::vector<Member> path;
   std::optional<AggFn> subtotal;

   bool operator==(const HeaderLeaf&) const = default;
};

struct AxisHeaders {
   std::string dimension;
   std::string hierarchy;
   std::vector<std::string> layers;
   std::vector<HeaderLeaf> leaves;

   bool operator==(const AxisHeaders&) const = default;
};

/// A number for aggregated measures, a sorted distinct value set for pushed
/// attributes.
using CellEntry = std::variant<double, std::vector<Value>>;
/// Absent when no fact instance falls into the cell.
using Cell = std::optional<std::vector<CellEntry>>;

struct Grid {
   std::string fact;
   std::vector<std::string> subject;
   /// Normalized restriction, one display line per clause.
   std::vector<std::string> restriction;
   AxisHeaders rows;
   AxisHeaders columns;
   std::vector<std::vector<Cell>> cells;

   bool operator==(const Grid&) const = default;
};

/// Header tree node, derived from the leaves for rendering.
struct HeaderNode {
   std::string label;
   Member member;
   std::optional<AggFn> subtotal;
   std::vector<HeaderNode> children;
};

std::vector<HeaderNode> header_tree(const AxisHeaders& axis);
std::string format_member(const Member& m);
std::string format_header_label(const HeaderLeaf& leaf, std::size_t layer);
std::string format_cell(const Cell& cell);

Grid materialize(const TM& tm, const Dataset& ds);

enum class RenderFormat { Text, Structured };

std::string render(const Grid& g, RenderFormat format);
std::string render_text(const Grid& g);
/// JSON grid document (see docs/grid-format.md).
std::string render_structured(const Grid& g, int indent = -1);
Grid parse_structured(std::string_view document);

/// Structural equality of (S, L, C), logical equality of R, equal value
/// orders on displayed attributes, equal subtotal specs and equal grids.
bool tm_equal(const TM& a, const TM& b, const Dataset& ds);
/// Human-readable reason why tm_equal is false, empty when equal.
std::string tm_difference(const TM& a, const TM& b, const Dataset& ds);

} // namespace golap
