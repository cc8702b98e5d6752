#pragma once

#include "golap/model.hpp"

#include <string>
#include <variant>
#include <vector>

namespace golap {

// Arguments of every unary TM -> TM operator. The source table is not part of
// the operation, so records can be replayed onto another table.

struct DrotateOp {
   std::string old_dimension;
   std::string new_dimension;
   std::string hierarchy;
   bool operator==(const DrotateOp&) const = default;
};

struct DrilldownOp {
   std::string dimension;
   AttSelector level;
   bool operator==(const DrilldownOp&) const = default;
};

struct RollupOp {
   std::string dimension;
   AttSelector level;
   bool operator==(const RollupOp&) const = default;
};

struct NestOp {
   std::string dimension;
   std::string attribute;
   std::string nested_dimension;
   std::string nested_attribute;
   bool operator==(const NestOp&) const = default;
};

struct SelectOp {
   Predicate predicate;
   bool operator==(const SelectOp&) const = default;
};

struct SwitchOp {
   std::string dimension;
   std::string attribute;
   Value first;
   Value second;
   bool operator==(const SwitchOp&) const = default;
};

struct AgregateOp {
   std::string dimension;
   AggFn fn = AggFn::Sum;
   std::string attribute;
   bool operator==(const AgregateOp&) const = default;
};

struct UnagregateOp {
   bool operator==(const UnagregateOp&) const = default;
};

struct PushOp {
   std::string dimension;
   std::string attribute;
   bool operator==(const PushOp&) const = default;
};

struct PullOp {
   MeasureTerm measure;
   std::string dimension;
   bool operator==(const PullOp&) const = default;
};

struct AddmOp {
   MeasureTerm measure;
   bool operator==(const AddmOp&) const = default;
};

struct DelmOp {
   MeasureTerm measure;
   bool operator==(const DelmOp&) const = default;
};

struct HrotateOp {
   std::string dimension;
   std::string hierarchy;
   bool operator==(const HrotateOp&) const = default;
};

struct PlotOp {
   std::string dimension;
   AttSelector level;
   bool operator==(const PlotOp&) const = default;
};

struct OrderOp {
   std::string dimension;
   std::string attribute;
   SortOrder order = SortOrder::Asc;
   bool operator==(const OrderOp&) const = default;
};

struct FrotateOp {
   std::string fact;
   std::vector<MeasureTerm> measures;
   bool operator==(const FrotateOp&) const = default;
};

struct UnselectOp {
   bool operator==(const UnselectOp&) const = default;
};

using Operation = std::variant<DrotateOp, DrilldownOp, RollupOp, NestOp, SelectOp, SwitchOp, AgregateOp, UnagregateOp,
                               PushOp, PullOp, AddmOp, DelmOp, HrotateOp, PlotOp, OrderOp, FrotateOp, UnselectOp>;

/// DISPLAY(N, F, {f(m), ...}, DL, HL, DC, HC): the constructor.
struct DisplaySpec {
   std::string constellation;
   std::string fact;
   std::vector<MeasureTerm> measures;
   std::string line_dimension;
   std::string line_hierarchy;
   std::string column_dimension;
   std::string column_hierarchy;
   bool operator==(const DisplaySpec&) const = default;
};

std::string_view operator_name(const Operation& op);
/// Arguments after the source table, e.g. "Fournisseurs, Pays".
std::string format_arguments(const Operation& op);
std::string format_display(const DisplaySpec& d);

/// One logged operation and the fact/dimension names it references
/// (canonical spelling).
struct OperationRecord {
   Operation operation;
   std::vector<std::string> objects;

   std::string_view name() const { return operator_name(operation); }
   bool references(std::string_view object) const;
   bool operator==(const OperationRecord&) const = default;
};

} // namespace golap
