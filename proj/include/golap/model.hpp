#pragma once

#include "golap/value.hpp"

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace golap {

class Dataset;
struct Constellation;

enum class AggFn { Sum, Avg, Min, Max, Count };

std::string_view to_string(AggFn fn);
std::optional<AggFn> parse_agg_fn(std::string_view text);

/// f(m): a fact measure aggregated by f.
struct MeasureTerm {
   AggFn fn = AggFn::Sum;
   std::string measure;

   bool operator==(const MeasureTerm&) const = default;
   auto operator<=>(const MeasureTerm&) const = default;
};

std::string format_measure(const MeasureTerm& m);

/// A dimension attribute shown inside the cells (PUSH).
struct PushedAttribute {
   std::string dimension;
   std::string attribute;

   bool operator==(const PushedAttribute&) const = default;
};

using SubjectEntry = std::variant<MeasureTerm, PushedAttribute>;

std::string format_subject_entry(const SubjectEntry& e);

/// S = (F, {f1(m1), f2(m2), ...}).
struct SubjectSpec {
   std::string fact;
   std::vector<SubjectEntry> entries;

   bool operator==(const SubjectSpec&) const = default;
};

/// The three ways a graduation level can be named: p, p(a1, ...), or
/// (a1, ...) of p.
struct AttSelector {
   enum class Form { Parameter, ParameterWithWeak, WeakList };

   Form form = Form::Parameter;
   std::string parameter;
   std::vector<std::string> weak;

   static AttSelector param(std::string p) { return AttSelector{Form::Parameter, std::move(p), {}}; }

   bool operator==(const AttSelector&) const = default;
};

std::string format_selector(const AttSelector& s);

/// One header layer of an axis.
struct DisplayUnit {
   enum class Kind {
      Parameter,   ///< a parameter of the axis hierarchy, optionally with weak attributes
      WeakList,    ///< weak attributes of a parameter that is itself not shown
      Nested,      ///< an attribute of another dimension (NEST)
      Measure,     ///< a measure converted into a header level (PULL)
   };

   Kind kind = Kind::Parameter;
   /// Dimension owning the shown attributes (the axis dimension, or the nested one).
   std::string dimension;
   /// Parameter (Parameter/WeakList) or nested attribute.
   std::string attribute;
   std::vector<std::string> weak;
   MeasureTerm measure;

   static DisplayUnit parameter(std::string dim, std::string p, std::vector<std::string> weak = {});
   static DisplayUnit weak_list(std::string dim, std::string owner, std::vector<std::string> weak);
   static DisplayUnit nested(std::string dim, std::string attribute);
   static DisplayUnit pulled(MeasureTerm m);

   bool is_native() const { return kind == Kind::Parameter || kind == Kind::WeakList; }
   /// Attributes whose values make up the unit's header tuple.
   std::vector<std::string> attributes() const;
   std::string label() const;

   bool operator==(const DisplayUnit&) const = default;
};

/// L or C = (D, H, <All, p1, ...>). The leading All is implicit: `units`
/// lists only the displayed layers.
struct AxisSpec {
   std::string dimension;
   std::string hierarchy;
   std::vector<DisplayUnit> units;

   bool operator==(const AxisSpec&) const = default;
};

enum class Comparator { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view to_string(Comparator c);
bool apply_comparator(Comparator c, int cmp);

/// qualifier.name op literal, where qualifier is the fact or a linked dimension.
struct Atom {
   std::string qualifier;
   std::string name;
   Comparator op = Comparator::Eq;
   Value literal;

   bool operator==(const Atom&) const = default;
};

/// Conjunction of disjunctions. No clause means `true`; an empty clause is
/// `false`.
struct Predicate {
   std::vector<std::vector<Atom>> clauses;

   bool is_true() const { return clauses.empty(); }
   bool operator==(const Predicate&) const = default;
};

std::string format_atom(const Atom& a);
std::string format_predicate(const Predicate& p);

/// Canonical form used for logical comparison: atoms on All evaluated
/// statically, atoms and clauses sorted and deduplicated.
Predicate normalize(const Predicate& p);

/// (dimension, attribute), identifying a displayed attribute.
struct AttributeKey {
   std::string dimension;
   std::string attribute;

   bool operator==(const AttributeKey&) const = default;
   auto operator<=>(const AttributeKey&) const = default;
};

/// An active AGREGATE: subtotals of `fn` after each value block of `attribute`.
struct AggregateSpec {
   std::string axis_dimension;
   AttributeKey attribute;
   AggFn fn = AggFn::Sum;

   bool operator==(const AggregateSpec&) const = default;
   auto operator<=>(const AggregateSpec&) const = default;
};

enum class SortOrder { Asc, Dsc };

} // namespace golap
