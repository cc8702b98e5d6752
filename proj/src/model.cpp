#include "golap/model.hpp"
#include "golap/operation.hpp"
#include "golap/schema.hpp"

#include <algorithm>
#include <tuple>

namespace golap {

std::string_view to_string(AggFn fn) {
   switch (fn) {
      case AggFn::Sum: return "SUM";
      case AggFn::Avg: return "AVG";
      case AggFn::Min: return "MIN";
      case AggFn::Max: return "MAX";
      case AggFn::Count: return "COUNT";
   }
   return "SUM";
}

std::optional<AggFn> parse_agg_fn(std::string_view text) {
   for (AggFn fn : {AggFn::Sum, AggFn::Avg, AggFn::Min, AggFn::Max, AggFn::Count}) {
      if (iequals(text, to_string(fn))) return fn;
   }
   return std::nullopt;
}

std::string format_measure(const MeasureTerm& m) { return std::string(to_string(m.fn)) + "(" + m.measure + ")"; }

std::string format_subject_entry(const SubjectEntry& e) {
   if (auto m = std::get_if<MeasureTerm>(&e)) return format_measure(*m);
   const auto& p = std::get<PushedAttribute>(e);
   return p.dimension + "." + p.attribute;
}

namespace {

std::string join(const std::vector<std::string>& items, std::string_view sep) {
   std::string out;
   for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += sep;
      out += items[i];
   }
   return out;
}

} // namespace

std::string format_selector(const AttSelector& s) {
   switch (s.form) {
      case AttSelector::Form::Parameter: return s.parameter;
      case AttSelector::Form::ParameterWithWeak: return s.parameter + "(" + join(s.weak, ", ") + ")";
      case AttSelector::Form::WeakList: return "(" + join(s.weak, ", ") + ") of " + s.parameter;
   }
   return s.parameter;
}

DisplayUnit DisplayUnit::parameter(std::string dim, std::string p, std::vector<std::string> weak) {
   DisplayUnit u;
   u.kind = Kind::Parameter;
   u.dimension = std::move(dim);
   u.attribute = std::move(p);
   u.weak = std::move(weak);
   return u;
}

DisplayUnit DisplayUnit::weak_list(std::string dim, std::string owner, std::vector<std::string> weak) {
   DisplayUnit u;
   u.kind = Kind::WeakList;
   u.dimension = std::move(dim);
   u.attribute = std::move(owner);
   u.weak = std::move(weak);
   return u;
}

DisplayUnit DisplayUnit::nested(std::string dim, std::string attribute) {
   DisplayUnit u;
   u.kind = Kind::Nested;
   u.dimension = std::move(dim);
   u.attribute = std::move(attribute);
   return u;
}

DisplayUnit DisplayUnit::pulled(MeasureTerm m) {
   DisplayUnit u;
   u.kind = Kind::Measure;
   u.measure = std::move(m);
   return u;
}

std::vector<std::string> DisplayUnit::attributes() const {
   switch (kind) {
      case Kind::Parameter: {
         std::vector<std::string> out{attribute};
         out.insert(out.end(), weak.begin(), weak.end());
         return out;
      }
      case Kind::WeakList: return weak;
      case Kind::Nested: return {attribute};
      case Kind::Measure: return {};
   }
   return {};
}

std::string DisplayUnit::label() const {
   switch (kind) {
      case Kind::Parameter:
         return weak.empty() ? attribute : attribute + "(" + join(weak, ", ") + ")";
      case Kind::WeakList: return "(" + join(weak, ", ") + ") of " + attribute;
      case Kind::Nested: return dimension + "." + attribute;
      case Kind::Measure: return format_measure(measure);
   }
   return attribute;
}

std::string_view to_string(Comparator c) {
   switch (c) {
      case Comparator::Eq: return "=";
      case Comparator::Ne: return "!=";
      case Comparator::Lt: return "<";
      case Comparator::Le: return "<=";
      case Comparator::Gt: return ">";
      case Comparator::Ge: return ">=";
   }
   return "=";
}

bool apply_comparator(Comparator c, int cmp) {
   switch (c) {
      case Comparator::Eq: return cmp == 0;
      case Comparator::Ne: return cmp != 0;
      case Comparator::Lt: return cmp < 0;
      case Comparator::Le: return cmp <= 0;
      case Comparator::Gt: return cmp > 0;
      case Comparator::Ge: return cmp >= 0;
   }
   return false;
}

std::string format_atom(const Atom& a) {
   return a.qualifier + "." + a.name + " " + std::string(to_string(a.op)) + " " + format_literal(a.literal);
}

std::string format_predicate(const Predicate& p) {
   if (p.is_true()) return "true";
   std::vector<std::string> clauses;
   for (const auto& clause : p.clauses) {
      if (clause.empty()) {
         clauses.emplace_back("false");
         continue;
      }
      std::vector<std::string> atoms;
      for (const auto& a : clause) atoms.push_back(format_atom(a));
      clauses.push_back(atoms.size() == 1 ? atoms[0] : "(" + join(atoms, " OR ") + ")");
   }
   return join(clauses, " AND ");
}

namespace {

int compare_atoms(const Atom& a, const Atom& b) {
   if (int c = a.qualifier.compare(b.qualifier)) return c;
   if (int c = a.name.compare(b.name)) return c;
   if (a.op != b.op) return a.op < b.op ? -1 : 1;
   if (int c = compare_values(a.literal, b.literal)) return c;
   if (a.literal.index() != b.literal.index()) return a.literal.index() < b.literal.index() ? -1 : 1;
   return 0;
}

int compare_clauses(const std::vector<Atom>& a, const std::vector<Atom>& b) {
   for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
      if (int c = compare_atoms(a[i], b[i])) return c;
   }
   if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
   return 0;
}

} // namespace

Predicate normalize(const Predicate& p) {
   std::vector<std::vector<Atom>> clauses;
   for (const auto& clause : p.clauses) {
      std::vector<Atom> kept;
      bool tautology = false;
      for (const auto& a : clause) {
         if (a.name == kAll) {
            // All has the single value 'all': the atom is decidable here.
            if (apply_comparator(a.op, compare_values(Value{std::string(kAllValue)}, a.literal))) {
               tautology = true;
               break;
            }
            continue;
         }
         kept.push_back(a);
      }
      if (tautology) continue;
      std::sort(kept.begin(), kept.end(), [](const Atom& x, const Atom& y) { return compare_atoms(x, y) < 0; });
      kept.erase(std::unique(kept.begin(), kept.end(),
                             [](const Atom& x, const Atom& y) { return compare_atoms(x, y) == 0; }),
                 kept.end());
      if (kept.empty()) return Predicate{{{}}};
      clauses.push_back(std::move(kept));
   }
   std::sort(clauses.begin(), clauses.end(), [](const auto& x, const auto& y) { return compare_clauses(x, y) < 0; });
   clauses.erase(std::unique(clauses.begin(), clauses.end(),
                             [](const auto& x, const auto& y) { return compare_clauses(x, y) == 0; }),
                 clauses.end());
   return Predicate{std::move(clauses)};
}

// ---------------------------------------------------------------------------
// Operations

namespace {

struct NameVisitor {
   std::string_view operator()(const DrotateOp&) const { return "DROTATE"; }
   std::string_view operator()(const DrilldownOp&) const { return "DRILLDOWN"; }
   std::string_view operator()(const RollupOp&) const { return "ROLLUP"; }
   std::string_view operator()(const NestOp&) const { return "NEST"; }
   std::string_view operator()(const SelectOp&) const { return "SELECT"; }
   std::string_view operator()(const SwitchOp&) const { return "SWITCH"; }
   std::string_view operator()(const AgregateOp&) const { return "AGREGATE"; }
   std::string_view operator()(const UnagregateOp&) const { return "UNAGREGATE"; }
   std::string_view operator()(const PushOp&) const { return "PUSH"; }
   std::string_view operator()(const PullOp&) const { return "PULL"; }
   std::string_view operator()(const AddmOp&) const { return "ADDM"; }
   std::string_view operator()(const DelmOp&) const { return "DELM"; }
   std::string_view operator()(const HrotateOp&) const { return "HROTATE"; }
   std::string_view operator()(const PlotOp&) const { return "PLOT"; }
   std::string_view operator()(const OrderOp&) const { return "ORDER"; }
   std::string_view operator()(const FrotateOp&) const { return "FROTATE"; }
   std::string_view operator()(const UnselectOp&) const { return "UNSELECT"; }
};

std::string format_measure_set(const std::vector<MeasureTerm>& ms) {
   std::vector<std::string> parts;
   for (const auto& m : ms) parts.push_back(format_measure(m));
   return "{" + join(parts, ", ") + "}";
}

struct ArgsVisitor {
   std::string operator()(const DrotateOp& o) const {
      return o.old_dimension + ", " + o.new_dimension + ", " + o.hierarchy;
   }
   std::string operator()(const DrilldownOp& o) const { return o.dimension + ", " + format_selector(o.level); }
   std::string operator()(const RollupOp& o) const { return o.dimension + ", " + format_selector(o.level); }
   std::string operator()(const NestOp& o) const {
      return o.dimension + ", " + o.attribute + ", " + o.nested_dimension + ", " + o.nested_attribute;
   }
   std::string operator()(const SelectOp& o) const { return format_predicate(o.predicate); }
   std::string operator()(const SwitchOp& o) const {
      return o.dimension + ", " + o.attribute + ", " + format_literal(o.first) + ", " + format_literal(o.second);
   }
   std::string operator()(const AgregateOp& o) const {
      return o.dimension + ", " + std::string(to_string(o.fn)) + "(" + o.attribute + ")";
   }
   std::string operator()(const UnagregateOp&) const { return ""; }
   std::string operator()(const PushOp& o) const { return o.dimension + ", " + o.attribute; }
   std::string operator()(const PullOp& o) const { return format_measure(o.measure) + ", " + o.dimension; }
   std::string operator()(const AddmOp& o) const { return format_measure(o.measure); }
   std::string operator()(const DelmOp& o) const { return format_measure(o.measure); }
   std::string operator()(const HrotateOp& o) const { return o.dimension + ", " + o.hierarchy; }
   std::string operator()(const PlotOp& o) const { return o.dimension + ", " + format_selector(o.level); }
   std::string operator()(const OrderOp& o) const {
      return o.dimension + ", " + o.attribute + ", " + (o.order == SortOrder::Asc ? "asc" : "dsc");
   }
   std::string operator()(const FrotateOp& o) const { return o.fact + ", " + format_measure_set(o.measures); }
   std::string operator()(const UnselectOp&) const { return ""; }
};

} // namespace

std::string_view operator_name(const Operation& op) { return std::visit(NameVisitor{}, op); }

std::string format_arguments(const Operation& op) { return std::visit(ArgsVisitor{}, op); }

std::string format_display(const DisplaySpec& d) {
   return "DISPLAY(" + format_literal(Value{d.constellation}) + ", " + d.fact + ", " + format_measure_set(d.measures) +
          ", " + d.line_dimension + ", " + d.line_hierarchy + ", " + d.column_dimension + ", " + d.column_hierarchy +
          ")";
}

bool OperationRecord::references(std::string_view object) const {
   return std::any_of(objects.begin(), objects.end(), [&](const std::string& o) { return iequals(o, object); });
}

} // namespace golap
