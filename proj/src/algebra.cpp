#include "golap/algebra.hpp"

#include "golap/dataset.hpp"
#include "golap/error.hpp"
#include "golap/schema.hpp"

#include <algorithm>
#include <set>

namespace golap {

namespace {

const Dimension& require_dimension(const Constellation& cs, std::string_view name) {
   const Dimension* d = cs.dimension(name);
   if (!d) throw Error(ErrorCode::UnknownDimension, "unknown dimension '" + std::string(name) + "'");
   return *d;
}

const Fact& require_fact(const Constellation& cs, std::string_view name) {
   const Fact* f = cs.fact(name);
   if (!f) throw Error(ErrorCode::UnknownFact, "unknown fact '" + std::string(name) + "'");
   return *f;
}

AxisSpec& require_axis(TM& t, const Dimension& d) {
   AxisSpec* axis = t.axis_of(d.name);
   if (!axis) throw Error(ErrorCode::DimensionNotOnAxis, d.name + " is on neither axis");
   return *axis;
}

const Hierarchy& axis_hierarchy(const Dimension& d, const AxisSpec& axis) {
   const Hierarchy* h = d.hierarchy(axis.hierarchy);
   if (!h) throw Error(ErrorCode::InvalidTable, "hierarchy " + axis.hierarchy + " not in " + d.name);
   return *h;
}

std::size_t native_level(const Hierarchy& h, const DisplayUnit& u) { return h.position(u.attribute).value_or(0); }

std::size_t finest_level(const Hierarchy& h, const AxisSpec& axis) {
   std::size_t finest = 0;
   for (const auto& u : axis.units) {
      if (u.is_native()) finest = std::max(finest, native_level(h, u));
   }
   return finest;
}

/// Level named by a selector, checked against the hierarchy.
std::size_t selector_level(const Dimension& d, const Hierarchy& h, const AttSelector& sel) {
   auto pos = h.position(sel.parameter);
   if (!pos) {
      throw Error(ErrorCode::AttributeNotInHierarchy,
                  "'" + sel.parameter + "' is not a parameter of " + d.name + "." + h.name);
   }
   if (sel.form != AttSelector::Form::Parameter) {
      if (sel.weak.empty()) throw Error(ErrorCode::ArgumentError, "empty weak attribute list");
      const auto& weak = h.weak_of(sel.parameter);
      std::set<std::string> seen;
      for (const auto& w : sel.weak) {
         if (std::find(weak.begin(), weak.end(), w) == weak.end()) {
            throw Error(ErrorCode::AttributeNotInHierarchy, "'" + w + "' is not a weak attribute of " + sel.parameter);
         }
         if (!seen.insert(w).second) throw Error(ErrorCode::ArgumentError, "weak attribute '" + w + "' repeated");
      }
   }
   return *pos;
}

DisplayUnit selector_unit(const Dimension& d, const AttSelector& sel) {
   switch (sel.form) {
      case AttSelector::Form::Parameter: return DisplayUnit::parameter(d.name, sel.parameter);
      case AttSelector::Form::ParameterWithWeak: return DisplayUnit::parameter(d.name, sel.parameter, sel.weak);
      case AttSelector::Form::WeakList: return DisplayUnit::weak_list(d.name, sel.parameter, sel.weak);
   }
   return DisplayUnit::parameter(d.name, sel.parameter);
}

/// Pulled measures leaving an axis go back to the subject.
void restore_pulled(TM& t, const std::vector<DisplayUnit>& removed) {
   for (const auto& u : removed) {
      if (u.kind != DisplayUnit::Kind::Measure) continue;
      SubjectEntry e = u.measure;
      if (std::find(t.subject.entries.begin(), t.subject.entries.end(), e) == t.subject.entries.end()) {
         t.subject.entries.push_back(e);
      }
   }
}

bool unit_has(const DisplayUnit& u, const AttributeKey& key) {
   if (u.kind == DisplayUnit::Kind::Measure || u.dimension != key.dimension) return false;
   auto attrs = u.attributes();
   return std::find(attrs.begin(), attrs.end(), key.attribute) != attrs.end();
}

/// Drops subtotals and value orders whose attribute is no longer displayed.
void tidy(TM& t) {
   std::vector<AggregateSpec> kept;
   for (const auto& agg : t.aggregates) {
      const AxisSpec* axis = t.axis_of(agg.axis_dimension);
      if (!axis) continue;
      if (std::any_of(axis->units.begin(), axis->units.end(), [&](const auto& u) { return unit_has(u, agg.attribute); })) {
         kept.push_back(agg);
      }
   }
   t.aggregates = std::move(kept);
   auto shown = t.displayed_attributes();
   for (auto it = t.domain_orders.begin(); it != t.domain_orders.end();) {
      if (std::binary_search(shown.begin(), shown.end(), it->first)) ++it;
      else it = t.domain_orders.erase(it);
   }
}

TM finish(TM t, Operation op, std::vector<std::string> objects) {
   tidy(t);
   std::vector<std::string> unique;
   for (auto& o : objects) {
      if (std::none_of(unique.begin(), unique.end(), [&](const auto& u) { return iequals(u, o); })) unique.push_back(o);
   }
   t.history.push_back(OperationRecord{std::move(op), std::move(unique)});
   return t;
}

/// Index of the first unit of `axis` showing `attribute`, native units of the
/// axis dimension first.
std::optional<std::size_t> find_unit(const AxisSpec& axis, const std::string& attribute) {
   for (std::size_t i = 0; i < axis.units.size(); ++i) {
      const auto& u = axis.units[i];
      if (!u.is_native()) continue;
      auto attrs = u.attributes();
      if (std::find(attrs.begin(), attrs.end(), attribute) != attrs.end()) return i;
   }
   for (std::size_t i = 0; i < axis.units.size(); ++i) {
      const auto& u = axis.units[i];
      if (u.kind == DisplayUnit::Kind::Nested && u.attribute == attribute) return i;
   }
   return std::nullopt;
}

void require_measures(const Fact& f, const std::vector<MeasureTerm>& measures) {
   if (measures.empty()) throw Error(ErrorCode::ArgumentError, "at least one measure is required");
   for (std::size_t i = 0; i < measures.size(); ++i) {
      if (!f.measure(measures[i].measure)) {
         throw Error(ErrorCode::MeasureNotInFact, "'" + measures[i].measure + "' is not a measure of " + f.name);
      }
      for (std::size_t j = 0; j < i; ++j) {
         if (measures[j] == measures[i]) {
            throw Error(ErrorCode::DuplicateMeasure, format_measure(measures[i]) + " listed twice");
         }
      }
   }
}

} // namespace

TM Algebra::display(const DisplaySpec& spec) const {
   const Constellation& cs = ds_.constellation();
   if (!iequals(spec.constellation, cs.name)) {
      throw Error(ErrorCode::UnknownConstellation, "constellation '" + spec.constellation + "' is not loaded");
   }
   const Fact& f = require_fact(cs, spec.fact);
   require_measures(f, spec.measures);
   const Dimension& dl = require_dimension(cs, spec.line_dimension);
   const Dimension& dc = require_dimension(cs, spec.column_dimension);
   for (const Dimension* d : {&dl, &dc}) {
      if (!cs.is_starred(f.name, d->name)) throw Error(ErrorCode::DimensionNotStarred, d->name + " is not linked to " + f.name);
   }
   if (dl.name == dc.name) throw Error(ErrorCode::SameDimensionBothAxes, dl.name + " cannot be on both axes");
   const Hierarchy* hl = dl.hierarchy(spec.line_hierarchy);
   if (!hl) throw Error(ErrorCode::HierarchyNotInDimension, "'" + spec.line_hierarchy + "' is not a hierarchy of " + dl.name);
   const Hierarchy* hc = dc.hierarchy(spec.column_hierarchy);
   if (!hc) {
      throw Error(ErrorCode::HierarchyNotInDimension, "'" + spec.column_hierarchy + "' is not a hierarchy of " + dc.name);
   }

   TM t;
   t.constellation = cs.name;
   t.subject.fact = f.name;
   for (const auto& m : spec.measures) t.subject.entries.emplace_back(m);
   t.line = AxisSpec{dl.name, hl->name, {DisplayUnit::parameter(dl.name, hl->coarsest())}};
   t.column = AxisSpec{dc.name, hc->name, {DisplayUnit::parameter(dc.name, hc->coarsest())}};
   return t;
}

TM Algebra::apply(const TM& t, const Operation& op) const {
   return std::visit(
       [&](const auto& o) -> TM {
          using O = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<O, DrotateOp>) return drotate(t, o);
          else if constexpr (std::is_same_v<O, DrilldownOp>) return drilldown(t, o);
          else if constexpr (std::is_same_v<O, RollupOp>) return rollup(t, o);
          else if constexpr (std::is_same_v<O, NestOp>) return nest(t, o);
          else if constexpr (std::is_same_v<O, SelectOp>) return select(t, o);
          else if constexpr (std::is_same_v<O, SwitchOp>) return switch_values(t, o);
          else if constexpr (std::is_same_v<O, AgregateOp>) return agregate(t, o);
          else if constexpr (std::is_same_v<O, UnagregateOp>) return unagregate(t, o);
          else if constexpr (std::is_same_v<O, PushOp>) return push(t, o);
          else if constexpr (std::is_same_v<O, PullOp>) return pull(t, o);
          else if constexpr (std::is_same_v<O, AddmOp>) return addm(t, o);
          else if constexpr (std::is_same_v<O, DelmOp>) return delm(t, o);
          else if constexpr (std::is_same_v<O, HrotateOp>) return hrotate(t, o);
          else if constexpr (std::is_same_v<O, PlotOp>) return plot(t, o);
          else if constexpr (std::is_same_v<O, OrderOp>) return order(t, o);
          else if constexpr (std::is_same_v<O, FrotateOp>) return frotate(t, o);
          else return unselect(t, o);
       },
       op);
}

TM Algebra::drotate(const TM& t, const DrotateOp& op) const {
   const Constellation& cs = ds_.constellation();
   const Dimension& d_old = require_dimension(cs, op.old_dimension);
   const Dimension& d_new = require_dimension(cs, op.new_dimension);
   TM r = t;
   AxisSpec& axis = require_axis(r, d_old);
   if (!cs.is_starred(t.subject.fact, d_new.name)) {
      throw Error(ErrorCode::DimensionNotStarred, d_new.name + " is not linked to " + t.subject.fact);
   }
   const AxisSpec& other = &axis == &r.line ? r.column : r.line;
   if (other.dimension == d_new.name) throw Error(ErrorCode::AxisCollision, d_new.name + " is already on the other axis");
   const Hierarchy* h = d_new.hierarchy(op.hierarchy);
   if (!h) throw Error(ErrorCode::HierarchyNotInDimension, "'" + op.hierarchy + "' is not a hierarchy of " + d_new.name);

   restore_pulled(r, axis.units);
   r.aggregates.erase(std::remove_if(r.aggregates.begin(), r.aggregates.end(),
                                     [&](const auto& a) { return a.axis_dimension == d_old.name; }),
                      r.aggregates.end());
   axis = AxisSpec{d_new.name, h->name, {DisplayUnit::parameter(d_new.name, h->coarsest())}};
   return finish(std::move(r), DrotateOp{d_old.name, d_new.name, h->name}, {d_old.name, d_new.name});
}

TM Algebra::drilldown(const TM& t, const DrilldownOp& op) const {
   const Dimension& d = require_dimension(ds_.constellation(), op.dimension);
   TM r = t;
   AxisSpec& axis = require_axis(r, d);
   const Hierarchy& h = axis_hierarchy(d, axis);
   std::size_t level = selector_level(d, h, op.level);
   std::size_t finest = finest_level(h, axis);
   if (level <= finest) {
      throw Error(ErrorCode::NotFinerLevel,
                  format_selector(op.level) + " is not finer than the finest level displayed for " + d.name);
   }
   axis.units.push_back(selector_unit(d, op.level));
   return finish(std::move(r), DrilldownOp{d.name, op.level}, {d.name});
}

TM Algebra::rollup(const TM& t, const RollupOp& op) const {
   const Dimension& d = require_dimension(ds_.constellation(), op.dimension);
   TM r = t;
   AxisSpec& axis = require_axis(r, d);
   const Hierarchy& h = axis_hierarchy(d, axis);
   std::size_t level = selector_level(d, h, op.level);

   if (level == 0) {
      if (op.level.form != AttSelector::Form::Parameter) {
         throw Error(ErrorCode::ArgumentError, "All has no weak attributes");
      }
      restore_pulled(r, axis.units);
      axis.units.clear();
   } else {
      if (level > finest_level(h, axis)) {
         throw Error(ErrorCode::NotCoarserLevel,
                     format_selector(op.level) + " is finer than the finest level displayed for " + d.name);
      }
      DisplayUnit target = selector_unit(d, op.level);
      std::vector<DisplayUnit> units;
      bool placed = false;
      for (const auto& u : axis.units) {
         if (!u.is_native()) {
            units.push_back(u);
            continue;
         }
         std::size_t l = native_level(h, u);
         if (l < level) {
            units.push_back(u);
         } else if (l == level && !placed) {
            bool keep = op.level.form == AttSelector::Form::Parameter && u.kind == DisplayUnit::Kind::Parameter;
            units.push_back(keep ? u : target);
            placed = true;
         } else if (!placed) {
            units.push_back(target);
            placed = true;
         }
      }
      axis.units = std::move(units);
   }
   return finish(std::move(r), RollupOp{d.name, op.level}, {d.name});
}

TM Algebra::nest(const TM& t, const NestOp& op) const {
   const Constellation& cs = ds_.constellation();
   const Dimension& d = require_dimension(cs, op.dimension);
   TM r = t;
   AxisSpec& axis = require_axis(r, d);
   auto at = find_unit(axis, op.attribute);
   if (!at) throw Error(ErrorCode::AttributeNotDisplayed, "'" + op.attribute + "' is not displayed on the " + d.name + " axis");
   const Dimension& dn = require_dimension(cs, op.nested_dimension);
   if (!cs.is_starred(t.subject.fact, dn.name)) {
      throw Error(ErrorCode::DimensionNotStarred, dn.name + " is not linked to " + t.subject.fact);
   }
   if (dn.name == d.name) throw Error(ErrorCode::ArgumentError, "cannot nest an attribute of the axis dimension itself");
   if (op.nested_attribute == kAll || !dn.attribute(op.nested_attribute)) {
      throw Error(ErrorCode::UnknownNestedAttribute, "'" + op.nested_attribute + "' is not a nestable attribute of " + dn.name);
   }
   DisplayUnit unit = DisplayUnit::nested(dn.name, op.nested_attribute);
   if (std::find(axis.units.begin(), axis.units.end(), unit) != axis.units.end()) {
      throw Error(ErrorCode::AlreadyNested, unit.label() + " is already nested on this axis");
   }
   axis.units.insert(axis.units.begin() + static_cast<long>(*at) + 1, unit);
   return finish(std::move(r), NestOp{d.name, op.attribute, dn.name, op.nested_attribute}, {d.name, dn.name});
}

TM Algebra::select(const TM& t, const SelectOp& op) const {
   const Constellation& cs = ds_.constellation();
   const Fact& f = require_fact(cs, t.subject.fact);
   Predicate pred;
   std::vector<std::string> objects;
   for (const auto& clause : op.predicate.clauses) {
      std::vector<Atom> out;
      for (const auto& a : clause) {
         Atom c = a;
         if (iequals(a.qualifier, f.name)) {
            c.qualifier = f.name;
            if (a.name == kAll) {
               if (is_numeric(a.literal)) throw Error(ErrorCode::TypeMismatchInComparison, "All compares with text");
            } else if (!f.measure(a.name)) {
               throw Error(ErrorCode::UnknownAttributeOrMeasure, "'" + a.name + "' is not a measure of " + f.name);
            } else if (!is_numeric(a.literal)) {
               throw Error(ErrorCode::TypeMismatchInComparison, "measure " + a.name + " compared with text");
            }
         } else {
            const Dimension* d = cs.dimension(a.qualifier);
            if (!d || !cs.is_starred(f.name, d->name)) {
               throw Error(ErrorCode::UnknownQualifier, "'" + a.qualifier + "' is neither " + f.name + " nor a linked dimension");
            }
            c.qualifier = d->name;
            const Attribute* attr = d->attribute(a.name);
            if (!attr) throw Error(ErrorCode::UnknownAttributeOrMeasure, "'" + a.name + "' is not an attribute of " + d->name);
            auto lit = coerce_literal(a.literal, attr->kind);
            if (!lit) {
               throw Error(ErrorCode::TypeMismatchInComparison,
                           d->name + "." + a.name + " is " + std::string(to_string(attr->kind)) + ", compared with " +
                               format_literal(a.literal));
            }
            c.literal = *lit;
         }
         objects.push_back(c.qualifier);
         out.push_back(std::move(c));
      }
      pred.clauses.push_back(std::move(out));
   }
   TM r = t;
   r.restriction = pred;
   return finish(std::move(r), SelectOp{std::move(pred)}, std::move(objects));
}

TM Algebra::switch_values(const TM& t, const SwitchOp& op) const {
   const Dimension& d = require_dimension(ds_.constellation(), op.dimension);
   AttributeKey key{d.name, op.attribute};
   auto shown = t.displayed_attributes();
   if (!std::binary_search(shown.begin(), shown.end(), key)) {
      throw Error(ErrorCode::AttributeNotDisplayed, d.name + "." + op.attribute + " is not displayed");
   }
   const Attribute* attr = d.attribute(op.attribute);
   auto order = effective_order(t, ds_, key);
   auto locate = [&](const Value& v) {
      auto c = coerce_literal(v, attr->kind);
      auto it = c ? std::find(order.begin(), order.end(), *c) : order.end();
      if (it == order.end()) {
         throw Error(ErrorCode::ValueNotInDomain, format_literal(v) + " is not a value of " + d.name + "." + op.attribute);
      }
      return it;
   };
   auto a = locate(op.first);
   auto b = locate(op.second);
   Value first = *a, second = *b;
   std::iter_swap(a, b);
   TM r = t;
   r.domain_orders[key] = std::move(order);
   return finish(std::move(r), SwitchOp{d.name, op.attribute, first, second}, {d.name});
}

TM Algebra::agregate(const TM& t, const AgregateOp& op) const {
   const Dimension& d = require_dimension(ds_.constellation(), op.dimension);
   TM r = t;
   AxisSpec& axis = require_axis(r, d);
   auto at = find_unit(axis, op.attribute);
   if (!at) throw Error(ErrorCode::AttributeNotDisplayed, "'" + op.attribute + "' is not displayed on the " + d.name + " axis");
   const DisplayUnit& unit = axis.units[*at];
   for (const auto& agg : r.aggregates) {
      if (agg.axis_dimension == d.name && unit_has(unit, agg.attribute)) {
         throw Error(ErrorCode::IncompatibleAggregate,
                     "header layer " + unit.label() + " already carries " + std::string(to_string(agg.fn)) + " subtotals");
      }
   }
   r.aggregates.push_back(AggregateSpec{d.name, AttributeKey{unit.dimension, op.attribute}, op.fn});
   std::sort(r.aggregates.begin(), r.aggregates.end());
   return finish(std::move(r), AgregateOp{d.name, op.fn, op.attribute}, {d.name});
}

TM Algebra::unagregate(const TM& t, const UnagregateOp& op) const {
   TM r = t;
   std::vector<std::string> objects;
   for (const auto& agg : r.aggregates) objects.push_back(agg.axis_dimension);
   r.aggregates.clear();
   return finish(std::move(r), op, std::move(objects));
}

TM Algebra::push(const TM& t, const PushOp& op) const {
   const Constellation& cs = ds_.constellation();
   const Dimension& d = require_dimension(cs, op.dimension);
   if (!cs.is_starred(t.subject.fact, d.name)) {
      throw Error(ErrorCode::DimensionNotStarred, d.name + " is not linked to " + t.subject.fact);
   }
   if (!d.attribute(op.attribute)) throw Error(ErrorCode::UnknownAttribute, "'" + op.attribute + "' is not an attribute of " + d.name);
   SubjectEntry e = PushedAttribute{d.name, op.attribute};
   TM r = t;
   if (std::find(r.subject.entries.begin(), r.subject.entries.end(), e) != r.subject.entries.end()) {
      throw Error(ErrorCode::AlreadyPushed, d.name + "." + op.attribute + " is already pushed");
   }
   r.subject.entries.push_back(e);
   return finish(std::move(r), PushOp{d.name, op.attribute}, {d.name});
}

TM Algebra::pull(const TM& t, const PullOp& op) const {
   const Dimension& d = require_dimension(ds_.constellation(), op.dimension);
   TM r = t;
   SubjectEntry e = op.measure;
   auto it = std::find(r.subject.entries.begin(), r.subject.entries.end(), e);
   if (it == r.subject.entries.end()) {
      throw Error(ErrorCode::MeasureNotInSubject, format_measure(op.measure) + " is not in the subject");
   }
   AxisSpec& axis = require_axis(r, d);
   for (const AxisSpec* a : {&r.line, &r.column}) {
      if (std::find(a->units.begin(), a->units.end(), DisplayUnit::pulled(op.measure)) != a->units.end()) {
         throw Error(ErrorCode::DuplicateMeasure, format_measure(op.measure) + " is already a header level");
      }
   }
   r.subject.entries.erase(it);
   axis.units.push_back(DisplayUnit::pulled(op.measure));
   return finish(std::move(r), PullOp{op.measure, d.name}, {t.subject.fact, d.name});
}

TM Algebra::addm(const TM& t, const AddmOp& op) const {
   const Fact& f = require_fact(ds_.constellation(), t.subject.fact);
   if (!f.measure(op.measure.measure)) {
      throw Error(ErrorCode::MeasureNotInFact, "'" + op.measure.measure + "' is not a measure of " + f.name);
   }
   TM r = t;
   SubjectEntry e = op.measure;
   if (std::find(r.subject.entries.begin(), r.subject.entries.end(), e) != r.subject.entries.end()) {
      throw Error(ErrorCode::DuplicateMeasure, format_measure(op.measure) + " is already in the subject");
   }
   r.subject.entries.push_back(e);
   return finish(std::move(r), op, {f.name});
}

TM Algebra::delm(const TM& t, const DelmOp& op) const {
   TM r = t;
   SubjectEntry e = op.measure;
   auto it = std::find(r.subject.entries.begin(), r.subject.entries.end(), e);
   if (it == r.subject.entries.end()) {
      throw Error(ErrorCode::MeasureNotInSubject, format_measure(op.measure) + " is not in the subject");
   }
   if (r.subject.entries.size() < 2) throw Error(ErrorCode::LastMeasure, "the subject cannot become empty");
   r.subject.entries.erase(it);
   return finish(std::move(r), op, {t.subject.fact});
}

} // namespace golap
