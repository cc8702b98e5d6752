#include "golap/algebra.hpp"

#include "golap/dataset.hpp"
#include "golap/error.hpp"
#include "golap/schema.hpp"

#include <algorithm>

namespace golap {

namespace {

/// A derived operator logs itself once, not its expansion.
TM relog(TM result, const TM& source, Operation op, std::vector<std::string> objects) {
   result.history = source.history;
   result.history.push_back(OperationRecord{std::move(op), std::move(objects)});
   return result;
}

} // namespace

TM Algebra::hrotate(const TM& t, const HrotateOp& op) const {
   TM r = drotate(t, DrotateOp{op.dimension, op.dimension, op.hierarchy});
   const auto& rec = std::get<DrotateOp>(r.history.back().operation);
   return relog(std::move(r), t, HrotateOp{rec.new_dimension, rec.hierarchy}, {rec.new_dimension});
}

TM Algebra::plot(const TM& t, const PlotOp& op) const {
   TM rolled = rollup(t, RollupOp{op.dimension, AttSelector::param(std::string(kAll))});
   TM r = drilldown(rolled, DrilldownOp{op.dimension, op.level});
   const std::string dim = std::get<DrilldownOp>(r.history.back().operation).dimension;
   return relog(std::move(r), t, PlotOp{dim, op.level}, {dim});
}

TM Algebra::order(const TM& t, const OrderOp& op) const {
   const Dimension* d = ds_.constellation().dimension(op.dimension);
   if (!d) throw Error(ErrorCode::UnknownDimension, "unknown dimension '" + op.dimension + "'");
   AttributeKey key{d->name, op.attribute};
   auto shown = t.displayed_attributes();
   if (!std::binary_search(shown.begin(), shown.end(), key)) {
      throw Error(ErrorCode::AttributeNotDisplayed, d->name + "." + op.attribute + " is not displayed");
   }
   auto current = effective_order(t, ds_, key);
   auto target = current;
   std::sort(target.begin(), target.end(), ValueLess{});
   if (op.order == SortOrder::Dsc) std::reverse(target.begin(), target.end());

   // Selection sort, one SWITCH per misplaced value.
   TM r = t;
   for (std::size_t i = 0; i < target.size(); ++i) {
      if (current[i] == target[i]) continue;
      auto j = static_cast<std::size_t>(std::find(current.begin() + static_cast<long>(i), current.end(), target[i]) -
                                        current.begin());
      r = switch_values(r, SwitchOp{d->name, op.attribute, current[i], current[j]});
      std::swap(current[i], current[j]);
   }
   return relog(std::move(r), t, OrderOp{d->name, op.attribute, op.order}, {d->name});
}

Predicate Algebra::unrestricted(const std::string& fact) const {
   const Constellation& cs = ds_.constellation();
   const Fact* f = cs.fact(fact);
   if (!f) throw Error(ErrorCode::UnknownFact, "unknown fact '" + fact + "'");
   Predicate p;
   Value all{std::string(kAllValue)};
   p.clauses.push_back({Atom{f->name, std::string(kAll), Comparator::Eq, all}});
   for (const auto& d : cs.star_of(f->name)) p.clauses.push_back({Atom{d, std::string(kAll), Comparator::Eq, all}});
   return p;
}

TM Algebra::unselect(const TM& t, const UnselectOp& op) const {
   TM r = select(t, SelectOp{unrestricted(t.subject.fact)});
   auto objects = r.history.back().objects;
   return relog(std::move(r), t, op, std::move(objects));
}

DisplaySpec Algebra::frotate_display(const TM& t, const FrotateOp& op) const {
   const Constellation& cs = ds_.constellation();
   const Fact* f = cs.fact(op.fact);
   if (!f) throw Error(ErrorCode::UnknownFact, "unknown fact '" + op.fact + "'");
   if (!cs.is_starred(f->name, t.line.dimension) || !cs.is_starred(f->name, t.column.dimension)) {
      throw Error(ErrorCode::FactDoesNotShareAxes,
                  f->name + " is not linked to both " + t.line.dimension + " and " + t.column.dimension);
   }
   return DisplaySpec{cs.name, f->name, op.measures, t.line.dimension, t.line.hierarchy, t.column.dimension,
                      t.column.hierarchy};
}

TM Algebra::frotate(const TM& t, const FrotateOp& op, ReplayReport* report) const {
   DisplaySpec spec = frotate_display(t, op);
   TM fresh = display(spec);
   TM r = history(t, t.line.dimension, history(t, t.column.dimension, fresh, report), report);
   return relog(std::move(r), t, FrotateOp{spec.fact, spec.measures}, {spec.fact});
}

TM Algebra::history(const TM& source, std::string_view object, const TM& target, ReplayReport* report) const {
   const Constellation& cs = ds_.constellation();
   bool compatible = iequals(object, target.subject.fact) || cs.is_starred(target.subject.fact, object);
   if (!compatible) {
      throw Error(ErrorCode::IncompatibleTarget,
                  "'" + std::string(object) + "' is neither " + target.subject.fact + " nor linked to it");
   }
   TM r = target;
   for (const auto& rec : source.history) {
      if (!rec.references(object)) continue;
      try {
         r = apply(r, rec.operation);
      } catch (const Error& e) {
         if (report) {
            report->skipped.push_back(std::string(rec.name()) + "(" + format_arguments(rec.operation) + "): " + e.what());
         }
      }
   }
   return r;
}

} // namespace golap
