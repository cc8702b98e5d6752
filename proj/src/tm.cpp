#include "golap/tm.hpp"

#include "golap/dataset.hpp"
#include "golap/error.hpp"
#include "golap/schema.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <set>

namespace golap {

const AxisSpec* MultidimensionalTable::axis_of(std::string_view dimension) const {
   if (iequals(line.dimension, dimension)) return &line;
   if (iequals(column.dimension, dimension)) return &column;
   return nullptr;
}

AxisSpec* MultidimensionalTable::axis_of(std::string_view dimension) {
   if (iequals(line.dimension, dimension)) return &line;
   if (iequals(column.dimension, dimension)) return &column;
   return nullptr;
}

std::vector<MeasureTerm> MultidimensionalTable::measures() const {
   std::vector<MeasureTerm> out;
   for (const auto& e : subject.entries) {
      if (auto m = std::get_if<MeasureTerm>(&e)) out.push_back(*m);
   }
   return out;
}

std::vector<AttributeKey> MultidimensionalTable::displayed_attributes() const {
   std::vector<AttributeKey> out;
   for (const AxisSpec* axis : {&line, &column}) {
      for (const auto& u : axis->units) {
         for (const auto& a : u.attributes()) out.push_back(AttributeKey{u.dimension, a});
      }
   }
   std::sort(out.begin(), out.end());
   out.erase(std::unique(out.begin(), out.end()), out.end());
   return out;
}

// ---------------------------------------------------------------------------
// Invariants

namespace {

void check_axis(const AxisSpec& axis, const TM& tm, const Constellation& cs, std::vector<std::string>& out) {
   const Dimension* d = cs.dimension(axis.dimension);
   if (!d || d->name != axis.dimension) {
      out.push_back("axis dimension '" + axis.dimension + "' is not a (canonically named) dimension");
      return;
   }
   if (!cs.is_starred(tm.subject.fact, d->name)) out.push_back(d->name + " is not linked to " + tm.subject.fact);
   const Hierarchy* h = d->hierarchy(axis.hierarchy);
   if (!h) {
      out.push_back("hierarchy '" + axis.hierarchy + "' does not belong to " + d->name);
      return;
   }
   const Fact* f = cs.fact(tm.subject.fact);
   std::optional<std::size_t> last_level;
   for (std::size_t i = 0; i < axis.units.size(); ++i) {
      const auto& u = axis.units[i];
      for (std::size_t j = 0; j < i; ++j) {
         if (axis.units[j] == u) out.push_back("unit " + u.label() + " displayed twice");
      }
      switch (u.kind) {
         case DisplayUnit::Kind::Parameter:
         case DisplayUnit::Kind::WeakList: {
            if (u.dimension != d->name) {
               out.push_back("native unit " + u.label() + " names dimension " + u.dimension);
               break;
            }
            auto pos = h->position(u.attribute);
            if (!pos || *pos == 0) {
               out.push_back("'" + u.attribute + "' is not a displayable parameter of " + h->name);
               break;
            }
            const auto& weak = h->weak_of(u.attribute);
            for (const auto& w : u.weak) {
               if (std::find(weak.begin(), weak.end(), w) == weak.end()) {
                  out.push_back("'" + w + "' is not a weak attribute of " + u.attribute);
               }
            }
            if (u.kind == DisplayUnit::Kind::WeakList && u.weak.empty()) out.push_back("empty weak list unit");
            if (last_level && *pos <= *last_level) {
               out.push_back("native units of " + d->name + " are not in increasing level order");
            }
            last_level = *pos;
            break;
         }
         case DisplayUnit::Kind::Nested: {
            const Dimension* nd = cs.dimension(u.dimension);
            if (!nd || nd->name != u.dimension) {
               out.push_back("nested dimension '" + u.dimension + "' unknown");
               break;
            }
            if (!cs.is_starred(tm.subject.fact, nd->name)) out.push_back("nested dimension " + nd->name + " not linked");
            if (!nd->attribute(u.attribute) || u.attribute == kAll) {
               out.push_back("nested attribute '" + u.attribute + "' unknown in " + nd->name);
            }
            break;
         }
         case DisplayUnit::Kind::Measure:
            if (!f || !f->measure(u.measure.measure)) out.push_back("pulled measure " + u.label() + " not in fact");
            break;
      }
   }
}

bool unit_shows(const DisplayUnit& u, const AttributeKey& key) {
   if (u.kind == DisplayUnit::Kind::Measure || u.dimension != key.dimension) return false;
   auto attrs = u.attributes();
   return std::find(attrs.begin(), attrs.end(), key.attribute) != attrs.end();
}

} // namespace

std::vector<std::string> check_tm(const TM& tm, const Dataset& ds) {
   std::vector<std::string> out;
   const Constellation& cs = ds.constellation();
   if (tm.constellation != cs.name) out.push_back("constellation '" + tm.constellation + "' is not loaded");
   const Fact* f = cs.fact(tm.subject.fact);
   if (!f || f->name != tm.subject.fact) {
      out.push_back("subject fact '" + tm.subject.fact + "' unknown");
      return out;
   }

   std::size_t pulled = 0;
   for (const AxisSpec* axis : {&tm.line, &tm.column}) {
      for (const auto& u : axis->units) pulled += u.kind == DisplayUnit::Kind::Measure;
   }
   if (tm.subject.entries.empty() && pulled == 0) out.push_back("subject has no entry");
   for (std::size_t i = 0; i < tm.subject.entries.size(); ++i) {
      const auto& e = tm.subject.entries[i];
      for (std::size_t j = 0; j < i; ++j) {
         if (tm.subject.entries[j] == e) out.push_back("subject entry " + format_subject_entry(e) + " repeated");
      }
      if (auto m = std::get_if<MeasureTerm>(&e)) {
         if (!f->measure(m->measure)) out.push_back("measure '" + m->measure + "' not in " + f->name);
      } else {
         const auto& p = std::get<PushedAttribute>(e);
         const Dimension* d = cs.dimension(p.dimension);
         if (!d || !cs.is_starred(f->name, d->name) || !d->attribute(p.attribute)) {
            out.push_back("pushed attribute " + format_subject_entry(e) + " invalid");
         }
      }
   }

   if (iequals(tm.line.dimension, tm.column.dimension)) out.push_back("line and column show the same dimension");
   check_axis(tm.line, tm, cs, out);
   check_axis(tm.column, tm, cs, out);

   for (const auto& clause : tm.restriction.clauses) {
      for (const auto& a : clause) {
         if (iequals(a.qualifier, f->name)) {
            if (a.name == kAll) continue;
            if (!f->measure(a.name)) out.push_back("restriction names unknown measure " + a.name);
            else if (!is_numeric(a.literal)) out.push_back("restriction compares measure with text");
            continue;
         }
         const Dimension* d = cs.dimension(a.qualifier);
         if (!d || !cs.is_starred(f->name, d->name)) {
            out.push_back("restriction qualifier '" + a.qualifier + "' not linked to " + f->name);
            continue;
         }
         const Attribute* attr = d->attribute(a.name);
         if (!attr) out.push_back("restriction names unknown attribute " + a.qualifier + "." + a.name);
         else if (!coerce_literal(a.literal, attr->kind)) out.push_back("restriction literal type mismatch");
      }
   }

   std::set<std::pair<std::string, std::size_t>> aggregated_units;
   for (const auto& agg : tm.aggregates) {
      const AxisSpec* axis = tm.axis_of(agg.axis_dimension);
      if (!axis) {
         out.push_back("aggregate on dimension " + agg.axis_dimension + " which is off-axis");
         continue;
      }
      std::optional<std::size_t> level;
      for (std::size_t i = 0; i < axis->units.size(); ++i) {
         if (unit_shows(axis->units[i], agg.attribute)) level = i;
      }
      if (!level) {
         out.push_back("aggregate on undisplayed attribute " + agg.attribute.attribute);
      } else if (!aggregated_units.emplace(axis->dimension, *level).second) {
         out.push_back("two aggregates on the same header layer");
      }
   }
   return out;
}

void require_valid(const TM& tm, const Dataset& ds) {
   auto problems = check_tm(tm, ds);
   if (!problems.empty()) throw Error(ErrorCode::InvalidTable, problems.front());
}

std::vector<Value> effective_order(const TM& tm, const Dataset& ds, const AttributeKey& key) {
   if (auto it = tm.domain_orders.find(key); it != tm.domain_orders.end()) return it->second;
   std::vector<Value> out;
   for (auto& tuple : ds.member_values(key.dimension, {key.attribute})) out.push_back(std::move(tuple.front()));
   return out;
}

// ---------------------------------------------------------------------------
// Materialization

namespace {

struct Stats {
   std::size_t count = 0;
   double sum = 0;
   double min = std::numeric_limits<double>::infinity();
   double max = -std::numeric_limits<double>::infinity();

   void add(double v) {
      ++count;
      sum += v;
      min = std::min(min, v);
      max = std::max(max, v);
   }

   double finish(AggFn fn) const {
      switch (fn) {
         case AggFn::Sum: return sum;
         case AggFn::Avg: return sum / static_cast<double>(count);
         case AggFn::Min: return min;
         case AggFn::Max: return max;
         case AggFn::Count: return static_cast<double>(count);
      }
      return sum;
   }
};

struct CompiledAtom {
   enum class Source { Constant, Measure, Attribute } source = Source::Constant;
   bool constant = true;
   std::size_t measure = 0;
   std::size_t link = 0;
   std::size_t attribute = 0;
   std::string dimension;
   Comparator op = Comparator::Eq;
   Value literal;
};

struct UnitAccess {
   bool pulled = false;
   std::size_t pulled_index = 0;
   std::size_t link = 0;
   std::string dimension;
   std::vector<std::size_t> attributes;
   std::vector<AttributeKey> keys;
};

struct MemberLess {
   bool operator()(const Member& a, const Member& b) const {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), ValueLess{});
   }
};

struct KeyLess {
   bool operator()(const std::vector<Member>& a, const std::vector<Member>& b) const {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), MemberLess{});
   }
};

using OrderIndex = std::map<Value, std::size_t, ValueLess>;

struct AxisPlan {
   const AxisSpec* spec = nullptr;
   std::vector<DisplayUnit> units;
   std::vector<UnitAccess> access;
   /// per unit, per component: explicit order (or null)
   std::vector<std::vector<const OrderIndex*>> orders;
   /// aggregated layers, ascending
   std::vector<std::pair<std::size_t, AggFn>> aggregated;
};

class Materializer {
   public:
   Materializer(const TM& tm, const Dataset& ds) : tm_(tm), ds_(ds), cs_(ds.constellation()) {}

   Grid run() {
      fact_ = cs_.fact(tm_.subject.fact);
      if (!fact_) throw Error(ErrorCode::InvalidTable, "unknown fact " + tm_.subject.fact);
      star_ = &cs_.star_of(fact_->name);
      facts_ = &ds_.fact_table(fact_->name);

      for (const auto& [key, values] : tm_.domain_orders) {
         auto& idx = order_index_[key];
         for (std::size_t i = 0; i < values.size(); ++i) idx.emplace(values[i], i);
      }
      compile_restriction();
      plan_axis(tm_.line, rows_);
      plan_axis(tm_.column, cols_);
      compile_subject();

      std::vector<std::size_t> instances;
      for (std::size_t i = 0; i < facts_->size(); ++i) {
         if (passes(i)) instances.push_back(i);
      }
      compute_pulled(instances);

      std::vector<std::vector<Member>> row_keys, col_keys;
      for (auto i : instances) {
         row_keys.push_back(key_of(i, rows_));
         col_keys.push_back(key_of(i, cols_));
      }

      Grid g;
      g.fact = fact_->name;
      for (const auto& e : tm_.subject.entries) g.subject.push_back(format_subject_entry(e));
      g.restriction = restriction_lines();
      auto row_leaves = build_leaves(row_keys, rows_);
      auto col_leaves = build_leaves(col_keys, cols_);
      g.rows = headers(rows_, row_leaves);
      g.columns = headers(cols_, col_leaves);
      g.cells = fill_cells(instances, row_keys, col_keys, rows_, cols_, g.rows.leaves, g.columns.leaves);
      return g;
   }

   private:
   std::size_t link_of(const std::string& dimension) const {
      for (std::size_t k = 0; k < star_->size(); ++k) {
         if (iequals((*star_)[k], dimension)) return k;
      }
      throw Error(ErrorCode::InvalidTable, dimension + " is not linked to " + fact_->name);
   }

   std::size_t attribute_of(const std::string& dimension, const std::string& attribute) const {
      const Dimension* d = cs_.dimension(dimension);
      if (!d) throw Error(ErrorCode::InvalidTable, "unknown dimension " + dimension);
      auto idx = d->attribute_index(attribute);
      if (!idx) throw Error(ErrorCode::InvalidTable, d->name + " has no attribute " + attribute);
      return *idx;
   }

   void compile_restriction() {
      for (const auto& clause : tm_.restriction.clauses) {
         std::vector<CompiledAtom> out;
         for (const auto& a : clause) {
            CompiledAtom c;
            c.op = a.op;
            c.literal = a.literal;
            if (a.name == kAll) {
               c.source = CompiledAtom::Source::Constant;
               c.constant = apply_comparator(a.op, compare_values(Value{std::string(kAllValue)}, a.literal));
            } else if (iequals(a.qualifier, fact_->name)) {
               auto idx = fact_->measure_index(a.name);
               if (!idx) throw Error(ErrorCode::InvalidTable, "unknown measure " + a.name);
               c.source = CompiledAtom::Source::Measure;
               c.measure = *idx;
            } else {
               c.source = CompiledAtom::Source::Attribute;
               c.link = link_of(a.qualifier);
               c.dimension = a.qualifier;
               c.attribute = attribute_of(a.qualifier, a.name);
            }
            out.push_back(std::move(c));
         }
         restriction_.push_back(std::move(out));
      }
   }

   bool passes(std::size_t i) const {
      for (const auto& clause : restriction_) {
         bool any = false;
         for (const auto& a : clause) {
            bool ok = false;
            switch (a.source) {
               case CompiledAtom::Source::Constant: ok = a.constant; break;
               case CompiledAtom::Source::Measure:
                  ok = apply_comparator(a.op, compare_values(Value{facts_->measures[i][a.measure]}, a.literal));
                  break;
               case CompiledAtom::Source::Attribute: {
                  const auto& row = ds_.dimension_table(a.dimension).rows[facts_->links[i][a.link]];
                  ok = apply_comparator(a.op, compare_values(row[a.attribute], a.literal));
                  break;
               }
            }
            if (ok) {
               any = true;
               break;
            }
         }
         if (!any) return false;
      }
      return true;
   }

   void plan_axis(const AxisSpec& axis, AxisPlan& plan) {
      plan.spec = &axis;
      plan.units = axis.units;
      if (plan.units.empty()) plan.units.push_back(DisplayUnit::parameter(axis.dimension, std::string(kAll)));
      for (const auto& u : plan.units) {
         UnitAccess acc;
         std::vector<const OrderIndex*> orders;
         if (u.kind == DisplayUnit::Kind::Measure) {
            acc.pulled = true;
            acc.pulled_index = pulled_.size();
            auto idx = fact_->measure_index(u.measure.measure);
            if (!idx) throw Error(ErrorCode::InvalidTable, "unknown pulled measure " + u.measure.measure);
            pulled_.emplace_back(u.measure.fn, *idx);
            orders.push_back(nullptr);
         } else {
            acc.link = link_of(u.dimension);
            acc.dimension = u.dimension;
            for (const auto& a : u.attributes()) {
               acc.attributes.push_back(attribute_of(u.dimension, a));
               AttributeKey key{u.dimension, a};
               auto it = order_index_.find(key);
               orders.push_back(it == order_index_.end() ? nullptr : &it->second);
               acc.keys.push_back(std::move(key));
            }
         }
         plan.access.push_back(std::move(acc));
         plan.orders.push_back(std::move(orders));
      }
      for (const auto& agg : tm_.aggregates) {
         if (!iequals(agg.axis_dimension, axis.dimension)) continue;
         for (std::size_t i = 0; i < plan.units.size(); ++i) {
            if (unit_shows(plan.units[i], agg.attribute)) {
               plan.aggregated.emplace_back(i, agg.fn);
               break;
            }
         }
      }
      std::sort(plan.aggregated.begin(), plan.aggregated.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
   }

   void compile_subject() {
      for (const auto& e : tm_.subject.entries) {
         Entry out;
         if (auto m = std::get_if<MeasureTerm>(&e)) {
            auto idx = fact_->measure_index(m->measure);
            if (!idx) throw Error(ErrorCode::InvalidTable, "unknown measure " + m->measure);
            out.fn = m->fn;
            out.measure = *idx;
         } else {
            const auto& p = std::get<PushedAttribute>(e);
            out.pushed = true;
            out.link = link_of(p.dimension);
            out.dimension = p.dimension;
            out.attribute = attribute_of(p.dimension, p.attribute);
         }
         entries_.push_back(std::move(out));
      }
   }

   Member member_of(std::size_t i, const UnitAccess& acc) const {
      if (acc.pulled) return Member{Value{pulled_values_.at(i)[acc.pulled_index]}};
      const auto& row = ds_.dimension_table(acc.dimension).rows[facts_->links[i][acc.link]];
      Member m;
      m.reserve(acc.attributes.size());
      for (auto a : acc.attributes) m.push_back(row[a]);
      return m;
   }

   std::vector<Member> key_of(std::size_t i, const AxisPlan& plan) const {
      std::vector<Member> key;
      key.reserve(plan.access.size());
      for (const auto& acc : plan.access) key.push_back(member_of(i, acc));
      return key;
   }

   // A pulled measure becomes an attribute of each instance: its aggregate
   // over the group formed by every non-measure unit of both axes.
   void compute_pulled(const std::vector<std::size_t>& instances) {
      if (pulled_.empty()) return;
      auto base_key = [&](std::size_t i) {
         std::vector<Member> key;
         for (const AxisPlan* plan : {&rows_, &cols_}) {
            for (const auto& acc : plan->access) {
               if (!acc.pulled) key.push_back(member_of(i, acc));
            }
         }
         return key;
      };
      std::map<std::vector<Member>, std::vector<Stats>, KeyLess> groups;
      std::vector<std::vector<Member>> keys;
      for (auto i : instances) {
         keys.push_back(base_key(i));
         auto& stats = groups[keys.back()];
         stats.resize(pulled_.size());
         for (std::size_t p = 0; p < pulled_.size(); ++p) stats[p].add(facts_->measures[i][pulled_[p].second]);
      }
      for (std::size_t n = 0; n < instances.size(); ++n) {
         const auto& stats = groups[keys[n]];
         std::vector<double> values;
         for (std::size_t p = 0; p < pulled_.size(); ++p) values.push_back(stats[p].finish(pulled_[p].first));
         pulled_values_[instances[n]] = std::move(values);
      }
   }

   static int compare_component(const Value& a, const Value& b, const OrderIndex* order) {
      if (order) {
         auto ia = order->find(a), ib = order->find(b);
         bool ha = ia != order->end(), hb = ib != order->end();
         if (ha && hb) return ia->second < ib->second ? -1 : (ia->second > ib->second ? 1 : 0);
         if (ha != hb) return ha ? -1 : 1;
      }
      return compare_values(a, b);
   }

   static int compare_keys(const std::vector<Member>& a, const std::vector<Member>& b, const AxisPlan& plan) {
      for (std::size_t u = 0; u < a.size(); ++u) {
         for (std::size_t c = 0; c < a[u].size(); ++c) {
            const OrderIndex* order = c < plan.orders[u].size() ? plan.orders[u][c] : nullptr;
            if (int r = compare_component(a[u][c], b[u][c], order)) return r;
         }
      }
      return 0;
   }

   std::vector<HeaderLeaf> build_leaves(const std::vector<std::vector<Member>>& keys, const AxisPlan& plan) const {
      std::set<std::vector<Member>, KeyLess> distinct(keys.begin(), keys.end());
      std::vector<std::vector<Member>> sorted(distinct.begin(), distinct.end());
      std::stable_sort(sorted.begin(), sorted.end(),
                       [&](const auto& a, const auto& b) { return compare_keys(a, b, plan) < 0; });

      std::vector<HeaderLeaf> out;
      for (std::size_t n = 0; n < sorted.size(); ++n) {
         out.push_back(HeaderLeaf{sorted[n], std::nullopt});
         for (auto it = plan.aggregated.rbegin(); it != plan.aggregated.rend(); ++it) {
            std::size_t level = it->first;
            bool block_ends = n + 1 == sorted.size() ||
                              !std::equal(sorted[n].begin(), sorted[n].begin() + static_cast<long>(level) + 1,
                                          sorted[n + 1].begin(),
                                          [](const Member& x, const Member& y) { return !MemberLess{}(x, y) && !MemberLess{}(y, x); });
            if (block_ends) {
               out.push_back(HeaderLeaf{std::vector<Member>(sorted[n].begin(), sorted[n].begin() + static_cast<long>(level) + 1),
                                        it->second});
            }
         }
      }
      return out;
   }

   static AxisHeaders headers(const AxisPlan& plan, std::vector<HeaderLeaf> leaves) {
      AxisHeaders h;
      h.dimension = plan.spec->dimension;
      h.hierarchy = plan.spec->hierarchy;
      for (const auto& u : plan.units) h.layers.push_back(u.label());
      h.leaves = std::move(leaves);
      return h;
   }

   struct Entry {
      bool pushed = false;
      AggFn fn = AggFn::Sum;
      std::size_t measure = 0;
      std::size_t link = 0;
      std::string dimension;
      std::size_t attribute = 0;
   };

   struct Accumulator {
      std::vector<Stats> stats;
      std::vector<std::set<Value, ValueLess>> sets;
   };

   std::vector<std::vector<Cell>> fill_cells(const std::vector<std::size_t>& instances,
                                             const std::vector<std::vector<Member>>& row_keys,
                                             const std::vector<std::vector<Member>>& col_keys, const AxisPlan& rplan,
                                             const AxisPlan& cplan, const std::vector<HeaderLeaf>& rleaves,
                                             const std::vector<HeaderLeaf>& cleaves) const {
      auto index = [](const std::vector<HeaderLeaf>& leaves) {
         std::map<std::pair<std::size_t, std::vector<Member>>, std::size_t> idx;
         for (std::size_t n = 0; n < leaves.size(); ++n) {
            std::size_t tag = leaves[n].subtotal ? leaves[n].path.size() : 0;
            idx.emplace(std::make_pair(tag, leaves[n].path), n);
         }
         return idx;
      };
      auto ridx = index(rleaves), cidx = index(cleaves);

      auto targets = [](const std::vector<Member>& key, const AxisPlan& plan, const auto& idx) {
         std::vector<std::size_t> out;
         out.push_back(idx.at(std::make_pair(std::size_t{0}, key)));
         for (const auto& [level, fn] : plan.aggregated) {
            std::vector<Member> prefix(key.begin(), key.begin() + static_cast<long>(level) + 1);
            out.push_back(idx.at(std::make_pair(level + 1, prefix)));
         }
         return out;
      };

      std::vector<std::vector<std::optional<Accumulator>>> acc(rleaves.size(),
                                                               std::vector<std::optional<Accumulator>>(cleaves.size()));
      for (std::size_t n = 0; n < instances.size(); ++n) {
         std::size_t i = instances[n];
         auto rs = targets(row_keys[n], rplan, ridx);
         auto cs = targets(col_keys[n], cplan, cidx);
         for (auto r : rs) {
            for (auto c : cs) {
               auto& cell = acc[r][c];
               if (!cell) {
                  cell.emplace();
                  cell->stats.resize(entries_.size());
                  cell->sets.resize(entries_.size());
               }
               for (std::size_t e = 0; e < entries_.size(); ++e) {
                  const Entry& en = entries_[e];
                  if (en.pushed) {
                     const auto& row = ds_.dimension_table(en.dimension).rows[facts_->links[i][en.link]];
                     cell->sets[e].insert(row[en.attribute]);
                  } else {
                     cell->stats[e].add(facts_->measures[i][en.measure]);
                  }
               }
            }
         }
      }

      std::vector<std::vector<Cell>> cells(rleaves.size(), std::vector<Cell>(cleaves.size()));
      for (std::size_t r = 0; r < rleaves.size(); ++r) {
         for (std::size_t c = 0; c < cleaves.size(); ++c) {
            const auto& a = acc[r][c];
            if (!a) continue;
            std::optional<AggFn> subtotal = rleaves[r].subtotal ? rleaves[r].subtotal : cleaves[c].subtotal;
            std::vector<CellEntry> out;
            for (std::size_t e = 0; e < entries_.size(); ++e) {
               if (entries_[e].pushed) {
                  out.emplace_back(std::vector<Value>(a->sets[e].begin(), a->sets[e].end()));
               } else {
                  out.emplace_back(a->stats[e].finish(subtotal.value_or(entries_[e].fn)));
               }
            }
            cells[r][c] = std::move(out);
         }
      }
      return cells;
   }

   std::vector<std::string> restriction_lines() const {
      std::vector<std::string> out;
      auto upper = [](std::string s) {
         for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
         return s;
      };
      for (const auto& clause : normalize(tm_.restriction).clauses) {
         if (clause.empty()) {
            out.emplace_back("false");
            continue;
         }
         std::string line;
         for (std::size_t i = 0; i < clause.size(); ++i) {
            const auto& a = clause[i];
            if (i) line += " OR ";
            line += upper(a.qualifier + "." + a.name) + " " + std::string(to_string(a.op)) + " " + format_literal(a.literal);
         }
         out.push_back(std::move(line));
      }
      return out;
   }

   const TM& tm_;
   const Dataset& ds_;
   const Constellation& cs_;
   const Fact* fact_ = nullptr;
   const std::vector<std::string>* star_ = nullptr;
   const FactTable* facts_ = nullptr;
   std::map<AttributeKey, OrderIndex> order_index_;
   std::vector<std::vector<CompiledAtom>> restriction_;
   std::vector<Entry> entries_;
   std::vector<std::pair<AggFn, std::size_t>> pulled_;
   std::map<std::size_t, std::vector<double>> pulled_values_;
   AxisPlan rows_, cols_;
};

} // namespace

Grid materialize(const TM& tm, const Dataset& ds) { return Materializer(tm, ds).run(); }

// ---------------------------------------------------------------------------
// Formatting and rendering

std::string format_member(const Member& m) {
   if (m.empty()) return "";
   std::string out = format_value(m.front());
   if (m.size() > 1) {
      out += " (";
      for (std::size_t i = 1; i < m.size(); ++i) {
         if (i > 1) out += ", ";
         out += format_value(m[i]);
      }
      out += ")";
   }
   return out;
}

std::string format_header_label(const HeaderLeaf& leaf, std::size_t layer) {
   if (layer >= leaf.path.size()) return "";
   if (leaf.subtotal && layer + 1 == leaf.path.size()) {
      return std::string(to_string(*leaf.subtotal)) + "(" + format_member(leaf.path[layer]) + ")";
   }
   return format_member(leaf.path[layer]);
}

std::string format_cell(const Cell& cell) {
   if (!cell) return "";
   std::string out = "(";
   for (std::size_t i = 0; i < cell->size(); ++i) {
      if (i) out += ", ";
      const auto& e = (*cell)[i];
      if (auto d = std::get_if<double>(&e)) {
         out += format_number(*d);
      } else {
         out += "{";
         const auto& vs = std::get<std::vector<Value>>(e);
         for (std::size_t k = 0; k < vs.size(); ++k) {
            if (k) out += ", ";
            out += format_value(vs[k]);
         }
         out += "}";
      }
   }
   return out + ")";
}

std::vector<HeaderNode> header_tree(const AxisHeaders& axis) {
   std::vector<HeaderNode> roots;
   for (const auto& leaf : axis.leaves) {
      std::vector<HeaderNode>* level = &roots;
      for (std::size_t l = 0; l < leaf.path.size(); ++l) {
         bool is_subtotal = leaf.subtotal && l + 1 == leaf.path.size();
         bool reuse = !level->empty() && !is_subtotal && !level->back().subtotal && level->back().member == leaf.path[l];
         if (!reuse) {
            HeaderNode node;
            node.label = format_header_label(leaf, l);
            node.member = leaf.path[l];
            if (is_subtotal) node.subtotal = leaf.subtotal;
            level->push_back(std::move(node));
         }
         level = &level->back().children;
      }
   }
   return roots;
}

namespace {

std::string upper(std::string s) {
   for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
   return s;
}

std::size_t display_width(const std::string& s) {
   std::size_t n = 0;
   for (unsigned char c : s) n += (c & 0xC0) != 0x80;
   return n;
}

/// Label at `layer` when it starts a new block relative to the previous leaf.
std::string stacked_label(const std::vector<HeaderLeaf>& leaves, std::size_t n, std::size_t layer) {
   const auto& leaf = leaves[n];
   if (layer >= leaf.path.size()) return "";
   bool own_subtotal = leaf.subtotal && layer + 1 == leaf.path.size();
   if (n > 0 && !own_subtotal) {
      const auto& prev = leaves[n - 1];
      bool same_prefix = prev.path.size() > layer &&
                         std::equal(leaf.path.begin(), leaf.path.begin() + static_cast<long>(layer) + 1, prev.path.begin());
      bool prev_is_subtotal_here = prev.subtotal && prev.path.size() == layer + 1;
      if (same_prefix && !prev_is_subtotal_here) return "";
   }
   return format_header_label(leaf, layer);
}

} // namespace

std::string render_text(const Grid& g) {
   const std::size_t R = g.rows.layers.size();
   const std::size_t C = g.columns.layers.size();
   const std::size_t width = 1 + std::max<std::size_t>(R, 1) + g.columns.leaves.size();
   const std::size_t anchor = std::max<std::size_t>(R, 1);
   std::vector<std::vector<std::string>> lines;
   auto blank = [&] { return std::vector<std::string>(width); };

   std::string measures;
   for (std::size_t i = 0; i < g.subject.size(); ++i) measures += (i ? ", " : "") + upper(g.subject[i]);

   auto top = blank();
   top[0] = upper(g.fact);
   top[anchor] = upper(g.columns.dimension + " " + g.columns.hierarchy);
   lines.push_back(std::move(top));
   for (std::size_t j = 0; j < C; ++j) {
      auto line = blank();
      if (j == 0) line[0] = measures;
      line[anchor] = upper(g.columns.layers[j]);
      for (std::size_t c = 0; c < g.columns.leaves.size(); ++c) {
         line[anchor + 1 + c] = stacked_label(g.columns.leaves, c, j);
      }
      lines.push_back(std::move(line));
   }
   auto axis_line = blank();
   axis_line[0] = upper(g.rows.dimension + " " + g.rows.hierarchy);
   for (std::size_t j = 0; j < R; ++j) axis_line[1 + j] = upper(g.rows.layers[j]);
   lines.push_back(std::move(axis_line));
   for (std::size_t r = 0; r < g.rows.leaves.size(); ++r) {
      auto line = blank();
      for (std::size_t j = 0; j < R; ++j) line[1 + j] = stacked_label(g.rows.leaves, r, j);
      for (std::size_t c = 0; c < g.columns.leaves.size(); ++c) line[anchor + 1 + c] = format_cell(g.cells[r][c]);
      lines.push_back(std::move(line));
   }

   std::vector<std::size_t> widths(width, 0);
   for (const auto& line : lines) {
      for (std::size_t k = 0; k < width; ++k) widths[k] = std::max(widths[k], display_width(line[k]));
   }
   std::string out;
   for (const auto& line : lines) {
      std::string text;
      for (std::size_t k = 0; k < width; ++k) {
         if (k) text += "  ";
         text += line[k];
         text.append(widths[k] - display_width(line[k]), ' ');
      }
      while (!text.empty() && text.back() == ' ') text.pop_back();
      out += text + "\n";
   }
   if (!g.restriction.empty()) {
      out += "\n";
      for (const auto& clause : g.restriction) out += clause + "\n";
   }
   return out;
}

std::string render(const Grid& g, RenderFormat format) {
   return format == RenderFormat::Text ? render_text(g) : render_structured(g, 2);
}

// ---------------------------------------------------------------------------
// Equality

std::string tm_difference(const TM& a, const TM& b, const Dataset& ds) {
   if (a.constellation != b.constellation) return "constellation differs";
   if (!(a.subject == b.subject)) return "subject differs";
   if (!(a.line == b.line)) return "line axis differs";
   if (!(a.column == b.column)) return "column axis differs";
   if (!(normalize(a.restriction) == normalize(b.restriction))) {
      return "restriction differs: " + format_predicate(a.restriction) + " vs " + format_predicate(b.restriction);
   }
   for (const auto& key : a.displayed_attributes()) {
      if (effective_order(a, ds, key) != effective_order(b, ds, key)) return "order of " + key.attribute + " differs";
   }
   auto aggs_a = a.aggregates, aggs_b = b.aggregates;
   std::sort(aggs_a.begin(), aggs_a.end());
   std::sort(aggs_b.begin(), aggs_b.end());
   if (aggs_a != aggs_b) return "aggregates differ";
   if (!(materialize(a, ds) == materialize(b, ds))) return "grids differ";
   return "";
}

bool tm_equal(const TM& a, const TM& b, const Dataset& ds) { return tm_difference(a, b, ds).empty(); }

} // namespace golap
