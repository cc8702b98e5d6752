#include "oracle.hpp"

#include "golap/schema.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace golap::testing {

namespace {

// Comparison and folding are written out here rather than taken from the
// library so that a shared bug cannot cancel out.

int cmp(const Value& a, const Value& b) {
   bool na = !std::holds_alternative<std::string>(a), nb = !std::holds_alternative<std::string>(b);
   if (na && nb) {
      double x = std::holds_alternative<double>(a) ? std::get<double>(a) : static_cast<double>(std::get<std::int64_t>(a));
      double y = std::holds_alternative<double>(b) ? std::get<double>(b) : static_cast<double>(std::get<std::int64_t>(b));
      return x < y ? -1 : (x > y ? 1 : 0);
   }
   if (na != nb) return na ? -1 : 1;
   const auto& x = std::get<std::string>(a);
   const auto& y = std::get<std::string>(b);
   return x < y ? -1 : (x > y ? 1 : 0);
}

bool holds(Comparator op, int c) {
   switch (op) {
      case Comparator::Eq: return c == 0;
      case Comparator::Ne: return c != 0;
      case Comparator::Lt: return c < 0;
      case Comparator::Le: return c <= 0;
      case Comparator::Gt: return c > 0;
      case Comparator::Ge: return c >= 0;
   }
   return false;
}

using Tuple = std::vector<std::vector<Value>>;

int cmp_tuple(const Tuple& a, const Tuple& b) {
   for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      for (std::size_t j = 0; j < std::min(a[i].size(), b[i].size()); ++j) {
         if (int c = cmp(a[i][j], b[i][j])) return c;
      }
      if (a[i].size() != b[i].size()) return a[i].size() < b[i].size() ? -1 : 1;
   }
   if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
   return 0;
}

struct TupleLess {
   bool operator()(const Tuple& a, const Tuple& b) const { return cmp_tuple(a, b) < 0; }
};

bool same(const Tuple& a, const Tuple& b) { return cmp_tuple(a, b) == 0; }

double fold(AggFn fn, const std::vector<double>& xs) {
   switch (fn) {
      case AggFn::Count: return static_cast<double>(xs.size());
      case AggFn::Sum: {
         double s = 0;
         for (double x : xs) s += x;
         return s;
      }
      case AggFn::Avg: {
         long double s = 0;
         for (double x : xs) s += x;
         return static_cast<double>(s / static_cast<long double>(xs.size()));
      }
      case AggFn::Min: return *std::min_element(xs.begin(), xs.end());
      case AggFn::Max: return *std::max_element(xs.begin(), xs.end());
   }
   return 0;
}

std::string show(const Tuple& t) {
   std::ostringstream out;
   out << "<";
   for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) out << " | ";
      for (std::size_t j = 0; j < t[i].size(); ++j) out << (j ? "," : "") << format_value(t[i][j]);
   }
   out << ">";
   return out.str();
}

struct Oracle {
   const TM& t;
   const Dataset& ds;
   const Constellation& cs;
   const Fact* fact = nullptr;
   std::vector<std::string> star;
   std::vector<std::size_t> kept;
   std::map<std::size_t, std::vector<double>> pulled;  // instance -> pulled values, in axis order

   Oracle(const TM& tm, const Dataset& d) : t(tm), ds(d), cs(d.constellation()) {
      fact = cs.fact(t.subject.fact);
      star = cs.star_of(fact->name);
   }

   std::size_t link(const std::string& dim) const {
      for (std::size_t k = 0; k < star.size(); ++k) {
         if (iequals(star[k], dim)) return k;
      }
      throw std::runtime_error("oracle: " + dim + " not linked");
   }

   const Value& attr(std::size_t i, const std::string& dim, const std::string& attribute) const {
      const auto& ft = ds.fact_table(fact->name);
      return ds.value(dim, ft.links[i][link(dim)], attribute);
   }

   double measure(std::size_t i, const std::string& m) const {
      return ds.fact_table(fact->name).measures[i][*fact->measure_index(m)];
   }

   bool passes(std::size_t i) const {
      for (const auto& clause : t.restriction.clauses) {
         bool any = false;
         for (const auto& a : clause) {
            Value lhs;
            if (a.name == kAll) {
               lhs = Value{std::string(kAllValue)};
            } else if (iequals(a.qualifier, fact->name)) {
               lhs = Value{measure(i, a.name)};
            } else {
               lhs = attr(i, a.qualifier, a.name);
            }
            if (holds(a.op, cmp(lhs, a.literal))) {
               any = true;
               break;
            }
         }
         if (!any) return false;
      }
      return true;
   }

   static std::vector<std::string> unit_attributes(const DisplayUnit& u) {
      switch (u.kind) {
         case DisplayUnit::Kind::Parameter: {
            std::vector<std::string> out{u.attribute};
            out.insert(out.end(), u.weak.begin(), u.weak.end());
            return out;
         }
         case DisplayUnit::Kind::WeakList: return u.weak;
         case DisplayUnit::Kind::Nested: return {u.attribute};
         case DisplayUnit::Kind::Measure: return {};
      }
      return {};
   }

   std::vector<DisplayUnit> units(const AxisSpec& axis) const {
      if (axis.units.empty()) return {DisplayUnit::parameter(axis.dimension, std::string(kAll))};
      return axis.units;
   }

   std::vector<Value> member(std::size_t i, const DisplayUnit& u) const {
      std::vector<Value> out;
      for (const auto& a : unit_attributes(u)) out.push_back(a == kAll ? Value{std::string(kAllValue)} : attr(i, u.dimension, a));
      return out;
   }

   Tuple base_key(std::size_t i) const {
      Tuple key;
      for (const AxisSpec* axis : {&t.line, &t.column}) {
         for (const auto& u : units(*axis)) {
            if (u.kind != DisplayUnit::Kind::Measure) key.push_back(member(i, u));
         }
      }
      return key;
   }

   void compute_pulled() {
      std::vector<MeasureTerm> terms;
      for (const AxisSpec* axis : {&t.line, &t.column}) {
         for (const auto& u : units(*axis)) {
            if (u.kind == DisplayUnit::Kind::Measure) terms.push_back(u.measure);
         }
      }
      if (terms.empty()) return;
      std::map<Tuple, std::vector<std::size_t>, TupleLess> groups;
      for (auto i : kept) groups[base_key(i)].push_back(i);
      for (const auto& [key, members] : groups) {
         std::vector<double> values;
         for (const auto& m : terms) {
            std::vector<double> xs;
            for (auto i : members) xs.push_back(measure(i, m.measure));
            values.push_back(fold(m.fn, xs));
         }
         for (auto i : members) pulled[i] = values;
      }
   }

   Tuple axis_key(std::size_t i, const AxisSpec& axis) const {
      std::size_t offset = 0;
      if (&axis == &t.column) {
         for (const auto& u : units(t.line)) offset += u.kind == DisplayUnit::Kind::Measure;
      }
      Tuple key;
      for (const auto& u : units(axis)) {
         if (u.kind == DisplayUnit::Kind::Measure) {
            key.push_back({Value{pulled.at(i)[offset++]}});
         } else {
            key.push_back(member(i, u));
         }
      }
      return key;
   }

   /// Index of the unit showing an aggregated attribute, preferring native units.
   std::optional<std::size_t> aggregated_level(const AxisSpec& axis, const AttributeKey& key) const {
      auto us = units(axis);
      for (int pass = 0; pass < 2; ++pass) {
         for (std::size_t n = 0; n < us.size(); ++n) {
            bool native = us[n].kind == DisplayUnit::Kind::Parameter || us[n].kind == DisplayUnit::Kind::WeakList;
            if (native != (pass == 0) || us[n].kind == DisplayUnit::Kind::Measure) continue;
            if (us[n].dimension != key.dimension) continue;
            auto attrs = unit_attributes(us[n]);
            if (std::find(attrs.begin(), attrs.end(), key.attribute) != attrs.end()) return n;
         }
      }
      return std::nullopt;
   }

   int order_cmp(const Tuple& a, const Tuple& b, const AxisSpec& axis) const {
      auto us = units(axis);
      for (std::size_t n = 0; n < a.size(); ++n) {
         auto attrs = unit_attributes(us[n]);
         for (std::size_t c = 0; c < a[n].size(); ++c) {
            const std::vector<Value>* order = nullptr;
            if (c < attrs.size()) {
               auto it = t.domain_orders.find(AttributeKey{us[n].dimension, attrs[c]});
               if (it != t.domain_orders.end()) order = &it->second;
            }
            if (order) {
               auto ia = std::find(order->begin(), order->end(), a[n][c]);
               auto ib = std::find(order->begin(), order->end(), b[n][c]);
               if (ia != ib) {
                  if (ia == order->end()) return 1;
                  if (ib == order->end()) return -1;
                  return ia < ib ? -1 : 1;
               }
               if (ia != order->end()) continue;
            }
            if (int r = cmp(a[n][c], b[n][c])) return r;
         }
      }
      return 0;
   }

   bool check_axis(const AxisSpec& axis, const AxisHeaders& headers, const std::set<Tuple, TupleLess>& keys,
                   std::string& why) const {
      // Base leaves: exactly the distinct keys, strictly increasing.
      std::vector<Tuple> base;
      for (const auto& leaf : headers.leaves) {
         if (!leaf.subtotal) base.push_back(leaf.path);
      }
      if (base.size() != keys.size()) {
         why = axis.dimension + ": " + std::to_string(base.size()) + " leaves, oracle has " + std::to_string(keys.size());
         return false;
      }
      for (const auto& b : base) {
         if (!keys.count(b)) {
            why = axis.dimension + ": unexpected leaf " + show(b);
            return false;
         }
      }
      for (std::size_t n = 1; n < base.size(); ++n) {
         if (order_cmp(base[n - 1], base[n], axis) >= 0) {
            why = axis.dimension + ": leaves out of order at " + show(base[n]);
            return false;
         }
      }
      // Subtotal leaves: one per distinct prefix of each aggregated layer,
      // right after its block.
      std::size_t expected = 0;
      for (const auto& agg : t.aggregates) {
         if (!iequals(agg.axis_dimension, axis.dimension)) continue;
         auto level = aggregated_level(axis, agg.attribute);
         if (!level) continue;
         std::set<Tuple, TupleLess> prefixes;
         for (const auto& k : keys) prefixes.insert(Tuple(k.begin(), k.begin() + static_cast<long>(*level) + 1));
         expected += prefixes.size();
         for (const auto& p : prefixes) {
            std::size_t found = 0, at = 0, last = 0;
            for (std::size_t n = 0; n < headers.leaves.size(); ++n) {
               const auto& leaf = headers.leaves[n];
               if (leaf.subtotal && same(leaf.path, p)) {
                  ++found;
                  at = n;
                  if (*leaf.subtotal != agg.fn) {
                     why = axis.dimension + ": subtotal " + show(p) + " has the wrong function";
                     return false;
                  }
               }
               if (!leaf.subtotal && same(Tuple(leaf.path.begin(), leaf.path.begin() + static_cast<long>(*level) + 1), p)) {
                  last = n;
               }
            }
            if (found != 1) {
               why = axis.dimension + ": subtotal " + show(p) + " appears " + std::to_string(found) + " times";
               return false;
            }
            for (std::size_t n = last + 1; n < at; ++n) {
               if (!headers.leaves[n].subtotal) {
                  why = axis.dimension + ": subtotal " + show(p) + " is not right after its block";
                  return false;
               }
            }
            if (at < last) {
               why = axis.dimension + ": subtotal " + show(p) + " precedes its block";
               return false;
            }
         }
      }
      if (headers.leaves.size() != base.size() + expected) {
         why = axis.dimension + ": unexpected number of subtotal leaves";
         return false;
      }
      return true;
   }
};

bool leaf_matches(const HeaderLeaf& leaf, const Tuple& key) {
   if (!leaf.subtotal) return same(leaf.path, key);
   if (leaf.path.size() > key.size()) return false;
   return same(leaf.path, Tuple(key.begin(), key.begin() + static_cast<long>(leaf.path.size())));
}

} // namespace

OracleReport oracle_check(const TM& t, const Dataset& ds, const Grid& grid, double avg_tolerance) {
   OracleReport rep;
   auto fail = [&](std::string why) {
      rep.ok = false;
      rep.message = std::move(why);
      return rep;
   };
   Oracle o(t, ds);
   std::size_t n = ds.fact_count(o.fact->name);
   for (std::size_t i = 0; i < n; ++i) {
      if (o.passes(i)) o.kept.push_back(i);
   }
   o.compute_pulled();

   std::map<std::size_t, std::pair<Tuple, Tuple>> keys;
   std::set<Tuple, TupleLess> row_keys, col_keys;
   for (auto i : o.kept) {
      auto rk = o.axis_key(i, t.line);
      auto ck = o.axis_key(i, t.column);
      row_keys.insert(rk);
      col_keys.insert(ck);
      keys[i] = {std::move(rk), std::move(ck)};
   }

   std::string why;
   if (!o.check_axis(t.line, grid.rows, row_keys, why)) return fail(why);
   if (!o.check_axis(t.column, grid.columns, col_keys, why)) return fail(why);
   if (grid.cells.size() != grid.rows.leaves.size()) return fail("cell matrix height differs from row leaves");

   // Instances per leaf, then per cell by intersection.
   auto members = [&](const std::vector<HeaderLeaf>& leaves, bool rows) {
      std::vector<std::set<std::size_t>> out(leaves.size());
      for (std::size_t l = 0; l < leaves.size(); ++l) {
         for (const auto& [i, kc] : keys) {
            if (leaf_matches(leaves[l], rows ? kc.first : kc.second)) out[l].insert(i);
         }
      }
      return out;
   };
   auto rm = members(grid.rows.leaves, true);
   auto cm = members(grid.columns.leaves, false);

   for (std::size_t r = 0; r < grid.rows.leaves.size(); ++r) {
      if (grid.cells[r].size() != grid.columns.leaves.size()) return fail("cell matrix width differs from column leaves");
      for (std::size_t c = 0; c < grid.columns.leaves.size(); ++c) {
         std::vector<std::size_t> inst;
         std::set_intersection(rm[r].begin(), rm[r].end(), cm[c].begin(), cm[c].end(), std::back_inserter(inst));
         const Cell& cell = grid.cells[r][c];
         std::string where = "cell " + show(grid.rows.leaves[r].path) + " x " + show(grid.columns.leaves[c].path);
         if (inst.empty()) {
            if (cell) return fail(where + " should be empty");
            continue;
         }
         if (!cell) return fail(where + " is empty, oracle has " + std::to_string(inst.size()) + " rows");
         if (cell->size() != t.subject.entries.size()) return fail(where + " has the wrong number of entries");
         std::optional<AggFn> subtotal =
             grid.rows.leaves[r].subtotal ? grid.rows.leaves[r].subtotal : grid.columns.leaves[c].subtotal;
         for (std::size_t e = 0; e < t.subject.entries.size(); ++e) {
            const auto& entry = t.subject.entries[e];
            if (auto m = std::get_if<MeasureTerm>(&entry)) {
               std::vector<double> xs;
               for (auto i : inst) xs.push_back(o.measure(i, m->measure));
               AggFn fn = subtotal.value_or(m->fn);
               double want = fold(fn, xs);
               auto got = std::get_if<double>(&(*cell)[e]);
               if (!got) return fail(where + ": entry " + std::to_string(e) + " is not a number");
               if (fn == AggFn::Avg) {
                  double err = std::fabs(*got - want) / std::max(1.0, std::fabs(want));
                  rep.max_avg_error = std::max(rep.max_avg_error, err);
                  ++rep.avg_cells;
                  if (err > avg_tolerance) return fail(where + ": AVG " + format_number(*got) + " vs " + format_number(want));
               } else if (*got != want) {
                  return fail(where + ": " + std::string(to_string(fn)) + " " + format_number(*got) + " vs " +
                              format_number(want));
               }
            } else {
               const auto& p = std::get<PushedAttribute>(entry);
               std::vector<Value> want;
               for (auto i : inst) want.push_back(p.attribute == kAll ? Value{std::string(kAllValue)} : o.attr(i, p.dimension, p.attribute));
               std::sort(want.begin(), want.end(), [](const Value& a, const Value& b) { return cmp(a, b) < 0; });
               want.erase(std::unique(want.begin(), want.end(), [](const Value& a, const Value& b) { return cmp(a, b) == 0; }),
                          want.end());
               auto got = std::get_if<std::vector<Value>>(&(*cell)[e]);
               if (!got || *got != want) return fail(where + ": pushed values differ");
            }
            ++rep.cells;
         }
      }
   }
   return rep;
}

} // namespace golap::testing
