#pragma once

#include "generate.hpp"

#include "golap/query.hpp"
#include "golap/tm.hpp"

#include <string>
#include <vector>

namespace golap::testing {

inline const char* kT0 = "DISPLAY('SH_IMPORT', Importations, {SUM(Montant)}, Fournisseurs, HGeo, Dates, HTps)";

/// Evaluates `text` over FIX1 with T0 bound.
inline TM fx(const std::string& text) {
   static const Algebra algebra(fix1());
   Environment env;
   env["T0"] = evaluate(parse_expression(kT0), env, algebra);
   return evaluate(parse_expression(text), env, algebra);
}

inline Grid grid(const TM& t) { return materialize(t, fix1()); }

/// Formatted cell at the base row whose member labels are `row` and the
/// column whose last member label is `col`; "<missing>" when absent.
inline std::string cell(const Grid& g, const std::vector<std::string>& row, const std::string& col) {
   for (std::size_t r = 0; r < g.rows.leaves.size(); ++r) {
      const auto& leaf = g.rows.leaves[r];
      if (leaf.path.size() != row.size()) continue;
      bool match = true;
      for (std::size_t k = 0; k < row.size(); ++k) {
         std::string label = leaf.subtotal && k + 1 == row.size() ? format_header_label(leaf, k) : format_member(leaf.path[k]);
         match = match && label == row[k];
      }
      if (!match) continue;
      for (std::size_t c = 0; c < g.columns.leaves.size(); ++c) {
         const auto& cl = g.columns.leaves[c];
         std::string label = cl.subtotal ? format_header_label(cl, cl.path.size() - 1) : format_member(cl.path.back());
         if (label == col) return format_cell(g.cells[r][c]);
      }
   }
   return "<missing>";
}

/// Row leaves as "a/b" strings, subtotal leaves included.
inline std::vector<std::string> row_labels(const Grid& g) {
   std::vector<std::string> out;
   for (const auto& leaf : g.rows.leaves) {
      std::string s;
      for (std::size_t k = 0; k < leaf.path.size(); ++k) {
         if (k) s += "/";
         s += leaf.subtotal && k + 1 == leaf.path.size() ? format_header_label(leaf, k) : format_member(leaf.path[k]);
      }
      out.push_back(s);
   }
   return out;
}

inline std::vector<std::string> column_labels(const Grid& g) {
   std::vector<std::string> out;
   for (const auto& leaf : g.columns.leaves) {
      std::string s;
      for (std::size_t k = 0; k < leaf.path.size(); ++k) {
         if (k) s += "/";
         s += leaf.subtotal && k + 1 == leaf.path.size() ? format_header_label(leaf, k) : format_member(leaf.path[k]);
      }
      out.push_back(s);
   }
   return out;
}

template <typename F>
ErrorCode error_of(F&& f) {
   try {
      f();
   } catch (const Error& e) {
      return e.code();
   }
   throw std::runtime_error("no error raised");
}

} // namespace golap::testing
