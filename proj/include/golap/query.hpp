#pragma once

#include "golap/algebra.hpp"
#include "golap/error.hpp"
#include "golap/operation.hpp"
#include "golap/tm.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace golap {

/// Typed expression tree. Leaves are DISPLAY calls and TM names.
struct Expr {
   enum class Kind { Reference, Display, Apply, History };

   Kind kind = Kind::Reference;
   std::string name;        ///< Reference
   DisplaySpec display;     ///< Display
   Operation operation;     ///< Apply
   std::string object;      ///< History: the fact or dimension replayed
   /// Apply: {source}; History: {old table, new table}.
   std::vector<Expr> operands;
   SourceSpan span;

   static Expr reference(std::string name);
   static Expr make_display(DisplaySpec spec);
   static Expr apply(Expr source, Operation op);
   static Expr history(Expr old_table, std::string object, Expr new_table);

   /// Structural equality; spans are ignored.
   bool operator==(const Expr& other) const;
};

/// `name := expr`, `expr = name`, or a bare expression.
struct Statement {
   std::optional<std::string> binding;
   Expr expr;
   SourceSpan span;
};

/// Operator names and argument counts, including the source table.
struct OperatorInfo {
   std::string_view name;
   std::size_t arity;
   bool derived;
};
const std::vector<OperatorInfo>& operator_catalog();

Expr parse_expression(std::string_view source);
Statement parse_statement(std::string_view source);
/// One statement per non-blank line; `#` starts a comment.
std::vector<Statement> parse_script(std::string_view source);

std::string print(const Expr& e);
std::string print(const Statement& s);

using Environment = std::map<std::string, TM>;

/// Innermost-first evaluation. Operator errors are rethrown with the span of
/// the failing subexpression. `report` collects History replay skips.
TM evaluate(const Expr& e, const Environment& env, const Algebra& algebra, ReplayReport* report = nullptr);

} // namespace golap
