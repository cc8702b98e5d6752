#include "golap/query.hpp"

namespace golap {

namespace {

[[noreturn]] void rethrow_at(const Error& e, const SourceSpan& span) {
   if (e.span()) throw e;
   throw Error(e.code(), e.detail(), span);
}

} // namespace

TM evaluate(const Expr& e, const Environment& env, const Algebra& algebra, ReplayReport* report) {
   switch (e.kind) {
      case Expr::Kind::Reference: {
         auto it = env.find(e.name);
         if (it == env.end()) throw Error(ErrorCode::UnboundName, "no table named '" + e.name + "'", e.span);
         return it->second;
      }
      case Expr::Kind::Display:
         try {
            return algebra.display(e.display);
         } catch (const Error& err) {
            rethrow_at(err, e.span);
         }
      case Expr::Kind::History: {
         TM old_table = evaluate(e.operands.at(0), env, algebra, report);
         TM new_table = evaluate(e.operands.at(1), env, algebra, report);
         try {
            return algebra.history(old_table, e.object, new_table, report);
         } catch (const Error& err) {
            rethrow_at(err, e.span);
         }
      }
      case Expr::Kind::Apply: {
         TM source = evaluate(e.operands.at(0), env, algebra, report);
         try {
            if (auto f = std::get_if<FrotateOp>(&e.operation)) return algebra.frotate(source, *f, report);
            return algebra.apply(source, e.operation);
         } catch (const Error& err) {
            rethrow_at(err, e.span);
         }
      }
   }
   throw Error(ErrorCode::ArgumentError, "malformed expression", e.span);
}

} // namespace golap
