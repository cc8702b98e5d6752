#include "golap/query.hpp"

#include "golap/schema.hpp"

#include <cctype>

namespace golap {

const std::vector<OperatorInfo>& operator_catalog() {
   static const std::vector<OperatorInfo> catalog{
       {"DISPLAY", 7, false},  {"DROTATE", 4, false}, {"DRILLDOWN", 3, false}, {"ROLLUP", 3, false},
       {"NEST", 5, false},     {"SELECT", 2, false},  {"SWITCH", 5, false},    {"AGREGATE", 3, false},
       {"UNAGREGATE", 1, false}, {"PUSH", 3, false},  {"PULL", 3, false},      {"ADDM", 2, false},
       {"DELM", 2, false},     {"HROTATE", 3, true},  {"PLOT", 3, true},       {"ORDER", 4, true},
       {"FROTATE", 3, true},   {"UNSELECT", 1, true}, {"HISTORY", 3, true},
   };
   return catalog;
}

Expr Expr::reference(std::string name) {
   Expr e;
   e.kind = Kind::Reference;
   e.name = std::move(name);
   return e;
}

Expr Expr::make_display(DisplaySpec spec) {
   Expr e;
   e.kind = Kind::Display;
   e.display = std::move(spec);
   return e;
}

Expr Expr::apply(Expr source, Operation op) {
   Expr e;
   e.kind = Kind::Apply;
   e.operation = std::move(op);
   e.operands.push_back(std::move(source));
   return e;
}

Expr Expr::history(Expr old_table, std::string object, Expr new_table) {
   Expr e;
   e.kind = Kind::History;
   e.object = std::move(object);
   e.operands.push_back(std::move(old_table));
   e.operands.push_back(std::move(new_table));
   return e;
}

bool Expr::operator==(const Expr& o) const {
   if (kind != o.kind) return false;
   switch (kind) {
      case Kind::Reference: return name == o.name;
      case Kind::Display: return display == o.display;
      case Kind::Apply: return operation == o.operation && operands == o.operands;
      case Kind::History: return object == o.object && operands == o.operands;
   }
   return false;
}

namespace {

enum class Tok { Ident, String, Integer, Decimal, LParen, RParen, LBrace, RBrace, Comma, Dot, Cmp, And, Or, Assign, Equals, End };

struct Token {
   Tok kind = Tok::End;
   std::string text;
   Value value;
   Comparator cmp = Comparator::Eq;
   SourceSpan span;
};

std::string_view describe(Tok t) {
   switch (t) {
      case Tok::Ident: return "identifier";
      case Tok::String: return "string literal";
      case Tok::Integer:
      case Tok::Decimal: return "number";
      case Tok::LParen: return "'('";
      case Tok::RParen: return "')'";
      case Tok::LBrace: return "'{'";
      case Tok::RBrace: return "'}'";
      case Tok::Comma: return "','";
      case Tok::Dot: return "'.'";
      case Tok::Cmp: return "comparison";
      case Tok::And: return "AND";
      case Tok::Or: return "OR";
      case Tok::Assign: return "':='";
      case Tok::Equals: return "'='";
      case Tok::End: return "end of input";
   }
   return "token";
}

class Lexer {
   public:
   Lexer(std::string_view src, std::size_t base_line) : src_(src), line_(base_line) {}

   std::vector<Token> run() {
      std::vector<Token> out;
      while (true) {
         skip_space();
         Token t = next();
         out.push_back(t);
         if (t.kind == Tok::End) break;
      }
      // `=` doubles as comparison and as the trailing binding marker.
      for (auto& t : out) {
         if (t.kind == Tok::Cmp && t.cmp == Comparator::Eq && t.text == "=") t.kind = Tok::Equals;
      }
      return out;
   }

   private:
   void skip_space() {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance(1);
   }

   void advance(std::size_t n) {
      for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
         unsigned char c = static_cast<unsigned char>(src_[pos_++]);
         if (c == '\n') {
            ++line_;
            col_ = 1;
         } else if ((c & 0xC0) != 0x80) {
            ++col_;
         }
      }
   }

   SourceSpan here() const { return SourceSpan{pos_, pos_, line_, col_}; }

   [[noreturn]] void fail(const std::string& msg, SourceSpan span) const {
      span.end = std::max(span.end, std::min(span.begin + 1, src_.size()));
      throw Error(ErrorCode::SyntaxError, msg, span);
   }

   Token make(Tok kind, SourceSpan start, std::size_t len) {
      Token t;
      t.kind = kind;
      t.text = std::string(src_.substr(pos_, len));
      advance(len);
      start.end = pos_;
      t.span = start;
      return t;
   }

   bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

   Token next() {
      SourceSpan start = here();
      if (pos_ >= src_.size()) {
         Token t;
         t.span = start;
         return t;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
         std::size_t n = 0;
         while (pos_ + n < src_.size() &&
                (std::isalnum(static_cast<unsigned char>(src_[pos_ + n])) || src_[pos_ + n] == '_')) {
            ++n;
         }
         Token t = make(Tok::Ident, start, n);
         if (iequals(t.text, "AND")) t.kind = Tok::And;
         else if (iequals(t.text, "OR")) t.kind = Tok::Or;
         return t;
      }
      bool negative_number = c == '-' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]));
      if (std::isdigit(static_cast<unsigned char>(c)) || negative_number) return number(start);
      if (c == '\'') return string(start);

      struct Sym {
         std::string_view text;
         Tok kind;
         Comparator cmp;
      };
      static const Sym symbols[] = {
          {":=", Tok::Assign, Comparator::Eq}, {"!=", Tok::Cmp, Comparator::Ne}, {"<>", Tok::Cmp, Comparator::Ne},
          {"<=", Tok::Cmp, Comparator::Le},    {">=", Tok::Cmp, Comparator::Ge}, {"≠", Tok::Cmp, Comparator::Ne},
          {"≤", Tok::Cmp, Comparator::Le}, {"≥", Tok::Cmp, Comparator::Ge}, {"∧", Tok::And, Comparator::Eq},
          {"∨", Tok::Or, Comparator::Eq}, {"=", Tok::Cmp, Comparator::Eq},  {"<", Tok::Cmp, Comparator::Lt},
          {">", Tok::Cmp, Comparator::Gt},     {"(", Tok::LParen, Comparator::Eq}, {")", Tok::RParen, Comparator::Eq},
          {"{", Tok::LBrace, Comparator::Eq},  {"}", Tok::RBrace, Comparator::Eq}, {",", Tok::Comma, Comparator::Eq},
          {".", Tok::Dot, Comparator::Eq},
      };
      for (const auto& s : symbols) {
         if (starts_with(s.text)) {
            Token t = make(s.kind, start, s.text.size());
            t.cmp = s.cmp;
            return t;
         }
      }
      fail("unexpected character '" + std::string(1, c) + "'", start);
   }

   Token number(SourceSpan start) {
      std::size_t n = src_[pos_] == '-' ? 1 : 0;
      bool decimal = false;
      auto digits = [&] {
         while (pos_ + n < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + n]))) ++n;
      };
      digits();
      if (pos_ + n + 1 < src_.size() && src_[pos_ + n] == '.' && std::isdigit(static_cast<unsigned char>(src_[pos_ + n + 1]))) {
         decimal = true;
         ++n;
         digits();
      }
      if (pos_ + n < src_.size() && (src_[pos_ + n] == 'e' || src_[pos_ + n] == 'E')) {
         std::size_t m = n + 1;
         if (pos_ + m < src_.size() && (src_[pos_ + m] == '+' || src_[pos_ + m] == '-')) ++m;
         if (pos_ + m < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + m]))) {
            decimal = true;
            n = m;
            digits();
         }
      }
      Token t = make(decimal ? Tok::Decimal : Tok::Integer, start, n);
      if (decimal) {
         auto d = parse_double(t.text);
         if (!d) fail("malformed number '" + t.text + "'", t.span);
         t.value = *d;
      } else {
         auto i = parse_int(t.text);
         if (!i) fail("integer out of range '" + t.text + "'", t.span);
         t.value = *i;
      }
      return t;
   }

   Token string(SourceSpan start) {
      std::string value;
      std::size_t n = 1;
      while (true) {
         if (pos_ + n >= src_.size()) fail("unterminated string literal", start);
         char c = src_[pos_ + n];
         if (c == '\'') {
            if (pos_ + n + 1 < src_.size() && src_[pos_ + n + 1] == '\'') {
               value += '\'';
               n += 2;
               continue;
            }
            ++n;
            break;
         }
         value += c;
         ++n;
      }
      Token t = make(Tok::String, start, n);
      t.value = value;
      return t;
   }

   std::string_view src_;
   std::size_t pos_ = 0;
   std::size_t line_;
   std::size_t col_ = 1;
};

class Parser {
   public:
   Parser(std::string_view src, std::size_t base_line) : src_(src), tokens_(Lexer(src, base_line).run()) {}

   Statement statement() {
      Statement s;
      SourceSpan start = peek().span;
      if (peek().kind == Tok::Ident && peek(1).kind == Tok::Assign) {
         s.binding = take().text;
         take();
         s.expr = expression();
      } else {
         s.expr = expression();
         if (peek().kind == Tok::Equals) {
            take();
            s.binding = expect(Tok::Ident, "a table name after '='").text;
         }
      }
      expect(Tok::End, "end of statement");
      s.span = join(start, last_);
      return s;
   }

   Expr whole_expression() {
      Expr e = expression();
      expect(Tok::End, "end of expression");
      return e;
   }

   private:
   // ---- token helpers

   const Token& peek(std::size_t k = 0) const { return tokens_[std::min(index_ + k, tokens_.size() - 1)]; }

   Token take() {
      Token t = peek();
      if (index_ < tokens_.size() - 1) ++index_;
      last_ = t.span;
      return t;
   }

   static SourceSpan join(SourceSpan a, const SourceSpan& b) {
      a.end = std::max(a.end, b.end);
      return a;
   }

   [[noreturn]] void fail(ErrorCode code, const std::string& msg, SourceSpan span) const {
      if (span.end <= span.begin) span.end = std::min(span.begin + 1, src_.size());
      if (span.end < span.begin) span.end = span.begin;
      throw Error(code, msg, span);
   }

   Token expect(Tok kind, const std::string& what) {
      if (peek().kind != kind) {
         fail(ErrorCode::SyntaxError, "expected " + what + ", found " + found(peek()), peek().span);
      }
      return take();
   }

   static std::string found(const Token& t) {
      if (t.kind == Tok::End) return "end of input";
      return std::string(describe(t.kind)) + " '" + t.text + "'";
   }

   std::string ident(const std::string& what) { return expect(Tok::Ident, what).text; }

   // ---- expressions

   Expr expression() {
      const Token& t = peek();
      if (t.kind != Tok::Ident) fail(ErrorCode::SyntaxError, "expected a table expression, found " + found(t), t.span);
      if (peek(1).kind != Tok::LParen) {
         Token name = take();
         Expr e = Expr::reference(name.text);
         e.span = name.span;
         return e;
      }
      return call();
   }

   struct CallFrame {
      std::string name;
      std::size_t arity;
      std::size_t index = 0;
      SourceSpan span;
   };

   void argument_separator(CallFrame& f) {
      if (f.index > 0) {
         if (peek().kind == Tok::RParen) arity_error(f, f.index);
         expect(Tok::Comma, "',' between arguments of " + f.name);
      } else if (peek().kind == Tok::RParen) {
         arity_error(f, 0);
      }
      ++f.index;
   }

   [[noreturn]] void arity_error(const CallFrame& f, std::size_t got) {
      SourceSpan s = join(f.span, peek().span);
      fail(ErrorCode::ArityError,
           f.name + " takes " + std::to_string(f.arity) + " argument" + (f.arity == 1 ? "" : "s") + ", got " +
               std::to_string(got),
           s);
   }

   void close_call(CallFrame& f) {
      if (peek().kind == Tok::Comma) {
         // Count the surplus arguments for the message.
         std::size_t got = f.index, depth = 0;
         for (std::size_t k = index_; k < tokens_.size(); ++k) {
            Tok kind = tokens_[k].kind;
            if (kind == Tok::LParen || kind == Tok::LBrace) ++depth;
            else if ((kind == Tok::RParen || kind == Tok::RBrace) && depth == 0) break;
            else if (kind == Tok::RParen || kind == Tok::RBrace) --depth;
            else if (kind == Tok::Comma && depth == 0) ++got;
            else if (kind == Tok::End) break;
         }
         arity_error(f, got);
      }
      expect(Tok::RParen, "')' closing " + f.name);
   }

   Expr call() {
      Token name = take();
      const OperatorInfo* info = nullptr;
      for (const auto& op : operator_catalog()) {
         if (iequals(op.name, name.text)) info = &op;
      }
      if (!info) fail(ErrorCode::UnknownOperator, "unknown operator '" + name.text + "'", name.span);
      take();  // '('
      CallFrame f{std::string(info->name), info->arity, 0, name.span};
      const std::string& op = f.name;

      auto table = [&] {
         argument_separator(f);
         return expression();
      };
      auto id = [&](const char* what) {
         argument_separator(f);
         return ident(std::string(what) + " in " + op);
      };

      Expr e;
      if (op == "DISPLAY") {
         DisplaySpec d;
         argument_separator(f);
         if (peek().kind == Tok::String) d.constellation = std::get<std::string>(take().value);
         else d.constellation = ident("constellation name");
         d.fact = id("fact name");
         argument_separator(f);
         d.measures = measure_set();
         d.line_dimension = id("line dimension");
         d.line_hierarchy = id("line hierarchy");
         d.column_dimension = id("column dimension");
         d.column_hierarchy = id("column hierarchy");
         e = Expr::make_display(std::move(d));
      } else if (op == "HISTORY") {
         Expr old_table = table();
         std::string object = id("fact or dimension");
         Expr new_table = table();
         e = Expr::history(std::move(old_table), std::move(object), std::move(new_table));
      } else {
         Expr source = table();
         Operation operation;
         if (op == "DROTATE") {
            DrotateOp o;
            o.old_dimension = id("dimension to replace");
            o.new_dimension = id("new dimension");
            o.hierarchy = id("hierarchy");
            operation = o;
         } else if (op == "DRILLDOWN" || op == "ROLLUP" || op == "PLOT") {
            std::string dim = id("dimension");
            argument_separator(f);
            AttSelector sel = selector();
            if (op == "DRILLDOWN") operation = DrilldownOp{dim, sel};
            else if (op == "ROLLUP") operation = RollupOp{dim, sel};
            else operation = PlotOp{dim, sel};
         } else if (op == "NEST") {
            NestOp o;
            o.dimension = id("dimension");
            o.attribute = id("attribute");
            o.nested_dimension = id("nested dimension");
            o.nested_attribute = id("nested attribute");
            operation = o;
         } else if (op == "SELECT") {
            argument_separator(f);
            operation = SelectOp{predicate()};
         } else if (op == "SWITCH") {
            SwitchOp o;
            o.dimension = id("dimension");
            o.attribute = id("attribute");
            argument_separator(f);
            o.first = loose_literal();
            argument_separator(f);
            o.second = loose_literal();
            operation = o;
         } else if (op == "AGREGATE") {
            AgregateOp o;
            o.dimension = id("dimension");
            argument_separator(f);
            MeasureTerm m = measure_term("attribute");
            o.fn = m.fn;
            o.attribute = m.measure;
            operation = o;
         } else if (op == "UNAGREGATE") {
            operation = UnagregateOp{};
         } else if (op == "PUSH") {
            PushOp o;
            o.dimension = id("dimension");
            o.attribute = id("attribute");
            operation = o;
         } else if (op == "PULL") {
            PullOp o;
            argument_separator(f);
            o.measure = measure_term("measure");
            o.dimension = id("dimension");
            operation = o;
         } else if (op == "ADDM" || op == "DELM") {
            argument_separator(f);
            MeasureTerm m = measure_term("measure");
            if (op == "ADDM") operation = AddmOp{m};
            else operation = DelmOp{m};
         } else if (op == "HROTATE") {
            HrotateOp o;
            o.dimension = id("dimension");
            o.hierarchy = id("hierarchy");
            operation = o;
         } else if (op == "ORDER") {
            OrderOp o;
            o.dimension = id("dimension");
            o.attribute = id("attribute");
            argument_separator(f);
            Token t = expect(Tok::Ident, "asc or dsc");
            if (iequals(t.text, "asc")) o.order = SortOrder::Asc;
            else if (iequals(t.text, "dsc") || iequals(t.text, "desc")) o.order = SortOrder::Dsc;
            else fail(ErrorCode::ArgumentError, "ORDER expects asc or dsc, found '" + t.text + "'", t.span);
            operation = o;
         } else if (op == "FROTATE") {
            FrotateOp o;
            o.fact = id("fact name");
            argument_separator(f);
            o.measures = measure_set();
            operation = o;
         } else if (op == "UNSELECT") {
            operation = UnselectOp{};
         }
         e = Expr::apply(std::move(source), std::move(operation));
      }
      close_call(f);
      e.span = join(name.span, last_);
      return e;
   }

   // ---- argument forms

   MeasureTerm measure_term(const char* inner) {
      Token fn = expect(Tok::Ident, "aggregate function");
      auto agg = parse_agg_fn(fn.text);
      if (!agg) {
         fail(ErrorCode::ArgumentError, "unknown aggregate function '" + fn.text + "' (SUM, AVG, MIN, MAX, COUNT)", fn.span);
      }
      expect(Tok::LParen, "'(' after " + fn.text);
      std::string m = ident(inner);
      expect(Tok::RParen, "')'");
      return MeasureTerm{*agg, m};
   }

   std::vector<MeasureTerm> measure_set() {
      expect(Tok::LBrace, "'{' opening a measure set");
      std::vector<MeasureTerm> out;
      if (peek().kind != Tok::RBrace) {
         out.push_back(measure_term("measure"));
         while (peek().kind == Tok::Comma) {
            take();
            out.push_back(measure_term("measure"));
         }
      }
      expect(Tok::RBrace, "'}' closing the measure set");
      return out;
   }

   std::vector<std::string> ident_list() {
      std::vector<std::string> out{ident("attribute")};
      while (peek().kind == Tok::Comma) {
         take();
         out.push_back(ident("attribute"));
      }
      return out;
   }

   AttSelector selector() {
      if (peek().kind == Tok::LParen) {
         take();
         auto weak = ident_list();
         expect(Tok::RParen, "')' closing the weak attribute list");
         Token of = expect(Tok::Ident, "'of' after a weak attribute list");
         if (of.text != "of") fail(ErrorCode::SyntaxError, "expected 'of', found '" + of.text + "'", of.span);
         std::string p = ident("parameter");
         return AttSelector{AttSelector::Form::WeakList, p, weak};
      }
      std::string p = ident("parameter");
      if (peek().kind == Tok::LParen) {
         take();
         auto weak = ident_list();
         expect(Tok::RParen, "')' closing the weak attribute list");
         return AttSelector{AttSelector::Form::ParameterWithWeak, p, weak};
      }
      return AttSelector::param(p);
   }

   Value literal() {
      const Token& t = peek();
      if (t.kind == Tok::String || t.kind == Tok::Integer || t.kind == Tok::Decimal) return take().value;
      fail(ErrorCode::SyntaxError, "expected a literal, found " + found(t), t.span);
   }

   /// SWITCH values may also be written as bare words.
   Value loose_literal() {
      if (peek().kind == Tok::Ident) return Value{take().text};
      return literal();
   }

   // Predicates are parsed as a tree and flattened into conjunctive normal form.
   using Cnf = std::vector<std::vector<Atom>>;

   static Cnf disjoin(const Cnf& a, const Cnf& b) {
      Cnf out;
      for (const auto& x : a) {
         for (const auto& y : b) {
            auto clause = x;
            clause.insert(clause.end(), y.begin(), y.end());
            out.push_back(std::move(clause));
         }
      }
      return out;
   }

   Predicate predicate() { return Predicate{disjunction()}; }

   Cnf disjunction() {
      Cnf acc = conjunction();
      while (peek().kind == Tok::Or) {
         take();
         acc = disjoin(acc, conjunction());
      }
      return acc;
   }

   Cnf conjunction() {
      Cnf acc = primary();
      while (peek().kind == Tok::And) {
         take();
         Cnf rhs = primary();
         acc.insert(acc.end(), rhs.begin(), rhs.end());
      }
      return acc;
   }

   Cnf primary() {
      const Token& t = peek();
      if (t.kind == Tok::LParen) {
         take();
         Cnf inner = disjunction();
         expect(Tok::RParen, "')' closing the predicate group");
         return inner;
      }
      if (t.kind == Tok::Ident && peek(1).kind != Tok::Dot) {
         if (t.text == "true") {
            take();
            return {};
         }
         if (t.text == "false") {
            take();
            return {{}};
         }
      }
      Atom a;
      a.qualifier = ident("qualifier (Fact or Dimension) of a comparison");
      expect(Tok::Dot, "'.' after " + a.qualifier);
      a.name = ident("attribute or measure");
      const Token& op = peek();
      if (op.kind != Tok::Cmp && op.kind != Tok::Equals) {
         fail(ErrorCode::SyntaxError, "expected a comparison operator, found " + found(op), op.span);
      }
      a.op = take().cmp;
      a.literal = literal();
      return {{a}};
   }

   std::string_view src_;
   std::vector<Token> tokens_;
   std::size_t index_ = 0;
   SourceSpan last_;
};

} // namespace

Expr parse_expression(std::string_view source) { return Parser(source, 1).whole_expression(); }

Statement parse_statement(std::string_view source) { return Parser(source, 1).statement(); }

std::vector<Statement> parse_script(std::string_view source) {
   std::vector<Statement> out;
   std::size_t line_no = 0, pos = 0;
   while (pos <= source.size()) {
      auto eol = source.find('\n', pos);
      std::string_view line = source.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
      std::size_t offset = pos;
      pos = eol == std::string_view::npos ? source.size() + 1 : eol + 1;
      ++line_no;
      bool quoted = false;
      for (std::size_t i = 0; i < line.size(); ++i) {
         if (line[i] == '\'') quoted = !quoted;
         if (line[i] == '#' && !quoted) {
            line = line.substr(0, i);
            break;
         }
      }
      if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
      try {
         out.push_back(Parser(line, line_no).statement());
      } catch (const Error& e) {
         if (!e.span()) throw;
         SourceSpan s = *e.span();
         s.begin += offset;
         s.end += offset;
         throw Error(e.code(), e.detail(), s);
      }
      auto& s = out.back();
      // Shift spans from line-relative to script-relative offsets.
      struct Shift {
         std::size_t offset;
         void operator()(Expr& e) const {
            e.span.begin += offset;
            e.span.end += offset;
            for (auto& o : e.operands) (*this)(o);
         }
      };
      Shift{offset}(s.expr);
      s.span.begin += offset;
      s.span.end += offset;
   }
   return out;
}

// ---------------------------------------------------------------------------
// Printing

std::string print(const Expr& e) {
   switch (e.kind) {
      case Expr::Kind::Reference: return e.name;
      case Expr::Kind::Display: return format_display(e.display);
      case Expr::Kind::History:
         return "HISTORY(" + print(e.operands.at(0)) + ", " + e.object + ", " + print(e.operands.at(1)) + ")";
      case Expr::Kind::Apply: {
         std::string args = format_arguments(e.operation);
         return std::string(operator_name(e.operation)) + "(" + print(e.operands.at(0)) + (args.empty() ? "" : ", " + args) +
                ")";
      }
   }
   return "";
}

std::string print(const Statement& s) {
   return s.binding ? *s.binding + " := " + print(s.expr) : print(s.expr);
}

} // namespace golap
