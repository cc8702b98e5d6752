#include "golap/value.hpp"

#include <charconv>
#include <cmath>

namespace golap {

std::string_view to_string(ValueKind kind) {
   switch (kind) {
      case ValueKind::Text: return "text";
      case ValueKind::Integer: return "integer";
      case ValueKind::Decimal: return "decimal";
      case ValueKind::Date: return "date";
   }
   return "text";
}

std::optional<ValueKind> parse_value_kind(std::string_view text) {
   if (text == "text") return ValueKind::Text;
   if (text == "integer") return ValueKind::Integer;
   if (text == "decimal") return ValueKind::Decimal;
   if (text == "date") return ValueKind::Date;
   return std::nullopt;
}

double as_double(const Value& v) {
   if (auto i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
   if (auto d = std::get_if<double>(&v)) return *d;
   return std::nan("");
}

int compare_values(const Value& a, const Value& b) {
   bool an = is_numeric(a), bn = is_numeric(b);
   if (an != bn) return an ? -1 : 1;
   if (!an) {
      int c = std::get<std::string>(a).compare(std::get<std::string>(b));
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
   }
   if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b)) {
      auto x = std::get<std::int64_t>(a), y = std::get<std::int64_t>(b);
      return x < y ? -1 : (x > y ? 1 : 0);
   }
   double x = as_double(a), y = as_double(b);
   return x < y ? -1 : (x > y ? 1 : 0);
}

std::string format_number(double d) {
   if (std::isfinite(d) && std::floor(d) == d && std::fabs(d) < 1e15) {
      return std::to_string(static_cast<std::int64_t>(d));
   }
   char buf[64];
   auto res = std::to_chars(buf, buf + sizeof(buf), d);
   return std::string(buf, res.ptr);
}

std::string format_value(const Value& v) {
   if (auto i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
   if (auto d = std::get_if<double>(&v)) return format_number(*d);
   return std::get<std::string>(v);
}

std::string format_literal(const Value& v) {
   if (auto d = std::get_if<double>(&v)) {
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof(buf), *d);
      std::string out(buf, res.ptr);
      if (out.find_first_of(".en") == std::string::npos) out += ".0";
      return out;
   }
   if (!std::holds_alternative<std::string>(v)) return format_value(v);
   std::string out = "'";
   for (char c : std::get<std::string>(v)) {
      if (c == '\'') out += '\'';
      out += c;
   }
   out += '\'';
   return out;
}

std::optional<std::int64_t> parse_int(std::string_view text) {
   if (text.empty()) return std::nullopt;
   std::int64_t out = 0;
   const char* first = text.data();
   if (*first == '+') ++first;
   auto res = std::from_chars(first, text.data() + text.size(), out);
   if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
   return out;
}

std::optional<double> parse_double(std::string_view text) {
   if (text.empty()) return std::nullopt;
   double out = 0;
   const char* first = text.data();
   if (*first == '+') ++first;
   auto res = std::from_chars(first, text.data() + text.size(), out);
   if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(out)) return std::nullopt;
   return out;
}

std::optional<Value> parse_value(std::string_view text, ValueKind kind) {
   switch (kind) {
      case ValueKind::Integer:
         if (auto i = parse_int(text)) return Value{*i};
         return std::nullopt;
      case ValueKind::Decimal:
         if (auto d = parse_double(text)) return Value{*d};
         return std::nullopt;
      case ValueKind::Text:
      case ValueKind::Date:
         return Value{std::string(text)};
   }
   return std::nullopt;
}

std::optional<Value> coerce_literal(const Value& literal, ValueKind kind) {
   switch (kind) {
      case ValueKind::Integer:
         if (auto d = std::get_if<double>(&literal)) {
            // Integral decimals become integers; others keep comparing numerically.
            if (std::trunc(*d) == *d && std::fabs(*d) < 9.0e15) return Value{static_cast<std::int64_t>(*d)};
            return literal;
         }
         if (is_numeric(literal)) return literal;
         return std::nullopt;
      case ValueKind::Decimal:
         if (is_numeric(literal)) return Value{as_double(literal)};
         return std::nullopt;
      case ValueKind::Text:
      case ValueKind::Date:
         if (!is_numeric(literal)) return literal;
         return std::nullopt;
   }
   return std::nullopt;
}

} // namespace golap
