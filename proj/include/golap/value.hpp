#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace golap {

/// Kind of an attribute or measure.
enum class ValueKind { Text, Integer, Decimal, Date };

std::string_view to_string(ValueKind kind);
std::optional<ValueKind> parse_value_kind(std::string_view text);
inline bool is_numeric(ValueKind kind) { return kind == ValueKind::Integer || kind == ValueKind::Decimal; }

/// A scalar cell or attribute value. Dates are kept as ISO text.
using Value = std::variant<std::int64_t, double, std::string>;

inline bool is_numeric(const Value& v) { return !std::holds_alternative<std::string>(v); }
double as_double(const Value& v);

/// Total order: numbers (compared numerically) before strings (compared bytewise).
int compare_values(const Value& a, const Value& b);

struct ValueLess {
   bool operator()(const Value& a, const Value& b) const { return compare_values(a, b) < 0; }
};

/// Shortest text form; integral doubles print without a fraction.
std::string format_number(double d);
std::string format_value(const Value& v);
/// Query-language literal form: strings single-quoted with '' escaping.
std::string format_literal(const Value& v);

/// Parses a raw CSV/text field according to `kind`. Returns nullopt when the
/// text is not a valid value of that kind.
std::optional<Value> parse_value(std::string_view text, ValueKind kind);
std::optional<double> parse_double(std::string_view text);
std::optional<std::int64_t> parse_int(std::string_view text);

/// Converts a literal to the representation used by an attribute of `kind`.
/// Returns nullopt on a type mismatch (text literal for a numeric attribute or
/// the reverse).
std::optional<Value> coerce_literal(const Value& literal, ValueKind kind);

} // namespace golap
