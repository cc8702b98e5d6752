#pragma once

#include "golap/value.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace golap {

/// Name and single value of the synthetic coarsest parameter present in every
/// dimension (and usable as `Fact.All` in predicates).
inline constexpr std::string_view kAll = "All";
inline constexpr std::string_view kAllValue = "all";

bool is_identifier(std::string_view text);
bool iequals(std::string_view a, std::string_view b);

struct Attribute {
   std::string name;
   ValueKind kind = ValueKind::Text;

   bool operator==(const Attribute&) const = default;
};

/// An acyclic path of parameters from All (coarsest) to the dimension's Id
/// (finest), plus the weak attributes decorating each parameter.
struct Hierarchy {
   std::string name;
   std::vector<std::string> parameters;
   /// parameter name -> weak attributes, in declaration order
   std::map<std::string, std::vector<std::string>> weak;

   std::optional<std::size_t> position(std::string_view parameter) const;
   /// Owning parameter of a weak attribute, if `attribute` is weak here.
   std::optional<std::string> weak_owner(std::string_view attribute) const;
   const std::vector<std::string>& weak_of(std::string_view parameter) const;
   const std::string& coarsest() const { return parameters.size() > 1 ? parameters[1] : parameters.front(); }

   bool operator==(const Hierarchy&) const = default;
};

struct Dimension {
   std::string name;
   std::vector<Attribute> attributes;
   std::vector<Hierarchy> hierarchies;
   std::string id_attribute;

   const Attribute* attribute(std::string_view name) const;
   std::optional<std::size_t> attribute_index(std::string_view name) const;
   const Hierarchy* hierarchy(std::string_view name) const;

   bool operator==(const Dimension&) const = default;
};

struct Measure {
   std::string name;
   ValueKind kind = ValueKind::Decimal;

   bool operator==(const Measure&) const = default;
};

struct Fact {
   std::string name;
   std::vector<Measure> measures;

   const Measure* measure(std::string_view name) const;
   std::optional<std::size_t> measure_index(std::string_view name) const;

   bool operator==(const Fact&) const = default;
};

/// A validated multi-fact schema. Immutable once built; fact and dimension
/// names resolve case-insensitively, everything else is case-sensitive.
struct Constellation {
   std::string name;
   std::vector<Fact> facts;
   std::vector<Dimension> dimensions;
   /// fact name -> linked dimensions, in declaration order
   std::map<std::string, std::vector<std::string>> star;

   const Fact* fact(std::string_view name) const;
   const Dimension* dimension(std::string_view name) const;
   std::optional<std::size_t> dimension_index(std::string_view name) const;
   const std::vector<std::string>& star_of(std::string_view fact) const;
   bool is_starred(std::string_view fact, std::string_view dimension) const;

   bool operator==(const Constellation&) const = default;
};

// ---------------------------------------------------------------------------
// Schema documents

struct RawHierarchy {
   std::string name;
   std::vector<std::string> parameters;
   std::vector<std::pair<std::string, std::vector<std::string>>> weak;
};

struct RawDimension {
   std::string name;
   std::vector<Attribute> attributes;
   std::optional<std::string> id;
   std::vector<RawHierarchy> hierarchies;
};

struct RawFact {
   std::string name;
   std::vector<Measure> measures;
   std::vector<std::string> star;
};

/// A schema document after parsing, before any semantic check.
struct RawSchema {
   std::string name;
   std::vector<RawDimension> dimensions;
   std::vector<RawFact> facts;
};

/// Parses the line-oriented schema format described in docs/schema-format.md.
/// Throws SyntaxError on malformed input.
RawSchema parse_schema_document(std::string_view text);
std::string write_schema_document(const Constellation& c);
RawSchema to_raw_schema(const Constellation& c);

/// Checks every structural invariant and synthesizes All/Id where the document
/// leaves them implicit.
Constellation validate_constellation(const RawSchema& raw);

/// Level of an attribute inside a hierarchy: 0-based parameter position
/// (All = 0), or the owning parameter's position for weak attributes.
struct AttributeLevel {
   std::size_t ordinal = 0;
   std::optional<std::string> weak_of;

   bool operator==(const AttributeLevel&) const = default;
};

AttributeLevel attribute_level(const Dimension& d, const Hierarchy& h, std::string_view attribute);

} // namespace golap
