#include "golap/schema.hpp"

#include "golap/error.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace golap {

bool is_identifier(std::string_view text) {
   if (text.empty()) return false;
   auto c0 = static_cast<unsigned char>(text[0]);
   if (!(std::isalpha(c0) || c0 == '_')) return false;
   return std::all_of(text.begin() + 1, text.end(), [](char c) {
      auto u = static_cast<unsigned char>(c);
      return std::isalnum(u) || u == '_';
   });
}

bool iequals(std::string_view a, std::string_view b) {
   if (a.size() != b.size()) return false;
   for (std::size_t i = 0; i < a.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) return false;
   }
   return true;
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> Hierarchy::position(std::string_view parameter) const {
   for (std::size_t i = 0; i < parameters.size(); ++i) {
      if (parameters[i] == parameter) return i;
   }
   return std::nullopt;
}

std::optional<std::string> Hierarchy::weak_owner(std::string_view attribute) const {
   for (const auto& [param, attrs] : weak) {
      if (std::find(attrs.begin(), attrs.end(), attribute) != attrs.end()) return param;
   }
   return std::nullopt;
}

const std::vector<std::string>& Hierarchy::weak_of(std::string_view parameter) const {
   static const std::vector<std::string> none;
   auto it = weak.find(std::string(parameter));
   return it == weak.end() ? none : it->second;
}

const Attribute* Dimension::attribute(std::string_view n) const {
   for (const auto& a : attributes) {
      if (a.name == n) return &a;
   }
   return nullptr;
}

std::optional<std::size_t> Dimension::attribute_index(std::string_view n) const {
   for (std::size_t i = 0; i < attributes.size(); ++i) {
      if (attributes[i].name == n) return i;
   }
   return std::nullopt;
}

const Hierarchy* Dimension::hierarchy(std::string_view n) const {
   for (const auto& h : hierarchies) {
      if (h.name == n) return &h;
   }
   return nullptr;
}

const Measure* Fact::measure(std::string_view n) const {
   for (const auto& m : measures) {
      if (m.name == n) return &m;
   }
   return nullptr;
}

std::optional<std::size_t> Fact::measure_index(std::string_view n) const {
   for (std::size_t i = 0; i < measures.size(); ++i) {
      if (measures[i].name == n) return i;
   }
   return std::nullopt;
}

const Fact* Constellation::fact(std::string_view n) const {
   for (const auto& f : facts) {
      if (iequals(f.name, n)) return &f;
   }
   return nullptr;
}

const Dimension* Constellation::dimension(std::string_view n) const {
   for (const auto& d : dimensions) {
      if (iequals(d.name, n)) return &d;
   }
   return nullptr;
}

std::optional<std::size_t> Constellation::dimension_index(std::string_view n) const {
   for (std::size_t i = 0; i < dimensions.size(); ++i) {
      if (iequals(dimensions[i].name, n)) return i;
   }
   return std::nullopt;
}

const std::vector<std::string>& Constellation::star_of(std::string_view f) const {
   static const std::vector<std::string> none;
   const Fact* fact_ptr = fact(f);
   if (!fact_ptr) return none;
   auto it = star.find(fact_ptr->name);
   return it == star.end() ? none : it->second;
}

bool Constellation::is_starred(std::string_view f, std::string_view d) const {
   const auto& dims = star_of(f);
   return std::any_of(dims.begin(), dims.end(), [&](const std::string& s) { return iequals(s, d); });
}

// ---------------------------------------------------------------------------
// Document parsing

namespace {

std::string_view trim(std::string_view s) {
   while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
   while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
   return s;
}

std::vector<std::string> split_words(std::string_view s) {
   std::vector<std::string> out;
   std::size_t i = 0;
   while (i < s.size()) {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      std::size_t start = i;
      while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (i > start) out.emplace_back(s.substr(start, i - start));
   }
   return out;
}

std::vector<std::string> split_list(std::string_view s, char sep) {
   std::vector<std::string> out;
   std::size_t start = 0;
   while (true) {
      auto pos = s.find(sep, start);
      auto item = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
      out.emplace_back(item);
      if (pos == std::string_view::npos) break;
      start = pos + 1;
   }
   return out;
}

[[noreturn]] void syntax(std::size_t line, const std::string& msg) {
   throw Error(ErrorCode::SyntaxError, "schema line " + std::to_string(line) + ": " + msg);
}

void require_ident(std::size_t line, const std::string& name) {
   if (!is_identifier(name)) syntax(line, "'" + name + "' is not an identifier");
}

} // namespace

RawSchema parse_schema_document(std::string_view text) {
   RawSchema raw;
   RawDimension* dim = nullptr;
   RawFact* fact = nullptr;
   std::size_t line_no = 0;
   bool named = false;

   std::size_t pos = 0;
   while (pos <= text.size()) {
      auto eol = text.find('\n', pos);
      std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
      pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
      ++line_no;

      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;

      auto words = split_words(line);
      const std::string& kw = words[0];
      std::string_view rest = trim(line.substr(kw.size()));

      if (kw == "constellation") {
         if (words.size() != 2) syntax(line_no, "expected 'constellation <name>'");
         if (named) syntax(line_no, "constellation declared twice");
         require_ident(line_no, words[1]);
         raw.name = words[1];
         named = true;
      } else if (kw == "dimension") {
         if (words.size() != 2) syntax(line_no, "expected 'dimension <name>'");
         require_ident(line_no, words[1]);
         raw.dimensions.push_back(RawDimension{words[1], {}, std::nullopt, {}});
         dim = &raw.dimensions.back();
         fact = nullptr;
      } else if (kw == "fact") {
         if (words.size() != 2) syntax(line_no, "expected 'fact <name>'");
         require_ident(line_no, words[1]);
         raw.facts.push_back(RawFact{words[1], {}, {}});
         fact = &raw.facts.back();
         dim = nullptr;
      } else if (kw == "attribute") {
         if (!dim) syntax(line_no, "'attribute' outside a dimension block");
         if (words.size() != 3) syntax(line_no, "expected 'attribute <name> <kind>'");
         require_ident(line_no, words[1]);
         auto kind = parse_value_kind(words[2]);
         if (!kind) syntax(line_no, "unknown value kind '" + words[2] + "'");
         dim->attributes.push_back(Attribute{words[1], *kind});
      } else if (kw == "id") {
         if (!dim) syntax(line_no, "'id' outside a dimension block");
         if (words.size() != 2) syntax(line_no, "expected 'id <attribute>'");
         require_ident(line_no, words[1]);
         dim->id = words[1];
      } else if (kw == "hierarchy") {
         if (!dim) syntax(line_no, "'hierarchy' outside a dimension block");
         auto colon = rest.find(':');
         if (colon == std::string_view::npos) syntax(line_no, "expected 'hierarchy <name>: <p1> > <p2> ...'");
         RawHierarchy h;
         h.name = std::string(trim(rest.substr(0, colon)));
         require_ident(line_no, h.name);
         for (auto& p : split_list(rest.substr(colon + 1), '>')) {
            require_ident(line_no, p);
            h.parameters.push_back(p);
         }
         dim->hierarchies.push_back(std::move(h));
      } else if (kw == "weak") {
         if (!dim) syntax(line_no, "'weak' outside a dimension block");
         auto colon = rest.find(':');
         auto head = split_words(rest.substr(0, colon == std::string_view::npos ? rest.size() : colon));
         if (colon == std::string_view::npos || head.size() != 2) {
            syntax(line_no, "expected 'weak <hierarchy> <parameter>: <a1>, <a2> ...'");
         }
         std::vector<std::string> attrs;
         for (auto& a : split_list(rest.substr(colon + 1), ',')) {
            require_ident(line_no, a);
            attrs.push_back(a);
         }
         auto it = std::find_if(dim->hierarchies.begin(), dim->hierarchies.end(),
                                [&](const RawHierarchy& h) { return h.name == head[0]; });
         if (it == dim->hierarchies.end()) {
            throw Error(ErrorCode::UnknownAttributeInHierarchy,
                        "weak attributes declared for unknown hierarchy '" + head[0] + "' of " + dim->name);
         }
         it->weak.emplace_back(head[1], std::move(attrs));
      } else if (kw == "measure") {
         if (!fact) syntax(line_no, "'measure' outside a fact block");
         if (words.size() != 2 && words.size() != 3) syntax(line_no, "expected 'measure <name> [integer|decimal]'");
         require_ident(line_no, words[1]);
         ValueKind kind = ValueKind::Decimal;
         if (words.size() == 3) {
            auto k = parse_value_kind(words[2]);
            if (!k || !is_numeric(*k)) syntax(line_no, "measure kind must be integer or decimal");
            kind = *k;
         }
         fact->measures.push_back(Measure{words[1], kind});
      } else if (kw == "star") {
         if (!fact) syntax(line_no, "'star' outside a fact block");
         for (auto& d : split_list(rest, ',')) {
            require_ident(line_no, d);
            fact->star.push_back(d);
         }
      } else {
         syntax(line_no, "unknown keyword '" + kw + "'");
      }
   }
   if (!named) throw Error(ErrorCode::SyntaxError, "schema document lacks a 'constellation <name>' line");
   return raw;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void check_ident(const std::string& name) {
   if (!is_identifier(name)) throw Error(ErrorCode::InvalidIdentifier, "'" + name + "' is not an identifier");
}

Dimension validate_dimension(const RawDimension& raw) {
   check_ident(raw.name);
   Dimension d;
   d.name = raw.name;

   d.attributes.push_back(Attribute{std::string(kAll), ValueKind::Text});
   for (const auto& a : raw.attributes) {
      check_ident(a.name);
      if (a.name == kAll) continue;
      if (d.attribute(a.name)) {
         throw Error(ErrorCode::DuplicateName, "attribute '" + a.name + "' declared twice in " + raw.name);
      }
      d.attributes.push_back(a);
   }

   if (raw.hierarchies.empty()) throw Error(ErrorCode::MissingHierarchy, "dimension " + raw.name + " has no hierarchy");

   if (raw.id) {
      d.id_attribute = *raw.id;
   } else {
      const auto& params = raw.hierarchies.front().parameters;
      if (!params.empty() && params.back() != kAll && d.attribute(params.back())) {
         d.id_attribute = params.back();
      } else {
         d.id_attribute = "Id";
      }
   }
   check_ident(d.id_attribute);
   if (d.id_attribute == kAll) throw Error(ErrorCode::HierarchyNotPath, "All cannot be the identifier of " + raw.name);
   if (!d.attribute(d.id_attribute)) d.attributes.push_back(Attribute{d.id_attribute, ValueKind::Text});

   std::set<std::string> all_params;
   for (const auto& rh : raw.hierarchies) {
      check_ident(rh.name);
      if (d.hierarchy(rh.name)) {
         throw Error(ErrorCode::DuplicateName, "hierarchy '" + rh.name + "' declared twice in " + raw.name);
      }
      Hierarchy h;
      h.name = rh.name;
      std::vector<std::string> params = rh.parameters;
      if (params.empty() || params.front() != kAll) params.insert(params.begin(), std::string(kAll));
      if (params.back() != d.id_attribute) params.push_back(d.id_attribute);

      std::set<std::string> seen;
      for (std::size_t i = 0; i < params.size(); ++i) {
         const auto& p = params[i];
         if (!d.attribute(p)) {
            throw Error(ErrorCode::UnknownAttributeInHierarchy,
                        "hierarchy " + rh.name + " of " + raw.name + " uses unknown attribute '" + p + "'");
         }
         if (!seen.insert(p).second) {
            throw Error(ErrorCode::HierarchyNotPath, "attribute '" + p + "' repeats in hierarchy " + rh.name);
         }
         if ((p == kAll && i != 0) || (p == d.id_attribute && i + 1 != params.size())) {
            throw Error(ErrorCode::HierarchyNotPath,
                        "'" + p + "' must be at the " + (p == kAll ? "start" : "end") + " of hierarchy " + rh.name);
         }
      }
      all_params.insert(params.begin(), params.end());
      h.parameters = std::move(params);
      d.hierarchies.push_back(std::move(h));
   }

   // Weak attributes: checked once every hierarchy's parameter list is known.
   for (std::size_t hi = 0; hi < raw.hierarchies.size(); ++hi) {
      Hierarchy& h = d.hierarchies[hi];
      std::set<std::string> used;
      for (const auto& [param, attrs] : raw.hierarchies[hi].weak) {
         if (!h.position(param)) {
            throw Error(ErrorCode::UnknownAttributeInHierarchy,
                        "weak attributes attached to '" + param + "' which is not a parameter of " + h.name);
         }
         for (const auto& a : attrs) {
            if (!d.attribute(a)) {
               throw Error(ErrorCode::UnknownAttributeInHierarchy,
                           "weak attribute '" + a + "' is not an attribute of " + raw.name);
            }
            if (all_params.count(a)) {
               throw Error(ErrorCode::InvalidWeakAttribute, "'" + a + "' is a parameter and cannot be weak");
            }
            if (!used.insert(a).second) {
               throw Error(ErrorCode::InvalidWeakAttribute,
                           "weak attribute '" + a + "' decorates more than one parameter of " + h.name);
            }
            h.weak[param].push_back(a);
         }
      }
   }
   return d;
}

} // namespace

Constellation validate_constellation(const RawSchema& raw) {
   check_ident(raw.name);
   Constellation c;
   c.name = raw.name;

   std::vector<std::string> names;
   auto claim = [&](const std::string& n) {
      for (const auto& other : names) {
         if (iequals(other, n)) throw Error(ErrorCode::DuplicateName, "name '" + n + "' is used twice");
      }
      names.push_back(n);
   };

   for (const auto& rd : raw.dimensions) {
      claim(rd.name);
      c.dimensions.push_back(validate_dimension(rd));
   }
   if (raw.facts.empty()) throw Error(ErrorCode::EmptyConstellation, "constellation " + raw.name + " has no fact");
   for (const auto& rf : raw.facts) {
      check_ident(rf.name);
      claim(rf.name);
      Fact f;
      f.name = rf.name;
      if (rf.measures.empty()) throw Error(ErrorCode::MissingMeasure, "fact " + rf.name + " has no measure");
      for (const auto& m : rf.measures) {
         check_ident(m.name);
         if (m.name == kAll || f.measure(m.name)) {
            throw Error(ErrorCode::DuplicateName, "measure '" + m.name + "' declared twice in " + rf.name);
         }
         if (!is_numeric(m.kind)) throw Error(ErrorCode::InvalidValue, "measure '" + m.name + "' must be numeric");
         f.measures.push_back(m);
      }
      std::vector<std::string> targets;
      for (const auto& dn : rf.star) {
         const Dimension* d = c.dimension(dn);
         if (!d) throw Error(ErrorCode::StarTargetMissing, "fact " + rf.name + " links unknown dimension '" + dn + "'");
         if (std::find(targets.begin(), targets.end(), d->name) != targets.end()) {
            throw Error(ErrorCode::DuplicateName, "fact " + rf.name + " links " + d->name + " twice");
         }
         targets.push_back(d->name);
      }
      if (targets.size() < 2) {
         throw Error(ErrorCode::FactWithFewerThanTwoDimensions,
                     "fact " + rf.name + " links " + std::to_string(targets.size()) + " dimension(s); at least 2 needed");
      }
      c.star[f.name] = std::move(targets);
      c.facts.push_back(std::move(f));
   }
   return c;
}

RawSchema to_raw_schema(const Constellation& c) {
   RawSchema raw;
   raw.name = c.name;
   for (const auto& d : c.dimensions) {
      RawDimension rd{d.name, d.attributes, d.id_attribute, {}};
      for (const auto& h : d.hierarchies) {
         RawHierarchy rh{h.name, h.parameters, {}};
         for (const auto& p : h.parameters) {
            auto it = h.weak.find(p);
            if (it != h.weak.end()) rh.weak.emplace_back(p, it->second);
         }
         rd.hierarchies.push_back(std::move(rh));
      }
      raw.dimensions.push_back(std::move(rd));
   }
   for (const auto& f : c.facts) raw.facts.push_back(RawFact{f.name, f.measures, c.star_of(f.name)});
   return raw;
}

std::string write_schema_document(const Constellation& c) {
   std::ostringstream out;
   out << "constellation " << c.name << "\n";
   for (const auto& d : c.dimensions) {
      out << "\ndimension " << d.name << "\n";
      for (const auto& a : d.attributes) {
         if (a.name == kAll) continue;
         out << "  attribute " << a.name << ' ' << to_string(a.kind) << "\n";
      }
      out << "  id " << d.id_attribute << "\n";
      for (const auto& h : d.hierarchies) {
         out << "  hierarchy " << h.name << ":";
         for (std::size_t i = 0; i < h.parameters.size(); ++i) out << (i ? " > " : " ") << h.parameters[i];
         out << "\n";
         for (const auto& p : h.parameters) {
            const auto& w = h.weak_of(p);
            if (w.empty()) continue;
            out << "  weak " << h.name << ' ' << p << ":";
            for (std::size_t i = 0; i < w.size(); ++i) out << (i ? ", " : " ") << w[i];
            out << "\n";
         }
      }
   }
   for (const auto& f : c.facts) {
      out << "\nfact " << f.name << "\n";
      for (const auto& m : f.measures) out << "  measure " << m.name << ' ' << to_string(m.kind) << "\n";
      const auto& s = c.star_of(f.name);
      out << "  star";
      for (std::size_t i = 0; i < s.size(); ++i) out << (i ? ", " : " ") << s[i];
      out << "\n";
   }
   return out.str();
}

AttributeLevel attribute_level(const Dimension& d, const Hierarchy& h, std::string_view attribute) {
   if (auto pos = h.position(attribute)) return AttributeLevel{*pos, std::nullopt};
   if (auto owner = h.weak_owner(attribute)) return AttributeLevel{*h.position(*owner), owner};
   throw Error(ErrorCode::AttributeNotInHierarchy,
               "'" + std::string(attribute) + "' is not in hierarchy " + h.name + " of " + d.name);
}

} // namespace golap
