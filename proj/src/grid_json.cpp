#include "golap/error.hpp"
#include "golap/tm.hpp"

#include <json.hpp>

namespace golap {

namespace {

using nlohmann::json;

json value_json(const Value& v) {
   if (auto i = std::get_if<std::int64_t>(&v)) return *i;
   if (auto d = std::get_if<double>(&v)) return *d;
   return std::get<std::string>(v);
}

Value json_value(const json& j) {
   if (j.is_number_integer()) return j.get<std::int64_t>();
   if (j.is_number_float()) return j.get<double>();
   if (j.is_string()) return j.get<std::string>();
   throw Error(ErrorCode::SyntaxError, "grid value must be a number or a string");
}

json member_json(const Member& m) {
   json out = json::array();
   for (const auto& v : m) out.push_back(value_json(v));
   return out;
}

json tree_json(const std::vector<HeaderNode>& nodes) {
   json out = json::array();
   for (const auto& n : nodes) {
      json node{{"label", n.label}, {"member", member_json(n.member)}};
      if (n.subtotal) node["subtotal"] = std::string(to_string(*n.subtotal));
      if (!n.children.empty()) node["children"] = tree_json(n.children);
      out.push_back(std::move(node));
   }
   return out;
}

json axis_json(const AxisHeaders& a) {
   json leaves = json::array();
   for (const auto& leaf : a.leaves) {
      json path = json::array();
      for (const auto& m : leaf.path) path.push_back(member_json(m));
      leaves.push_back(json{{"path", std::move(path)},
                            {"subtotal", leaf.subtotal ? json(std::string(to_string(*leaf.subtotal))) : json(nullptr)}});
   }
   return json{{"dimension", a.dimension}, {"hierarchy", a.hierarchy}, {"layers", a.layers},
               {"leaves", std::move(leaves)}, {"tree", tree_json(header_tree(a))}};
}

AxisHeaders json_axis(const json& j) {
   AxisHeaders a;
   a.dimension = j.at("dimension").get<std::string>();
   a.hierarchy = j.at("hierarchy").get<std::string>();
   a.layers = j.at("layers").get<std::vector<std::string>>();
   for (const auto& leaf : j.at("leaves")) {
      HeaderLeaf out;
      for (const auto& m : leaf.at("path")) {
         Member member;
         for (const auto& v : m) member.push_back(json_value(v));
         out.path.push_back(std::move(member));
      }
      const auto& st = leaf.at("subtotal");
      if (!st.is_null()) {
         auto fn = parse_agg_fn(st.get<std::string>());
         if (!fn) throw Error(ErrorCode::SyntaxError, "unknown subtotal function " + st.get<std::string>());
         out.subtotal = *fn;
      }
      a.leaves.push_back(std::move(out));
   }
   return a;
}

} // namespace

std::string render_structured(const Grid& g, int indent) {
   json cells = json::array();
   for (const auto& row : g.cells) {
      json jr = json::array();
      for (const auto& cell : row) {
         if (!cell) {
            jr.push_back(nullptr);
            continue;
         }
         json entries = json::array();
         for (const auto& e : *cell) {
            if (auto d = std::get_if<double>(&e)) {
               entries.push_back(*d);
            } else {
               json set = json::array();
               for (const auto& v : std::get<std::vector<Value>>(e)) set.push_back(value_json(v));
               entries.push_back(std::move(set));
            }
         }
         jr.push_back(std::move(entries));
      }
      cells.push_back(std::move(jr));
   }
   json doc{{"format", "golap-grid/1"},   {"fact", g.fact},
            {"subject", g.subject},       {"restriction", g.restriction},
            {"rows", axis_json(g.rows)},  {"columns", axis_json(g.columns)},
            {"cells", std::move(cells)}};
   return doc.dump(indent);
}

Grid parse_structured(std::string_view document) {
   json doc;
   try {
      doc = json::parse(document);
   } catch (const json::exception& e) {
      throw Error(ErrorCode::SyntaxError, std::string("grid document: ") + e.what());
   }
   try {
      if (doc.at("format") != "golap-grid/1") throw Error(ErrorCode::SyntaxError, "unsupported grid format");
      Grid g;
      g.fact = doc.at("fact").get<std::string>();
      g.subject = doc.at("subject").get<std::vector<std::string>>();
      g.restriction = doc.at("restriction").get<std::vector<std::string>>();
      g.rows = json_axis(doc.at("rows"));
      g.columns = json_axis(doc.at("columns"));
      for (const auto& jr : doc.at("cells")) {
         std::vector<Cell> row;
         for (const auto& jc : jr) {
            if (jc.is_null()) {
               row.emplace_back();
               continue;
            }
            std::vector<CellEntry> entries;
            for (const auto& e : jc) {
               if (e.is_array()) {
                  std::vector<Value> set;
                  for (const auto& v : e) set.push_back(json_value(v));
                  entries.emplace_back(std::move(set));
               } else {
                  entries.emplace_back(e.get<double>());
               }
            }
            row.emplace_back(std::move(entries));
         }
         g.cells.push_back(std::move(row));
      }
      return g;
   } catch (const json::exception& e) {
      throw Error(ErrorCode::SyntaxError, std::string("grid document: ") + e.what());
   }
}

} // namespace golap
