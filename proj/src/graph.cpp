#include "golap/service.hpp"

#include "golap/schema.hpp"

#include <algorithm>
#include <set>

namespace golap {

namespace {

std::string attr_node(const std::string& dim, const std::string& attr) { return "attr:" + dim + "." + attr; }

json value_json(const Value& v) {
   if (auto i = std::get_if<std::int64_t>(&v)) return *i;
   if (auto d = std::get_if<double>(&v)) return *d;
   return std::get<std::string>(v);
}

json axis_json(const AxisSpec& a) {
   json units = json::array();
   for (const auto& u : a.units) {
      std::string kind;
      switch (u.kind) {
         case DisplayUnit::Kind::Parameter: kind = "parameter"; break;
         case DisplayUnit::Kind::WeakList: kind = "weak-list"; break;
         case DisplayUnit::Kind::Nested: kind = "nested"; break;
         case DisplayUnit::Kind::Measure: kind = "measure"; break;
      }
      json unit{{"kind", kind}, {"label", u.label()}};
      if (u.kind == DisplayUnit::Kind::Measure) {
         unit["measure"] = format_measure(u.measure);
      } else {
         unit["dimension"] = u.dimension;
         unit["attributes"] = u.attributes();
      }
      units.push_back(std::move(unit));
   }
   return json{{"dimension", a.dimension}, {"hierarchy", a.hierarchy}, {"units", std::move(units)}};
}

} // namespace

json schema_graph(const Constellation& cs) {
   json nodes = json::array();
   json edges = json::array();
   for (const auto& f : cs.facts) {
      json measures = json::array();
      for (const auto& m : f.measures) measures.push_back(json{{"name", m.name}, {"kind", to_string(m.kind)}});
      nodes.push_back(json{{"id", "fact:" + f.name},
                           {"kind", "fact"},
                           {"label", f.name},
                           {"color", "green"},
                           {"measures", std::move(measures)}});
      for (const auto& d : cs.star_of(f.name)) {
         edges.push_back(json{{"kind", "star"}, {"from", "fact:" + f.name}, {"to", "dim:" + d}});
      }
   }
   for (const auto& d : cs.dimensions) {
      json hierarchies = json::array();
      std::set<std::string> parameters, weak;
      for (const auto& h : d.hierarchies) {
         json weak_map = json::object();
         for (const auto& [p, ws] : h.weak) {
            weak_map[p] = ws;
            weak.insert(ws.begin(), ws.end());
            for (const auto& w : ws) {
               edges.push_back(json{{"kind", "weak"},
                                    {"hierarchy", h.name},
                                    {"from", attr_node(d.name, p)},
                                    {"to", attr_node(d.name, w)}});
            }
         }
         hierarchies.push_back(json{{"name", h.name}, {"path", h.parameters}, {"weak", std::move(weak_map)}});
         parameters.insert(h.parameters.begin(), h.parameters.end());
         edges.push_back(json{{"kind", "hierarchy"},
                              {"hierarchy", h.name},
                              {"from", "dim:" + d.name},
                              {"to", attr_node(d.name, h.parameters.front())}});
         for (std::size_t i = 0; i + 1 < h.parameters.size(); ++i) {
            edges.push_back(json{{"kind", "hierarchy"},
                                 {"hierarchy", h.name},
                                 {"from", attr_node(d.name, h.parameters[i])},
                                 {"to", attr_node(d.name, h.parameters[i + 1])}});
         }
      }
      nodes.push_back(json{{"id", "dim:" + d.name},
                           {"kind", "dimension"},
                           {"label", d.name},
                           {"color", "red"},
                           {"identifier", d.id_attribute},
                           {"hierarchies", std::move(hierarchies)}});
      for (const auto& a : d.attributes) {
         bool is_param = parameters.count(a.name) > 0;
         if (!is_param && !weak.count(a.name)) continue;
         nodes.push_back(json{{"id", attr_node(d.name, a.name)},
                              {"kind", is_param ? "parameter" : "weak"},
                              {"label", a.name},
                              {"dimension", d.name},
                              {"value_kind", to_string(a.kind)},
                              {"system", a.name == kAll}});
      }
   }
   return json{{"constellation", cs.name}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

json tm_metadata(const TM& t) {
   json subject = json::array();
   for (const auto& e : t.subject.entries) {
      if (auto m = std::get_if<MeasureTerm>(&e)) {
         subject.push_back(json{{"kind", "measure"}, {"label", format_measure(*m)}, {"fn", to_string(m->fn)}, {"measure", m->measure}});
      } else {
         const auto& p = std::get<PushedAttribute>(e);
         subject.push_back(
             json{{"kind", "pushed"}, {"label", format_subject_entry(e)}, {"dimension", p.dimension}, {"attribute", p.attribute}});
      }
   }
   json aggregates = json::array();
   for (const auto& a : t.aggregates) {
      aggregates.push_back(json{{"axis", a.axis_dimension},
                                {"dimension", a.attribute.dimension},
                                {"attribute", a.attribute.attribute},
                                {"fn", to_string(a.fn)}});
   }
   json orders = json::array();
   for (const auto& [key, values] : t.domain_orders) {
      json vs = json::array();
      for (const auto& v : values) vs.push_back(value_json(v));
      orders.push_back(json{{"dimension", key.dimension}, {"attribute", key.attribute}, {"values", std::move(vs)}});
   }
   json history = json::array();
   for (const auto& r : t.history) {
      std::string args = format_arguments(r.operation);
      history.push_back(json{{"operator", r.name()}, {"arguments", args}, {"objects", r.objects}});
   }
   return json{{"constellation", t.constellation},
               {"fact", t.subject.fact},
               {"subject", std::move(subject)},
               {"line", axis_json(t.line)},
               {"column", axis_json(t.column)},
               {"restriction", format_predicate(t.restriction)},
               {"aggregates", std::move(aggregates)},
               {"orders", std::move(orders)},
               {"history", std::move(history)}};
}

json operation_hints(const TM& t, const Dataset& ds) {
   const Constellation& cs = ds.constellation();
   const Fact* fact = cs.fact(t.subject.fact);
   json axes = json::array();
   for (const AxisSpec* axis : {&t.line, &t.column}) {
      const Dimension* d = cs.dimension(axis->dimension);
      const Hierarchy* h = d ? d->hierarchy(axis->hierarchy) : nullptr;
      if (!d || !h) continue;
      std::size_t finest = 0;
      for (const auto& u : axis->units) {
         if (u.is_native()) finest = std::max(finest, h->position(u.attribute).value_or(0));
      }
      json drill = json::array(), roll = json::array(), weak_forms = json::array();
      for (std::size_t i = 0; i < h->parameters.size(); ++i) {
         const auto& p = h->parameters[i];
         if (i > finest) drill.push_back(p);
         if (i <= finest && finest > 0) roll.push_back(p);
         if (i > finest && !h->weak_of(p).empty()) weak_forms.push_back(json{{"parameter", p}, {"weak", h->weak_of(p)}});
      }
      json hierarchies = json::array();
      for (const auto& other : d->hierarchies) {
         if (other.name != h->name) hierarchies.push_back(other.name);
      }
      const AxisSpec& opposite = axis == &t.line ? t.column : t.line;
      json rotate = json::array();
      for (const auto& dim : cs.star_of(t.subject.fact)) {
         if (dim == opposite.dimension) continue;
         const Dimension* nd = cs.dimension(dim);
         json hs = json::array();
         for (const auto& nh : nd->hierarchies) hs.push_back(nh.name);
         rotate.push_back(json{{"dimension", dim}, {"hierarchies", std::move(hs)}});
      }
      json displayed = json::array();
      for (const auto& u : axis->units) {
         for (const auto& a : u.attributes()) displayed.push_back(json{{"dimension", u.dimension}, {"attribute", a}});
      }
      axes.push_back(json{{"dimension", d->name},
                          {"hierarchy", h->name},
                          {"drilldown", std::move(drill)},
                          {"drilldown_weak", std::move(weak_forms)},
                          {"rollup", std::move(roll)},
                          {"hrotate", std::move(hierarchies)},
                          {"drotate", std::move(rotate)},
                          {"displayed", std::move(displayed)}});
   }

   json nest = json::array(), push = json::array(), select = json::array();
   for (const auto& dim : cs.star_of(t.subject.fact)) {
      const Dimension* d = cs.dimension(dim);
      json attrs = json::array(), pushable = json::array();
      for (const auto& a : d->attributes) {
         select.push_back(json{{"qualifier", dim}, {"name", a.name}, {"value_kind", to_string(a.kind)}});
         if (a.name == kAll) continue;
         attrs.push_back(a.name);
         SubjectEntry e = PushedAttribute{dim, a.name};
         if (std::find(t.subject.entries.begin(), t.subject.entries.end(), e) == t.subject.entries.end()) {
            pushable.push_back(a.name);
         }
      }
      if (dim != t.line.dimension && dim != t.column.dimension) nest.push_back(json{{"dimension", dim}, {"attributes", attrs}});
      push.push_back(json{{"dimension", dim}, {"attributes", std::move(pushable)}});
   }

   json addm = json::array(), delm = json::array(), pull = json::array();
   if (fact) {
      for (const auto& m : fact->measures) {
         select.push_back(json{{"qualifier", fact->name}, {"name", m.name}, {"value_kind", to_string(m.kind)}});
         for (AggFn fn : {AggFn::Sum, AggFn::Avg, AggFn::Min, AggFn::Max, AggFn::Count}) {
            SubjectEntry e = MeasureTerm{fn, m.name};
            if (std::find(t.subject.entries.begin(), t.subject.entries.end(), e) == t.subject.entries.end()) {
               addm.push_back(format_measure(MeasureTerm{fn, m.name}));
            }
         }
      }
   }
   for (const auto& e : t.subject.entries) {
      if (auto m = std::get_if<MeasureTerm>(&e)) {
         if (t.subject.entries.size() >= 2) delm.push_back(format_measure(*m));
         pull.push_back(format_measure(*m));
      }
   }
   json frotate = json::array();
   for (const auto& f : cs.facts) {
      if (f.name == t.subject.fact) continue;
      if (cs.is_starred(f.name, t.line.dimension) && cs.is_starred(f.name, t.column.dimension)) {
         json ms = json::array();
         for (const auto& m : f.measures) ms.push_back(m.name);
         frotate.push_back(json{{"fact", f.name}, {"measures", std::move(ms)}});
      }
   }
   return json{{"axes", std::move(axes)},     {"nest", std::move(nest)},       {"push", std::move(push)},
               {"select", std::move(select)}, {"addm", std::move(addm)},       {"delm", std::move(delm)},
               {"pull", std::move(pull)},     {"frotate", std::move(frotate)}, {"unagregate", !t.aggregates.empty()},
               {"unselect", !normalize(t.restriction).is_true()}};
}

json session_state(const Session& s) {
   json bindings = json::array();
   for (const auto& [name, _] : s.bindings()) bindings.push_back(name);
   json log = json::array();
   for (const auto& e : s.log()) log.push_back(json{{"name", e.name}, {"text", e.text}});
   json state{{"id", s.id()},
              {"current", s.current() ? json(*s.current()) : json(nullptr)},
              {"bindings", std::move(bindings)},
              {"log", std::move(log)},
              {"warnings", s.warnings()}};
   if (s.current()) {
      const TM& t = s.bindings().at(*s.current());
      state["table"] = json{{"name", *s.current()},
                            {"metadata", tm_metadata(t)},
                            {"grid", json::parse(render_structured(materialize(t, s.dataset())))},
                            {"hints", operation_hints(t, s.dataset())}};
   } else {
      state["table"] = nullptr;
   }
   return state;
}

json error_payload(const Error& e) {
   json err{{"code", to_string(e.code())}, {"message", e.detail()}};
   if (e.span()) {
      const auto& s = *e.span();
      err["span"] = json{{"begin", s.begin}, {"end", s.end}, {"line", s.line}, {"column", s.column}};
   }
   return json{{"error", std::move(err)}};
}

int http_status(ErrorCode code) {
   switch (code) {
      case ErrorCode::UnknownSession: return 404;
      case ErrorCode::NothingToUndo: return 409;
      case ErrorCode::ServiceNotReady: return 503;
      default: return 422;
   }
}

} // namespace golap
