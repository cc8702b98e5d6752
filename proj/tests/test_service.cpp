#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixture.hpp"

#include "golap/service.hpp"

#include <set>
#include <thread>

using namespace golap;
using namespace golap::testing;

namespace {

std::shared_ptr<const Dataset> shared_fix1() {
   static auto ds = std::make_shared<const Dataset>(load_dataset_dir(std::string(GOLAP_DATA_DIR) + "/fix1"));
   return ds;
}

std::string open_session(Service& service) {
   auto r = service.create_session();
   REQUIRE(r.status == 201);
   return r.body["id"].get<std::string>();
}

std::string error_code(const Service::Response& r) { return r.body["error"]["code"].get<std::string>(); }

const json& grid_cell(const json& state, std::size_t row, std::size_t col) {
   return state["table"]["grid"]["cells"][row][col];
}

} // namespace

TEST_CASE("sessions") {
   Service service(shared_fix1());
   std::string a = open_session(service);
   std::string b = open_session(service);
   CHECK(a != b);
   CHECK(a.size() >= 16);
   CHECK(service.sessions().size() == 2);

   auto state = service.get_session(a);
   CHECK(state.status == 200);
   CHECK(state.body["current"].is_null());
   CHECK(state.body["table"].is_null());
   CHECK(state.body["log"].empty());

   CHECK(service.get_session("nope").status == 404);
   CHECK(error_code(service.get_session("nope")) == "UnknownSession");
}

TEST_CASE("service not ready") {
   Service service;
   CHECK_FALSE(service.ready());
   auto r = service.create_session();
   CHECK(r.status == 503);
   CHECK(error_code(r) == "ServiceNotReady");
   CHECK(service.get_schema().status == 503);
   service.load(shared_fix1());
   CHECK(service.ready());
   CHECK(service.create_session().status == 201);
}

TEST_CASE("apply, undo and tables") {
   Service service(shared_fix1());
   std::string id = open_session(service);

   auto r1 = service.apply(id, kT0);
   REQUIRE(r1.status == 200);
   CHECK(r1.body["current"] == "T1");
   const json& grid1 = r1.body["table"]["grid"];
   CHECK(grid1["rows"]["layers"] == json::array({"Continent"}));
   CHECK(grid1["columns"]["layers"] == json::array({"Annee"}));
   Grid expected = grid(fx("T0"));
   CHECK(parse_structured(grid1.dump()) == expected);
   CHECK(r1.body["table"]["metadata"]["fact"] == "IMPORTATIONS");
   CHECK(r1.body["table"]["hints"].contains("axes"));

   auto r2 = service.apply(id, "DRILLDOWN(T1, Fournisseurs, Pays)");
   REQUIRE(r2.status == 200);
   CHECK(r2.body["current"] == "T2");
   CHECK(r2.body["table"]["grid"]["rows"]["layers"] == json::array({"Continent", "Pays"}));
   CHECK(r2.body["bindings"] == json::array({"T1", "T2"}));

   auto bad = service.apply(id, "DRILLDOWN(T2, Fournisseurs");
   CHECK(bad.status == 422);
   CHECK(error_code(bad) == "SyntaxError");
   CHECK(bad.body["error"].contains("span"));
   auto unchanged = service.get_session(id);
   CHECK(unchanged.body == r2.body);

   auto failing = service.apply(id, "DRILLDOWN(T2, Fournisseurs, Continent)");
   CHECK(failing.status == 422);
   CHECK(error_code(failing) == "NotFinerLevel");
   CHECK(service.get_session(id).body == r2.body);

   auto named = service.apply(id, "Years := ROLLUP(T2, Fournisseurs, All)");
   CHECK(named.body["current"] == "Years");
   auto t = service.get_table(id, "Years");
   CHECK(t.status == 200);
   CHECK(t.body["rows"]["layers"] == json::array({"All"}));
   CHECK(service.get_table(id, "T9").status == 404);

   auto u1 = service.undo(id);
   CHECK(u1.status == 200);
   CHECK(u1.body == r2.body);
   auto u2 = service.undo(id);
   CHECK(u2.body == r1.body);

   auto redo = service.apply(id, "DRILLDOWN(T1, Fournisseurs, Pays)");
   CHECK(redo.body == r2.body);

   service.undo(id);
   service.undo(id);
   auto empty = service.undo(id);
   CHECK(empty.status == 409);
   CHECK(error_code(empty) == "NothingToUndo");
}

TEST_CASE("transcript replays to the same bindings") {
   Service service(shared_fix1());
   std::string id = open_session(service);
   service.apply(id, kT0);
   service.apply(id, "X := SELECT(T1, Produits.Classe = 'Electronique')");
   service.apply(id, "AGREGATE(X, Dates, SUM(Annee)) = Y");
   auto tr = service.transcript(id);
   REQUIRE(tr.status == 200);
   std::string text = tr.body.get<std::string>();
   CHECK(text.find("T1 := DISPLAY(") != std::string::npos);
   CHECK(text.find("Y := AGREGATE(X, Dates, SUM(Annee))") != std::string::npos);

   Session fresh("replay", shared_fix1());
   for (const auto& s : parse_script(text)) fresh.apply(print(s));
   auto locked = service.sessions().acquire(id);
   for (const auto& [name, t] : locked->bindings()) {
      REQUIRE(fresh.bindings().count(name));
      CHECK(tm_equal(fresh.bindings().at(name), t, *shared_fix1()));
   }
}

TEST_CASE("session isolation") {
   Service service(shared_fix1());
   std::string a = open_session(service);
   std::string b = open_session(service);
   service.apply(a, kT0);
   service.apply(b, std::string("Q := ") + kT0);
   service.apply(a, "DRILLDOWN(T1, Dates, Mois)");
   auto sb = service.get_session(b).body;
   CHECK(sb["bindings"] == json::array({"Q"}));
   CHECK(sb["log"].size() == 1);
   CHECK(error_code(service.apply(b, "UNSELECT(T1)")) == "UnboundName");
   CHECK(service.sessions().erase(a));
   CHECK(service.get_session(a).status == 404);
   CHECK(service.get_session(b).status == 200);
}

TEST_CASE("concurrent sessions") {
   Service service(shared_fix1());
   std::vector<std::string> ids;
   for (int i = 0; i < 4; ++i) ids.push_back(open_session(service));
   std::vector<std::thread> workers;
   for (const auto& id : ids) {
      workers.emplace_back([&service, id] {
         service.apply(id, kT0);
         for (int k = 0; k < 5; ++k) {
            service.apply(id, "SWITCH(T1, Fournisseurs, Continent, 'Asie', 'Amerique')");
            service.undo(id);
         }
      });
   }
   for (auto& w : workers) w.join();
   for (const auto& id : ids) {
      auto s = service.get_session(id).body;
      CHECK(s["log"].size() == 1);
      CHECK(s["current"] == "T1");
   }
}

TEST_CASE("schema graph") {
   Service service(shared_fix1());
   auto r = service.get_schema();
   REQUIRE(r.status == 200);
   const json& g = r.body;
   CHECK(g["constellation"] == "SH_IMPORT");

   std::size_t facts = 0, dims = 0, stars = 0;
   std::set<std::string> node_ids;
   for (const auto& n : g["nodes"]) {
      node_ids.insert(n["id"].get<std::string>());
      if (n["kind"] == "fact") {
         ++facts;
         CHECK(n["color"] == "green");
      }
      if (n["kind"] == "dimension") {
         ++dims;
         CHECK(n["color"] == "red");
      }
      if (n["label"] == "FOURNISSEURS") {
         std::set<std::string> hs;
         for (const auto& h : n["hierarchies"]) hs.insert(h["name"].get<std::string>());
         CHECK(hs == std::set<std::string>{"HGeo", "HZon"});
      }
   }
   for (const auto& e : g["edges"]) stars += e["kind"] == "star";
   CHECK(facts == 2);
   CHECK(dims == 4);
   CHECK(stars == 6);

   const Constellation& cs = shared_fix1()->constellation();
   std::set<std::string> expected;
   for (const auto& f : cs.facts) expected.insert("fact:" + f.name);
   for (const auto& d : cs.dimensions) {
      expected.insert("dim:" + d.name);
      for (const auto& h : d.hierarchies) {
         for (const auto& p : h.parameters) expected.insert("attr:" + d.name + "." + p);
         for (const auto& [p, ws] : h.weak) {
            for (const auto& w : ws) expected.insert("attr:" + d.name + "." + w);
         }
      }
   }
   CHECK(node_ids == expected);
   for (const auto& e : g["edges"]) {
      CHECK(node_ids.count(e["from"].get<std::string>()));
      CHECK(node_ids.count(e["to"].get<std::string>()));
   }
}

TEST_CASE("operation hints") {
   const Dataset& ds = *shared_fix1();
   json h = operation_hints(fx("T0"), ds);
   json line;
   for (const auto& a : h["axes"]) {
      if (a["dimension"] == "FOURNISSEURS") line = a;
   }
   REQUIRE_FALSE(line.is_null());
   CHECK(line["drilldown"] == json::array({"Pays", "IdFour"}));
   std::set<std::string> rotations;
   for (const auto& hz : line["hrotate"]) rotations.insert(hz.get<std::string>());
   CHECK(rotations.count("HZon"));
   CHECK(h["unselect"] == false);
   CHECK(h["unagregate"] == false);
   bool effectifs = false;
   for (const auto& f : h["frotate"]) effectifs = effectifs || f["fact"] == "EFFECTIFS";
   CHECK_FALSE(effectifs);

   json h3 = operation_hints(fx("DROTATE(T0, Fournisseurs, Societes, HGFr)"), ds);
   effectifs = false;
   for (const auto& f : h3["frotate"]) effectifs = effectifs || f["fact"] == "EFFECTIFS";
   CHECK(effectifs);

   json meta = tm_metadata(fx("SELECT(T0, Dates.Annee = 2005)"));
   CHECK(meta["restriction"] == "DATES.Annee = 2005");
   CHECK(meta["history"].size() == 1);
   CHECK(operation_hints(fx("SELECT(T0, Dates.Annee = 2005)"), ds)["unselect"] == true);
}

TEST_CASE("status mapping") {
   CHECK(http_status(ErrorCode::UnknownSession) == 404);
   CHECK(http_status(ErrorCode::NothingToUndo) == 409);
   CHECK(http_status(ErrorCode::ServiceNotReady) == 503);
   CHECK(http_status(ErrorCode::ArityError) == 422);
   json p = error_payload(Error(ErrorCode::ArityError, "bad", SourceSpan{0, 3, 1, 1}));
   CHECK(p["error"]["code"] == "ArityError");
   CHECK(p["error"]["message"] == "bad");
   CHECK(p["error"]["span"]["end"] == 3);
}
