#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixture.hpp"

#include "golap/http.hpp"

#include <thread>

using namespace golap;
using namespace golap::testing;

namespace {

/// A service bound to an ephemeral localhost port for the lifetime of the object.
struct LiveServer {
   Service service;
   httplib::Server server;
   std::thread thread;
   int port = -1;

   explicit LiveServer(std::shared_ptr<const Dataset> ds) : service(std::move(ds)) {
      mount_routes(server, service);
      port = server.bind_to_any_port("127.0.0.1");
      REQUIRE(port > 0);
      thread = std::thread([this] { server.listen_after_bind(); });
      server.wait_until_ready();
   }

   ~LiveServer() {
      server.stop();
      thread.join();
   }

   httplib::Client client() const {
      httplib::Client c("127.0.0.1", port);
      c.set_read_timeout(30, 0);
      return c;
   }
};

std::shared_ptr<const Dataset> shared_fix1() {
   return std::make_shared<const Dataset>(load_dataset_dir(std::string(GOLAP_DATA_DIR) + "/fix1"));
}

json body_of(const httplib::Result& r) {
   REQUIRE(r);
   return json::parse(r->body);
}

std::string ops_body(const std::string& text) { return json{{"text", text}}.dump(); }

} // namespace

TEST_CASE("routes") {
   LiveServer live(shared_fix1());
   auto cli = live.client();

   auto schema = cli.Get("/schema");
   REQUIRE(schema);
   CHECK(schema->status == 200);
   CHECK(schema->get_header_value("Content-Type") == "application/json");
   CHECK(body_of(schema)["constellation"] == "SH_IMPORT");

   auto created = cli.Post("/sessions", "", "application/json");
   REQUIRE(created);
   CHECK(created->status == 201);
   std::string id = body_of(created)["id"].get<std::string>();

   auto state = cli.Get("/sessions/" + id);
   REQUIRE(state);
   CHECK(state->status == 200);
   CHECK(body_of(state)["current"].is_null());

   auto applied = cli.Post("/sessions/" + id + "/ops", ops_body(kT0), "application/json");
   REQUIRE(applied);
   CHECK(applied->status == 200);
   json s1 = body_of(applied);
   CHECK(s1["current"] == "T1");
   CHECK(parse_structured(s1["table"]["grid"].dump()) == grid(fx("T0")));

   auto drilled = cli.Post("/sessions/" + id + "/ops", ops_body("DRILLDOWN(T1, Fournisseurs, Pays)"), "application/json");
   REQUIRE(drilled);
   CHECK(body_of(drilled)["current"] == "T2");

   auto table = cli.Get("/sessions/" + id + "/tm/T1");
   REQUIRE(table);
   CHECK(table->status == 200);
   CHECK(parse_structured(table->body) == grid(fx("T0")));

   auto transcript = cli.Get("/sessions/" + id + "/transcript");
   REQUIRE(transcript);
   CHECK(transcript->status == 200);
   CHECK(transcript->get_header_value("Content-Type") == "text/plain");
   CHECK(transcript->body.find("T2 := DRILLDOWN(T1, Fournisseurs, Pays)") != std::string::npos);

   auto undone = cli.Post("/sessions/" + id + "/undo", "", "application/json");
   REQUIRE(undone);
   CHECK(undone->status == 200);
   CHECK(body_of(undone) == s1);
}

TEST_CASE("error statuses") {
   LiveServer live(shared_fix1());
   auto cli = live.client();
   std::string id = body_of(cli.Post("/sessions", "", "application/json"))["id"].get<std::string>();

   auto syntax = cli.Post("/sessions/" + id + "/ops", ops_body("ROLLUP(T0"), "application/json");
   REQUIRE(syntax);
   CHECK(syntax->status == 422);
   CHECK(body_of(syntax)["error"]["code"] == "SyntaxError");

   auto arity = cli.Post("/sessions/" + id + "/ops", ops_body("ROLLUP(T0)"), "application/json");
   REQUIRE(arity);
   CHECK(arity->status == 422);
   CHECK(body_of(arity)["error"]["code"] == "ArityError");

   auto malformed = cli.Post("/sessions/" + id + "/ops", "not json", "application/json");
   REQUIRE(malformed);
   CHECK(malformed->status == 400);
   auto no_text = cli.Post("/sessions/" + id + "/ops", R"({"expr": "T1"})", "application/json");
   REQUIRE(no_text);
   CHECK(no_text->status == 400);

   auto unknown = cli.Get("/sessions/abc123");
   REQUIRE(unknown);
   CHECK(unknown->status == 404);
   CHECK(body_of(unknown)["error"]["code"] == "UnknownSession");

   auto nothing = cli.Post("/sessions/" + id + "/undo", "", "application/json");
   REQUIRE(nothing);
   CHECK(nothing->status == 409);

   auto missing_table = cli.Get("/sessions/" + id + "/tm/T7");
   REQUIRE(missing_table);
   CHECK(missing_table->status == 404);

   auto no_route = cli.Get("/nowhere");
   REQUIRE(no_route);
   CHECK(no_route->status == 404);

   CHECK(body_of(cli.Get("/sessions/" + id))["log"].empty());
}

TEST_CASE("not ready") {
   Service empty;
   httplib::Server server;
   mount_routes(server, empty);
   int port = server.bind_to_any_port("127.0.0.1");
   REQUIRE(port > 0);
   std::thread t([&] { server.listen_after_bind(); });
   server.wait_until_ready();
   httplib::Client cli("127.0.0.1", port);
   auto r = cli.Post("/sessions", "", "application/json");
   REQUIRE(r);
   CHECK(r->status == 503);
   auto s = cli.Get("/schema");
   REQUIRE(s);
   CHECK(s->status == 503);
   server.stop();
   t.join();
}
