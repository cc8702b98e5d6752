#include "golap/http.hpp"

namespace golap {

namespace {

void send(httplib::Response& res, const Service::Response& r) {
   res.status = r.status;
   res.set_content(r.body.dump(), "application/json");
}

} // namespace

void mount_routes(httplib::Server& server, Service& service) {
   server.Get("/schema", [&](const httplib::Request&, httplib::Response& res) { send(res, service.get_schema()); });

   server.Post("/sessions", [&](const httplib::Request&, httplib::Response& res) { send(res, service.create_session()); });

   server.Get(R"(/sessions/([0-9A-Za-z]+))", [&](const httplib::Request& req, httplib::Response& res) {
      send(res, service.get_session(req.matches[1]));
   });

   server.Post(R"(/sessions/([0-9A-Za-z]+)/ops)", [&](const httplib::Request& req, httplib::Response& res) {
      json body = json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object() || !body.contains("text") || !body["text"].is_string()) {
         send(res, Service::Response{400, json{{"error", {{"code", "BadRequest"}, {"message", "expected {\"text\": \"...\"}"}}}}});
         return;
      }
      send(res, service.apply(req.matches[1], body["text"].get<std::string>()));
   });

   server.Post(R"(/sessions/([0-9A-Za-z]+)/undo)", [&](const httplib::Request& req, httplib::Response& res) {
      send(res, service.undo(req.matches[1]));
   });

   server.Get(R"(/sessions/([0-9A-Za-z]+)/tm/([A-Za-z_][A-Za-z0-9_]*))",
              [&](const httplib::Request& req, httplib::Response& res) {
                 send(res, service.get_table(req.matches[1], req.matches[2]));
              });

   server.Get(R"(/sessions/([0-9A-Za-z]+)/transcript)", [&](const httplib::Request& req, httplib::Response& res) {
      auto r = service.transcript(req.matches[1]);
      if (r.status != 200) {
         send(res, r);
         return;
      }
      res.status = 200;
      res.set_content(r.body.get<std::string>(), "text/plain");
   });
}

bool serve_http(Service& service, const std::string& host, int port) {
   httplib::Server server;
   mount_routes(server, service);
   return server.listen(host, port);
}

} // namespace golap
