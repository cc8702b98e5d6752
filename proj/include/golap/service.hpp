#pragma once

#include "golap/algebra.hpp"
#include "golap/dataset.hpp"
#include "golap/query.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace golap {

using nlohmann::json;

/// One applied statement: the expression text and the name it was bound to.
struct LogEntry {
   std::string text;
   std::string name;
   bool operator==(const LogEntry&) const = default;
};

/// Bindings of one client. Not thread-safe on its own; the manager hands out
/// sessions together with their lock.
class Session {
   public:
   Session(std::string id, std::shared_ptr<const Dataset> ds);

   const std::string& id() const { return id_; }
   const Environment& bindings() const { return bindings_; }
   const std::optional<std::string>& current() const { return current_; }
   const std::vector<LogEntry>& log() const { return log_; }
   const std::vector<std::string>& warnings() const { return warnings_; }
   const Dataset& dataset() const { return *ds_; }

   /// Parses and evaluates one statement, binds the result (explicit name or
   /// the next free Tn) and makes it current. Atomic: on error nothing changes.
   const std::string& apply(const std::string& text);
   /// Drops the last log entry and rebuilds every binding by replay.
   void undo();
   /// Rebuilds bindings from `log`, replacing the session state.
   void replay(const std::vector<LogEntry>& log);
   /// `name := expression` lines, replayable with parse_script.
   std::string transcript() const;

   private:
   std::string next_name() const;

   std::string id_;
   std::shared_ptr<const Dataset> ds_;
   Algebra algebra_;
   Environment bindings_;
   std::optional<std::string> current_;
   std::vector<LogEntry> log_;
   std::vector<std::string> warnings_;
};

/// Sessions keyed by unguessable ids. Each session is serialized by its own
/// mutex; the map by a shared one.
class SessionManager {
   public:
   struct Locked {
      std::unique_lock<std::mutex> lock;
      Session* session;
      Session* operator->() const { return session; }
   };

   std::string create(std::shared_ptr<const Dataset> ds);
   Locked acquire(const std::string& id);
   bool erase(const std::string& id);
   std::size_t size() const;

   private:
   struct Slot {
      std::mutex mutex;
      std::unique_ptr<Session> session;
   };
   mutable std::shared_mutex mutex_;
   std::map<std::string, std::shared_ptr<Slot>> slots_;
};

/// Constellation graph: fact (green) and dimension (red) nodes, parameter and
/// weak attribute nodes, star edges, per-hierarchy parameter edges and weak
/// edges.
json schema_graph(const Constellation& cs);
/// Axes, subject, restriction, subtotals, value orders and history of a table.
json tm_metadata(const TM& t);
/// Operations applicable to `t`, used by the client to disable invalid nodes.
json operation_hints(const TM& t, const Dataset& ds);
/// Session state document: bindings, log and the current table with its grid.
json session_state(const Session& s);
/// Machine-readable error payload.
json error_payload(const Error& e);
/// HTTP status for an error code.
int http_status(ErrorCode code);

/// Request handling independent of the transport.
class Service {
   public:
   Service() = default;
   explicit Service(std::shared_ptr<const Dataset> ds) : ds_(std::move(ds)) {}

   void load(std::shared_ptr<const Dataset> ds);
   bool ready() const;

   struct Response {
      int status = 200;
      json body;
   };

   Response get_schema() const;
   Response create_session();
   Response get_session(const std::string& id);
   Response apply(const std::string& id, const std::string& text);
   Response undo(const std::string& id);
   Response get_table(const std::string& id, const std::string& name);
   /// Plain-text transcript, or an error body.
   Response transcript(const std::string& id);

   SessionManager& sessions() { return sessions_; }

   private:
   std::shared_ptr<const Dataset> dataset() const;

   mutable std::mutex ds_mutex_;
   std::shared_ptr<const Dataset> ds_;
   SessionManager sessions_;
};

/// Serves `service` over HTTP until stopped. Returns false if binding fails.
bool serve_http(Service& service, const std::string& host, int port);

} // namespace golap
