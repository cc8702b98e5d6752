#include "golap/service.hpp"

#include <random>

namespace golap {

namespace {

std::string random_id() {
   static std::mutex mutex;
   static std::mt19937_64 engine{std::random_device{}() ^ (static_cast<std::uint64_t>(std::random_device{}()) << 32)};
   std::lock_guard<std::mutex> lock(mutex);
   static const char* hex = "0123456789abcdef";
   std::string out;
   for (int word = 0; word < 2; ++word) {
      std::uint64_t v = engine();
      for (int i = 0; i < 16; ++i) {
         out += hex[v & 0xF];
         v >>= 4;
      }
   }
   return out;
}

} // namespace

Session::Session(std::string id, std::shared_ptr<const Dataset> ds)
    : id_(std::move(id)), ds_(std::move(ds)), algebra_(*ds_) {}

std::string Session::next_name() const {
   for (std::size_t n = 1;; ++n) {
      std::string name = "T" + std::to_string(n);
      if (!bindings_.count(name)) return name;
   }
}

const std::string& Session::apply(const std::string& text) {
   Statement s = parse_statement(text);
   ReplayReport report;
   TM result = evaluate(s.expr, bindings_, algebra_, &report);
   std::string name = s.binding ? *s.binding : next_name();
   bindings_[name] = std::move(result);
   log_.push_back(LogEntry{print(s.expr), name});
   current_ = name;
   warnings_ = std::move(report.skipped);
   return *current_;
}

void Session::replay(const std::vector<LogEntry>& log) {
   Environment env;
   std::vector<std::string> warnings;
   for (const auto& entry : log) {
      ReplayReport report;
      env[entry.name] = evaluate(parse_expression(entry.text), env, algebra_, &report);
      warnings = std::move(report.skipped);
   }
   bindings_ = std::move(env);
   log_ = log;
   current_ = log.empty() ? std::nullopt : std::optional<std::string>(log.back().name);
   warnings_ = std::move(warnings);
}

void Session::undo() {
   if (log_.empty()) throw Error(ErrorCode::NothingToUndo, "the session log is empty");
   std::vector<LogEntry> shorter(log_.begin(), log_.end() - 1);
   replay(shorter);
}

std::string Session::transcript() const {
   std::string out;
   for (const auto& e : log_) out += e.name + " := " + e.text + "\n";
   return out;
}

// ---------------------------------------------------------------------------

std::string SessionManager::create(std::shared_ptr<const Dataset> ds) {
   auto slot = std::make_shared<Slot>();
   std::unique_lock lock(mutex_);
   std::string id;
   do {
      id = random_id();
   } while (slots_.count(id));
   slot->session = std::make_unique<Session>(id, std::move(ds));
   slots_.emplace(id, std::move(slot));
   return id;
}

SessionManager::Locked SessionManager::acquire(const std::string& id) {
   std::shared_ptr<Slot> slot;
   {
      std::shared_lock lock(mutex_);
      auto it = slots_.find(id);
      if (it == slots_.end()) throw Error(ErrorCode::UnknownSession, "no session '" + id + "'");
      slot = it->second;
   }
   std::unique_lock<std::mutex> lock(slot->mutex);
   // The slot stays alive through the map entry; erase() takes the slot lock.
   return Locked{std::move(lock), slot->session.get()};
}

bool SessionManager::erase(const std::string& id) {
   std::shared_ptr<Slot> slot;
   {
      std::unique_lock lock(mutex_);
      auto it = slots_.find(id);
      if (it == slots_.end()) return false;
      slot = it->second;
      slots_.erase(it);
   }
   std::lock_guard<std::mutex> wait(slot->mutex);
   return true;
}

std::size_t SessionManager::size() const {
   std::shared_lock lock(mutex_);
   return slots_.size();
}

// ---------------------------------------------------------------------------

void Service::load(std::shared_ptr<const Dataset> ds) {
   std::lock_guard<std::mutex> lock(ds_mutex_);
   ds_ = std::move(ds);
}

bool Service::ready() const { return dataset() != nullptr; }

std::shared_ptr<const Dataset> Service::dataset() const {
   std::lock_guard<std::mutex> lock(ds_mutex_);
   return ds_;
}

namespace {

template <typename F>
Service::Response guarded(F&& f) {
   try {
      return f();
   } catch (const Error& e) {
      return Service::Response{http_status(e.code()), error_payload(e)};
   }
}

} // namespace

Service::Response Service::get_schema() const {
   return guarded([&] {
      auto ds = dataset();
      if (!ds) throw Error(ErrorCode::ServiceNotReady, "no constellation loaded");
      return Response{200, schema_graph(ds->constellation())};
   });
}

Service::Response Service::create_session() {
   return guarded([&] {
      auto ds = dataset();
      if (!ds) throw Error(ErrorCode::ServiceNotReady, "no constellation loaded");
      return Response{201, json{{"id", sessions_.create(ds)}}};
   });
}

Service::Response Service::get_session(const std::string& id) {
   return guarded([&] {
      auto s = sessions_.acquire(id);
      return Response{200, session_state(*s.session)};
   });
}

Service::Response Service::apply(const std::string& id, const std::string& text) {
   return guarded([&] {
      auto s = sessions_.acquire(id);
      s->apply(text);
      return Response{200, session_state(*s.session)};
   });
}

Service::Response Service::undo(const std::string& id) {
   return guarded([&] {
      auto s = sessions_.acquire(id);
      s->undo();
      return Response{200, session_state(*s.session)};
   });
}

Service::Response Service::get_table(const std::string& id, const std::string& name) {
   return guarded([&] {
      auto s = sessions_.acquire(id);
      auto it = s->bindings().find(name);
      if (it == s->bindings().end()) {
         return Response{404, error_payload(Error(ErrorCode::UnboundName, "no table named '" + name + "'"))};
      }
      return Response{200, json::parse(render_structured(materialize(it->second, s->dataset())))};
   });
}

Service::Response Service::transcript(const std::string& id) {
   return guarded([&] {
      auto s = sessions_.acquire(id);
      return Response{200, json(s->transcript())};
   });
}

} // namespace golap
