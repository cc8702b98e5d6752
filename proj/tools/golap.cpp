// golap: validate a constellation directory, evaluate algebra expressions,
// run an interactive loop, or serve the HTTP API.

#include "golap/dataset.hpp"
#include "golap/query.hpp"
#include "golap/service.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <unistd.h>
#include <iostream>
#include <memory>

namespace {

constexpr int kUsage = 1;
constexpr int kValidation = 2;
constexpr int kQuery = 3;

void print_error(const golap::Error& e, const std::string& source = {}) {
   std::cerr << e.what() << "\n";
   if (e.span() && !source.empty()) {
      // Show the offending line with a caret under the span start.
      std::size_t line_start = source.rfind('\n', e.span()->begin == 0 ? 0 : e.span()->begin - 1);
      line_start = line_start == std::string::npos ? 0 : line_start + 1;
      if (e.span()->begin < line_start) line_start = 0;
      std::size_t line_end = source.find('\n', line_start);
      std::string line = source.substr(line_start, line_end == std::string::npos ? std::string::npos : line_end - line_start);
      std::cerr << "  " << line << "\n  " << std::string(e.span()->column > 0 ? e.span()->column - 1 : 0, ' ') << "^\n";
   }
}

std::optional<golap::Dataset> load(const std::string& dir) {
   try {
      return golap::load_dataset_dir(dir);
   } catch (const golap::Error& e) {
      print_error(e);
      return std::nullopt;
   }
}

/// Evaluates statements in order, binding results; returns the last table.
struct Runner {
   const golap::Dataset& ds;
   golap::Algebra algebra{ds};
   golap::Environment env;
   std::size_t counter = 0;

   std::pair<std::string, golap::TM> run(const golap::Statement& s) {
      golap::ReplayReport report;
      golap::TM t = golap::evaluate(s.expr, env, algebra, &report);
      for (const auto& w : report.skipped) std::cerr << "warning: skipped " << w << "\n";
      std::string name;
      if (s.binding) {
         name = *s.binding;
      } else {
         do name = "T" + std::to_string(++counter);
         while (env.count(name));
      }
      env[name] = t;
      return {name, std::move(t)};
   }
};

std::string render(const golap::TM& t, const golap::Dataset& ds, const std::string& format) {
   golap::Grid g = golap::materialize(t, ds);
   return format == "json" ? golap::render_structured(g, 2) + "\n" : golap::render_text(g);
}

int cmd_validate(const std::string& dir) {
   auto ds = load(dir);
   if (!ds) return kValidation;
   const auto& cs = ds->constellation();
   std::cout << "constellation " << cs.name << ": " << cs.dimensions.size() << " dimensions, " << cs.facts.size()
             << " facts\n";
   for (const auto& f : cs.facts) std::cout << "  " << f.name << ": " << ds->fact_count(f.name) << " rows\n";
   return 0;
}

int cmd_query(const std::string& dir, const std::string& expr, const std::string& file, const std::string& format) {
   auto ds = load(dir);
   if (!ds) return kValidation;
   std::string source = expr;
   if (!file.empty()) {
      try {
         source = golap::read_file(file);
      } catch (const golap::Error& e) {
         print_error(e);
         return kUsage;
      }
   }
   Runner runner{*ds};
   try {
      auto statements = file.empty() ? std::vector<golap::Statement>{golap::parse_statement(source)}
                                     : golap::parse_script(source);
      if (statements.empty()) {
         std::cerr << "no statement to evaluate\n";
         return kQuery;
      }
      golap::TM last;
      for (const auto& s : statements) last = runner.run(s).second;
      std::cout << render(last, *ds, format);
   } catch (const golap::Error& e) {
      print_error(e, source);
      return kQuery;
   }
   return 0;
}

int cmd_repl(const std::string& dir, const std::string& format) {
   auto ds = load(dir);
   if (!ds) return kValidation;
   Runner runner{*ds};
   std::string line;
   bool tty = isatty(0);
   while (true) {
      if (tty) std::cout << "golap> " << std::flush;
      if (!std::getline(std::cin, line)) break;
      auto start = line.find_first_not_of(" \t\r");
      if (start == std::string::npos || line[start] == '#') continue;
      if (line.substr(start) == ":quit" || line.substr(start) == ":q") break;
      if (line.substr(start) == ":tables") {
         for (const auto& [name, _] : runner.env) std::cout << name << "\n";
         continue;
      }
      try {
         auto [name, t] = runner.run(golap::parse_statement(line));
         std::cout << name << ":\n" << render(t, *ds, format);
      } catch (const golap::Error& e) {
         print_error(e, line);
      }
   }
   return 0;
}

int cmd_serve(std::string dir, const std::string& host, int port) {
   if (dir.empty()) {
      if (const char* env = std::getenv("CONSTELLATION_DIR")) dir = env;
   }
   if (dir.empty()) {
      std::cerr << "serve: give a directory or set CONSTELLATION_DIR\n";
      return kUsage;
   }
   auto ds = load(dir);
   if (!ds) return kValidation;
   golap::Service service(std::make_shared<const golap::Dataset>(std::move(*ds)));
   std::cerr << "serving " << dir << " on http://" << host << ":" << port << "\n";
   if (!golap::serve_http(service, host, port)) {
      std::cerr << "serve: cannot listen on " << host << ":" << port << "\n";
      return kUsage;
   }
   return 0;
}

} // namespace

int main(int argc, char** argv) {
   CLI::App app{"golap: multidimensional tables over a constellation"};
   app.require_subcommand(1);

   std::string dir, expr, file, format = "text", host = "127.0.0.1";
   int port = 8080;

   auto* validate = app.add_subcommand("validate", "check a schema and its data files");
   validate->add_option("dir", dir, "constellation directory")->required();

   auto* query = app.add_subcommand("query", "evaluate an expression or a script and print the last table");
   query->add_option("dir", dir, "constellation directory")->required();
   auto* e_opt = query->add_option("-e,--expr", expr, "one statement");
   auto* f_opt = query->add_option("-f,--file", file, "script, one statement per line");
   e_opt->excludes(f_opt);
   query->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

   auto* repl = app.add_subcommand("repl", "read-eval-print loop; `name := EXPR` binds a table");
   repl->add_option("dir", dir, "constellation directory")->required();
   repl->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

   auto* serve = app.add_subcommand("serve", "run the HTTP service");
   serve->add_option("dir", dir, "constellation directory (default: $CONSTELLATION_DIR)");
   serve->add_option("--port", port, "TCP port");
   serve->add_option("--host", host, "bind address");

   try {
      app.parse(argc, argv);
   } catch (const CLI::ParseError& e) {
      int code = app.exit(e);
      return code == 0 ? 0 : kUsage;
   }

   if (*validate) return cmd_validate(dir);
   if (*query) {
      if (expr.empty() && file.empty()) {
         std::cerr << "query: one of -e or -f is required\n";
         return kUsage;
      }
      return cmd_query(dir, expr, file, format);
   }
   if (*repl) return cmd_repl(dir, format);
   if (*serve) return cmd_serve(dir, host, port);
   return kUsage;
}
