/*
 * Copyright 2026 The uatrace Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// uatrace command-line front end.

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "uatrace/error.hpp"
#include "uatrace/hist_values.hpp"
#include "uatrace/namespaces.hpp"
#include "uatrace/nodeset.hpp"
#include "uatrace/process_kg.hpp"
#include "uatrace/query.hpp"
#include "uatrace/rdf.hpp"
#include "uatrace/sim.hpp"
#include "uatrace/trace.hpp"
#include "uatrace/ts_store.hpp"
#include "uatrace/vocab.hpp"

namespace fs = std::filesystem;
using namespace uatrace;

namespace {

std::string read_text(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot replace " + path.string() + ": " + ec.message());
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorKind::Io, "cannot write " + out_path);
}

// Workspace layout: config (namespaces), store.lt (triples), ts/ (segments),
// lock (flock target).
class Workspace {
 public:
  enum class Access { Shared, Exclusive };

  explicit Workspace(fs::path root) : root_(std::move(root)) {}
  ~Workspace() {
    if (lock_fd_ >= 0) ::close(lock_fd_);
  }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  const fs::path& root() const { return root_; }
  bool initialized() const { return fs::exists(root_ / "config"); }

  void create() {
    std::error_code ec;
    fs::create_directories(root_ / "ts", ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + root_.string() + ": " + ec.message());
  }

  void lock(Access access) {
    lock_fd_ = ::open((root_ / "lock").c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (lock_fd_ < 0) throw Error(ErrorKind::Io, "cannot open lock file in " + root_.string());
    if (::flock(lock_fd_, (access == Access::Exclusive ? LOCK_EX : LOCK_SH) | LOCK_NB) != 0)
      throw Error(ErrorKind::Io, "workspace " + root_.string() + " is locked by another command");
  }

  // Opens an initialized workspace.
  void open(Access access) {
    if (!initialized())
      throw Error(ErrorKind::MissingEntity,
                  "workspace " + root_.string() + " is not initialized (run `uatrace init`)");
    lock(access);
    ns_ = Namespaces::from_config(read_text((root_ / "config").string()));
    store_ = TripleStore{};
    store_.prefixes().merge(ns_.prefix_map());
    if (fs::exists(root_ / "store.lt")) load_line_triples(store_, read_text((root_ / "store.lt").string()));
  }

  TsStore& ts() {
    if (!ts_) ts_ = TsStore::open(root_ / "ts");
    return *ts_;
  }

  void save_config() { write_text(root_ / "config", ns_.to_config()); }
  void save_store() { write_text(root_ / "store.lt", export_line_triples(store_)); }

  Namespaces& ns() { return ns_; }
  TripleStore& store() { return store_; }
  const TripleStore& store() const { return store_; }

 private:
  fs::path root_;
  int lock_fd_ = -1;
  Namespaces ns_;
  TripleStore store_;
  std::optional<TsStore> ts_;
};

fs::path workspace_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("UATRACE_WORKSPACE"); env && *env) return env;
  return ".uatrace";
}

Iri resolve_iri(const Workspace& ws, const std::string& text) {
  auto colon = text.find(':');
  if (colon != std::string::npos && ws.store().prefixes().namespace_of(text.substr(0, colon))) {
    if (auto iri = ws.store().prefixes().expand(text)) return *iri;
  }
  if (!Iri::is_valid(text)) throw ParseError(0, 0, "invalid IRI '" + text + "'");
  return Iri(text);
}

Timestamp resolve_time(const std::string& text, const char* what) {
  auto ts = Timestamp::parse(text);
  if (!ts) throw ParseError(0, 0, std::string(what) + ": invalid timestamp '" + text + "'");
  return *ts;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return 2;
    case ErrorKind::MissingEntity: return 3;
    case ErrorKind::InvalidRange: return 4;
    case ErrorKind::Io: return 5;
    default: return 1;
  }
}

// Loads ledger records; processes already asserted with the same window are
// skipped so the command can be re-run.
std::pair<std::size_t, std::size_t> load_processes(Workspace& ws, const process::Ledger& ledger) {
  TripleStore& store = ws.store();
  const Namespaces& ns = ws.ns();
  for (const auto& u : ledger.units) process::declare_unit(store, ns, u);
  for (const auto& p : ledger.procedures) process::declare_procedure(store, ns, p.iri, p.level);
  std::size_t added = 0, skipped = 0;
  for (const auto& d : ledger.processes) {
    if (store.contains(Triple{d.process, ns.type(), Term(ns.vdi_iri("Process"))}) &&
        process::read_window(store, ns, d.process) == TimeWindow{d.start_time, d.end_time} &&
        store.contains(Triple{d.assigned_unit, ns.vdi_iri("isAssignedTo"), Term(d.process)})) {
      ++skipped;
      continue;
    }
    process::assert_process(store, ns, d);
    ++added;
  }
  return {added, skipped};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Process-scoped event traces from OPC UA information models and value logs"};
  app.require_subcommand(1);
  std::string workspace_flag;
  app.add_option("-w,--workspace", workspace_flag,
                 "Workspace directory (default: $UATRACE_WORKSPACE or ./.uatrace)");

  auto* init = app.add_subcommand("init", "Create a workspace and install the vocabularies");
  std::string init_config;
  init->add_option("--config", init_config, "Namespace overrides (key = value lines)");

  auto* ingest_nodeset = app.add_subcommand("ingest-nodeset", "Add an information model");
  std::string nodeset_file;
  ingest_nodeset->add_option("file", nodeset_file, "NodeSet XML file or -")->required();

  auto* load_proc = app.add_subcommand("load-processes", "Assert executed processes");
  std::string ledger_file;
  load_proc->add_option("file", ledger_file, "Process ledger (JSON lines) or -")->required();

  auto* ingest_log = app.add_subcommand("ingest-log", "Append logged value changes");
  std::string log_file;
  ingest_log->add_option("file", log_file, "Value-change CSV or -")->required();

  auto* simulate = app.add_subcommand("simulate", "Generate a scenario");
  std::optional<std::uint64_t> sim_seed;
  std::string sim_config, sim_out;
  simulate->add_option("--seed", sim_seed, "Overrides the config seed");
  simulate->add_option("--config", sim_config, "Scenario JSON")->required();
  simulate->add_option("--out", sim_out, "Output directory")->required();

  auto* query = app.add_subcommand("query", "Evaluate a query");
  std::string query_file, query_format = "csv";
  query->add_option("file", query_file, "Query file or -")->required();
  query->add_option("--format", query_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* trace = app.add_subcommand("trace", "Extract event traces");
  trace->require_subcommand(1);
  std::string trace_format = "csv", trace_out;
  trace->add_option("--format", trace_format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  trace->add_option("--out", trace_out, "Output file (default stdout)");
  std::string t_machine, t_start, t_end, t_unit, t_procedure, t_article;
  auto* t_mach = trace->add_subcommand("machine", "All variable changes of a machine in a window");
  t_mach->add_option("--machine", t_machine, "Unit IRI or CURIE")->required();
  t_mach->add_option("--start", t_start, "Window start (RFC 3339)")->required();
  t_mach->add_option("--end", t_end, "Window end (RFC 3339)")->required();
  auto* t_proc = trace->add_subcommand("procedure", "One trace per process of a procedure");
  t_proc->add_option("--unit", t_unit, "Unit IRI or CURIE")->required();
  t_proc->add_option("--procedure", t_procedure, "Procedure IRI or CURIE")->required();
  auto* t_prod = trace->add_subcommand("product", "One trace per process producing an article");
  t_prod->add_option("--unit", t_unit, "Unit IRI or CURIE")->required();
  t_prod->add_option("--article", t_article, "Article IRI or CURIE")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    Workspace ws(workspace_root(workspace_flag));

    if (*init) {
      ws.create();
      ws.lock(Workspace::Access::Exclusive);
      if (!init_config.empty()) {
        ws.ns() = Namespaces::from_config(read_text(init_config));
      } else if (ws.initialized()) {
        ws.ns() = Namespaces::from_config(read_text((ws.root() / "config").string()));
      }
      if (fs::exists(ws.root() / "store.lt"))
        load_line_triples(ws.store(), read_text((ws.root() / "store.lt").string()));
      vocab::install(ws.store(), ws.ns());
      vocab::materialize_alignment(ws.store(), ws.ns());
      ws.save_config();
      ws.save_store();
      ws.ts().flush();
      std::cout << "initialized " << ws.root().string() << ": " << ws.store().size()
                << " triples\n";
    } else if (*ingest_nodeset) {
      ws.open(Workspace::Access::Exclusive);
      auto parsed = nodeset::parse_nodeset(read_text(nodeset_file), ws.store().prefixes());
      std::size_t added = 0;
      for (const auto& t : nodeset::to_triples(parsed, ws.ns())) added += ws.store().insert(t);
      auto stats = vocab::materialize_alignment(ws.store(), ws.ns());
      ws.save_store();
      std::cout << "nodes: " << parsed.nodes.size() << "\nmachines: " << parsed.machines.size()
                << "\ntriples added: " << added + stats.added << "\n";
    } else if (*load_proc) {
      ws.open(Workspace::Access::Exclusive);
      auto ledger = process::parse_ledger(read_text(ledger_file), ws.store().prefixes());
      auto [added, skipped] = load_processes(ws, ledger);
      vocab::materialize_alignment(ws.store(), ws.ns());
      ws.save_store();
      std::cout << "processes: " << added << "\nalready present: " << skipped << "\n";
    } else if (*ingest_log) {
      ws.open(Workspace::Access::Exclusive);
      auto report = ws.ts().ingest_log(read_text(log_file));
      ws.ts().flush();
      std::cout << "accepted: " << report.accepted << "\nrejected: " << report.errors.size()
                << "\n";
      for (const auto& err : report.errors)
        std::cerr << "line " << err.line << ": " << err.message << "\n";
    } else if (*simulate) {
      auto config = sim::parse_config(read_text(sim_config));
      if (sim_seed) config.seed = *sim_seed;
      auto scenario = sim::generate(config);
      sim::write_scenario(scenario, sim_out);
      std::cout << "machines: " << scenario.truth.machines.size()
                << "\nprocesses: " << scenario.truth.processes.size()
                << "\nevents: " << scenario.truth.events.size() << "\n";
    } else if (*query) {
      ws.open(Workspace::Access::Shared);
      auto ast = query::parse_query(read_text(query_file), ws.store().prefixes());
      auto registry = default_registry(ws.ts(), ws.ns());
      auto table = query::evaluate(ws.store(), ast, registry);
      std::cout << (query_format == "json" ? table.to_json() : table.to_csv());
    } else if (*trace) {
      ws.open(Workspace::Access::Shared);
      std::vector<EventTrace> traces;
      if (*t_mach) {
        traces.push_back(machine_trace(ws.store(), ws.ts(), ws.ns(), resolve_iri(ws, t_machine),
                                       resolve_time(t_start, "--start"),
                                       resolve_time(t_end, "--end")));
      } else if (*t_proc) {
        traces = traces_by_procedure(ws.store(), ws.ts(), ws.ns(), resolve_iri(ws, t_unit),
                                     resolve_iri(ws, t_procedure));
      } else {
        traces = traces_by_product(ws.store(), ws.ts(), ws.ns(), resolve_iri(ws, t_unit),
                                   resolve_iri(ws, t_article));
      }
      emit(export_traces(traces, trace_format == "jsonl" ? TraceFormat::JsonLines : TraceFormat::Csv),
           trace_out);
    }
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
