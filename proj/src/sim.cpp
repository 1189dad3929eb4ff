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

#include "uatrace/sim.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "uatrace/detail/text.hpp"
#include "uatrace/error.hpp"
#include "uatrace/nodeset.hpp"

namespace uatrace::sim {

using nlohmann::json;

std::int64_t Rng::uniform(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw Error(ErrorKind::Contract, "Rng::uniform: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  if (span == ~std::uint64_t{0}) return static_cast<std::int64_t>(next());
  const std::uint64_t n = span + 1;
  // Reject draws below 2^64 mod n so every residue is equally likely.
  const std::uint64_t threshold = (0 - n) % n;
  std::uint64_t draw;
  do {
    draw = next();
  } while (draw < threshold);
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + draw % n);
}

// ---------------------------------------------------------------------------
// Config

namespace {

[[noreturn]] void config_error(const std::string& msg) {
  throw ParseError(0, 0, "scenario config: " + msg);
}

const json& member(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) config_error(std::string("missing \"") + key + "\"");
  return *it;
}

template <typename T>
T get(const json& obj, const char* key) {
  try {
    return member(obj, key).get<T>();
  } catch (const json::exception&) {
    config_error(std::string("\"") + key + "\" has the wrong type");
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return get<T>(obj, key);
}

IntRange range_or(const json& obj, const char* key, IntRange fallback) {
  if (!obj.contains(key)) return fallback;
  const json& r = member(obj, key);
  if (!r.is_object()) config_error(std::string("\"") + key + "\" must be an object");
  return IntRange{get<std::int64_t>(r, "min"), get<std::int64_t>(r, "max")};
}

json range_json(IntRange r) { return json{{"min", r.min}, {"max", r.max}}; }

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(e.what());
  }
  if (!doc.is_object()) config_error("expected an object");

  ScenarioConfig config;
  config.seed = get<std::uint64_t>(doc, "seed");
  auto start = Timestamp::parse(get<std::string>(doc, "start"));
  if (!start) config_error("\"start\" is not an RFC 3339 timestamp");
  config.start = *start;

  for (const auto& m : member(doc, "machines")) {
    MachineConfig machine;
    machine.name = get<std::string>(m, "name");
    machine.node_id = get_or<std::string>(m, "node_id", "");
    for (const auto& v : get_or<json>(m, "variables", json::array())) {
      VariableConfig var;
      var.browse_name = get<std::string>(v, "browse_name");
      var.type_definition = get_or<std::string>(v, "type_definition", var.type_definition);
      auto kind = value_kind_from_string(get_or<std::string>(v, "value_kind", "boolean"));
      if (!kind) config_error("unknown value_kind for " + var.browse_name);
      var.value_kind = *kind;
      var.node_id = get_or<std::string>(v, "node_id", "");
      var.values = get_or<std::vector<std::string>>(v, "values", {});
      machine.variables.push_back(std::move(var));
    }
    for (const auto& p : get_or<json>(m, "procedures", json::array())) {
      ProcedureConfig proc;
      proc.name = get<std::string>(p, "name");
      auto level = process::procedure_level_from_string(get_or<std::string>(p, "level", "UnitProcedure"));
      if (!level) config_error("unknown procedure level for " + proc.name);
      proc.level = *level;
      machine.procedures.push_back(std::move(proc));
    }
    config.machines.push_back(std::move(machine));
  }

  if (doc.contains("processes")) {
    const json& p = member(doc, "processes");
    config.processes.count = get_or<std::size_t>(p, "count", 0);
    config.processes.duration_ms = range_or(p, "duration_ms", config.processes.duration_ms);
    config.processes.gap_ms = range_or(p, "gap_ms", config.processes.gap_ms);
    config.processes.articles = get_or<std::vector<std::string>>(p, "articles", {});
    config.processes.allow_overlap = get_or<bool>(p, "allow_overlap", false);
  }
  if (doc.contains("events")) {
    const json& e = member(doc, "events");
    if (e.contains("count")) config.events.count = get<std::size_t>(e, "count");
    config.events.interval_ms = range_or(e, "interval_ms", config.events.interval_ms);
  }
  validate(config);
  return config;
}

std::string write_config(const ScenarioConfig& config) {
  json machines = json::array();
  for (const auto& m : config.machines) {
    json vars = json::array();
    for (const auto& v : m.variables) {
      json var{{"browse_name", v.browse_name},
               {"type_definition", v.type_definition},
               {"value_kind", std::string(to_string(v.value_kind))}};
      if (!v.node_id.empty()) var["node_id"] = v.node_id;
      if (!v.values.empty()) var["values"] = v.values;
      vars.push_back(std::move(var));
    }
    json procs = json::array();
    for (const auto& p : m.procedures)
      procs.push_back({{"name", p.name}, {"level", std::string(process::to_string(p.level))}});
    json machine{{"name", m.name}, {"variables", vars}, {"procedures", procs}};
    if (!m.node_id.empty()) machine["node_id"] = m.node_id;
    machines.push_back(std::move(machine));
  }
  json events{{"interval_ms", range_json(config.events.interval_ms)}};
  if (config.events.count) events["count"] = *config.events.count;
  json doc{{"seed", config.seed},
           {"start", config.start.to_string()},
           {"machines", machines},
           {"processes",
            {{"count", config.processes.count},
             {"duration_ms", range_json(config.processes.duration_ms)},
             {"gap_ms", range_json(config.processes.gap_ms)},
             {"articles", config.processes.articles},
             {"allow_overlap", config.processes.allow_overlap}}},
           {"events", events}};
  return doc.dump(2) + "\n";
}

namespace {

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorKind::Invariant, "scenario config: " + msg);
}

void check_range(IntRange r, std::int64_t least, const char* what) {
  if (r.min < least) invalid(std::string(what) + " minimum must be at least " + std::to_string(least));
  if (r.min > r.max) invalid(std::string(what) + " minimum exceeds maximum");
}

std::string machine_node_id(const MachineConfig& m, std::size_t index) {
  if (!m.node_id.empty()) return m.node_id;
  return "ns=7;i=" + std::to_string(5000 + 1000 * index);
}

std::string folder_node_id(const MachineConfig& m, std::size_t index) {
  return machine_node_id(m, index) + "/Monitoring";
}

std::string variable_node_id(const VariableConfig& v, std::size_t machine, std::size_t var) {
  if (!v.node_id.empty()) return v.node_id;
  return "ns=7;i=" + std::to_string(5000 + 1000 * machine + 10 + var);
}

}  // namespace

void validate(const ScenarioConfig& config) {
  if (config.machines.empty()) invalid("at least one machine is required");
  std::set<std::string> names;
  std::set<std::string> ids;
  bool any_procedure = false;
  for (std::size_t i = 0; i < config.machines.size(); ++i) {
    const auto& m = config.machines[i];
    if (m.name.empty() || !Iri::is_valid("urn:x:" + m.name)) invalid("invalid machine name '" + m.name + "'");
    if (!names.insert(m.name).second) invalid("duplicate machine name '" + m.name + "'");
    for (const auto& id : {machine_node_id(m, i), folder_node_id(m, i)})
      if (!ids.insert(id).second) invalid("duplicate node id '" + id + "'");
    for (std::size_t k = 0; k < m.variables.size(); ++k) {
      const auto& v = m.variables[k];
      if (v.browse_name.empty()) invalid("variable without browse_name on " + m.name);
      if (v.type_definition.empty()) invalid("variable without type_definition on " + m.name);
      if (!ids.insert(variable_node_id(v, i, k)).second)
        invalid("duplicate node id '" + variable_node_id(v, i, k) + "'");
    }
    for (const auto& p : m.procedures) {
      if (p.name.empty() || !Iri::is_valid("urn:x:" + p.name)) invalid("invalid procedure name");
    }
    any_procedure = any_procedure || !m.procedures.empty();
  }
  check_range(config.events.interval_ms, 1, "events.interval_ms");
  if (config.processes.count > 0) {
    check_range(config.processes.duration_ms, 1, "processes.duration_ms");
    check_range(config.processes.gap_ms, 0, "processes.gap_ms");
    if (!any_procedure) invalid("processes requested but no machine has procedures");
    if (config.processes.articles.empty()) invalid("processes requested but no articles given");
    for (const auto& a : config.processes.articles)
      if (a.empty() || !Iri::is_valid("urn:x:" + a)) invalid("invalid article name '" + a + "'");
  }
}

// ---------------------------------------------------------------------------
// Generation

namespace {

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

struct VarState {
  std::size_t machine;
  std::string node_id;
  const VariableConfig* config;
  bool logged;
  bool flag = false;
  std::int64_t counter = 0;
  std::int64_t cents = 5000;
  std::size_t cursor = 0;
};

const std::vector<std::string>& string_values(const VariableConfig& v) {
  static const std::vector<std::string> fallback{"Idle", "Running", "Stopped"};
  return v.values.empty() ? fallback : v.values;
}

Value step(VarState& s, Rng& rng) {
  switch (s.config->value_kind) {
    case ValueKind::Boolean:
      s.flag = !s.flag;
      return s.flag;
    case ValueKind::Integer:
      s.counter += rng.uniform(-3, 3);
      return s.counter;
    case ValueKind::Double:
      s.cents = std::clamp<std::int64_t>(s.cents + rng.uniform(-500, 500), 0, 10'000);
      return static_cast<double>(s.cents) / 100.0;
    case ValueKind::String: {
      const auto& values = string_values(*s.config);
      s.cursor = (s.cursor + 1) % values.size();
      return values[s.cursor];
    }
  }
  return false;
}

}  // namespace

Scenario generate(const ScenarioConfig& config, const Namespaces& ns) {
  validate(config);
  Rng rng(config.seed);
  Scenario out;
  GroundTruth& truth = out.truth;
  truth.seed = config.seed;

  // Information model.
  std::string xml = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<Nodes>\n";
  std::string machines_folder = "  <MachinesFolder>\n";
  std::vector<VarState> states;
  for (std::size_t i = 0; i < config.machines.size(); ++i) {
    const auto& m = config.machines[i];
    const std::string machine_id = machine_node_id(m, i);
    const std::string folder_id = folder_node_id(m, i);
    GroundTruthMachine gm{ns.site_iri(m.name), machine_id, {}};

    xml += "  <Object NodeId=\"" + xml_escape(machine_id) + "\" BrowseName=\"" + xml_escape(m.name) +
           "\" TypeDefinition=\"MachineToolType\">\n";
    xml += "    <Reference Kind=\"HasComponent\" Target=\"" + xml_escape(folder_id) + "\"/>\n";
    xml += "  </Object>\n";
    xml += "  <Object NodeId=\"" + xml_escape(folder_id) + "\" BrowseName=\"Monitoring\">\n";
    for (std::size_t k = 0; k < m.variables.size(); ++k)
      xml += "    <Reference Kind=\"HasComponent\" Target=\"" +
             xml_escape(variable_node_id(m.variables[k], i, k)) + "\"/>\n";
    xml += "  </Object>\n";
    for (std::size_t k = 0; k < m.variables.size(); ++k) {
      const auto& v = m.variables[k];
      const std::string id = variable_node_id(v, i, k);
      xml += "  <Variable NodeId=\"" + xml_escape(id) + "\" BrowseName=\"" +
             xml_escape(v.browse_name) + "\" TypeDefinition=\"" + xml_escape(v.type_definition) +
             "\"/>\n";
      bool logged = nodeset::is_logged_type(v.type_definition);
      gm.variables.push_back(GroundTruthVariable{id, v.browse_name, v.type_definition, logged});
      states.push_back(VarState{i, id, &v, logged});
    }
    machines_folder += "    <Machine NodeId=\"" + xml_escape(machine_id) + "\" Identity=\"" +
                       xml_escape(gm.unit.str()) + "\" DisplayName=\"" + xml_escape(m.name) +
                       "\"/>\n";
    truth.machines.push_back(std::move(gm));
  }
  xml += machines_folder + "  </MachinesFolder>\n</Nodes>\n";
  out.nodeset_xml = std::move(xml);

  // Process ledger.
  process::Ledger ledger;
  std::vector<std::size_t> producers;
  for (std::size_t i = 0; i < config.machines.size(); ++i) {
    ledger.units.push_back(ns.site_iri(config.machines[i].name));
    if (!config.machines[i].procedures.empty()) producers.push_back(i);
  }
  std::set<std::string> declared;
  for (const auto& m : config.machines)
    for (const auto& p : m.procedures)
      if (declared.insert(p.name).second)
        ledger.procedures.push_back(process::ProcedureDecl{ns.site_iri(p.name), p.level});

  std::vector<Timestamp> cursor(config.machines.size(), config.start);
  std::vector<std::size_t> process_machine;
  Timestamp last_end = config.start;
  const auto& pc = config.processes;
  for (std::size_t k = 0; k < pc.count; ++k) {
    std::size_t m = producers[rng.index(producers.size())];
    const auto& machine = config.machines[m];
    const auto& proc = machine.procedures[rng.index(machine.procedures.size())];
    const auto& article = pc.articles[rng.index(pc.articles.size())];
    std::int64_t gap = rng.uniform(pc.gap_ms.min, pc.gap_ms.max);
    std::int64_t duration = rng.uniform(pc.duration_ms.min, pc.duration_ms.max);
    Timestamp start = cursor[m] + (gap + 1);
    Timestamp end = start + duration;
    cursor[m] = pc.allow_overlap ? start + rng.uniform(1, duration) : end;
    last_end = std::max(last_end, end);

    std::string n = std::to_string(k + 1);
    process::ProcessDescription desc{ns.site_iri("Process" + n), ns.site_iri(machine.name),
                                     ns.site_iri(proc.name), start, end,
                                     {{ns.site_iri("Product" + n), ns.site_iri(article)}},
                                     {}, {}};
    truth.processes.push_back(GroundTruthProcess{desc.process, desc.assigned_unit,
                                                 desc.realized_procedure, ns.site_iri(article),
                                                 TimeWindow{start, end}, {}});
    process_machine.push_back(m);
    ledger.processes.push_back(std::move(desc));
  }
  out.processes_jsonl = process::write_ledger(ledger);

  // Value-change log: one global stream with strictly increasing timestamps.
  std::vector<std::size_t> event_var;
  if (!states.empty()) {
    Timestamp t = config.start;
    const auto& iv = config.events.interval_ms;
    while (config.events.count ? truth.events.size() < *config.events.count : t <= last_end) {
      t = t + rng.uniform(iv.min, iv.max);
      std::size_t v = rng.index(states.size());
      truth.events.push_back(ValueChange{t, states[v].node_id, step(states[v], rng)});
      event_var.push_back(v);
    }
  }
  std::string log(kLogHeader);
  log += '\n';
  for (const auto& e : truth.events) {
    log += e.timestamp.to_string();
    log += ',';
    log += detail::csv_escape(e.node_id);
    log += ',';
    log += detail::csv_escape(format_value(e.value));
    log += ',';
    log += to_string(kind_of(e.value));
    log += '\n';
  }
  out.log_csv = std::move(log);

  for (std::size_t p = 0; p < truth.processes.size(); ++p) {
    auto& gp = truth.processes[p];
    for (std::size_t e = 0; e < truth.events.size(); ++e) {
      const VarState& s = states[event_var[e]];
      if (s.logged && s.machine == process_machine[p] && gp.window.contains(truth.events[e].timestamp))
        gp.events.push_back(e);
    }
  }
  out.ground_truth_json = write_ground_truth(truth);
  return out;
}

// ---------------------------------------------------------------------------
// Ground truth file

std::string write_ground_truth(const GroundTruth& truth) {
  json machines = json::array();
  for (const auto& m : truth.machines) {
    json vars = json::array();
    for (const auto& v : m.variables)
      vars.push_back({{"node_id", v.node_id},
                      {"browse_name", v.browse_name},
                      {"type_definition", v.type_definition},
                      {"logged", v.logged}});
    machines.push_back({{"unit", m.unit.str()}, {"machine_node", m.machine_node}, {"variables", vars}});
  }
  json processes = json::array();
  for (const auto& p : truth.processes)
    processes.push_back({{"process", p.process.str()},
                         {"unit", p.unit.str()},
                         {"procedure", p.procedure.str()},
                         {"article", p.article.str()},
                         {"start", p.window.start.to_string()},
                         {"end", p.window.end.to_string()},
                         {"events", p.events}});
  json doc{{"seed", truth.seed},
           {"event_count", truth.events.size()},
           {"machines", machines},
           {"processes", processes}};
  return doc.dump(1) + "\n";
}

GroundTruth parse_ground_truth(std::string_view text) {
  try {
    json doc = json::parse(text);
    GroundTruth truth;
    truth.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& m : doc.at("machines")) {
      GroundTruthMachine gm{Iri(m.at("unit").get<std::string>()),
                            m.at("machine_node").get<std::string>(), {}};
      for (const auto& v : m.at("variables"))
        gm.variables.push_back(GroundTruthVariable{
            v.at("node_id").get<std::string>(), v.at("browse_name").get<std::string>(),
            v.at("type_definition").get<std::string>(), v.at("logged").get<bool>()});
      truth.machines.push_back(std::move(gm));
    }
    for (const auto& p : doc.at("processes"))
      truth.processes.push_back(GroundTruthProcess{
          Iri(p.at("process").get<std::string>()), Iri(p.at("unit").get<std::string>()),
          Iri(p.at("procedure").get<std::string>()), Iri(p.at("article").get<std::string>()),
          TimeWindow{Timestamp::parse_or_throw(p.at("start").get<std::string>()),
                     Timestamp::parse_or_throw(p.at("end").get<std::string>())},
          p.at("events").get<std::vector<std::size_t>>()});
    return truth;
  } catch (const json::exception& e) {
    throw ParseError(0, 0, std::string("ground truth: ") + e.what());
  }
}

void write_scenario(const Scenario& scenario, const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + directory.string() + ": " + ec.message());
  auto put = [&](std::string_view name, const std::string& content) {
    auto path = directory / std::string(name);
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    file.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!file) throw Error(ErrorKind::Io, "cannot write " + path.string());
  };
  put(kNodesetFile, scenario.nodeset_xml);
  put(kProcessesFile, scenario.processes_jsonl);
  put(kLogFile, scenario.log_csv);
  put(kGroundTruthFile, scenario.ground_truth_json);
}

}  // namespace uatrace::sim
