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

#include "uatrace/trace.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "uatrace/detail/text.hpp"
#include "uatrace/error.hpp"
#include "uatrace/nodeset.hpp"
#include "uatrace/process_kg.hpp"

namespace uatrace {

namespace {

std::optional<std::string> string_property(const TripleStore& store, const Iri& node,
                                           const Iri& predicate) {
  std::optional<std::string> out;
  store.visit(node, predicate, std::nullopt, [&](const Iri&, const Iri&, const Term& o) {
    if (!out && o.is_literal()) out = o.literal().lexical();
  });
  return out;
}

struct Pending {
  TraceEvent event;
  std::uint64_t sequence;
};

std::vector<TraceEvent> collect(const TsStore& ts, const std::vector<MachineVariable>& vars,
                                TimeWindow window) {
  std::vector<Pending> pending;
  for (const auto& v : vars) {
    for (auto& logged : ts.range_query_logged(v.node_id, window.start, window.end)) {
      pending.push_back({TraceEvent{logged.change.timestamp, v.node_id, v.browse_name,
                                    std::move(logged.change.value)},
                         logged.sequence});
    }
  }
  std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    return std::tie(a.event.timestamp, a.sequence, a.event.node_id) <
           std::tie(b.event.timestamp, b.sequence, b.event.node_id);
  });
  std::vector<TraceEvent> out;
  out.reserve(pending.size());
  for (auto& p : pending) out.push_back(std::move(p.event));
  return out;
}

std::vector<EventTrace> process_traces(const TripleStore& store, const TsStore& ts,
                                       const Namespaces& ns, const Iri& unit,
                                       const process::ProcessFilter& filter) {
  auto processes = process::list_processes(store, ns, filter);
  if (processes.empty()) return {};
  auto vars = variables_of_machine(store, ns, unit);
  std::vector<EventTrace> out;
  for (const auto& p : processes) {
    TimeWindow window = process::read_window(store, ns, p);
    out.push_back(EventTrace{p.str(), window, collect(ts, vars, window)});
  }
  return out;
}

const Literal& literal_cell(const Term& t, const char* column) {
  if (!t.is_literal())
    throw Error(ErrorKind::Type, std::string("column ") + column + " holds an IRI");
  return t.literal();
}

nlohmann::json value_json(const Value& v) {
  return std::visit([](const auto& x) { return nlohmann::json(x); }, v);
}

}  // namespace

std::vector<MachineVariable> variables_of_machine(const TripleStore& store, const Namespaces& ns,
                                                  const Iri& machine) {
  const Iri has_component = ns.ua_iri("hasComponent");
  const Iri node_id_p = ns.ua_iri("nodeId");
  const Iri browse_name_p = ns.ua_iri("browseName");
  const Iri type_definition_p = ns.ua_iri("typeDefinition");

  std::set<Iri> visited;
  std::deque<Iri> queue;
  store.visit(std::nullopt, ns.same_individual_as(), Term(machine),
              [&](const Iri& s, const Iri&, const Term&) {
                if (visited.insert(s).second) queue.push_back(s);
              });
  if (visited.empty())
    throw Error(ErrorKind::MissingEntity,
                "machine <" + machine.str() + "> is not linked to any information-model node");
  while (!queue.empty()) {
    Iri current = std::move(queue.front());
    queue.pop_front();
    store.visit(current, has_component, std::nullopt, [&](const Iri&, const Iri&, const Term& o) {
      if (o.is_iri() && visited.insert(o.iri()).second) queue.push_back(o.iri());
    });
  }

  std::vector<MachineVariable> out;
  for (const auto& node : visited) {
    auto type = string_property(store, node, type_definition_p);
    if (!type || !nodeset::is_logged_type(*type)) continue;
    auto id = string_property(store, node, node_id_p);
    auto name = string_property(store, node, browse_name_p);
    if (!id || !name) continue;
    out.push_back(MachineVariable{node, *id, *name});
  }
  std::sort(out.begin(), out.end(), [](const MachineVariable& a, const MachineVariable& b) {
    return std::tie(a.node_id, a.node) < std::tie(b.node_id, b.node);
  });
  return out;
}

std::string window_label(TimeWindow window) {
  return "urn:uatrace:window:" + window.start.to_string() + "/" + window.end.to_string();
}

EventTrace machine_trace(const TripleStore& store, const TsStore& ts, const Namespaces& ns,
                         const Iri& machine, Timestamp start, Timestamp end) {
  if (start > end)
    throw Error(ErrorKind::InvalidRange,
                "start " + start.to_string() + " is after end " + end.to_string());
  TimeWindow window{start, end};
  auto vars = variables_of_machine(store, ns, machine);
  return EventTrace{window_label(window), window, collect(ts, vars, window)};
}

std::vector<EventTrace> traces_by_procedure(const TripleStore& store, const TsStore& ts,
                                            const Namespaces& ns, const Iri& unit,
                                            const Iri& procedure) {
  return process_traces(store, ts, ns, unit, process::ProcessFilter{unit, procedure, std::nullopt});
}

std::vector<EventTrace> traces_by_product(const TripleStore& store, const TsStore& ts,
                                          const Namespaces& ns, const Iri& unit,
                                          const Iri& article) {
  return process_traces(store, ts, ns, unit, process::ProcessFilter{unit, std::nullopt, article});
}

std::vector<EventTrace> group_by_process(const query::ResultTable& table) {
  auto column = [&](std::string_view name) {
    auto it = std::find(table.columns.begin(), table.columns.end(), name);
    if (it == table.columns.end())
      throw Error(ErrorKind::Contract, "result table has no " + std::string(name) + " column");
    return static_cast<std::size_t>(it - table.columns.begin());
  };
  const std::size_t time = column("Time"), value = column("Value"), node_id = column("NodeId"),
                    browse_name = column("BrowseName"), process = column("Process");

  std::vector<EventTrace> out;
  std::map<std::string, std::size_t> index;
  for (const auto& row : table.rows) {
    const Term& p = row[process];
    std::string label = p.is_iri() ? p.iri().str() : p.literal().lexical();
    auto [it, fresh] = index.try_emplace(label, out.size());
    if (fresh) out.push_back(EventTrace{label, std::nullopt, {}});
    out[it->second].events.push_back(
        TraceEvent{literal_cell(row[time], "Time").as_timestamp(),
                   literal_cell(row[node_id], "NodeId").lexical(),
                   literal_cell(row[browse_name], "BrowseName").lexical(),
                   from_literal(literal_cell(row[value], "Value"))});
  }
  return out;
}

std::string export_traces(const std::vector<EventTrace>& traces, TraceFormat format) {
  std::string out;
  if (format == TraceFormat::Csv) {
    out = "Time,Value,NodeId,BrowseName,Process\n";
    for (const auto& trace : traces) {
      std::string label = detail::csv_escape(trace.label);
      for (const auto& e : trace.events) {
        out += e.timestamp.to_string();
        out += ',';
        out += detail::csv_escape(format_value(e.value));
        out += ',';
        out += detail::csv_escape(e.node_id);
        out += ',';
        out += detail::csv_escape(e.browse_name);
        out += ',';
        out += label;
        out += '\n';
      }
    }
    return out;
  }
  for (const auto& trace : traces) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : trace.events)
      events.push_back({{"time", e.timestamp.to_string()},
                        {"node_id", e.node_id},
                        {"browse_name", e.browse_name},
                        {"value", value_json(e.value)}});
    nlohmann::json obj{{"process", trace.label},
                       {"start", nullptr},
                       {"end", nullptr},
                       {"events", std::move(events)}};
    if (trace.window) {
      obj["start"] = trace.window->start.to_string();
      obj["end"] = trace.window->end.to_string();
    }
    out += obj.dump() + "\n";
  }
  return out;
}

std::vector<EventTrace> parse_traces(std::string_view json_lines) {
  std::vector<EventTrace> out;
  std::size_t line_no = 0, pos = 0;
  while (pos < json_lines.size()) {
    auto end = json_lines.find('\n', pos);
    if (end == std::string_view::npos) end = json_lines.size();
    std::string_view line = json_lines.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      auto obj = nlohmann::json::parse(line);
      EventTrace trace;
      trace.label = obj.at("process").get<std::string>();
      if (!obj.at("start").is_null() || !obj.at("end").is_null())
        trace.window = TimeWindow{Timestamp::parse_or_throw(obj.at("start").get<std::string>()),
                                  Timestamp::parse_or_throw(obj.at("end").get<std::string>())};
      for (const auto& e : obj.at("events")) {
        const auto& v = e.at("value");
        Value value;
        if (v.is_boolean()) value = v.get<bool>();
        else if (v.is_number_integer()) value = v.get<std::int64_t>();
        else if (v.is_number_float()) value = v.get<double>();
        else if (v.is_string()) value = v.get<std::string>();
        else throw ParseError(line_no, 0, "unsupported event value");
        trace.events.push_back(TraceEvent{Timestamp::parse_or_throw(e.at("time").get<std::string>()),
                                          e.at("node_id").get<std::string>(),
                                          e.at("browse_name").get<std::string>(),
                                          std::move(value)});
      }
      out.push_back(std::move(trace));
    } catch (const ParseError& err) {
      if (err.line() != 0) throw;
      throw ParseError(line_no, 0, err.what());
    } catch (const nlohmann::json::exception& err) {
      throw ParseError(line_no, 0, err.what());
    }
  }
  return out;
}

}  // namespace uatrace
