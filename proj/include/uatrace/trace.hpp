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

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uatrace/namespaces.hpp"
#include "uatrace/query.hpp"
#include "uatrace/rdf.hpp"
#include "uatrace/timestamp.hpp"
#include "uatrace/ts_store.hpp"

namespace uatrace {

struct MachineVariable {
  Iri node;
  std::string node_id;
  std::string browse_name;

  friend bool operator==(const MachineVariable&, const MachineVariable&) = default;
};

struct TraceEvent {
  Timestamp timestamp;
  std::string node_id;
  std::string browse_name;
  Value value;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// Time-ordered value changes scoped to one process (or, for a machine
/// trace, to a synthetic window label).
struct EventTrace {
  std::string label;
  std::optional<TimeWindow> window;
  std::vector<TraceEvent> events;

  friend bool operator==(const EventTrace&, const EventTrace&) = default;
};

/// Logged variables of `machine`: every node reachable over
/// `OpcUa:hasComponent*` from a node that is `owl:sameIndividualAs` the
/// machine, restricted to the logged type definitions. Sorted by node id.
/// Throws Error(MissingEntity) when no node is linked to the machine.
std::vector<MachineVariable> variables_of_machine(const TripleStore& store, const Namespaces& ns,
                                                  const Iri& machine);

// Label given to machine traces: `urn:uatrace:window:<start>/<end>`.
std::string window_label(TimeWindow window);

/// All changes of the machine's variables in [start, end], ascending by
/// time, ties by append order then node id. Error(InvalidRange) when
/// start > end.
EventTrace machine_trace(const TripleStore& store, const TsStore& ts, const Namespaces& ns,
                         const Iri& machine, Timestamp start, Timestamp end);

/// One trace per process realizing `procedure` on `unit`, ordered by start
/// time. Processes without events yield empty traces.
std::vector<EventTrace> traces_by_procedure(const TripleStore& store, const TsStore& ts,
                                            const Namespaces& ns, const Iri& unit,
                                            const Iri& procedure);

// As traces_by_procedure, selecting processes that output an `article` product.
std::vector<EventTrace> traces_by_product(const TripleStore& store, const TsStore& ts,
                                          const Namespaces& ns, const Iri& unit,
                                          const Iri& article);

/// Groups a Time/Value/NodeId/BrowseName/Process result table into one
/// trace per distinct Process value, in order of first appearance; rows keep
/// their table order. Windows are left empty. Throws Error(Contract) when a
/// column is missing.
std::vector<EventTrace> group_by_process(const query::ResultTable& table);

enum class TraceFormat { Csv, JsonLines };

/// CSV: `Time,Value,NodeId,BrowseName,Process`, one row per event.
/// JSON lines: one trace object per line.
std::string export_traces(const std::vector<EventTrace>& traces, TraceFormat format);

// Inverse of the JSON-lines export. Throws ParseError with the line number.
std::vector<EventTrace> parse_traces(std::string_view json_lines);

}  // namespace uatrace
