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

#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "test_util.hpp"
#include "uatrace/trace.hpp"

using namespace uatrace;

namespace {

// Sample model plus four processes shaped like the CQ2 answer table:
// Process1 and Process4 realize UnitProcedure1, Process1 and Process3
// output Article1.
struct Table5 {
  Namespaces ns;
  TripleStore store;
  TsStore ts;

  Table5() {
    vocab::install(store, ns);
    auto nodes = nodeset::parse_nodeset(testutil::read_data("fixtures/sample_nodeset.xml"), store.prefixes());
    for (const auto& t : nodeset::to_triples(nodes, ns)) store.insert(t);
    process::load_ledger(store, ns,
                         process::parse_ledger(testutil::read_data("fixtures/table5_processes.jsonl"),
                                               store.prefixes()));
    vocab::materialize_alignment(store, ns);
    auto report = ts.ingest_log(testutil::read_data("fixtures/table5_log.csv"));
    EXPECT_TRUE(report.errors.empty());
  }

  Iri site(const std::string& local) const { return ns.site_iri(local); }
};

Timestamp at(const std::string& text) { return Timestamp::parse_or_throw(text); }

std::vector<std::string> node_ids(const EventTrace& t) {
  std::vector<std::string> out;
  for (const auto& e : t.events) out.push_back(e.node_id);
  return out;
}

}  // namespace

TEST(Trace, VariablesOfMachineFollowsHasComponentAndTypes) {
  Table5 f;
  auto vars = variables_of_machine(f.store, f.ns, f.site("FullMachineTool"));
  std::vector<std::string> ids, names;
  for (const auto& v : vars) {
    ids.push_back(v.node_id);
    names.push_back(v.browse_name);
  }
  EXPECT_EQ(ids, (std::vector<std::string>{"ns=7;i=56510", "ns=7;i=56519", "ns=7;i=56600"}));
  EXPECT_EQ(names, (std::vector<std::string>{"IsRotating", "Locked", "UtilityName"}));
  EXPECT_ERROR_KIND(variables_of_machine(f.store, f.ns, f.site("Nowhere")), ErrorKind::MissingEntity);
}

TEST(Trace, MachineWithoutVariablesYieldsEmptyList) {
  Namespaces ns;
  TripleStore store;
  auto nodes = nodeset::parse_nodeset(
      "<Nodes><Object NodeId=\"ns=1;i=1\" BrowseName=\"Empty\"/>"
      "<MachinesFolder><Machine NodeId=\"ns=1;i=1\" Identity=\"OpcSS:Empty\"/></MachinesFolder></Nodes>",
      ns.prefix_map());
  for (const auto& t : nodeset::to_triples(nodes, ns)) store.insert(t);
  EXPECT_TRUE(variables_of_machine(store, ns, ns.site_iri("Empty")).empty());
}

TEST(Trace, MachineTraceWindowShape) {
  Table5 f;
  auto t = machine_trace(f.store, f.ts, f.ns, f.site("FullMachineTool"), at("2022-02-28T09:00:00Z"),
                         at("2022-02-28T09:10:00Z"));
  EXPECT_EQ(t.label, "urn:uatrace:window:2022-02-28T09:00:00Z/2022-02-28T09:10:00Z");
  ASSERT_TRUE(t.window);
  ASSERT_EQ(t.events.size(), 4u);
  EXPECT_EQ(t.events[0], (TraceEvent{at("2022-02-28T09:00:54Z"), "ns=7;i=56510", "IsRotating", Value(true)}));
  EXPECT_EQ(t.events[1], (TraceEvent{at("2022-02-28T09:01:26Z"), "ns=7;i=56519", "Locked", Value(true)}));
  EXPECT_EQ(t.events[2].value, Value(false));
  EXPECT_EQ(t.events[3], (TraceEvent{at("2022-02-28T09:02:50Z"), "ns=7;i=56600", "UtilityName",
                                     Value(std::string("H²"))}));
}

TEST(Trace, MachineTraceZeroWidthAndInvalidRange) {
  Table5 f;
  Timestamp ts = at("2022-02-28T09:01:26Z");
  auto t = machine_trace(f.store, f.ts, f.ns, f.site("FullMachineTool"), ts, ts);
  EXPECT_EQ(node_ids(t), std::vector<std::string>{"ns=7;i=56519"});
  EXPECT_ERROR_KIND(machine_trace(f.store, f.ts, f.ns, f.site("FullMachineTool"), ts, Timestamp(ts.millis() - 1)),
                    ErrorKind::InvalidRange);
}

TEST(Trace, MachineTraceTiesFollowAppendOrder) {
  Table5 f;
  Timestamp ts = at("2022-02-28T11:00:00Z");
  f.ts.append({ts, "ns=7;i=56600", Value(std::string("Air"))});
  f.ts.append({ts, "ns=7;i=56510", Value(true)});
  f.ts.append({ts, "ns=7;i=56519", Value(false)});
  auto t = machine_trace(f.store, f.ts, f.ns, f.site("FullMachineTool"), ts, ts);
  EXPECT_EQ(node_ids(t), (std::vector<std::string>{"ns=7;i=56600", "ns=7;i=56510", "ns=7;i=56519"}));
}

TEST(Trace, ProcedureTracesMatchTableShape) {
  Table5 f;
  auto traces = traces_by_procedure(f.store, f.ts, f.ns, f.site("FullMachineTool"), f.site("UnitProcedure1"));
  ASSERT_EQ(traces.size(), 2u);
  EXPECT_EQ(traces[0].label, f.site("Process1").str());
  EXPECT_EQ(traces[1].label, f.site("Process4").str());
  EXPECT_EQ(traces[0].events.size(), 4u);
  EXPECT_EQ(node_ids(traces[1]), (std::vector<std::string>{"ns=7;i=56510", "ns=7;i=56519", "ns=7;i=56600"}));
  for (const auto& t : traces) {
    ASSERT_TRUE(t.window);
    for (const auto& e : t.events) EXPECT_TRUE(t.window->contains(e.timestamp));
  }
  EXPECT_TRUE(traces_by_procedure(f.store, f.ts, f.ns, f.site("FullMachineTool"), f.site("Phase9")).empty());
}

TEST(Trace, ProductTracesSelectByArticle) {
  Table5 f;
  auto traces = traces_by_product(f.store, f.ts, f.ns, f.site("FullMachineTool"), f.site("Article1"));
  ASSERT_EQ(traces.size(), 2u);
  EXPECT_EQ(traces[0].label, f.site("Process1").str());
  EXPECT_EQ(traces[1].label, f.site("Process3").str());
  EXPECT_EQ(node_ids(traces[1]), std::vector<std::string>{"ns=7;i=56519"});
  EXPECT_TRUE(traces_by_product(f.store, f.ts, f.ns, f.site("FullMachineTool"), f.site("Article9")).empty());
}

TEST(Trace, ProcessScopedTracesAreInsideMachineTrace) {
  Table5 f;
  auto machine = machine_trace(f.store, f.ts, f.ns, f.site("FullMachineTool"), Timestamp::min(), Timestamp::max());
  for (const char* proc : {"UnitProcedure1", "UnitProcedure2", "Operation1"})
    for (const auto& t : traces_by_procedure(f.store, f.ts, f.ns, f.site("FullMachineTool"), f.site(proc)))
      for (const auto& e : t.events)
        EXPECT_NE(std::find(machine.events.begin(), machine.events.end(), e), machine.events.end());
}

TEST(Trace, ListingTwoGroupsIntoTheSameTraces) {
  Table5 f;
  auto table = query::evaluate(f.store, query::parse_query(testutil::read_data("queries/listing2.rq")),
                               default_registry(f.ts, f.ns));
  ASSERT_EQ(table.columns, (std::vector<std::string>{"Time", "Value", "NodeId", "BrowseName", "Process"}));
  auto grouped = group_by_process(table);
  auto api = traces_by_procedure(f.store, f.ts, f.ns, f.site("FullMachineTool"), f.site("UnitProcedure1"));
  ASSERT_EQ(grouped.size(), api.size());
  for (std::size_t i = 0; i < api.size(); ++i) {
    EXPECT_EQ(grouped[i].label, api[i].label);
    EXPECT_FALSE(grouped[i].window);
    EXPECT_EQ(grouped[i].events, api[i].events);
  }
  query::ResultTable missing{{"Time", "Value"}, {}};
  EXPECT_ERROR_KIND(group_by_process(missing), ErrorKind::Contract);
}

TEST(Trace, CsvExportHasProcessColumn) {
  Table5 f;
  EXPECT_EQ(export_traces({}, TraceFormat::Csv), "Time,Value,NodeId,BrowseName,Process\n");
  auto traces = traces_by_procedure(f.store, f.ts, f.ns, f.site("FullMachineTool"), f.site("UnitProcedure1"));
  std::string csv = export_traces(traces, TraceFormat::Csv);
  EXPECT_EQ(csv.substr(0, csv.find('\n', csv.find('\n') + 1) + 1),
            "Time,Value,NodeId,BrowseName,Process\n"
            "2022-02-28T09:00:54Z,true,ns=7;i=56510,IsRotating,http://example.org/umati/sample-server#Process1\n");
  EXPECT_NE(csv.find("2022-02-28T10:03:36Z,true,ns=7;i=56510,IsRotating,http://example.org/umati/sample-server#Process4\n"),
            std::string::npos);
  EXPECT_EQ(export_traces(traces, TraceFormat::Csv), csv);
}

TEST(Trace, JsonLinesRoundTrip) {
  Table5 f;
  auto traces = traces_by_procedure(f.store, f.ts, f.ns, f.site("FullMachineTool"), f.site("UnitProcedure1"));
  traces.push_back(machine_trace(f.store, f.ts, f.ns, f.site("FullMachineTool"), at("2022-02-28T09:00:00Z"),
                                 at("2022-02-28T09:10:00Z")));
  traces.push_back(EventTrace{"grouped", std::nullopt,
                              {TraceEvent{Timestamp(1), "n", "N", Value(2.5)},
                               TraceEvent{Timestamp(2), "n", "N", Value(std::int64_t{-4})}}});
  std::string text = export_traces(traces, TraceFormat::JsonLines);
  EXPECT_EQ(parse_traces(text), traces);
  EXPECT_EQ(export_traces(parse_traces(text), TraceFormat::JsonLines), text);
  EXPECT_TRUE(parse_traces("").empty());
  try {
    parse_traces("{\"process\":\"x\",\"start\":null,\"end\":null,\"events\":[]}\n{oops\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Trace, MachineTraceMatchesScanOracle) {
  auto config = testutil::default_config();
  testutil::Loaded l(config);
  const auto& machine = l.scenario.truth.machines[0];
  std::set<std::string> logged;
  for (const auto& v : machine.variables)
    if (v.logged) logged.insert(v.node_id);
  std::mt19937_64 rng(3);
  const auto& events = l.scenario.truth.events;
  for (int q = 0; q < 20; ++q) {
    Timestamp a = events[rng() % events.size()].timestamp, b = events[rng() % events.size()].timestamp;
    if (b < a) std::swap(a, b);
    auto trace = machine_trace(l.store, l.ts, l.ns, machine.unit, a, b);
    auto expected = oracle::scan(events, logged, a, b);
    ASSERT_EQ(trace.events.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      EXPECT_EQ(trace.events[i].timestamp, expected[i].timestamp);
      EXPECT_EQ(trace.events[i].node_id, expected[i].node_id);
      EXPECT_EQ(trace.events[i].value, expected[i].value);
    }
  }
}
