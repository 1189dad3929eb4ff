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

#include <map>

#include "oracles/oracles.hpp"
#include "test_util.hpp"
#include "uatrace/trace.hpp"

using namespace uatrace;
using namespace uatrace::sim;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.seed = 7;
  c.start = Timestamp::parse_or_throw("2022-02-28T09:00:00Z");
  MachineConfig m;
  m.name = "Mill";
  m.variables = {{"IsRotating", "BaseDataVariableType", ValueKind::Boolean, "", {}},
                 {"Mode", "FiniteStateVariableType", ValueKind::String, "", {"A", "B"}},
                 {"Speed", "AnalogUnitRangeType", ValueKind::Double, "", {}}};
  m.procedures = {{"UnitProcedure1", process::ProcedureLevel::UnitProcedure}};
  c.machines = {m};
  c.processes.count = 2;
  c.processes.articles = {"Article1"};
  c.events.count = 40;
  return c;
}

}  // namespace

TEST(Rng, MatchesReferenceEngineAndStaysInBounds) {
  // First output of the 64-bit Mersenne Twister for its default seed.
  EXPECT_EQ(Rng(5489).next(), 14514284786278117030ull);
  Rng a(1), b(1);
  std::map<std::int64_t, int> seen;
  for (int i = 0; i < 5000; ++i) {
    auto v = a.uniform(-2, 3);
    EXPECT_EQ(v, b.uniform(-2, 3));
    ASSERT_GE(v, -2);
    ASSERT_LE(v, 3);
    ++seen[v];
  }
  EXPECT_EQ(seen.size(), 6u);
  EXPECT_EQ(a.uniform(5, 5), 5);
  EXPECT_LE(a.uniform(std::numeric_limits<std::int64_t>::min(), std::numeric_limits<std::int64_t>::max()),
            std::numeric_limits<std::int64_t>::max());
}

TEST(SimConfig, ParsesShippedDefaultAndRoundTrips) {
  auto c = testutil::default_config();
  EXPECT_EQ(c.seed, 42u);
  ASSERT_GE(c.machines.size(), 1u);
  EXPECT_EQ(c.machines[0].name, "FullMachineTool");
  auto again = parse_config(write_config(c));
  EXPECT_EQ(write_config(again), write_config(c));
}

TEST(SimConfig, RejectsInvalidConfigurations) {
  EXPECT_ERROR_KIND(parse_config("{not json"), ErrorKind::Parse);
  EXPECT_ERROR_KIND(parse_config("{\"seed\":1}"), ErrorKind::Parse);
  EXPECT_ERROR_KIND(parse_config("{\"seed\":1,\"start\":\"2022-02-28T09:00:00Z\",\"machines\":[]}"),
                    ErrorKind::Invariant);
  auto expect_invalid = [](auto mutate) {
    auto c = small_config();
    mutate(c);
    EXPECT_ERROR_KIND(validate(c), ErrorKind::Invariant);
    EXPECT_ERROR_KIND(generate(c), ErrorKind::Invariant);
  };
  expect_invalid([](ScenarioConfig& c) { c.machines.clear(); });
  expect_invalid([](ScenarioConfig& c) { c.machines[0].name = ""; });
  expect_invalid([](ScenarioConfig& c) { c.machines.push_back(c.machines[0]); });
  expect_invalid([](ScenarioConfig& c) { c.processes.duration_ms = {0, 10}; });
  expect_invalid([](ScenarioConfig& c) { c.processes.duration_ms = {10, 5}; });
  expect_invalid([](ScenarioConfig& c) { c.events.interval_ms = {0, 0}; });
  expect_invalid([](ScenarioConfig& c) { c.processes.articles.clear(); });
  expect_invalid([](ScenarioConfig& c) { c.machines[0].procedures.clear(); });
  expect_invalid([](ScenarioConfig& c) {
    c.machines[0].variables[0].node_id = "ns=1;i=1";
    c.machines[0].variables[1].node_id = "ns=1;i=1";
  });
  EXPECT_NO_THROW(validate(small_config()));
}

TEST(Sim, SameSeedSameBytes) {
  auto c = testutil::default_config();
  auto a = generate(c), b = generate(c);
  EXPECT_EQ(a.nodeset_xml, b.nodeset_xml);
  EXPECT_EQ(a.processes_jsonl, b.processes_jsonl);
  EXPECT_EQ(a.log_csv, b.log_csv);
  EXPECT_EQ(a.ground_truth_json, b.ground_truth_json);
  c.seed += 1;
  EXPECT_NE(generate(c).log_csv, a.log_csv);
}

TEST(Sim, CountsForcedByConfig) {
  auto s = generate(small_config());
  auto nodes = nodeset::parse_nodeset(s.nodeset_xml, Namespaces{}.prefix_map());
  EXPECT_EQ(nodes.machines.size(), 1u);
  auto ledger = process::parse_ledger(s.processes_jsonl);
  EXPECT_EQ(ledger.processes.size(), 2u);
  EXPECT_EQ(s.truth.events.size(), 40u);
  EXPECT_EQ(s.truth.machines[0].variables.size(), 3u);
}

TEST(Sim, ProcessesDoNotOverlapPerMachineUnlessRequested) {
  auto c = testutil::default_config();
  c.processes.count = 60;
  auto overlaps = [](const GroundTruth& truth) {
    std::map<Iri, std::vector<TimeWindow>> by_unit;
    for (const auto& p : truth.processes) by_unit[p.unit].push_back(p.window);
    std::size_t n = 0;
    for (auto& [unit, ws] : by_unit) {
      std::sort(ws.begin(), ws.end(), [](auto& a, auto& b) { return a.start < b.start; });
      for (std::size_t i = 1; i < ws.size(); ++i)
        if (ws[i].start <= ws[i - 1].end) ++n;
    }
    return n;
  };
  auto plain = generate(c);
  for (const auto& p : plain.truth.processes) EXPECT_LT(p.window.start, p.window.end);
  EXPECT_EQ(overlaps(plain.truth), 0u);
  c.processes.allow_overlap = true;
  EXPECT_GT(overlaps(generate(c).truth), 0u);
}

TEST(Sim, GroundTruthMatchesRangeQueriesAfterIngest) {
  auto c = testutil::default_config();
  c.processes.allow_overlap = true;
  c.processes.count = 20;
  testutil::Loaded l(c);
  const auto& truth = l.scenario.truth;
  std::map<Iri, std::set<std::string>> logged;
  for (const auto& m : truth.machines)
    for (const auto& v : m.variables)
      if (v.logged) logged[m.unit].insert(v.node_id);
  for (const auto& p : truth.processes) {
    std::size_t total = 0;
    for (const auto& id : logged[p.unit]) total += l.ts.range_query(id, p.window.start, p.window.end).size();
    EXPECT_EQ(total, p.events.size());
    auto expected = oracle::scan(truth.events, logged[p.unit], p.window.start, p.window.end);
    ASSERT_EQ(expected.size(), p.events.size());
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(truth.events[p.events[i]], expected[i]);
  }
}

TEST(Sim, TracesRecoverLedgerPerProcess) {
  auto c = testutil::default_config();
  c.processes.count = 25;
  testutil::Loaded l(c);
  const auto& truth = l.scenario.truth;
  std::set<std::pair<Iri, Iri>> pairs;
  for (const auto& p : truth.processes) pairs.insert({p.unit, p.procedure});
  std::size_t seen = 0;
  for (const auto& [unit, procedure] : pairs) {
    for (const auto& t : traces_by_procedure(l.store, l.ts, l.ns, unit, procedure)) {
      auto it = std::find_if(truth.processes.begin(), truth.processes.end(),
                             [&](const auto& p) { return p.process.str() == t.label; });
      ASSERT_NE(it, truth.processes.end());
      EXPECT_EQ(it->procedure, procedure);
      ASSERT_EQ(t.events.size(), it->events.size());
      for (std::size_t i = 0; i < t.events.size(); ++i) {
        const auto& e = truth.events[it->events[i]];
        EXPECT_EQ(t.events[i].timestamp, e.timestamp);
        EXPECT_EQ(t.events[i].node_id, e.node_id);
        EXPECT_EQ(t.events[i].value, e.value);
      }
      ++seen;
    }
  }
  EXPECT_EQ(seen, truth.processes.size());
}

TEST(Sim, GroundTruthRoundTrip) {
  auto s = generate(testutil::default_config());
  auto parsed = parse_ground_truth(s.ground_truth_json);
  EXPECT_EQ(parsed.seed, s.truth.seed);
  EXPECT_EQ(parsed.processes.size(), s.truth.processes.size());
  for (std::size_t i = 0; i < parsed.processes.size(); ++i) {
    EXPECT_EQ(parsed.processes[i].process, s.truth.processes[i].process);
    EXPECT_EQ(parsed.processes[i].window, s.truth.processes[i].window);
    EXPECT_EQ(parsed.processes[i].events, s.truth.processes[i].events);
  }
  // Event values live in the log, not in the ground-truth document.
  EXPECT_TRUE(parsed.events.empty());
  parsed.events = s.truth.events;
  EXPECT_EQ(write_ground_truth(parsed), s.ground_truth_json);
  EXPECT_ERROR_KIND(parse_ground_truth("[1,2"), ErrorKind::Parse);
}

TEST(Sim, WritesArtifacts) {
  testutil::TempDir dir;
  auto s = generate(small_config());
  write_scenario(s, dir.path() / "out");
  EXPECT_EQ(testutil::read_file(dir.path() / "out" / std::string(kLogFile)), s.log_csv);
  EXPECT_EQ(testutil::read_file(dir.path() / "out" / std::string(kNodesetFile)), s.nodeset_xml);
  std::ofstream(dir.path() / "file") << "x";
  EXPECT_ERROR_KIND(write_scenario(s, dir.path() / "file" / "sub"), ErrorKind::Io);
}
