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

#include "generators.hpp"
#include "oracles/oracles.hpp"
#include "test_util.hpp"
#include "uatrace/trace.hpp"

using namespace uatrace;

namespace {

std::vector<std::vector<Term>> sorted_rows(query::ResultTable t) {
  std::sort(t.rows.begin(), t.rows.end());
  return t.rows;
}

TripleStore graph_store(const std::map<std::string, std::vector<std::string>>& adj, const Iri& p) {
  TripleStore s;
  for (const auto& [from, tos] : adj)
    for (const auto& to : tos) s.insert({Iri(from), p, Term(Iri(to))});
  return s;
}

}  // namespace

TEST(Property, EvaluatorMatchesNestedLoopOracle) {
  std::mt19937_64 rng(11);
  int non_empty = 0;
  for (int round = 0; round < 300; ++round) {
    auto data = gen::store(rng, 120, 12, 3);
    auto ast = gen::query(rng, 12, 3);
    SCOPED_TRACE(query::print(ast));
    // The printed form goes through the parser too.
    auto reparsed = query::parse_query(query::print(ast));
    ASSERT_EQ(reparsed, ast);
    auto expected = oracle::evaluate(data.triples, ast);
    EXPECT_EQ(sorted_rows(query::evaluate(data.store, reparsed)), expected);
    non_empty += !expected.empty();
  }
  std::cout << "non-empty answers: " << non_empty << "/300\n";
  EXPECT_GT(non_empty, 60);
}

TEST(Property, PatternOrderDoesNotChangeTheResultSet) {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 200; ++round) {
    auto data = gen::store(rng, 120, 10, 3);
    auto ast = gen::query(rng, 10, 3);
    auto expected = sorted_rows(query::evaluate(data.store, ast));
    for (int k = 0; k < 3; ++k) {
      auto shuffled = ast;
      std::shuffle(shuffled.patterns.begin(), shuffled.patterns.end(), rng);
      EXPECT_EQ(sorted_rows(query::evaluate(data.store, shuffled)), expected) << query::print(shuffled);
    }
  }
}

TEST(Property, OrderByIsStableAndMonotone) {
  std::mt19937_64 rng(12);
  for (int round = 0; round < 100; ++round) {
    auto data = gen::store(rng, 80, 8, 2);
    auto ast = gen::query(rng, 8, 2);
    ast.order_by = query::OrderBy{ast.select[0], round % 2 ? query::SortOrder::Descending
                                                          : query::SortOrder::Ascending};
    auto unordered = query::evaluate(data.store, [&] {
      auto a = ast;
      a.order_by.reset();
      return a;
    }());
    auto ordered = query::evaluate(data.store, ast);
    auto expected = unordered.rows;
    std::stable_sort(expected.begin(), expected.end(), [&](const auto& a, const auto& b) {
      auto c = query::compare_terms(a[0], b[0]);
      return ast.order_by->order == query::SortOrder::Ascending ? c < 0 : c > 0;
    });
    EXPECT_EQ(ordered.rows, expected);
  }
}

TEST(Property, ZeroOrMoreEqualsBreadthFirstReachability) {
  std::mt19937_64 rng(13);
  Iri p("http://example.org/g#next");
  for (int round = 0; round < 40; ++round) {
    std::size_t n = 1 + gen::pick(rng, 300);
    auto adj = gen::graph(rng, n, gen::pick(rng, 2 * n + 1));
    TripleStore s = graph_store(adj, p);
    std::map<std::string, std::vector<std::string>> reverse;
    for (const auto& [from, tos] : adj)
      for (const auto& to : tos) reverse[to].push_back(from);
    for (int q = 0; q < 5; ++q) {
      Iri start = gen::node(gen::pick(rng, n));
      std::set<Iri> expected;
      for (const auto& v : oracle::reachable(adj, start.str())) expected.insert(Iri(v));
      EXPECT_EQ(query::eval_zero_or_more(s, start, p), expected);
      query::QueryAst fwd{{query::Variable{"x"}},
                          {query::PathPattern{Term(start), query::PathKind::ZeroOrMore, {p}, query::Variable{"x"}}},
                          std::nullopt};
      std::set<Iri> got;
      for (const auto& row : query::evaluate(s, fwd).rows) got.insert(row[0].iri());
      EXPECT_EQ(got, expected);
      query::QueryAst back{{query::Variable{"x"}},
                           {query::PathPattern{query::Variable{"x"}, query::PathKind::ZeroOrMore, {p}, Term(start)}},
                           std::nullopt};
      std::set<Iri> back_expected;
      for (const auto& v : oracle::reachable(reverse, start.str())) back_expected.insert(Iri(v));
      std::set<Iri> back_got;
      for (const auto& row : query::evaluate(s, back).rows) back_got.insert(row[0].iri());
      EXPECT_EQ(back_got, back_expected);
    }
  }
}

TEST(Property, LineTriplesExportLoadIdentity) {
  std::mt19937_64 rng(14);
  for (int round = 0; round < 50; ++round) {
    auto data = gen::store(rng, 200, 30, 4);
    data.store.insert({gen::node(0), gen::pred(9), Term(Literal::string("tab\tquote\" \\ line\n" + std::to_string(round)))});
    data.store.insert({gen::node(1), gen::pred(9), Term(Literal::date_time(Timestamp(round * 1001)))});
    data.store.insert({gen::node(2), gen::pred(9), Term(Literal::boolean(round % 2))});
    std::string text = export_line_triples(data.store);
    TripleStore copy;
    load_line_triples(copy, text);
    EXPECT_EQ(copy, data.store);
    EXPECT_EQ(export_line_triples(copy), text);
  }
}

TEST(Property, TsCsvRoundTripPreservesRangeQueries) {
  std::mt19937_64 rng(15);
  for (int round = 0; round < 20; ++round) {
    TsStore ts;
    std::vector<ValueChange> log;
    std::size_t n = gen::pick(rng, 400);
    for (std::size_t i = 0; i < n; ++i) {
      Value v;
      switch (gen::pick(rng, 4)) {
        case 0: v = Value(gen::chance(rng, 0.5)); break;
        case 1: v = Value(static_cast<std::int64_t>(rng() % 2000) - 1000); break;
        case 2: v = Value(static_cast<double>(rng() % 100000) / 64.0); break;
        default: v = Value("s,\"" + std::to_string(rng() % 10) + "\""); break;
      }
      ValueChange c{Timestamp(static_cast<std::int64_t>(rng() % 100000)), "ns=1;i=" + std::to_string(rng() % 5),
                    v};
      log.push_back(c);
      ts.append(c);
    }
    // Ingesting a sorted export keeps every per-node answer.
    TsStore copy;
    ASSERT_TRUE(copy.ingest_log(ts.export_log()).errors.empty());
    for (int q = 0; q < 30; ++q) {
      std::int64_t a = rng() % 100000, b = rng() % 100000;
      if (a > b) std::swap(a, b);
      std::string node = "ns=1;i=" + std::to_string(rng() % 6);
      auto expected = oracle::scan(log, {node}, Timestamp(a), Timestamp(b));
      auto got = copy.range_query(node, Timestamp(a), Timestamp(b));
      std::vector<std::pair<Timestamp, std::string>> lhs, rhs;
      ASSERT_EQ(got.size(), expected.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].timestamp, expected[i].timestamp);
        // Same-time ties are ordered by value text in the export.
        lhs.emplace_back(got[i].timestamp, format_value(got[i].value));
        rhs.emplace_back(expected[i].timestamp, format_value(expected[i].value));
      }
      std::sort(lhs.begin(), lhs.end());
      std::sort(rhs.begin(), rhs.end());
      EXPECT_EQ(lhs, rhs);
    }
  }
}

TEST(Property, TraceJsonLinesRoundTrip) {
  std::mt19937_64 rng(16);
  for (int round = 0; round < 50; ++round) {
    std::vector<EventTrace> traces(gen::pick(rng, 4));
    for (std::size_t i = 0; i < traces.size(); ++i) {
      traces[i].label = "urn:t:" + std::to_string(i);
      if (gen::chance(rng, 0.5)) traces[i].window = TimeWindow{Timestamp(0), Timestamp(1000)};
      std::size_t n = gen::pick(rng, 6);
      for (std::size_t k = 0; k < n; ++k) {
        Value v = gen::chance(rng, 0.5) ? Value(static_cast<double>(rng() % 1000) / 8.0)
                                        : Value("v\n" + std::to_string(k));
        traces[i].events.push_back({Timestamp(static_cast<std::int64_t>(k * 10)), "n", "N", v});
      }
    }
    auto text = export_traces(traces, TraceFormat::JsonLines);
    EXPECT_EQ(parse_traces(text), traces);
  }
}

TEST(Property, LedgerWriteParseRoundTrip) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto config = testutil::default_config();
    config.seed = seed;
    auto s = sim::generate(config);
    auto ledger = process::parse_ledger(s.processes_jsonl);
    EXPECT_EQ(process::write_ledger(ledger), s.processes_jsonl);
    EXPECT_EQ(process::parse_ledger(process::write_ledger(ledger)), ledger);
  }
}

TEST(Property, ProcessTracesStayInsideWindowsAndMachineTrace) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    auto config = testutil::default_config();
    config.seed = seed;
    config.processes.allow_overlap = seed % 2 == 0;
    testutil::Loaded l(config);
    for (const auto& m : l.scenario.truth.machines) {
      auto whole = machine_trace(l.store, l.ts, l.ns, m.unit, Timestamp::min(), Timestamp::max());
      for (const auto& p : config.machines)
        for (const auto& proc : p.procedures)
          for (const auto& t : traces_by_procedure(l.store, l.ts, l.ns, m.unit, l.ns.site_iri(proc.name))) {
            ASSERT_TRUE(t.window);
            EXPECT_TRUE(std::is_sorted(t.events.begin(), t.events.end(),
                                       [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; }));
            for (const auto& e : t.events) {
              EXPECT_TRUE(t.window->contains(e.timestamp));
              EXPECT_NE(std::find(whole.events.begin(), whole.events.end(), e), whole.events.end());
            }
          }
    }
  }
}

TEST(Property, MaterializationIsIdempotent) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto config = testutil::default_config();
    config.seed = seed;
    testutil::Loaded l(config);
    auto before = l.store.size();
    auto stats = vocab::materialize_alignment(l.store, l.ns);
    EXPECT_EQ(stats.added, 0u);
    EXPECT_EQ(l.store.size(), before);
  }
}
