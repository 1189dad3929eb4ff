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

#include <nlohmann/json.hpp>

#include "test_util.hpp"
#include "uatrace/hist_values.hpp"
#include "uatrace/query.hpp"

using namespace uatrace;
using namespace uatrace::query;

namespace {

const Namespaces ns;

Iri ex(const std::string& local) { return Iri("http://example.org/t#" + local); }

constexpr const char* kPrefix = "PREFIX t: <http://example.org/t#>\n";

QueryAst parse(const std::string& body) { return parse_query(kPrefix + body); }

ResultTable run(const TripleStore& store, const std::string& body,
                const FunctionRegistry& fns = {}) {
  return evaluate(store, parse(body), fns);
}

TripleStore chain_store() {
  TripleStore s;
  // a -> b -> c -> a (cycle), c -> d; d has a literal.
  s.insert({ex("a"), ex("next"), Term(ex("b"))});
  s.insert({ex("b"), ex("next"), Term(ex("c"))});
  s.insert({ex("c"), ex("next"), Term(ex("a"))});
  s.insert({ex("c"), ex("next"), Term(ex("d"))});
  s.insert({ex("d"), ex("label"), Term(Literal::string("D"))});
  s.insert({ex("a"), ex("label"), Term(Literal::string("A"))});
  s.insert({ex("a"), ex("weight"), Term(Literal::integer(2))});
  s.insert({ex("b"), ex("weight"), Term(Literal::real(2.0))});
  s.insert({ex("c"), ex("weight"), Term(Literal::integer(7))});
  return s;
}

std::vector<std::string> column(const ResultTable& t, std::size_t i) {
  std::vector<std::string> out;
  for (const auto& r : t.rows) out.push_back(r[i].is_iri() ? r[i].iri().str() : r[i].literal().lexical());
  return out;
}

}  // namespace

// -- parser -----------------------------------------------------------------

TEST(QueryParser, ParsesShippedListings) {
  for (const char* file : {"queries/listing1.rq", "queries/listing1_variables.rq", "queries/listing2.rq",
                           "queries/listing3.rq"}) {
    SCOPED_TRACE(file);
    QueryAst ast = parse_query(testutil::read_data(file));
    EXPECT_FALSE(ast.select.empty());
    EXPECT_EQ(parse_query(print(ast)), ast);
  }
}

TEST(QueryParser, Listing1Structure) {
  QueryAst ast = parse_query(testutil::read_data("queries/listing1.rq"));
  std::vector<Variable> select{{"NodeId"}, {"BrowseName"}, {"Time"}, {"Value"}};
  EXPECT_EQ(ast.select, select);
  ASSERT_EQ(ast.patterns.size(), 7u);
  auto path = std::get<PathPattern>(ast.patterns[1]);
  EXPECT_EQ(path.kind, PathKind::ZeroOrMore);
  EXPECT_EQ(path.predicates, std::vector<Iri>{ns.ua_iri("hasComponent")});
  auto filter = std::get<Filter>(ast.patterns[5]);
  ASSERT_EQ(filter.disjuncts.size(), 3u);
  EXPECT_EQ(filter.disjuncts[2].value, Term(Literal::string("AnalogUnitRangeType")));
  auto call = std::get<PropertyFunctionCall>(ast.patterns[6]);
  EXPECT_EQ(call.function, ns.ua_iri("histValues"));
  ASSERT_EQ(call.args.size(), 4u);
  EXPECT_EQ(call.args[2], Node(Term(Literal::string("2022-02-28T09:00:00Z"))));
  ASSERT_TRUE(ast.order_by);
  EXPECT_EQ(ast.order_by->variable.name, "Time");
}

TEST(QueryParser, PredicateObjectListsAndSequencePaths) {
  QueryAst ast = parse("SELECT ?x WHERE { ?x a t:C ; t:p t:o1 , t:o2 ; t:q / t:r ?y . }");
  ASSERT_EQ(ast.patterns.size(), 4u);
  EXPECT_EQ(std::get<TriplePattern>(ast.patterns[0]).predicate, Node(Term(ns.type())));
  EXPECT_EQ(std::get<TriplePattern>(ast.patterns[2]).object, Node(Term(ex("o2"))));
  auto seq = std::get<PathPattern>(ast.patterns[3]);
  EXPECT_EQ(seq.kind, PathKind::Sequence);
  EXPECT_EQ(seq.predicates, (std::vector<Iri>{ex("q"), ex("r")}));
}

TEST(QueryParser, TypedLiteralsAndDescOrder) {
  QueryAst ast = parse(
      "SELECT ?v WHERE { ?s t:p ?v . FILTER(?v = 3 || ?v = 2.5 || ?v = true || "
      "?v = \"2022-02-28T09:00:00Z\"^^<http://www.w3.org/2001/XMLSchema#dateTime>) } ORDER BY DESC(?v)");
  auto f = std::get<Filter>(ast.patterns[1]);
  EXPECT_EQ(f.disjuncts[0].value, Term(Literal::integer(3)));
  EXPECT_EQ(f.disjuncts[1].value, Term(Literal::real(2.5)));
  EXPECT_EQ(f.disjuncts[2].value, Term(Literal::boolean(true)));
  EXPECT_EQ(f.disjuncts[3].value.literal().datatype(), Datatype::DateTime);
  EXPECT_EQ(ast.order_by->order, SortOrder::Descending);
}

TEST(QueryParser, ErrorsCarryLocation) {
  auto location = [](const std::string& text) -> std::pair<std::size_t, std::size_t> {
    try {
      parse_query(text);
    } catch (const ParseError& e) {
      return {e.line(), e.column()};
    }
    return {0, 0};
  };
  EXPECT_EQ(location("SELECT ?x WHERE {\n  ?x <http://e/p> ?y\n  ?y <http://e/q> ?z . }").first, 3u);
  EXPECT_EQ(location("SELECT ?x WHERE { ?x u:p ?y }"), (std::pair<std::size_t, std::size_t>{1, 22}));
  EXPECT_NE(location("SELECT WHERE { ?x <http://e/p> ?y }").first, 0u);
  EXPECT_NE(location("SELECT ?x WHERE { ?x <http://e/p> ?y ").first, 0u);
  EXPECT_NE(location("SELECT ?x WHERE { ?x <http://e/p> \"open }").first, 0u);
  // Variable names are case-sensitive; an unbound ORDER BY variable is rejected.
  EXPECT_NE(location("SELECT ?Time WHERE { ?s <http://e/p> ?Time } ORDER BY ASC(?time)").first, 0u);
  EXPECT_NE(location("SELECT ?nope WHERE { ?s <http://e/p> ?o }").first, 0u);
  EXPECT_NE(location("SELECT ?x WHERE { }").first, 0u);
  EXPECT_NE(location("SELECT ?s WHERE { ?s <http://e/p>/<http://e/q>/<http://e/r> ?o }").first, 0u);
}

TEST(QueryParser, DefaultsAndOverrides) {
  PrefixMap defaults;
  defaults.bind("t", "http://default/");
  auto a = parse_query("SELECT ?s WHERE { ?s t:p ?o }", defaults);
  EXPECT_EQ(std::get<TriplePattern>(a.patterns[0]).predicate, Node(Term(Iri("http://default/p"))));
  auto b = parse_query("PREFIX t: <http://other/>\nSELECT ?s WHERE { ?s t:p ?o }", defaults);
  EXPECT_EQ(std::get<TriplePattern>(b.patterns[0]).predicate, Node(Term(Iri("http://other/p"))));
}

// -- evaluator --------------------------------------------------------------

TEST(QueryEval, BasicJoinAndProjection) {
  TripleStore s = chain_store();
  auto t = run(s, "SELECT ?x ?l WHERE { ?x t:next ?y . ?y t:label ?l }");
  EXPECT_EQ(t.columns, (std::vector<std::string>{"x", "l"}));
  auto xs = column(t, 0);
  std::sort(xs.begin(), xs.end());
  EXPECT_EQ(xs, (std::vector<std::string>{ex("c").str(), ex("c").str()}));
}

TEST(QueryEval, EmptyStoreYieldsNoRows) {
  TripleStore s;
  EXPECT_TRUE(run(s, "SELECT ?x WHERE { ?x t:p ?y }").rows.empty());
}

TEST(QueryEval, FilterComparisonRules) {
  TripleStore s = chain_store();
  // Numerics compare by value: 2 and 2.0 both match.
  EXPECT_EQ(run(s, "SELECT ?x WHERE { ?x t:weight ?w FILTER(?w = 2) }").rows.size(), 2u);
  // IRI against literal is simply false.
  EXPECT_TRUE(run(s, "SELECT ?x WHERE { ?x t:next ?y FILTER(?y = \"b\") }").rows.empty());
  EXPECT_EQ(run(s, "SELECT ?x WHERE { ?x t:next ?y FILTER(?y = t:b || ?y = t:d) }").rows.size(), 2u);
  // String literal against integer literal is a type error.
  EXPECT_ERROR_KIND(run(s, "SELECT ?x WHERE { ?x t:weight ?w FILTER(?w = \"2\") }"), ErrorKind::Type);
}

TEST(QueryEval, FilterBeforeItsVariablesAppearStillApplies) {
  TripleStore s = chain_store();
  auto t = run(s, "SELECT ?x WHERE { FILTER(?l = \"D\") ?x t:label ?l }");
  EXPECT_EQ(column(t, 0), std::vector<std::string>{ex("d").str()});
}

TEST(QueryEval, ZeroOrMoreIsReflexiveAndTerminatesOnCycles) {
  TripleStore s = chain_store();
  auto t = run(s, "SELECT ?y WHERE { t:a t:next* ?y }");
  auto ys = column(t, 0);
  std::sort(ys.begin(), ys.end());
  EXPECT_EQ(ys, (std::vector<std::string>{ex("a").str(), ex("b").str(), ex("c").str(), ex("d").str()}));
  auto back = column(run(s, "SELECT ?x WHERE { ?x t:next* t:d }"), 0);
  std::sort(back.begin(), back.end());
  EXPECT_EQ(back, (std::vector<std::string>{ex("a").str(), ex("b").str(), ex("c").str(), ex("d").str()}));
  EXPECT_EQ(run(s, "SELECT ?x WHERE { ?x t:next* t:zzz }").rows.size(), 1u);
  EXPECT_EQ(eval_zero_or_more(s, ex("d"), ex("next")), std::set<Iri>{ex("d")});
}

TEST(QueryEval, SequencePathKeepsDuplicates) {
  TripleStore s;
  s.insert({ex("a"), ex("p"), Term(ex("m1"))});
  s.insert({ex("a"), ex("p"), Term(ex("m2"))});
  s.insert({ex("m1"), ex("q"), Term(Literal::integer(1))});
  s.insert({ex("m2"), ex("q"), Term(Literal::integer(1))});
  EXPECT_EQ(run(s, "SELECT ?v WHERE { t:a t:p / t:q ?v }").rows.size(), 2u);
  EXPECT_EQ(run(s, "SELECT ?x WHERE { ?x t:p / t:q 1 }").rows.size(), 2u);
}

TEST(QueryEval, OrderByIsStableAndSupportsDesc) {
  TripleStore s = chain_store();
  auto asc = run(s, "SELECT ?x ?w WHERE { ?x t:weight ?w } ORDER BY ?w");
  EXPECT_EQ(column(asc, 1), (std::vector<std::string>{"2", "2", "7"}));
  EXPECT_EQ(column(asc, 0)[0], ex("a").str());
  auto desc = run(s, "SELECT ?x ?w WHERE { ?x t:weight ?w } ORDER BY DESC(?w)");
  EXPECT_EQ(column(desc, 1).front(), "7");
}

TEST(QueryEval, PropertyFunctionContract) {
  TripleStore s = chain_store();
  EXPECT_ERROR_KIND(run(s, "SELECT ?x WHERE { ?x t:label ?l . ?x t:fn (?v) }"), ErrorKind::MissingEntity);
  try {
    run(s, "SELECT ?x WHERE { ?x t:label ?l . ?x t:fn (?v) }");
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(ex("fn").str()), std::string::npos) << e.what();
  }
  FunctionRegistry fns;
  fns.register_function(ex("fn"), [](const PropertyFunctionContext& ctx) {
    std::vector<std::vector<Term>> rows;
    rows.push_back({Term(Literal::string(ctx.subject.iri().str() + "!"))});
    return rows;
  });
  EXPECT_ERROR_KIND(fns.register_function(ex("fn"), {}), ErrorKind::Duplicate);
  auto t = run(s, "SELECT ?v WHERE { ?x t:label \"A\" . ?x t:fn (?v) }", fns);
  EXPECT_EQ(column(t, 0), std::vector<std::string>{ex("a").str() + "!"});
  EXPECT_ERROR_KIND(run(s, "SELECT ?v WHERE { ?x t:fn (?v) . ?x t:label ?l }", fns), ErrorKind::Contract);
}

TEST(QueryEval, CsvAndJsonOutput) {
  ResultTable t{{"Time", "Value", "NodeId"},
                {{Term(Literal::date_time(Timestamp(0))), Term(Literal::boolean(true)),
                  Term(Literal::string("ns=7;i=56510"))},
                 {Term(Literal::date_time(Timestamp(1))), Term(Literal::string("a,b")), Term(ex("n"))}}};
  EXPECT_EQ(t.to_csv(),
            "Time,Value,NodeId\n"
            "1970-01-01T00:00:00Z,true,ns=7;i=56510\n"
            "1970-01-01T00:00:00.001Z,\"a,b\",http://example.org/t#n\n");
  auto j = nlohmann::json::parse(t.to_json());
  EXPECT_EQ(j["head"]["vars"].size(), 3u);
  EXPECT_EQ(j["results"]["bindings"][0]["Value"]["datatype"], "http://www.w3.org/2001/XMLSchema#boolean");
  EXPECT_EQ(j["results"]["bindings"][1]["NodeId"]["type"], "uri");
  EXPECT_EQ(ResultTable{}.to_csv(), "\n");
}

// -- histValues -------------------------------------------------------------

TEST(HistValues, ResolvesNodeIdAndQueriesWindow) {
  TripleStore s;
  Iri node = ex("n");
  s.insert({node, ns.ua_iri("nodeId"), Term(Literal::string("ns=7;i=56510"))});
  TsStore ts;
  ts.append({Timestamp::parse_or_throw("2022-02-28T09:00:54Z"), "ns=7;i=56510", true});
  ts.append({Timestamp::parse_or_throw("2022-02-28T09:20:00Z"), "ns=7;i=56510", false});
  HistCall call{node, Timestamp::parse_or_throw("2022-02-28T09:00:00Z"),
                Timestamp::parse_or_throw("2022-02-28T09:10:00Z")};
  auto rows = hist_values(s, ts, ns, call);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].first.lexical(), "2022-02-28T09:00:54Z");
  EXPECT_EQ(rows[0].second, Literal::boolean(true));

  EXPECT_ERROR_KIND(hist_values(s, ts, ns, HistCall{node, call.end, call.start}), ErrorKind::InvalidRange);
  EXPECT_ERROR_KIND(hist_values(s, ts, ns, HistCall{ex("unknown"), call.start, call.end}),
                    ErrorKind::MissingEntity);
  s.insert({ex("quiet"), ns.ua_iri("nodeId"), Term(Literal::string("ns=7;i=1"))});
  EXPECT_TRUE(hist_values(s, ts, ns, HistCall{ex("quiet"), call.start, call.end}).empty());
}

TEST(HistValues, QueryArgumentsMustBeTimes) {
  TripleStore s;
  s.insert({ex("n"), ns.ua_iri("nodeId"), Term(Literal::string("x"))});
  TsStore ts;
  ts.append({Timestamp(1000), "x", std::int64_t{4}});
  auto registry = default_registry(ts, ns);
  std::string head = std::string(kPrefix) + "PREFIX OpcUa: <http://opcfoundation.org/UA/>\n";
  auto ok = evaluate(s, parse_query(head + "SELECT ?t ?v WHERE { ?n OpcUa:nodeId \"x\" . ?n OpcUa:histValues "
                                           "(?t ?v \"1970-01-01T00:00:00Z\" \"1970-01-01T00:00:01Z\") }"),
                     registry);
  ASSERT_EQ(ok.rows.size(), 1u);
  EXPECT_EQ(ok.rows[0][1], Term(Literal::integer(4)));
  EXPECT_ERROR_KIND(evaluate(s, parse_query(head + "SELECT ?t WHERE { ?n OpcUa:nodeId \"x\" . ?n OpcUa:histValues "
                                                   "(?t ?v \"soon\" \"later\") }"),
                             registry),
                    ErrorKind::Type);
  EXPECT_ERROR_KIND(evaluate(s, parse_query(head + "SELECT ?t WHERE { ?n OpcUa:nodeId \"x\" . ?n OpcUa:histValues "
                                                   "(?t ?v) }"),
                             registry),
                    ErrorKind::Contract);
  EXPECT_ERROR_KIND(evaluate(s, parse_query(head + "SELECT ?t WHERE { ?n OpcUa:nodeId \"x\" . ?n OpcUa:histValues "
                                                   "(?t ?v \"1970-01-01T00:00:02Z\" \"1970-01-01T00:00:01Z\") }"),
                             registry),
                    ErrorKind::InvalidRange);
}
