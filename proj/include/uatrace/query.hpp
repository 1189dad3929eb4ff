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

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "uatrace/rdf.hpp"

namespace uatrace::query {

// ---------------------------------------------------------------------------
// AST

struct Variable {
  std::string name;  // without the leading '?'

  friend auto operator<=>(const Variable&, const Variable&) = default;
  friend bool operator==(const Variable&, const Variable&) = default;
};

// A pattern position: variable or constant term.
using Node = std::variant<Variable, Term>;

struct TriplePattern {
  Node subject;
  Node predicate;
  Node object;

  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

enum class PathKind { ZeroOrMore, Sequence };

// `s p* o` (one predicate) or `s p1/p2 o` (exactly two predicates).
struct PathPattern {
  Node subject;
  PathKind kind;
  std::vector<Iri> predicates;
  Node object;

  friend bool operator==(const PathPattern&, const PathPattern&) = default;
};

struct Comparison {
  Variable variable;
  Term value;

  friend bool operator==(const Comparison&, const Comparison&) = default;
};

// Disjunction of `?var = constant` comparisons.
struct Filter {
  std::vector<Comparison> disjuncts;

  friend bool operator==(const Filter&, const Filter&) = default;
};

// `?s <fn> ( arg ... )`.
struct PropertyFunctionCall {
  Node subject;
  Iri function;
  std::vector<Node> args;

  friend bool operator==(const PropertyFunctionCall&, const PropertyFunctionCall&) = default;
};

using Pattern = std::variant<TriplePattern, PathPattern, Filter, PropertyFunctionCall>;

enum class SortOrder { Ascending, Descending };

struct OrderBy {
  Variable variable;
  SortOrder order = SortOrder::Ascending;

  friend bool operator==(const OrderBy&, const OrderBy&) = default;
};

struct QueryAst {
  std::vector<Variable> select;
  std::vector<Pattern> patterns;
  std::optional<OrderBy> order_by;

  friend bool operator==(const QueryAst&, const QueryAst&) = default;
};

/// Parses the supported query subset. `defaults` supplies prefixes that the
/// text may use without declaring them; PREFIX declarations in the text take
/// precedence. Throws ParseError with line and column.
///
///   query    := prefix* SELECT var+ WHERE? '{' group '}' order?
///   prefix   := PREFIX pname_ns IRIREF
///   group    := ( FILTER '(' cmp ('||' cmp)* ')' '.'? | triples '.'? )*
///   triples  := node verb objects (';' (verb objects)?)*
///   verb     := 'a' | var | iri ( '*' | '/' iri )?
///   objects  := object (',' object)* | '(' node* ')'
///   cmp      := var '=' (iri | literal)
///   order    := ORDER BY ( (ASC|DESC) '(' var ')' | var )
QueryAst parse_query(std::string_view text, const PrefixMap& defaults = {});

// Canonical text with full IRIs; parse_query(print(ast)) == ast.
std::string print(const QueryAst& ast);

// ---------------------------------------------------------------------------
// Evaluation

struct PropertyFunctionContext {
  const TripleStore& store;
  const Iri& function;
  const Term& subject;
  // Current value of each argument; nullopt for an unbound variable.
  const std::vector<std::optional<Term>>& args;
};

// Returns one row per solution; each row has one term per argument. Rows are
// unified with the arguments: unbound variables get bound, bound arguments
// must match.
using PropertyFunction =
    std::function<std::vector<std::vector<Term>>(const PropertyFunctionContext&)>;

class FunctionRegistry {
 public:
  // Throws Error(Duplicate) if `iri` is already registered.
  void register_function(const Iri& iri, PropertyFunction function);
  const PropertyFunction* find(const Iri& iri) const;
  bool contains(const Iri& iri) const { return find(iri) != nullptr; }

 private:
  std::map<Iri, PropertyFunction> functions_;
};

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Term>> rows;

  // Header of column names; IRIs and literal lexical forms as values.
  std::string to_csv() const;
  // W3C SPARQL JSON results layout.
  std::string to_json() const;

  friend bool operator==(const ResultTable&, const ResultTable&) = default;
};

/// Joins patterns left to right against `store`. Filters run as soon as all
/// their variables are bound; property-function calls expand each row with
/// the function's solutions; ORDER BY is a stable sort applied last.
///
/// Throws Error(MissingEntity) for an unregistered property function,
/// Error(Type) when a filter compares incompatible literals, and
/// Error(Contract) when a property-function subject is unbound.
ResultTable evaluate(const TripleStore& store, const QueryAst& ast,
                     const FunctionRegistry& functions = {});

/// Reflexive-transitive closure of `predicate` from `start`: `start` itself
/// plus every IRI reachable over one or more edges. Terminates on cycles.
std::set<Iri> eval_zero_or_more(const TripleStore& store, const Iri& start,
                                const Iri& predicate);

// Ordering used by ORDER BY: IRIs before literals; numeric and dateTime
// literals compare by value; otherwise by datatype, then lexical form.
std::weak_ordering compare_terms(const Term& a, const Term& b);

}  // namespace uatrace::query
