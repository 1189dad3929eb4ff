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

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "uatrace/detail/text.hpp"
#include "uatrace/error.hpp"
#include "uatrace/query.hpp"

namespace uatrace::query {

// ---------------------------------------------------------------------------
// Registry

void FunctionRegistry::register_function(const Iri& iri, PropertyFunction function) {
  if (!functions_.emplace(iri, std::move(function)).second)
    throw Error(ErrorKind::Duplicate, "property function <" + iri.str() + "> already registered");
}

const PropertyFunction* FunctionRegistry::find(const Iri& iri) const {
  auto it = functions_.find(iri);
  return it == functions_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Term ordering

std::weak_ordering compare_terms(const Term& a, const Term& b) {
  if (a.is_iri() != b.is_iri()) return a.is_iri() ? std::weak_ordering::less : std::weak_ordering::greater;
  if (a.is_iri()) return a.iri().str() <=> b.iri().str();
  const Literal& la = a.literal();
  const Literal& lb = b.literal();
  if (la.is_numeric() && lb.is_numeric()) {
    if (la.datatype() == Datatype::Integer && lb.datatype() == Datatype::Integer)
      return la.as_integer() <=> lb.as_integer();
    double x = la.as_double(), y = lb.as_double();
    if (x < y) return std::weak_ordering::less;
    if (x > y) return std::weak_ordering::greater;
    return std::weak_ordering::equivalent;
  }
  if (la.datatype() != lb.datatype()) return la.datatype() <=> lb.datatype();
  if (la.datatype() == Datatype::DateTime) return la.as_timestamp() <=> lb.as_timestamp();
  return la.lexical() <=> lb.lexical();
}

namespace {

using Row = std::vector<std::optional<Term>>;

// Forward (or backward) reachability over `predicate`, start included.
std::vector<Term> closure(const TripleStore& store, const Term& start, const Iri& predicate,
                          bool forward) {
  std::vector<Term> order{start};
  std::set<Term> seen{start};
  std::deque<Term> frontier{start};
  while (!frontier.empty()) {
    Term current = std::move(frontier.front());
    frontier.pop_front();
    auto push = [&](const Term& next) {
      if (seen.insert(next).second) {
        order.push_back(next);
        frontier.push_back(next);
      }
    };
    if (forward) {
      if (!current.is_iri()) continue;
      store.visit(current.iri(), predicate, std::nullopt,
                  [&](const Iri&, const Iri&, const Term& o) { push(o); });
    } else {
      store.visit(std::nullopt, predicate, current,
                  [&](const Iri& s, const Iri&, const Term&) { push(Term(s)); });
    }
  }
  return order;
}

class Evaluator {
 public:
  Evaluator(const TripleStore& store, const QueryAst& ast, const FunctionRegistry& functions)
      : store_(store), ast_(ast), functions_(functions) {}

  ResultTable run() {
    for (const auto& p : ast_.patterns) {
      if (auto t = std::get_if<TriplePattern>(&p)) {
        declare(t->subject);
        declare(t->predicate);
        declare(t->object);
      } else if (auto path = std::get_if<PathPattern>(&p)) {
        declare(path->subject);
        declare(path->object);
      } else if (auto call = std::get_if<PropertyFunctionCall>(&p)) {
        declare(call->subject);
        for (const auto& a : call->args) declare(a);
      }
      if (auto call = std::get_if<PropertyFunctionCall>(&p)) {
        if (!functions_.contains(call->function))
          throw Error(ErrorKind::MissingEntity,
                      "unregistered property function <" + call->function.str() + ">");
      }
      if (auto f = std::get_if<Filter>(&p)) {
        PendingFilter pending{f, {}};
        for (const auto& c : f->disjuncts) pending.slots.push_back(slot(c.variable));
        filters_.push_back(std::move(pending));
      }
    }
    for (const auto& v : ast_.select) slot(v);
    if (ast_.order_by) slot(ast_.order_by->variable);

    std::vector<Row> rows{Row(slots_.size())};
    apply_ready_filters(rows);
    for (const auto& p : ast_.patterns) {
      if (rows.empty()) break;
      if (auto t = std::get_if<TriplePattern>(&p)) {
        rows = join_triple(rows, *t);
      } else if (auto path = std::get_if<PathPattern>(&p)) {
        rows = path->kind == PathKind::ZeroOrMore ? join_zero_or_more(rows, *path)
                                                  : join_sequence(rows, *path);
      } else if (auto call = std::get_if<PropertyFunctionCall>(&p)) {
        rows = join_function(rows, *call);
      } else {
        continue;
      }
      apply_ready_filters(rows);
    }
    for (auto& f : filters_) {
      if (!f.applied) apply_filter(rows, f);
    }

    if (ast_.order_by) {
      std::size_t key = slot(ast_.order_by->variable);
      bool ascending = ast_.order_by->order == SortOrder::Ascending;
      std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
        const auto& x = ascending ? a[key] : b[key];
        const auto& y = ascending ? b[key] : a[key];
        if (!x || !y) return !x && y.has_value();
        return compare_terms(*x, *y) < 0;
      });
    }

    ResultTable table;
    std::vector<std::size_t> projection;
    for (const auto& v : ast_.select) {
      table.columns.push_back(v.name);
      projection.push_back(slot(v));
    }
    table.rows.reserve(rows.size());
    for (auto& row : rows) {
      std::vector<Term> out;
      out.reserve(projection.size());
      for (std::size_t i = 0; i < projection.size(); ++i) {
        auto& value = row[projection[i]];
        if (!value)
          throw Error(ErrorKind::Contract, "selected variable ?" + table.columns[i] + " is unbound");
        out.push_back(std::move(*value));
      }
      table.rows.push_back(std::move(out));
    }
    return table;
  }

 private:
  struct PendingFilter {
    const Filter* filter;
    std::vector<std::size_t> slots;
    bool applied = false;
  };

  std::size_t slot(const Variable& v) {
    auto [it, inserted] = slots_.emplace(v.name, slots_.size());
    if (inserted) bound_.push_back(false);
    return it->second;
  }

  void declare(const Node& n) {
    if (auto v = std::get_if<Variable>(&n)) slot(*v);
  }

  void mark_bound(const Node& n) {
    if (auto v = std::get_if<Variable>(&n)) bound_[slot(*v)] = true;
  }

  std::optional<Term> resolve(const Row& row, const Node& n) {
    if (auto v = std::get_if<Variable>(&n)) return row[slot(*v)];
    return std::get<Term>(n);
  }

  // Binds or checks `n` against `value`; false on conflict.
  bool unify(Row& row, const Node& n, const Term& value) {
    if (auto v = std::get_if<Variable>(&n)) {
      auto& cell = row[slot(*v)];
      if (!cell) {
        cell = value;
        return true;
      }
      return *cell == value;
    }
    return std::get<Term>(n) == value;
  }

  static bool comparison_holds(const std::optional<Term>& value, const Term& constant) {
    if (!value) return false;
    if (value->is_iri() || constant.is_iri()) return *value == constant;
    const Literal& a = value->literal();
    const Literal& b = constant.literal();
    if (a.datatype() == b.datatype()) return a.lexical() == b.lexical();
    if (a.is_numeric() && b.is_numeric()) return a.as_double() == b.as_double();
    throw Error(ErrorKind::Type, "cannot compare " + std::string(keyword(a.datatype())) +
                                     " literal \"" + a.lexical() + "\" with " +
                                     std::string(keyword(b.datatype())) + " literal \"" +
                                     b.lexical() + "\"");
  }

  void apply_filter(std::vector<Row>& rows, PendingFilter& f) {
    f.applied = true;
    std::vector<Row> kept;
    kept.reserve(rows.size());
    for (auto& row : rows) {
      bool pass = false;
      for (std::size_t i = 0; i < f.filter->disjuncts.size() && !pass; ++i)
        pass = comparison_holds(row[f.slots[i]], f.filter->disjuncts[i].value);
      if (pass) kept.push_back(std::move(row));
    }
    rows = std::move(kept);
  }

  void apply_ready_filters(std::vector<Row>& rows) {
    for (auto& f : filters_) {
      if (f.applied) continue;
      bool ready = std::all_of(f.slots.begin(), f.slots.end(),
                               [&](std::size_t s) { return bound_[s]; });
      if (ready) apply_filter(rows, f);
    }
  }

  std::vector<Row> join_triple(const std::vector<Row>& rows, const TriplePattern& t) {
    std::vector<Row> out;
    for (const auto& row : rows) {
      auto s = resolve(row, t.subject);
      auto p = resolve(row, t.predicate);
      auto o = resolve(row, t.object);
      if ((s && !s->is_iri()) || (p && !p->is_iri())) continue;
      std::optional<Iri> si = s ? std::optional<Iri>(s->iri()) : std::nullopt;
      std::optional<Iri> pi = p ? std::optional<Iri>(p->iri()) : std::nullopt;
      store_.visit(si, pi, o, [&](const Iri& ms, const Iri& mp, const Term& mo) {
        Row next = row;
        if (unify(next, t.subject, Term(ms)) && unify(next, t.predicate, Term(mp)) &&
            unify(next, t.object, mo))
          out.push_back(std::move(next));
      });
    }
    mark_bound(t.subject);
    mark_bound(t.predicate);
    mark_bound(t.object);
    return out;
  }

  std::vector<Term> graph_nodes() {
    if (!graph_nodes_) {
      std::set<Term, std::less<>> nodes;
      store_.visit(std::nullopt, std::nullopt, std::nullopt,
                   [&](const Iri& s, const Iri&, const Term& o) {
                     nodes.insert(Term(s));
                     nodes.insert(o);
                   });
      graph_nodes_ = std::vector<Term>(nodes.begin(), nodes.end());
    }
    return *graph_nodes_;
  }

  std::vector<Row> join_zero_or_more(const std::vector<Row>& rows, const PathPattern& path) {
    const Iri& predicate = path.predicates.at(0);
    std::vector<Row> out;
    for (const auto& row : rows) {
      auto s = resolve(row, path.subject);
      auto o = resolve(row, path.object);
      auto emit = [&](const Term& from, const Term& to) {
        Row next = row;
        if (unify(next, path.subject, from) && unify(next, path.object, to))
          out.push_back(std::move(next));
      };
      if (s) {
        for (const auto& r : closure(store_, *s, predicate, true)) emit(*s, r);
      } else if (o) {
        for (const auto& r : closure(store_, *o, predicate, false)) emit(r, *o);
      } else {
        for (const auto& start : graph_nodes())
          for (const auto& r : closure(store_, start, predicate, true)) emit(start, r);
      }
    }
    mark_bound(path.subject);
    mark_bound(path.object);
    return out;
  }

  std::vector<Row> join_sequence(const std::vector<Row>& rows, const PathPattern& path) {
    const Iri& first = path.predicates.at(0);
    const Iri& second = path.predicates.at(1);
    std::vector<Row> out;
    for (const auto& row : rows) {
      auto s = resolve(row, path.subject);
      auto o = resolve(row, path.object);
      if (s && !s->is_iri()) continue;
      auto emit = [&](const Iri& from, const Term& to) {
        Row next = row;
        if (unify(next, path.subject, Term(from)) && unify(next, path.object, to))
          out.push_back(std::move(next));
      };
      if (s || !o) {
        std::optional<Iri> si = s ? std::optional<Iri>(s->iri()) : std::nullopt;
        for (const auto& hop : store_.match(si, first, std::nullopt)) {
          if (!hop.object.is_iri()) continue;
          store_.visit(hop.object.iri(), second, o,
                       [&](const Iri&, const Iri&, const Term& to) { emit(hop.subject, to); });
        }
      } else {
        for (const auto& hop : store_.match(std::nullopt, second, o)) {
          store_.visit(std::nullopt, first, Term(hop.subject),
                       [&](const Iri& from, const Iri&, const Term&) { emit(from, hop.object); });
        }
      }
    }
    mark_bound(path.subject);
    mark_bound(path.object);
    return out;
  }

  std::vector<Row> join_function(const std::vector<Row>& rows, const PropertyFunctionCall& call) {
    const PropertyFunction& fn = *functions_.find(call.function);
    std::vector<Row> out;
    std::vector<std::optional<Term>> args(call.args.size(), std::nullopt);
    for (const auto& row : rows) {
      auto subject = resolve(row, call.subject);
      if (!subject)
        throw Error(ErrorKind::Contract,
                    "subject of property function <" + call.function.str() + "> is unbound");
      for (std::size_t i = 0; i < call.args.size(); ++i) args[i] = resolve(row, call.args[i]);
      auto solutions = fn(PropertyFunctionContext{store_, call.function, *subject, args});
      for (const auto& solution : solutions) {
        if (solution.size() != call.args.size())
          throw Error(ErrorKind::Contract, "property function <" + call.function.str() +
                                               "> returned a row of the wrong width");
        Row next = row;
        bool ok = true;
        for (std::size_t i = 0; i < call.args.size() && ok; ++i)
          ok = unify(next, call.args[i], solution[i]);
        if (ok) out.push_back(std::move(next));
      }
    }
    mark_bound(call.subject);
    for (const auto& a : call.args) mark_bound(a);
    return out;
  }

  const TripleStore& store_;
  const QueryAst& ast_;
  const FunctionRegistry& functions_;
  std::map<std::string, std::size_t> slots_;
  std::vector<bool> bound_;
  std::vector<PendingFilter> filters_;
  std::optional<std::vector<Term>> graph_nodes_;
};

std::string cell_text(const Term& t) {
  return t.is_iri() ? t.iri().str() : t.literal().lexical();
}

}  // namespace

ResultTable evaluate(const TripleStore& store, const QueryAst& ast,
                     const FunctionRegistry& functions) {
  return Evaluator(store, ast, functions).run();
}

std::set<Iri> eval_zero_or_more(const TripleStore& store, const Iri& start,
                                const Iri& predicate) {
  std::set<Iri> out;
  for (const auto& t : closure(store, Term(start), predicate, true))
    if (t.is_iri()) out.insert(t.iri());
  return out;
}

std::string ResultTable::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += detail::csv_escape(columns[i]);
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += detail::csv_escape(cell_text(row[i]));
    }
    out += '\n';
  }
  return out;
}

std::string ResultTable::to_json() const {
  nlohmann::json bindings = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json binding = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      const Term& t = row[i];
      if (t.is_iri()) {
        binding[columns[i]] = {{"type", "uri"}, {"value", t.iri().str()}};
      } else {
        binding[columns[i]] = {{"type", "literal"},
                               {"value", t.literal().lexical()},
                               {"datatype", xsd_iri(t.literal().datatype())}};
      }
    }
    bindings.push_back(std::move(binding));
  }
  nlohmann::json doc = {{"head", {{"vars", columns}}}, {"results", {{"bindings", bindings}}}};
  return doc.dump(2) + "\n";
}

}  // namespace uatrace::query
