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

#include "uatrace/hist_values.hpp"

#include "uatrace/error.hpp"

namespace uatrace {

namespace {

Timestamp window_bound(const std::optional<Term>& arg, const char* which) {
  if (!arg)
    throw Error(ErrorKind::Contract, std::string("histValues: ") + which + " time is unbound");
  if (!arg->is_literal())
    throw Error(ErrorKind::Type, std::string("histValues: ") + which + " time is an IRI");
  const Literal& lit = arg->literal();
  if (lit.datatype() != Datatype::DateTime && lit.datatype() != Datatype::String)
    throw Error(ErrorKind::Type, std::string("histValues: ") + which + " time must be a dateTime");
  auto ts = Timestamp::parse(lit.lexical());
  if (!ts)
    throw Error(ErrorKind::Type, std::string("histValues: ") + which + " time '" +
                                     lit.lexical() + "' is not RFC 3339");
  return *ts;
}

}  // namespace

std::vector<std::pair<Literal, Literal>> hist_values(const TripleStore& store, const TsStore& ts,
                                                     const Namespaces& ns, const HistCall& call) {
  if (call.start > call.end)
    throw Error(ErrorKind::InvalidRange, "histValues: start " + call.start.to_string() +
                                             " is after end " + call.end.to_string());
  std::optional<std::string> node_id;
  store.visit(call.node, ns.ua_iri("nodeId"), std::nullopt,
              [&](const Iri&, const Iri&, const Term& o) {
                if (!node_id && o.is_literal()) node_id = o.literal().lexical();
              });
  if (!node_id)
    throw Error(ErrorKind::MissingEntity, "histValues: <" + call.node.str() + "> has no nodeId");

  std::vector<std::pair<Literal, Literal>> out;
  for (const auto& change : ts.range_query(*node_id, call.start, call.end))
    out.emplace_back(Literal::date_time(change.timestamp), to_literal(change.value));
  return out;
}

query::PropertyFunction make_hist_values_function(const TsStore& ts, const Namespaces& ns) {
  return [&ts, ns](const query::PropertyFunctionContext& ctx) {
    if (ctx.args.size() != 4)
      throw Error(ErrorKind::Contract,
                  "histValues expects 4 arguments (time value start end), got " +
                      std::to_string(ctx.args.size()));
    if (!ctx.subject.is_iri())
      throw Error(ErrorKind::Contract, "histValues subject must be an IRI");
    HistCall call{ctx.subject.iri(), window_bound(ctx.args[2], "start"),
                  window_bound(ctx.args[3], "end")};
    std::vector<std::vector<Term>> rows;
    for (auto& [time, value] : hist_values(ctx.store, ts, ns, call))
      rows.push_back({Term(std::move(time)), Term(std::move(value)), *ctx.args[2], *ctx.args[3]});
    return rows;
  };
}

query::FunctionRegistry default_registry(const TsStore& ts, const Namespaces& ns) {
  query::FunctionRegistry registry;
  registry.register_function(ns.ua_iri("histValues"), make_hist_values_function(ts, ns));
  return registry;
}

}  // namespace uatrace
