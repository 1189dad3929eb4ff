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

#include <string>
#include <vector>

#include "uatrace/namespaces.hpp"
#include "uatrace/query.hpp"
#include "uatrace/rdf.hpp"
#include "uatrace/ts_store.hpp"

namespace uatrace {

// One resolved `?node OpcUa:histValues (?time ?value start end)` call.
struct HistCall {
  Iri node;
  Timestamp start;
  Timestamp end;
};

/// Resolves `call.node`'s OpcUa:nodeId literal in `store` and returns the
/// node's logged changes in [start, end] as (time, value) literal pairs.
///
/// Throws Error(MissingEntity) when the node has no nodeId triple and
/// Error(InvalidRange) when start > end. A node that was never logged yields
/// no rows.
std::vector<std::pair<Literal, Literal>> hist_values(const TripleStore& store, const TsStore& ts,
                                                     const Namespaces& ns, const HistCall& call);

/// Property-function adapter: arguments are (time, value, start, end);
/// start and end must be bound to dateTime (or RFC 3339 string) literals.
query::PropertyFunction make_hist_values_function(const TsStore& ts, const Namespaces& ns);

// Registry with `OpcUa:histValues` bound to `ts`. `ts` must outlive it.
query::FunctionRegistry default_registry(const TsStore& ts, const Namespaces& ns);

}  // namespace uatrace
