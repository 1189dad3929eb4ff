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
#include <string_view>
#include <vector>

#include "uatrace/namespaces.hpp"
#include "uatrace/rdf.hpp"

namespace uatrace::nodeset {

enum class NodeClass { Object, Variable };
enum class ReferenceKind { HasComponent, Organizes };

struct ReferenceEdge {
  ReferenceKind kind;
  std::string target;  // node id

  friend bool operator==(const ReferenceEdge&, const ReferenceEdge&) = default;
};

struct UaNode {
  std::string node_id;  // e.g. "ns=7;i=56510"
  std::string browse_name;
  NodeClass node_class = NodeClass::Object;
  std::string type_definition;  // browse name of the type
  std::vector<ReferenceEdge> references;

  friend bool operator==(const UaNode&, const UaNode&) = default;
};

struct MachineEntry {
  std::string machine_node;  // node id of the machine object
  Iri identity_iri;          // ISA-88 unit individual the machine node is the same as
  std::string display_name;

  friend bool operator==(const MachineEntry&, const MachineEntry&) = default;
};

struct NodeSet {
  std::vector<UaNode> nodes;
  std::vector<MachineEntry> machines;
};

// Type definitions whose variables are logged and selected by the queries.
inline constexpr std::string_view kLoggedVariableTypes[] = {
    "BaseDataVariableType", "FiniteStateVariableType", "AnalogUnitRangeType"};

bool is_logged_type(std::string_view type_definition);

/// Parses the information-model XML subset:
///
///   <Nodes>
///     <Object NodeId=".." BrowseName=".." [TypeDefinition=".."]>
///       <Reference Kind="HasComponent|Organizes" Target=".."/>
///     </Object>
///     <Variable NodeId=".." BrowseName=".." TypeDefinition="..">...</Variable>
///     <MachinesFolder>
///       <Machine NodeId=".." Identity="iri-or-curie" [DisplayName=".."]/>
///     </MachinesFolder>
///   </Nodes>
///
/// Objects without a TypeDefinition get `BaseObjectType`. Malformed input
/// throws ParseError naming the element path; references or machine entries
/// naming an absent node throw Error(MissingEntity) naming the target.
NodeSet parse_nodeset(std::string_view document, const PrefixMap& prefixes = {});

std::string encode_node_id(std::string_view node_id);
Iri node_iri(const Namespaces& ns, std::string_view node_id);

/// Per node: OpcUa:nodeId, OpcUa:browseName and OpcUa:typeDefinition string
/// literals; per reference one hasComponent/organizes edge; per machine one
/// `machine-node owl:sameIndividualAs identity` link. Output is sorted.
std::vector<Triple> to_triples(const NodeSet& nodeset, const Namespaces& ns);

}  // namespace uatrace::nodeset
