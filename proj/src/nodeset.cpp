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

#include "uatrace/nodeset.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_set>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "uatrace/error.hpp"

namespace uatrace::nodeset {

namespace pt = boost::property_tree;

namespace {

constexpr std::string_view kAttrs = "<xmlattr>";

std::string attribute(const pt::ptree& element, const char* name) {
  auto attrs = element.get_child_optional(std::string(kAttrs));
  if (!attrs) return {};
  return attrs->get<std::string>(name, "");
}

std::string require(const pt::ptree& element, const char* name, const std::string& path) {
  std::string value = attribute(element, name);
  if (value.empty())
    throw ParseError(0, 0, path + ": missing attribute " + std::string(name));
  return value;
}

ReferenceKind parse_kind(const std::string& kind, const std::string& path) {
  if (kind == "HasComponent" || kind == "hasComponent") return ReferenceKind::HasComponent;
  if (kind == "Organizes" || kind == "organizes") return ReferenceKind::Organizes;
  throw ParseError(0, 0, path + ": unknown reference kind '" + kind + "'");
}

Iri resolve_identity(const std::string& text, const PrefixMap& prefixes, const std::string& path) {
  if (auto curie = prefixes.expand(text)) return *curie;
  if (Iri::is_valid(text)) return Iri(text);
  throw ParseError(0, 0, path + ": Identity '" + text + "' is neither an IRI nor a known CURIE");
}

// Counts siblings so paths read /Nodes/Variable[3].
class PathCounter {
 public:
  std::string next(const std::string& parent, const std::string& name) {
    return parent + "/" + name + "[" + std::to_string(++counts_[name]) + "]";
  }

 private:
  std::map<std::string, int> counts_;
};

}  // namespace

bool is_logged_type(std::string_view type_definition) {
  return std::find(std::begin(kLoggedVariableTypes), std::end(kLoggedVariableTypes),
                   type_definition) != std::end(kLoggedVariableTypes);
}

NodeSet parse_nodeset(std::string_view document, const PrefixMap& prefixes) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(document)};
    pt::read_xml(in, tree, pt::xml_parser::no_comments | pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(e.line(), 0, "malformed XML: " + e.message());
  }

  auto root_it = tree.find("Nodes");
  if (root_it == tree.not_found()) {
    throw ParseError(0, 0, "/: expected root element <Nodes>");
  }
  for (const auto& [name, _] : tree) {
    if (name != "Nodes")
      throw ParseError(0, 0, "/: unexpected top-level element <" + name + ">");
  }

  NodeSet out;
  std::unordered_set<std::string> ids;
  PathCounter counter;
  const std::string root = "/Nodes";

  for (const auto& [name, element] : root_it->second) {
    if (name == kAttrs) continue;
    std::string path = counter.next(root, name);
    if (name == "Object" || name == "Variable") {
      UaNode node;
      node.node_class = name == "Object" ? NodeClass::Object : NodeClass::Variable;
      node.node_id = require(element, "NodeId", path);
      node.browse_name = require(element, "BrowseName", path);
      node.type_definition = attribute(element, "TypeDefinition");
      if (node.type_definition.empty()) {
        if (node.node_class == NodeClass::Variable)
          throw ParseError(0, 0, path + ": missing attribute TypeDefinition");
        node.type_definition = "BaseObjectType";
      }
      if (!ids.insert(node.node_id).second)
        throw ParseError(0, 0, path + ": duplicate NodeId '" + node.node_id + "'");
      PathCounter child_counter;
      for (const auto& [child_name, child] : element) {
        if (child_name == kAttrs) continue;
        std::string child_path = child_counter.next(path, child_name);
        if (child_name != "Reference")
          throw ParseError(0, 0, child_path + ": unexpected element");
        node.references.push_back(ReferenceEdge{
            parse_kind(require(child, "Kind", child_path), child_path),
            require(child, "Target", child_path)});
      }
      out.nodes.push_back(std::move(node));
    } else if (name == "MachinesFolder") {
      PathCounter child_counter;
      for (const auto& [child_name, child] : element) {
        if (child_name == kAttrs) continue;
        std::string child_path = child_counter.next(path, child_name);
        if (child_name != "Machine")
          throw ParseError(0, 0, child_path + ": unexpected element");
        std::string node_id = require(child, "NodeId", child_path);
        Iri identity = resolve_identity(require(child, "Identity", child_path), prefixes,
                                        child_path);
        std::string display = attribute(child, "DisplayName");
        out.machines.push_back(
            MachineEntry{std::move(node_id), std::move(identity), std::move(display)});
      }
    } else {
      throw ParseError(0, 0, path + ": unexpected element");
    }
  }

  for (const auto& node : out.nodes) {
    for (const auto& ref : node.references) {
      if (!ids.count(ref.target))
        throw Error(ErrorKind::MissingEntity, "dangling reference from '" + node.node_id +
                                                  "' to missing node '" + ref.target + "'");
    }
  }
  for (auto& machine : out.machines) {
    if (!ids.count(machine.machine_node))
      throw Error(ErrorKind::MissingEntity,
                  "machine entry names missing node '" + machine.machine_node + "'");
    if (machine.display_name.empty()) {
      for (const auto& node : out.nodes)
        if (node.node_id == machine.machine_node) machine.display_name = node.browse_name;
    }
  }
  return out;
}

std::string encode_node_id(std::string_view node_id) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : node_id) {
    bool unreserved = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                      (c >= '0' && c <= '9') || c == '-' || c == '.' || c == '_' || c == '~';
    if (unreserved) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xf];
    }
  }
  return out;
}

Iri node_iri(const Namespaces& ns, std::string_view node_id) {
  return Iri(ns.machines + "/node/" + encode_node_id(node_id));
}

std::vector<Triple> to_triples(const NodeSet& nodeset, const Namespaces& ns) {
  const Iri node_id_p = ns.ua_iri("nodeId");
  const Iri browse_name_p = ns.ua_iri("browseName");
  const Iri type_definition_p = ns.ua_iri("typeDefinition");
  const Iri has_component_p = ns.ua_iri("hasComponent");
  const Iri organizes_p = ns.ua_iri("organizes");
  const Iri same_p = ns.same_individual_as();

  std::vector<Triple> out;
  for (const auto& node : nodeset.nodes) {
    Iri subject = node_iri(ns, node.node_id);
    out.push_back({subject, node_id_p, Term(Literal::string(node.node_id))});
    out.push_back({subject, browse_name_p, Term(Literal::string(node.browse_name))});
    out.push_back({subject, type_definition_p, Term(Literal::string(node.type_definition))});
    for (const auto& ref : node.references) {
      out.push_back({subject,
                     ref.kind == ReferenceKind::HasComponent ? has_component_p : organizes_p,
                     Term(node_iri(ns, ref.target))});
    }
  }
  for (const auto& machine : nodeset.machines)
    out.push_back({node_iri(ns, machine.machine_node), same_p, Term(machine.identity_iri)});
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace uatrace::nodeset
