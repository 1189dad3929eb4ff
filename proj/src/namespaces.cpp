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

#include "uatrace/namespaces.hpp"

#include <utility>

#include "uatrace/error.hpp"

namespace uatrace {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

template <typename F>
void for_each_field(Namespaces& ns, F&& f) {
  f("rdf", ns.rdf);
  f("rdfs", ns.rdfs);
  f("owl", ns.owl);
  f("xsd", ns.xsd);
  f("isa88", ns.isa88);
  f("vdi3682", ns.vdi3682);
  f("dinen61360", ns.dinen61360);
  f("opcua", ns.opcua);
  f("site", ns.site);
  f("machines", ns.machines);
}

}  // namespace

PrefixMap Namespaces::prefix_map() const {
  PrefixMap map;
  map.bind("rdf", rdf);
  map.bind("rdfs", rdfs);
  map.bind("owl", owl);
  map.bind("xsd", xsd);
  map.bind("ISA88", isa88);
  map.bind("VDI3682", vdi3682);
  map.bind("DINEN61360", dinen61360);
  map.bind("OpcUa", opcua);
  map.bind("OpcSS", site);
  return map;
}

Namespaces Namespaces::from_config(std::string_view text) {
  Namespaces ns;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, 0, "expected 'key = value'");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (!Iri::is_valid(value))
      throw ParseError(line_no, 0, "namespace '" + std::string(value) + "' is not an IRI");
    bool known = false;
    for_each_field(ns, [&](std::string_view name, std::string& field) {
      if (name == key) {
        field = std::string(value);
        known = true;
      }
    });
    if (!known) throw ParseError(line_no, 0, "unknown config key '" + std::string(key) + "'");
  }
  return ns;
}

std::string Namespaces::to_config() const {
  std::string out;
  Namespaces copy = *this;
  for_each_field(copy, [&](std::string_view name, std::string& field) {
    out += std::string(name) + " = " + field + "\n";
  });
  return out;
}

}  // namespace uatrace
