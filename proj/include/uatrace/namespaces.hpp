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

#include "uatrace/rdf.hpp"

namespace uatrace {

/// Namespace IRIs for the installed vocabularies and the sample-server
/// individuals. Defaults are fixed; a workspace config may override them.
struct Namespaces {
  std::string rdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
  std::string rdfs = "http://www.w3.org/2000/01/rdf-schema#";
  std::string owl = "http://www.w3.org/2002/07/owl#";
  std::string xsd = "http://www.w3.org/2001/XMLSchema#";
  std::string isa88 = "http://www.hsu-ifa.de/ontologies/ISA-TR88#";
  std::string vdi3682 = "http://www.hsu-ifa.de/ontologies/VDI3682#";
  std::string dinen61360 = "http://www.hsu-ifa.de/ontologies/DINEN61360#";
  std::string opcua = "http://opcfoundation.org/UA/";
  // Use-case namespace for units, procedures, processes and articles.
  std::string site = "http://example.org/umati/sample-server#";
  // Base for IRIs minted from OPC UA node ids: `<machines>/node/<encoded id>`.
  std::string machines = "http://example.org/umati/sample-server";

  Iri rdf_iri(std::string_view l) const { return Iri(rdf + std::string(l)); }
  Iri rdfs_iri(std::string_view l) const { return Iri(rdfs + std::string(l)); }
  Iri owl_iri(std::string_view l) const { return Iri(owl + std::string(l)); }
  Iri isa88_iri(std::string_view l) const { return Iri(isa88 + std::string(l)); }
  Iri vdi_iri(std::string_view l) const { return Iri(vdi3682 + std::string(l)); }
  Iri din_iri(std::string_view l) const { return Iri(dinen61360 + std::string(l)); }
  Iri ua_iri(std::string_view l) const { return Iri(opcua + std::string(l)); }
  Iri site_iri(std::string_view l) const { return Iri(site + std::string(l)); }

  Iri type() const { return rdf_iri("type"); }
  Iri subclass_of() const { return rdfs_iri("subClassOf"); }
  Iri same_individual_as() const { return owl_iri("sameIndividualAs"); }

  // Labels as written in the query listings: rdf, rdfs, owl, xsd, ISA88,
  // VDI3682, DINEN61360, OpcUa, OpcSS.
  PrefixMap prefix_map() const;

  // Overrides from `key = value` lines (keys: rdf, rdfs, owl, xsd, isa88,
  // vdi3682, dinen61360, opcua, site, machines). Lines starting with `#` are
  // comments.
  // Unknown keys throw ParseError.
  static Namespaces from_config(std::string_view text);
  std::string to_config() const;

  friend bool operator==(const Namespaces&, const Namespaces&) = default;
};

}  // namespace uatrace
