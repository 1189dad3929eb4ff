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

#include "uatrace/vocab.hpp"

#include <set>
#include <utility>

#include "uatrace/error.hpp"

namespace uatrace::vocab {

namespace {

Vocabulary make(std::string label, std::string ns, std::vector<std::string> classes,
                std::vector<std::string> properties) {
  Vocabulary v{std::move(label), std::move(ns), {}};
  for (auto& c : classes) v.terms.push_back({std::move(c), TermKind::Class});
  for (auto& p : properties) v.terms.push_back({std::move(p), TermKind::Property});
  return v;
}

}  // namespace

std::vector<Vocabulary> standard_vocabularies(const Namespaces& ns) {
  std::vector<Vocabulary> out;
  out.push_back(make("ISA88", ns.isa88,
                     {// physical model
                      "Enterprise", "Site", "Area", "ProcessCell", "Unit",
                      // procedural control model
                      "Procedure", "UnitProcedure", "Operation", "Phase",
                      // process model
                      "Process", "ProcessStage", "ProcessOperation", "ProcessAction"},
                     {"isRealizedInProcessStage"}));
  out.push_back(make("VDI3682", ns.vdi3682,
                     {"Process", "ProcessOperator", "TechnicalResource", "Product", "Energy",
                      "Information"},
                     {"hasInput", "hasOutput", "isAssignedTo"}));
  out.push_back(make("DINEN61360", ns.dinen61360,
                     {"DataElement", "TypeDescription", "InstanceDescription"},
                     {"hasTypeDescription", "hasInstanceDescription", "Value"}));
  out.push_back(make("OpcUa", ns.opcua, {"BaseObjectType", "BaseVariableType"},
                     {"hasComponent", "organizes", "browseName", "nodeId", "typeDefinition",
                      "histValues"}));
  out.push_back(make("owl", ns.owl, {}, {"sameIndividualAs"}));
  out.push_back(make("OpcSS", ns.site, {}, {"hasProductType"}));
  return out;
}

std::vector<AlignmentAxiom> alignment_axioms(const Namespaces& ns) {
  std::vector<AlignmentAxiom> out;
  for (const char* asset : {"ProcessCell", "Unit"})
    out.push_back({AxiomKind::SubclassOf, ns.isa88_iri(asset), ns.vdi_iri("TechnicalResource")});
  for (const char* element : {"Process", "ProcessStage", "ProcessOperation", "ProcessAction"})
    out.push_back({AxiomKind::SubclassOf, ns.isa88_iri(element), ns.vdi_iri("ProcessOperator")});
  return out;
}

void install(TripleStore& store, const Namespaces& ns) {
  store.prefixes().merge(ns.prefix_map());
  const Iri type = ns.type();
  const Iri owl_class = ns.owl_iri("Class");
  const Iri rdf_property = ns.rdf_iri("Property");
  for (const auto& vocabulary : standard_vocabularies(ns)) {
    std::set<std::string> seen;
    for (const auto& term : vocabulary.terms) {
      if (!seen.insert(term.local_name).second)
        throw Error(ErrorKind::Invariant,
                    "duplicate term " + vocabulary.label + ":" + term.local_name);
      store.insert(Triple{Iri(vocabulary.ns + term.local_name), type,
                          Term(term.kind == TermKind::Class ? owl_class : rdf_property)});
    }
  }
  const Iri same = ns.same_individual_as();
  for (const auto& axiom : alignment_axioms(ns)) {
    if (axiom.lhs == axiom.rhs)
      throw Error(ErrorKind::Invariant, "reflexive alignment axiom on <" + axiom.lhs.str() + ">");
    store.insert(Triple{axiom.lhs,
                        axiom.kind == AxiomKind::SubclassOf ? ns.subclass_of() : same,
                        Term(axiom.rhs)});
  }
  const Iri type_description = ns.din_iri("TypeDescription");
  store.insert(Triple{ns.site_iri("StartTimeProcess"), type, Term(type_description)});
  store.insert(Triple{ns.site_iri("EndTimeProcess"), type, Term(type_description)});
}

MaterializationStats materialize_alignment(TripleStore& store, const Namespaces& ns) {
  const Iri type = ns.type();
  const Iri subclass = ns.subclass_of();
  const Iri same = ns.same_individual_as();
  MaterializationStats stats;
  for (;;) {
    ++stats.iterations;
    std::vector<Triple> inferred;
    for (const auto& axiom : store.match(std::nullopt, subclass, std::nullopt)) {
      if (!axiom.object.is_iri()) continue;
      const Iri& super = axiom.object.iri();
      store.visit(std::nullopt, type, Term(axiom.subject),
                  [&](const Iri& x, const Iri&, const Term&) {
                    inferred.push_back(Triple{x, type, Term(super)});
                  });
    }
    store.visit(std::nullopt, same, std::nullopt, [&](const Iri& u, const Iri&, const Term& v) {
      if (v.is_iri()) inferred.push_back(Triple{v.iri(), same, Term(u)});
    });
    std::size_t added = 0;
    for (const auto& t : inferred) added += store.insert(t) ? 1 : 0;
    stats.added += added;
    if (added == 0) break;
  }
  return stats;
}

}  // namespace uatrace::vocab
