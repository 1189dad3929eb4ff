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

#include <cstddef>
#include <string>
#include <vector>

#include "uatrace/namespaces.hpp"
#include "uatrace/rdf.hpp"

namespace uatrace::vocab {

enum class TermKind { Class, Property };

struct VocabularyTerm {
  std::string local_name;
  TermKind kind;
};

struct Vocabulary {
  std::string label;  // prefix label, e.g. "ISA88"
  std::string ns;
  std::vector<VocabularyTerm> terms;
};

enum class AxiomKind { SubclassOf, SameIndividual };

struct AlignmentAxiom {
  AxiomKind kind;
  Iri lhs;
  Iri rhs;
};

// ISA-88, VDI 3682, DIN EN 61360, the OPC UA structural terms, the owl
// same-individual link, and the use-case terms of the site namespace.
std::vector<Vocabulary> standard_vocabularies(const Namespaces& ns);

// Subclass links between ISA-88 physical assets / process-model elements and
// the VDI 3682 TechnicalResource / ProcessOperator classes.
std::vector<AlignmentAxiom> alignment_axioms(const Namespaces& ns);

/// Declares every vocabulary term (`rdf:type owl:Class` or `rdf:Property`),
/// the alignment axioms, the start/end time type descriptions, and binds the
/// standard prefixes. Idempotent.
void install(TripleStore& store, const Namespaces& ns);

struct MaterializationStats {
  std::size_t iterations = 0;  // passes run, including the final no-change pass
  std::size_t added = 0;
};

/// Asserts `x rdf:type D` for every `x rdf:type C` with `C rdfs:subClassOf D`
/// and closes `owl:sameIndividualAs` under symmetry, repeating until a pass
/// adds nothing. Never removes triples.
MaterializationStats materialize_alignment(TripleStore& store, const Namespaces& ns);

}  // namespace uatrace::vocab
