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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uatrace/namespaces.hpp"
#include "uatrace/rdf.hpp"
#include "uatrace/timestamp.hpp"

namespace uatrace::process {

struct DataElement {
  Iri element;
  Iri type_description;
  Literal instance_value;

  friend bool operator==(const DataElement&, const DataElement&) = default;
};

struct ProductOutput {
  Iri product;
  Iri article;

  friend bool operator==(const ProductOutput&, const ProductOutput&) = default;
};

struct ProcessDescription {
  Iri process;
  Iri assigned_unit;
  Iri realized_procedure;
  Timestamp start_time;
  Timestamp end_time;
  std::vector<ProductOutput> product_outputs;
  std::vector<DataElement> extra_inputs;
  std::vector<DataElement> extra_outputs;

  friend bool operator==(const ProcessDescription&, const ProcessDescription&) = default;
};

enum class ProcedureLevel { Procedure, UnitProcedure, Operation, Phase };

std::string_view to_string(ProcedureLevel level);
std::optional<ProcedureLevel> procedure_level_from_string(std::string_view text);

// `unit rdf:type ISA88:Unit`.
void declare_unit(TripleStore& store, const Namespaces& ns, const Iri& unit);
// `procedure rdf:type ISA88:<level>`.
void declare_procedure(TripleStore& store, const Namespaces& ns, const Iri& procedure,
                       ProcedureLevel level);

/// Asserts one executed process:
///   process a VDI3682:Process
///   procedure ISA88:isRealizedInProcessStage process
///   unit VDI3682:isAssignedTo process
///   process VDI3682:hasInput start-DE   (type description OpcSS:StartTimeProcess)
///   process VDI3682:hasOutput end-DE    (type description OpcSS:EndTimeProcess)
///   process VDI3682:hasOutput product ; product OpcSS:hasProductType article
/// Each data element carries its value through
/// DINEN61360:hasInstanceDescription / DINEN61360:Value.
///
/// Nothing is inserted on failure: Error(Invariant) when start >= end,
/// Error(Duplicate) for a process already asserted, Error(MissingEntity)
/// when the unit or procedure has not been declared.
void assert_process(TripleStore& store, const Namespaces& ns, const ProcessDescription& desc);

/// Start and end time of an asserted process. Throws Error(MissingEntity)
/// naming StartTimeProcess or EndTimeProcess when that element is absent.
TimeWindow read_window(const TripleStore& store, const Namespaces& ns, const Iri& process);

struct ProcessFilter {
  std::optional<Iri> unit;
  std::optional<Iri> procedure;
  std::optional<Iri> article;
};

/// Processes matching every given criterion, ordered by start time (then
/// IRI). Processes without a readable window sort last.
std::vector<Iri> list_processes(const TripleStore& store, const Namespaces& ns,
                                const ProcessFilter& filter);

// ---------------------------------------------------------------------------
// Process ledger (JSON lines)

struct ProcedureDecl {
  Iri iri;
  ProcedureLevel level;

  friend bool operator==(const ProcedureDecl&, const ProcedureDecl&) = default;
};

struct Ledger {
  std::vector<Iri> units;
  std::vector<ProcedureDecl> procedures;
  std::vector<ProcessDescription> processes;

  friend bool operator==(const Ledger&, const Ledger&) = default;
};

/// One JSON object per line, discriminated by "kind":
///   {"kind":"unit","iri":..}
///   {"kind":"procedure","iri":..,"level":"UnitProcedure"}
///   {"kind":"process","process":..,"unit":..,"procedure":..,"start":..,"end":..,
///    "products":[{"product":..,"article":..}],
///    "inputs":[{"element":..,"type_description":..,"value":..,"datatype":..}],
///    "outputs":[..]}
/// IRI fields accept full IRIs or CURIEs bound in `prefixes`.
Ledger parse_ledger(std::string_view document, const PrefixMap& prefixes = {});
std::string write_ledger(const Ledger& ledger);

// Declares units and procedures, then asserts every process. Returns the
// number of processes asserted.
std::size_t load_ledger(TripleStore& store, const Namespaces& ns, const Ledger& ledger);

}  // namespace uatrace::process
