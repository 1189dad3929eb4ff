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

#include "uatrace/process_kg.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "uatrace/error.hpp"

namespace uatrace::process {

namespace {

constexpr std::pair<ProcedureLevel, std::string_view> kLevels[] = {
    {ProcedureLevel::Procedure, "Procedure"},
    {ProcedureLevel::UnitProcedure, "UnitProcedure"},
    {ProcedureLevel::Operation, "Operation"},
    {ProcedureLevel::Phase, "Phase"},
};

bool has_type(const TripleStore& store, const Namespaces& ns, const Iri& subject,
              const Iri& type) {
  return store.contains(Triple{subject, ns.type(), Term(type)});
}

void add_data_element(std::vector<Triple>& out, const Namespaces& ns, const Iri& process,
                      const Iri& direction, const DataElement& de) {
  Iri instance(de.element.str() + "_Instance");
  out.push_back({process, direction, Term(de.element)});
  out.push_back({de.element, ns.type(), Term(ns.din_iri("DataElement"))});
  out.push_back({de.element, ns.din_iri("hasTypeDescription"), Term(de.type_description)});
  out.push_back({de.element, ns.din_iri("hasInstanceDescription"), Term(instance)});
  out.push_back({instance, ns.type(), Term(ns.din_iri("InstanceDescription"))});
  out.push_back({instance, ns.din_iri("Value"), Term(de.instance_value)});
}

// Value of the first data element on `direction` whose type description is
// `type_description`.
std::optional<Literal> data_element_value(const TripleStore& store, const Namespaces& ns,
                                          const Iri& process, const Iri& direction,
                                          const Iri& type_description) {
  const Iri has_type_desc = ns.din_iri("hasTypeDescription");
  const Iri has_instance = ns.din_iri("hasInstanceDescription");
  const Iri value = ns.din_iri("Value");
  for (const auto& link : store.match(process, direction, std::nullopt)) {
    if (!link.object.is_iri()) continue;
    const Iri& de = link.object.iri();
    if (!store.contains(Triple{de, has_type_desc, Term(type_description)})) continue;
    for (const auto& inst : store.match(de, has_instance, std::nullopt)) {
      if (!inst.object.is_iri()) continue;
      for (const auto& v : store.match(inst.object.iri(), value, std::nullopt))
        if (v.object.is_literal()) return v.object.literal();
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(ProcedureLevel level) {
  for (const auto& [l, name] : kLevels)
    if (l == level) return name;
  return "Procedure";
}

std::optional<ProcedureLevel> procedure_level_from_string(std::string_view text) {
  for (const auto& [l, name] : kLevels)
    if (name == text) return l;
  return std::nullopt;
}

void declare_unit(TripleStore& store, const Namespaces& ns, const Iri& unit) {
  store.insert(Triple{unit, ns.type(), Term(ns.isa88_iri("Unit"))});
}

void declare_procedure(TripleStore& store, const Namespaces& ns, const Iri& procedure,
                       ProcedureLevel level) {
  store.insert(Triple{procedure, ns.type(), Term(ns.isa88_iri(to_string(level)))});
}

void assert_process(TripleStore& store, const Namespaces& ns, const ProcessDescription& desc) {
  if (!(desc.start_time < desc.end_time))
    throw Error(ErrorKind::Invariant, "process <" + desc.process.str() + ">: start " +
                                          desc.start_time.to_string() + " is not before end " +
                                          desc.end_time.to_string());
  if (has_type(store, ns, desc.process, ns.vdi_iri("Process")))
    throw Error(ErrorKind::Duplicate, "process <" + desc.process.str() + "> already asserted");
  if (!has_type(store, ns, desc.assigned_unit, ns.isa88_iri("Unit")))
    throw Error(ErrorKind::MissingEntity,
                "unit <" + desc.assigned_unit.str() + "> is not declared as ISA88:Unit");
  bool procedural = std::any_of(std::begin(kLevels), std::end(kLevels), [&](const auto& l) {
    return has_type(store, ns, desc.realized_procedure, ns.isa88_iri(l.second));
  });
  if (!procedural)
    throw Error(ErrorKind::MissingEntity, "procedure <" + desc.realized_procedure.str() +
                                              "> has no ISA-88 procedural type");

  std::vector<Triple> out;
  out.push_back({desc.process, ns.type(), Term(ns.vdi_iri("Process"))});
  out.push_back({desc.realized_procedure, ns.isa88_iri("isRealizedInProcessStage"),
                 Term(desc.process)});
  out.push_back({desc.assigned_unit, ns.vdi_iri("isAssignedTo"), Term(desc.process)});

  const Iri has_input = ns.vdi_iri("hasInput");
  const Iri has_output = ns.vdi_iri("hasOutput");
  add_data_element(out, ns, desc.process, has_input,
                   DataElement{Iri(desc.process.str() + "_StartTime"),
                               ns.site_iri("StartTimeProcess"),
                               Literal::date_time(desc.start_time)});
  add_data_element(out, ns, desc.process, has_output,
                   DataElement{Iri(desc.process.str() + "_EndTime"),
                               ns.site_iri("EndTimeProcess"), Literal::date_time(desc.end_time)});
  for (const auto& product : desc.product_outputs) {
    out.push_back({desc.process, has_output, Term(product.product)});
    out.push_back({product.product, ns.type(), Term(ns.vdi_iri("Product"))});
    out.push_back({product.product, ns.site_iri("hasProductType"), Term(product.article)});
  }
  for (const auto& de : desc.extra_inputs) add_data_element(out, ns, desc.process, has_input, de);
  for (const auto& de : desc.extra_outputs) add_data_element(out, ns, desc.process, has_output, de);
  for (const auto& t : out) store.insert(t);
}

TimeWindow read_window(const TripleStore& store, const Namespaces& ns, const Iri& process) {
  auto start = data_element_value(store, ns, process, ns.vdi_iri("hasInput"),
                                  ns.site_iri("StartTimeProcess"));
  if (!start)
    throw Error(ErrorKind::MissingEntity,
                "process <" + process.str() + "> has no StartTimeProcess data element");
  auto end = data_element_value(store, ns, process, ns.vdi_iri("hasOutput"),
                                ns.site_iri("EndTimeProcess"));
  if (!end)
    throw Error(ErrorKind::MissingEntity,
                "process <" + process.str() + "> has no EndTimeProcess data element");
  return TimeWindow{start->as_timestamp(), end->as_timestamp()};
}

std::vector<Iri> list_processes(const TripleStore& store, const Namespaces& ns,
                                const ProcessFilter& filter) {
  const Iri assigned = ns.vdi_iri("isAssignedTo");
  const Iri realized = ns.isa88_iri("isRealizedInProcessStage");
  const Iri has_output = ns.vdi_iri("hasOutput");
  const Iri product_type = ns.site_iri("hasProductType");

  struct Entry {
    std::optional<Timestamp> start;
    Iri process;
  };
  std::vector<Entry> entries;
  for (const auto& t : store.match(std::nullopt, ns.type(), Term(ns.vdi_iri("Process")))) {
    const Iri& p = t.subject;
    if (filter.unit && !store.contains(Triple{*filter.unit, assigned, Term(p)})) continue;
    if (filter.procedure && !store.contains(Triple{*filter.procedure, realized, Term(p)}))
      continue;
    if (filter.article) {
      bool found = false;
      for (const auto& out : store.match(p, has_output, std::nullopt)) {
        if (out.object.is_iri() &&
            store.contains(Triple{out.object.iri(), product_type, Term(*filter.article)})) {
          found = true;
          break;
        }
      }
      if (!found) continue;
    }
    std::optional<Timestamp> start;
    if (auto lit = data_element_value(store, ns, p, ns.vdi_iri("hasInput"),
                                      ns.site_iri("StartTimeProcess"))) {
      if (auto ts = Timestamp::parse(lit->lexical())) start = *ts;
    }
    entries.push_back({start, p});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.start.has_value() != b.start.has_value()) return a.start.has_value();
    if (a.start && *a.start != *b.start) return *a.start < *b.start;
    return a.process < b.process;
  });
  std::vector<Iri> out;
  for (auto& e : entries) out.push_back(std::move(e.process));
  return out;
}

// ---------------------------------------------------------------------------
// Ledger

namespace {

using nlohmann::json;

class LedgerReader {
 public:
  LedgerReader(const PrefixMap& prefixes, std::size_t line) : prefixes_(prefixes), line_(line) {}

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, 0, msg); }

  const json& field(const json& obj, const char* name) const {
    auto it = obj.find(name);
    if (it == obj.end()) fail(std::string("missing field \"") + name + "\"");
    return *it;
  }

  std::string text(const json& obj, const char* name) const {
    const json& v = field(obj, name);
    if (!v.is_string()) fail(std::string("field \"") + name + "\" must be a string");
    return v.get<std::string>();
  }

  Iri iri(const json& obj, const char* name) const {
    std::string value = text(obj, name);
    auto colon = value.find(':');
    if (colon != std::string::npos && prefixes_.namespace_of(value.substr(0, colon))) {
      if (auto expanded = prefixes_.expand(value)) return *expanded;
    }
    if (!Iri::is_valid(value)) fail("field \"" + std::string(name) + "\": invalid IRI '" + value + "'");
    return Iri(value);
  }

  Timestamp time(const json& obj, const char* name) const {
    std::string value = text(obj, name);
    auto ts = Timestamp::parse(value);
    if (!ts) fail("field \"" + std::string(name) + "\": invalid timestamp '" + value + "'");
    return *ts;
  }

  std::vector<DataElement> elements(const json& obj, const char* name) const {
    std::vector<DataElement> out;
    auto it = obj.find(name);
    if (it == obj.end()) return out;
    if (!it->is_array()) fail(std::string("field \"") + name + "\" must be an array");
    for (const auto& e : *it) {
      auto dt = datatype_from_keyword(e.value("datatype", "string"));
      if (!dt) fail("unknown datatype in \"" + std::string(name) + "\"");
      try {
        out.push_back(DataElement{iri(e, "element"), iri(e, "type_description"),
                                  Literal(text(e, "value"), *dt)});
      } catch (const ParseError& err) {
        if (err.line() != 0) throw;
        fail(err.what());
      }
    }
    return out;
  }

 private:
  const PrefixMap& prefixes_;
  std::size_t line_;
};

json element_json(const DataElement& de) {
  return json{{"element", de.element.str()},
              {"type_description", de.type_description.str()},
              {"value", de.instance_value.lexical()},
              {"datatype", std::string(keyword(de.instance_value.datatype()))}};
}

}  // namespace

Ledger parse_ledger(std::string_view document, const PrefixMap& prefixes) {
  Ledger ledger;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < document.size()) {
    auto end = document.find('\n', start);
    if (end == std::string_view::npos) end = document.size();
    std::string_view line = document.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    LedgerReader r(prefixes, line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      r.fail(std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) r.fail("expected a JSON object");
    std::string kind = r.text(obj, "kind");
    if (kind == "unit") {
      ledger.units.push_back(r.iri(obj, "iri"));
    } else if (kind == "procedure") {
      auto level = procedure_level_from_string(r.text(obj, "level"));
      if (!level) r.fail("unknown procedure level '" + r.text(obj, "level") + "'");
      ledger.procedures.push_back(ProcedureDecl{r.iri(obj, "iri"), *level});
    } else if (kind == "process") {
      ProcessDescription desc{r.iri(obj, "process"), r.iri(obj, "unit"),
                              r.iri(obj, "procedure"), r.time(obj, "start"),
                              r.time(obj, "end"), {}, {}, {}};
      if (auto it = obj.find("products"); it != obj.end()) {
        if (!it->is_array()) r.fail("field \"products\" must be an array");
        for (const auto& p : *it)
          desc.product_outputs.push_back(ProductOutput{r.iri(p, "product"), r.iri(p, "article")});
      }
      desc.extra_inputs = r.elements(obj, "inputs");
      desc.extra_outputs = r.elements(obj, "outputs");
      ledger.processes.push_back(std::move(desc));
    } else {
      r.fail("unknown record kind '" + kind + "'");
    }
  }
  return ledger;
}

std::string write_ledger(const Ledger& ledger) {
  std::string out;
  for (const auto& u : ledger.units) out += json{{"kind", "unit"}, {"iri", u.str()}}.dump() + "\n";
  for (const auto& p : ledger.procedures)
    out += json{{"kind", "procedure"}, {"iri", p.iri.str()},
                {"level", std::string(to_string(p.level))}}.dump() + "\n";
  for (const auto& d : ledger.processes) {
    json products = json::array();
    for (const auto& p : d.product_outputs)
      products.push_back(json{{"product", p.product.str()}, {"article", p.article.str()}});
    json obj{{"kind", "process"},
             {"process", d.process.str()},
             {"unit", d.assigned_unit.str()},
             {"procedure", d.realized_procedure.str()},
             {"start", d.start_time.to_string()},
             {"end", d.end_time.to_string()},
             {"products", products}};
    if (!d.extra_inputs.empty()) {
      json inputs = json::array();
      for (const auto& de : d.extra_inputs) inputs.push_back(element_json(de));
      obj["inputs"] = inputs;
    }
    if (!d.extra_outputs.empty()) {
      json outputs = json::array();
      for (const auto& de : d.extra_outputs) outputs.push_back(element_json(de));
      obj["outputs"] = outputs;
    }
    out += obj.dump() + "\n";
  }
  return out;
}

std::size_t load_ledger(TripleStore& store, const Namespaces& ns, const Ledger& ledger) {
  for (const auto& u : ledger.units) declare_unit(store, ns, u);
  for (const auto& p : ledger.procedures) declare_procedure(store, ns, p.iri, p.level);
  for (const auto& d : ledger.processes) assert_process(store, ns, d);
  return ledger.processes.size();
}

}  // namespace uatrace::process
