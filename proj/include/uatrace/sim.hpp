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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "uatrace/namespaces.hpp"
#include "uatrace/process_kg.hpp"
#include "uatrace/rdf.hpp"
#include "uatrace/timestamp.hpp"
#include "uatrace/ts_store.hpp"

namespace uatrace::sim {

struct IntRange {
  std::int64_t min = 1;
  std::int64_t max = 1;
};

struct VariableConfig {
  std::string browse_name;
  std::string type_definition = "BaseDataVariableType";
  ValueKind value_kind = ValueKind::Boolean;
  std::string node_id;              // assigned when empty
  std::vector<std::string> values;  // enumeration for string variables
};

struct ProcedureConfig {
  std::string name;
  process::ProcedureLevel level = process::ProcedureLevel::UnitProcedure;
};

struct MachineConfig {
  std::string name;     // ISA-88 unit local name in the site namespace
  std::string node_id;  // machine object node id; assigned when empty
  std::vector<VariableConfig> variables;
  std::vector<ProcedureConfig> procedures;
};

struct ProcessConfig {
  std::size_t count = 0;
  IntRange duration_ms{60'000, 600'000};
  IntRange gap_ms{0, 120'000};
  std::vector<std::string> articles;
  bool allow_overlap = false;
};

struct EventConfig {
  // Exactly this many events when set; otherwise events run until the last
  // process has ended.
  std::optional<std::size_t> count;
  IntRange interval_ms{500, 5'000};
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  Timestamp start;
  std::vector<MachineConfig> machines;
  ProcessConfig processes;
  EventConfig events;
};

/// Reads the JSON scenario layout:
///   {"seed":42,"start":"2022-02-28T08:00:00Z",
///    "machines":[{"name":..,"node_id":..,
///                 "variables":[{"browse_name":..,"type_definition":..,
///                               "value_kind":"boolean","node_id":..,"values":[..]}],
///                 "procedures":[{"name":..,"level":"UnitProcedure"}]}],
///    "processes":{"count":..,"duration_ms":{"min":..,"max":..},
///                 "gap_ms":{..},"articles":[..],"allow_overlap":false},
///    "events":{"count":..,"interval_ms":{"min":..,"max":..}}}
/// Throws ParseError for malformed JSON and Error(Invariant) for
/// configurations violating the constraints checked by validate().
ScenarioConfig parse_config(std::string_view json);
std::string write_config(const ScenarioConfig& config);

// Throws Error(Invariant): no machines, empty names, duplicate node ids,
// non-positive durations or intervals, processes without procedures or
// articles.
void validate(const ScenarioConfig& config);

/// 64-bit Mersenne Twister with its own bounded draw, so a seed produces the
/// same stream with every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  // Uniform in [lo, hi]; requires lo <= hi.
  std::int64_t uniform(std::int64_t lo, std::int64_t hi);
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform(0, std::int64_t(n) - 1)); }
  bool coin() { return (next() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

struct GroundTruthVariable {
  std::string node_id;
  std::string browse_name;
  std::string type_definition;
  bool logged = false;
};

struct GroundTruthMachine {
  Iri unit;
  std::string machine_node;
  std::vector<GroundTruthVariable> variables;
};

struct GroundTruthProcess {
  Iri process;
  Iri unit;
  Iri procedure;
  Iri article;
  TimeWindow window;
  // Indices into GroundTruth::events of every logged-variable change of the
  // unit's machine inside the closed window.
  std::vector<std::size_t> events;
};

struct GroundTruth {
  std::uint64_t seed = 0;
  std::vector<GroundTruthMachine> machines;
  std::vector<GroundTruthProcess> processes;
  std::vector<ValueChange> events;  // log rows in emission order
};

struct Scenario {
  std::string nodeset_xml;
  std::string processes_jsonl;
  std::string log_csv;
  std::string ground_truth_json;
  GroundTruth truth;
};

// Pure function of `config`.
Scenario generate(const ScenarioConfig& config, const Namespaces& ns = {});

std::string write_ground_truth(const GroundTruth& truth);
GroundTruth parse_ground_truth(std::string_view json);

inline constexpr std::string_view kNodesetFile = "nodeset.xml";
inline constexpr std::string_view kProcessesFile = "processes.jsonl";
inline constexpr std::string_view kLogFile = "log.csv";
inline constexpr std::string_view kGroundTruthFile = "ground_truth.json";

// Writes the four artifacts into `directory`, creating it. Error(Io) on failure.
void write_scenario(const Scenario& scenario, const std::filesystem::path& directory);

}  // namespace uatrace::sim
