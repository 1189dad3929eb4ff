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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "uatrace/rdf.hpp"
#include "uatrace/timestamp.hpp"

namespace uatrace {

enum class ValueKind { Boolean, Integer, Double, String };

using Value = std::variant<bool, std::int64_t, double, std::string>;

ValueKind kind_of(const Value& v);
std::string_view to_string(ValueKind kind);
std::optional<ValueKind> value_kind_from_string(std::string_view text);

// Lexical form used in the log CSV and in trace exports.
std::string format_value(const Value& v);
// Throws ParseError when `lexical` does not fit `kind`.
Value parse_value(std::string_view lexical, ValueKind kind);
Literal to_literal(const Value& v);
// Inverse of to_literal; dateTime literals become their lexical string.
Value from_literal(const Literal& lit);

struct ValueChange {
  Timestamp timestamp;
  std::string node_id;
  Value value;

  friend bool operator==(const ValueChange&, const ValueChange&) = default;
};

// A stored change plus its global append sequence number.
struct LoggedChange {
  ValueChange change;
  std::uint64_t sequence = 0;
};

struct IngestReport {
  std::size_t accepted = 0;
  struct RowError {
    std::size_t line;
    std::string message;
  };
  std::vector<RowError> errors;
};

inline constexpr std::string_view kLogHeader = "time,node_id,value,value_kind";

/// Append-only store of variable value changes keyed by node id.
///
/// Each series is kept in append order and sorted by timestamp on first read
/// after an out-of-order append; equal timestamps keep append order.
/// Appends and reads may come from different threads.
///
/// A store opened on a directory writes every change to per-series segment
/// files (`series/<encoded node id>/<n>.seg`) and replays them on open.
class TsStore {
 public:
  TsStore();
  ~TsStore();
  TsStore(TsStore&&) noexcept;
  TsStore& operator=(TsStore&&) noexcept;

  static TsStore open(const std::filesystem::path& directory);

  // Throws Error(Invariant) on an empty node id. Returns the sequence number.
  std::uint64_t append(ValueChange change);

  // Closed window [start, end], ascending, ties in append order.
  // Throws Error(InvalidRange) when start > end.
  std::vector<ValueChange> range_query(std::string_view node_id, Timestamp start,
                                       Timestamp end) const;
  std::vector<LoggedChange> range_query_logged(std::string_view node_id, Timestamp start,
                                               Timestamp end) const;
  // Half-open window (after, until].
  std::vector<ValueChange> range_query_after(std::string_view node_id, Timestamp after,
                                             Timestamp until) const;

  std::size_t size() const;
  std::size_t series_size(std::string_view node_id) const;
  std::vector<std::string> node_ids() const;

  /// Bulk append from the log CSV (`time,node_id,value,value_kind` header).
  /// Bad rows are reported with their line number; good rows are kept.
  /// A missing or wrong header throws ParseError.
  IngestReport ingest_log(std::string_view document);

  /// Header plus all rows ordered by (time, node id, append order).
  std::string export_log() const;

  void flush();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace uatrace
