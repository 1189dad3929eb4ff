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

#include "uatrace/ts_store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>

#include "uatrace/detail/text.hpp"
#include "uatrace/error.hpp"

namespace uatrace {

// ---------------------------------------------------------------------------
// Values

ValueKind kind_of(const Value& v) { return static_cast<ValueKind>(v.index()); }

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::Boolean: return "boolean";
    case ValueKind::Integer: return "integer";
    case ValueKind::Double: return "double";
    case ValueKind::String: return "string";
  }
  return "string";
}

std::optional<ValueKind> value_kind_from_string(std::string_view text) {
  if (text == "boolean") return ValueKind::Boolean;
  if (text == "integer") return ValueKind::Integer;
  if (text == "double") return ValueKind::Double;
  if (text == "string") return ValueKind::String;
  return std::nullopt;
}

std::string format_value(const Value& v) {
  switch (kind_of(v)) {
    case ValueKind::Boolean: return std::get<bool>(v) ? "true" : "false";
    case ValueKind::Integer: return std::to_string(std::get<std::int64_t>(v));
    case ValueKind::Double: return detail::format_double(std::get<double>(v));
    case ValueKind::String: return std::get<std::string>(v);
  }
  return {};
}

Value parse_value(std::string_view lexical, ValueKind kind) {
  auto bad = [&] {
    return ParseError(0, 0, "invalid " + std::string(to_string(kind)) + " value '" +
                                std::string(lexical) + "'");
  };
  switch (kind) {
    case ValueKind::Boolean:
      if (lexical == "true") return true;
      if (lexical == "false") return false;
      throw bad();
    case ValueKind::Integer: {
      std::int64_t v = 0;
      auto res = std::from_chars(lexical.data(), lexical.data() + lexical.size(), v);
      if (lexical.empty() || res.ec != std::errc{} || res.ptr != lexical.data() + lexical.size())
        throw bad();
      return v;
    }
    case ValueKind::Double: {
      double v = 0;
      auto res = std::from_chars(lexical.data(), lexical.data() + lexical.size(), v);
      if (lexical.empty() || res.ec != std::errc{} ||
          res.ptr != lexical.data() + lexical.size() || !std::isfinite(v))
        throw bad();
      return v;
    }
    case ValueKind::String:
      return std::string(lexical);
  }
  throw bad();
}

Literal to_literal(const Value& v) {
  switch (kind_of(v)) {
    case ValueKind::Boolean: return Literal::boolean(std::get<bool>(v));
    case ValueKind::Integer: return Literal::integer(std::get<std::int64_t>(v));
    case ValueKind::Double: return Literal::real(std::get<double>(v));
    case ValueKind::String: return Literal::string(std::get<std::string>(v));
  }
  return Literal::string({});
}

Value from_literal(const Literal& lit) {
  switch (lit.datatype()) {
    case Datatype::Boolean: return lit.as_bool();
    case Datatype::Integer: return lit.as_integer();
    case Datatype::Double: return lit.as_double();
    default: return lit.lexical();
  }
}

// ---------------------------------------------------------------------------
// Store

namespace {

constexpr std::size_t kSegmentRecords = 100000;

struct Record {
  Timestamp timestamp;
  std::uint64_t sequence;
  Value value;
};

struct Series {
  std::vector<Record> records;
  bool sorted = true;
};

struct Writer {
  std::ofstream out;
  std::size_t segment = 0;
  std::size_t records = 0;
};

std::string segment_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu.seg", index);
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

struct TsStore::Impl {
  mutable std::shared_mutex mutex;
  mutable std::map<std::string, Series, std::less<>> series;
  std::size_t total = 0;
  std::uint64_t next_sequence = 0;

  std::optional<std::filesystem::path> directory;
  std::map<std::string, Writer> writers;

  void add(std::string node_id, Timestamp ts, std::uint64_t seq, Value value) {
    auto& s = series[node_id];
    if (!s.records.empty() && s.records.back().timestamp > ts) s.sorted = false;
    s.records.push_back(Record{ts, seq, std::move(value)});
    ++total;
    next_sequence = std::max(next_sequence, seq + 1);
  }

  void persist(const std::string& node_id, const Record& r) {
    if (!directory) return;
    auto [it, inserted] = writers.try_emplace(node_id);
    Writer& w = it->second;
    if (inserted || w.records >= kSegmentRecords) {
      auto dir = *directory / "series" / detail::percent_encode(node_id);
      std::filesystem::create_directories(dir);
      if (!inserted) {
        w.out.close();
        ++w.segment;
        w.records = 0;
      } else {
        // Continue the newest existing segment.
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
          auto stem = entry.path().stem().string();
          std::size_t index = 0;
          auto res = std::from_chars(stem.data(), stem.data() + stem.size(), index);
          if (res.ec == std::errc{} && index >= w.segment) w.segment = index;
        }
        auto existing = dir / segment_name(w.segment);
        if (std::filesystem::exists(existing)) {
          auto text = read_file(existing);
          w.records = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
        }
      }
      w.out.open(dir / segment_name(w.segment), std::ios::app | std::ios::binary);
      if (!w.out) throw Error(ErrorKind::Io, "cannot open segment in " + dir.string());
    }
    Value v = r.value;
    w.out << r.sequence << ',' << r.timestamp.to_string() << ','
          << detail::csv_escape(format_value(v)) << ',' << to_string(kind_of(v)) << '\n';
    ++w.records;
  }

  void flush() {
    for (auto& [_, w] : writers) {
      w.out.flush();
      if (!w.out) throw Error(ErrorKind::Io, "failed writing segment");
    }
  }

  // Caller holds the lock exclusively.
  static void ensure_sorted(Series& s) {
    if (s.sorted) return;
    std::stable_sort(s.records.begin(), s.records.end(),
                     [](const Record& a, const Record& b) { return a.timestamp < b.timestamp; });
    s.sorted = true;
  }

  template <typename F>
  void with_sorted(std::string_view node_id, F&& f) const {
    {
      std::shared_lock lock(mutex);
      auto it = series.find(node_id);
      if (it == series.end()) return;
      if (it->second.sorted) {
        f(it->second);
        return;
      }
    }
    std::unique_lock lock(mutex);
    auto it = series.find(node_id);
    if (it == series.end()) return;
    ensure_sorted(it->second);
    f(it->second);
  }
};

TsStore::TsStore() : impl_(std::make_unique<Impl>()) {}
TsStore::~TsStore() {
  if (impl_) {
    try {
      impl_->flush();
    } catch (...) {
    }
  }
}
TsStore::TsStore(TsStore&&) noexcept = default;
TsStore& TsStore::operator=(TsStore&&) noexcept = default;

TsStore TsStore::open(const std::filesystem::path& directory) {
  TsStore store;
  auto series_dir = directory / "series";
  std::error_code ec;
  std::filesystem::create_directories(series_dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + series_dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(series_dir))
    if (entry.is_directory()) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());

  for (const auto& dir : dirs) {
    auto node_id = detail::percent_decode(dir.filename().string());
    if (!node_id || node_id->empty())
      throw Error(ErrorKind::Io, "unexpected series directory " + dir.string());
    std::vector<std::filesystem::path> segments;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
      if (entry.path().extension() == ".seg") segments.push_back(entry.path());
    std::sort(segments.begin(), segments.end());
    for (const auto& segment : segments) {
      std::vector<detail::CsvError> errors;
      auto records = detail::parse_csv(read_file(segment), errors);
      if (!errors.empty())
        throw Error(ErrorKind::Io, segment.string() + ": line " +
                                       std::to_string(errors.front().line) + ": " +
                                       errors.front().message);
      for (const auto& rec : records) {
        auto corrupt = [&](const std::string& why) {
          return Error(ErrorKind::Io, segment.string() + ": line " + std::to_string(rec.line) +
                                          ": " + why);
        };
        if (rec.fields.size() != 4) throw corrupt("expected 4 fields");
        std::uint64_t seq = 0;
        const auto& f0 = rec.fields[0];
        auto res = std::from_chars(f0.data(), f0.data() + f0.size(), seq);
        if (res.ec != std::errc{} || res.ptr != f0.data() + f0.size())
          throw corrupt("bad sequence number");
        auto ts = Timestamp::parse(rec.fields[1]);
        auto kind = value_kind_from_string(rec.fields[3]);
        if (!ts || !kind) throw corrupt("bad timestamp or value kind");
        try {
          store.impl_->add(*node_id, *ts, seq, parse_value(rec.fields[2], *kind));
        } catch (const ParseError& e) {
          throw corrupt(e.what());
        }
      }
    }
  }
  store.impl_->directory = directory;
  return store;
}

std::uint64_t TsStore::append(ValueChange change) {
  if (change.node_id.empty()) throw Error(ErrorKind::Invariant, "value change without node id");
  std::unique_lock lock(impl_->mutex);
  std::uint64_t seq = impl_->next_sequence;
  Record r{change.timestamp, seq, change.value};
  impl_->persist(change.node_id, r);
  impl_->flush();
  impl_->add(std::move(change.node_id), change.timestamp, seq, std::move(change.value));
  return seq;
}

std::vector<LoggedChange> TsStore::range_query_logged(std::string_view node_id, Timestamp start,
                                                      Timestamp end) const {
  if (start > end)
    throw Error(ErrorKind::InvalidRange, "invalid range: start " + start.to_string() +
                                             " is after end " + end.to_string());
  std::vector<LoggedChange> out;
  impl_->with_sorted(node_id, [&](const Series& s) {
    auto by_time = [](const Record& r, Timestamp t) { return r.timestamp < t; };
    auto it = std::lower_bound(s.records.begin(), s.records.end(), start, by_time);
    for (; it != s.records.end() && it->timestamp <= end; ++it)
      out.push_back(LoggedChange{ValueChange{it->timestamp, std::string(node_id), it->value},
                                 it->sequence});
  });
  return out;
}

std::vector<ValueChange> TsStore::range_query(std::string_view node_id, Timestamp start,
                                              Timestamp end) const {
  std::vector<ValueChange> out;
  for (auto& logged : range_query_logged(node_id, start, end))
    out.push_back(std::move(logged.change));
  return out;
}

std::vector<ValueChange> TsStore::range_query_after(std::string_view node_id, Timestamp after,
                                                    Timestamp until) const {
  if (after >= until) {
    if (after > until)
      throw Error(ErrorKind::InvalidRange, "invalid range: " + after.to_string() + " is after " +
                                               until.to_string());
    return {};
  }
  return range_query(node_id, after + 1, until);
}

std::size_t TsStore::size() const {
  std::shared_lock lock(impl_->mutex);
  return impl_->total;
}

std::size_t TsStore::series_size(std::string_view node_id) const {
  std::shared_lock lock(impl_->mutex);
  auto it = impl_->series.find(node_id);
  return it == impl_->series.end() ? 0 : it->second.records.size();
}

std::vector<std::string> TsStore::node_ids() const {
  std::shared_lock lock(impl_->mutex);
  std::vector<std::string> out;
  for (const auto& [id, _] : impl_->series) out.push_back(id);
  return out;
}

IngestReport TsStore::ingest_log(std::string_view document) {
  IngestReport report;
  if (document.empty()) return report;
  std::vector<detail::CsvError> csv_errors;
  auto records = detail::parse_csv(document, csv_errors);
  for (const auto& e : csv_errors) report.errors.push_back({e.line, e.message});
  if (records.empty() || records.front().line != 1 ||
      records.front().fields != std::vector<std::string>{"time", "node_id", "value", "value_kind"})
    throw ParseError(1, 0, "expected log header '" + std::string(kLogHeader) + "'");

  std::unique_lock lock(impl_->mutex);
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& rec = records[i];
    auto reject = [&](std::string why) { report.errors.push_back({rec.line, std::move(why)}); };
    if (rec.fields.size() != 4) {
      reject("expected 4 fields, got " + std::to_string(rec.fields.size()));
      continue;
    }
    auto ts = Timestamp::parse(rec.fields[0]);
    if (!ts) {
      reject("invalid timestamp '" + rec.fields[0] + "'");
      continue;
    }
    if (rec.fields[1].empty()) {
      reject("empty node_id");
      continue;
    }
    auto kind = value_kind_from_string(rec.fields[3]);
    if (!kind) {
      reject("unknown value_kind '" + rec.fields[3] + "'");
      continue;
    }
    Value value;
    try {
      value = parse_value(rec.fields[2], *kind);
    } catch (const ParseError& e) {
      reject(e.what());
      continue;
    }
    std::uint64_t seq = impl_->next_sequence;
    Record r{*ts, seq, value};
    impl_->persist(rec.fields[1], r);
    impl_->add(rec.fields[1], *ts, seq, std::move(value));
    ++report.accepted;
  }
  impl_->flush();
  std::sort(report.errors.begin(), report.errors.end(),
            [](const auto& a, const auto& b) { return a.line < b.line; });
  return report;
}

std::string TsStore::export_log() const {
  std::unique_lock lock(impl_->mutex);
  struct Row {
    Timestamp ts;
    const std::string* node;
    std::uint64_t seq;
    const Value* value;
  };
  std::vector<Row> rows;
  rows.reserve(impl_->total);
  for (auto& [id, s] : impl_->series) {
    Impl::ensure_sorted(s);
    for (const auto& r : s.records) rows.push_back({r.timestamp, &id, r.sequence, &r.value});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.ts != b.ts) return a.ts < b.ts;
    if (*a.node != *b.node) return *a.node < *b.node;
    return a.seq < b.seq;
  });
  std::string out(kLogHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r.ts.to_string();
    out += ',';
    out += detail::csv_escape(*r.node);
    out += ',';
    out += detail::csv_escape(format_value(*r.value));
    out += ',';
    out += to_string(kind_of(*r.value));
    out += '\n';
  }
  return out;
}

void TsStore::flush() {
  std::unique_lock lock(impl_->mutex);
  impl_->flush();
}

}  // namespace uatrace
