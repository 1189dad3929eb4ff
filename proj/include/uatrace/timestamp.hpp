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

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace uatrace {

/// UTC instant with millisecond resolution.
///
/// Text form is RFC 3339 in UTC. Parsing accepts `Z` or numeric offsets and
/// any number of fractional digits (truncated to milliseconds); formatting
/// always yields the canonical `YYYY-MM-DDThh:mm:ss[.mmm]Z`, where the
/// fraction is omitted when it is zero.
class Timestamp {
 public:
  constexpr Timestamp() = default;
  constexpr explicit Timestamp(std::int64_t millis_since_epoch)
      : millis_(millis_since_epoch) {}

  static constexpr Timestamp min() {
    return Timestamp(std::numeric_limits<std::int64_t>::min());
  }
  static constexpr Timestamp max() {
    return Timestamp(std::numeric_limits<std::int64_t>::max());
  }

  static std::optional<Timestamp> parse(std::string_view text);
  // Throws ParseError (line 0) when `text` is not a valid timestamp.
  static Timestamp parse_or_throw(std::string_view text);

  std::string to_string() const;

  constexpr std::int64_t millis() const { return millis_; }

  constexpr Timestamp operator+(std::int64_t ms) const { return Timestamp(millis_ + ms); }

  friend constexpr auto operator<=>(Timestamp, Timestamp) = default;

 private:
  std::int64_t millis_ = 0;
};

// Closed interval [start, end].
struct TimeWindow {
  Timestamp start;
  Timestamp end;

  bool contains(Timestamp t) const { return start <= t && t <= end; }

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

}  // namespace uatrace
