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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uatrace::detail {

// RFC 3986 percent-encoding; unreserved characters pass through.
std::string percent_encode(std::string_view text);
std::optional<std::string> percent_decode(std::string_view text);

// Quotes the field when it contains a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);

struct CsvRecord {
  std::size_t line;  // 1-based line of the record's first character
  std::vector<std::string> fields;
};

struct CsvError {
  std::size_t line;
  std::string message;
};

// RFC 4180 records. Quoted fields may span lines. A record with a quoting
// defect is reported in `errors` and skipped; parsing resumes on the next line.
std::vector<CsvRecord> parse_csv(std::string_view text, std::vector<CsvError>& errors);

std::string format_double(double value);

}  // namespace uatrace::detail
