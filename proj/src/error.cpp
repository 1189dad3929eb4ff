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

#include "uatrace/error.hpp"

namespace uatrace {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::MissingEntity: return "missing-entity";
    case ErrorKind::InvalidRange: return "invalid-range";
    case ErrorKind::Io: return "io";
    case ErrorKind::Type: return "type";
    case ErrorKind::Duplicate: return "duplicate";
    case ErrorKind::Invariant: return "invariant";
    case ErrorKind::Contract: return "contract";
  }
  return "unknown";
}

namespace {

std::string located(std::size_t line, std::size_t column, const std::string& message) {
  if (line == 0) return message;
  std::string out = "line " + std::to_string(line);
  if (column != 0) out += ", column " + std::to_string(column);
  return out + ": " + message;
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : Error(ErrorKind::Parse, located(line, column, message)), line_(line), column_(column) {}

}  // namespace uatrace
