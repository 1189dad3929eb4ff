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

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "uatrace/timestamp.hpp"

namespace uatrace {

/// Absolute IRI. Construction rejects empty text, whitespace, and the
/// delimiter characters `<`, `>` and `"` so every IRI survives `<...>`
/// serialization unchanged.
class Iri {
 public:
  explicit Iri(std::string value);

  static bool is_valid(std::string_view value);

  const std::string& str() const noexcept { return value_; }

  friend auto operator<=>(const Iri&, const Iri&) = default;
  friend bool operator==(const Iri&, const Iri&) = default;

 private:
  std::string value_;
};

enum class Datatype : std::uint8_t { String, Boolean, Integer, Double, DateTime };

std::string_view keyword(Datatype dt);
std::optional<Datatype> datatype_from_keyword(std::string_view kw);
std::string xsd_iri(Datatype dt);
std::optional<Datatype> datatype_from_xsd_iri(std::string_view iri);

/// Typed literal. The lexical form is canonicalized on construction
/// (integers and doubles reprinted, timestamps normalized to UTC), so two
/// literals denoting the same value compare equal.
class Literal {
 public:
  // Throws ParseError when `lexical` is not valid for `datatype`.
  Literal(std::string lexical, Datatype datatype);

  static Literal string(std::string s) { return Literal(std::move(s), Datatype::String); }
  static Literal boolean(bool b);
  static Literal integer(std::int64_t i);
  static Literal real(double d);
  static Literal date_time(Timestamp ts);

  const std::string& lexical() const noexcept { return lexical_; }
  Datatype datatype() const noexcept { return datatype_; }

  bool is_numeric() const {
    return datatype_ == Datatype::Integer || datatype_ == Datatype::Double;
  }
  bool as_bool() const;
  std::int64_t as_integer() const;
  double as_double() const;
  Timestamp as_timestamp() const;

  friend auto operator<=>(const Literal&, const Literal&) = default;
  friend bool operator==(const Literal&, const Literal&) = default;

 private:
  std::string lexical_;
  Datatype datatype_;
};

/// Either an IRI or a literal.
class Term {
 public:
  Term(Iri iri) : value_(std::move(iri)) {}
  Term(Literal lit) : value_(std::move(lit)) {}

  bool is_iri() const noexcept { return std::holds_alternative<Iri>(value_); }
  bool is_literal() const noexcept { return std::holds_alternative<Literal>(value_); }
  const Iri& iri() const { return std::get<Iri>(value_); }
  const Literal& literal() const { return std::get<Literal>(value_); }

  // `<iri>` or `"escaped"^^keyword`.
  std::string serialize() const;

  friend auto operator<=>(const Term&, const Term&) = default;
  friend bool operator==(const Term&, const Term&) = default;

 private:
  std::variant<Iri, Literal> value_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept;
};

struct Triple {
  Iri subject;
  Iri predicate;
  Term object;

  friend auto operator<=>(const Triple&, const Triple&) = default;
  friend bool operator==(const Triple&, const Triple&) = default;
};

class PrefixMap {
 public:
  // Rebinding a label to the same namespace is a no-op; rebinding it to a
  // different namespace throws Error(Duplicate).
  void bind(const std::string& label, const std::string& ns);
  // Binds or rebinds unconditionally.
  void assign(const std::string& label, const std::string& ns) { bindings_[label] = ns; }

  std::optional<Iri> expand(std::string_view curie) const;
  std::optional<std::string> namespace_of(std::string_view label) const;
  const std::map<std::string, std::string>& bindings() const noexcept { return bindings_; }
  bool empty() const noexcept { return bindings_.empty(); }
  void merge(const PrefixMap& other);

  friend bool operator==(const PrefixMap&, const PrefixMap&) = default;

 private:
  std::map<std::string, std::string> bindings_;
};

/// In-memory triple store with set semantics.
///
/// Terms are dictionary-encoded; three sorted permutation indexes (SPO,
/// POS, OSP) answer every combination of bound positions with a single
/// range scan. Mutation requires exclusive access; const member functions
/// are safe to call concurrently.
class TripleStore {
 public:
  using Visitor = std::function<void(const Iri& s, const Iri& p, const Term& o)>;

  // Returns false when the triple was already present.
  bool insert(const Triple& t);
  bool contains(const Triple& t) const;
  std::size_t size() const noexcept { return spo_.size(); }
  bool empty() const noexcept { return spo_.empty(); }

  std::vector<Triple> match(const std::optional<Iri>& s, const std::optional<Iri>& p,
                            const std::optional<Term>& o) const;
  void visit(const std::optional<Iri>& s, const std::optional<Iri>& p,
             const std::optional<Term>& o, const Visitor& visitor) const;
  std::size_t count(const std::optional<Iri>& s, const std::optional<Iri>& p,
                    const std::optional<Term>& o) const;

  // All triples in canonical (serialized subject, predicate, object) order.
  std::vector<Triple> triples() const;

  PrefixMap& prefixes() noexcept { return prefixes_; }
  const PrefixMap& prefixes() const noexcept { return prefixes_; }

  // Set equality on triples; prefixes are not compared.
  friend bool operator==(const TripleStore& a, const TripleStore& b);

 private:
  using Key = std::array<std::uint32_t, 3>;
  static constexpr std::uint32_t kNone = 0xffffffffu;

  std::uint32_t intern(const Term& t);
  std::uint32_t lookup(const Term& t) const;

  std::vector<Term> terms_;
  std::unordered_map<Term, std::uint32_t, TermHash> ids_;
  std::set<Key> spo_;
  std::set<Key> pos_;
  std::set<Key> osp_;
  PrefixMap prefixes_;
};

/// Line-triples format: `@prefix label: <ns> .` directives and one statement
/// `<s> <p> <o> .` per line; CURIEs (`label:local`) are accepted on input;
/// literals are written `"lexical"^^keyword`. Throws ParseError with the
/// offending line number.
void load_line_triples(TripleStore& store, std::string_view document);

/// Canonical, byte-stable export: header comment, prefix directives sorted by
/// label, then statements in canonical order with full IRIs.
std::string export_line_triples(const TripleStore& store);

}  // namespace uatrace
