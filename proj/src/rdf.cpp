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

#include "uatrace/rdf.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "uatrace/detail/text.hpp"
#include "uatrace/error.hpp"

namespace uatrace {

// ---------------------------------------------------------------------------
// Iri

bool Iri::is_valid(std::string_view value) {
  if (value.empty()) return false;
  for (unsigned char c : value) {
    if (c <= 0x20 || c == '<' || c == '>' || c == '"' || c == 0x7f) return false;
  }
  // scheme ":" ...
  auto colon = value.find(':');
  if (colon == 0 || colon == std::string_view::npos) return false;
  auto is_alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
  if (!is_alpha(value[0])) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    char c = value[i];
    if (!(is_alpha(c) || (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.'))
      return false;
  }
  return true;
}

Iri::Iri(std::string value) : value_(std::move(value)) {
  if (!is_valid(value_)) throw Error(ErrorKind::Invariant, "invalid IRI '" + value_ + "'");
}

// ---------------------------------------------------------------------------
// Datatypes

namespace {

constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";

struct DatatypeName {
  Datatype dt;
  std::string_view keyword;
  std::string_view xsd_local;
};

constexpr DatatypeName kDatatypes[] = {
    {Datatype::String, "string", "string"},
    {Datatype::Boolean, "boolean", "boolean"},
    {Datatype::Integer, "integer", "integer"},
    {Datatype::Double, "double", "double"},
    {Datatype::DateTime, "dateTime", "dateTime"},
};

}  // namespace

std::string_view keyword(Datatype dt) {
  for (const auto& d : kDatatypes)
    if (d.dt == dt) return d.keyword;
  return "string";
}

std::optional<Datatype> datatype_from_keyword(std::string_view kw) {
  for (const auto& d : kDatatypes)
    if (d.keyword == kw) return d.dt;
  return std::nullopt;
}

std::string xsd_iri(Datatype dt) {
  for (const auto& d : kDatatypes)
    if (d.dt == dt) return std::string(kXsd) + std::string(d.xsd_local);
  return std::string(kXsd) + "string";
}

std::optional<Datatype> datatype_from_xsd_iri(std::string_view iri) {
  if (iri.substr(0, kXsd.size()) != kXsd) return std::nullopt;
  auto local = iri.substr(kXsd.size());
  for (const auto& d : kDatatypes)
    if (d.xsd_local == local) return d.dt;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Literal

Literal::Literal(std::string lexical, Datatype datatype)
    : lexical_(std::move(lexical)), datatype_(datatype) {
  auto bad = [&] {
    return ParseError(0, 0, "invalid " + std::string(keyword(datatype_)) + " literal '" +
                                lexical_ + "'");
  };
  switch (datatype_) {
    case Datatype::String:
      break;
    case Datatype::Boolean:
      if (lexical_ != "true" && lexical_ != "false") throw bad();
      break;
    case Datatype::Integer: {
      std::string_view text = lexical_;
      if (!text.empty() && text.front() == '+') text.remove_prefix(1);
      std::int64_t v = 0;
      auto res = std::from_chars(text.data(), text.data() + text.size(), v);
      if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw bad();
      lexical_ = std::to_string(v);
      break;
    }
    case Datatype::Double: {
      std::string_view text = lexical_;
      if (!text.empty() && text.front() == '+') text.remove_prefix(1);
      double v = 0;
      auto res = std::from_chars(text.data(), text.data() + text.size(), v);
      if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size() ||
          !std::isfinite(v))
        throw bad();
      lexical_ = detail::format_double(v);
      break;
    }
    case Datatype::DateTime: {
      auto ts = Timestamp::parse(lexical_);
      if (!ts) throw bad();
      lexical_ = ts->to_string();
      break;
    }
  }
}

Literal Literal::boolean(bool b) { return Literal(b ? "true" : "false", Datatype::Boolean); }
Literal Literal::integer(std::int64_t i) { return Literal(std::to_string(i), Datatype::Integer); }
Literal Literal::real(double d) { return Literal(detail::format_double(d), Datatype::Double); }
Literal Literal::date_time(Timestamp ts) { return Literal(ts.to_string(), Datatype::DateTime); }

bool Literal::as_bool() const {
  if (datatype_ != Datatype::Boolean) throw Error(ErrorKind::Type, "literal is not a boolean");
  return lexical_ == "true";
}

std::int64_t Literal::as_integer() const {
  if (datatype_ != Datatype::Integer) throw Error(ErrorKind::Type, "literal is not an integer");
  std::int64_t v = 0;
  std::from_chars(lexical_.data(), lexical_.data() + lexical_.size(), v);
  return v;
}

double Literal::as_double() const {
  if (datatype_ == Datatype::Integer) return static_cast<double>(as_integer());
  if (datatype_ != Datatype::Double) throw Error(ErrorKind::Type, "literal is not numeric");
  double v = 0;
  std::from_chars(lexical_.data(), lexical_.data() + lexical_.size(), v);
  return v;
}

Timestamp Literal::as_timestamp() const {
  if (datatype_ != Datatype::DateTime && datatype_ != Datatype::String)
    throw Error(ErrorKind::Type, "literal is not a dateTime");
  auto ts = Timestamp::parse(lexical_);
  if (!ts) throw Error(ErrorKind::Type, "literal '" + lexical_ + "' is not a dateTime");
  return *ts;
}

// ---------------------------------------------------------------------------
// Term

namespace {

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string Term::serialize() const {
  if (is_iri()) return "<" + iri().str() + ">";
  const auto& lit = literal();
  return "\"" + escape(lit.lexical()) + "\"^^" + std::string(keyword(lit.datatype()));
}

std::size_t TermHash::operator()(const Term& t) const noexcept {
  if (t.is_iri()) return std::hash<std::string>{}(t.iri().str());
  const auto& lit = t.literal();
  return std::hash<std::string>{}(lit.lexical()) * 31 +
         static_cast<std::size_t>(lit.datatype()) + 1;
}

// ---------------------------------------------------------------------------
// PrefixMap

void PrefixMap::bind(const std::string& label, const std::string& ns) {
  auto [it, inserted] = bindings_.emplace(label, ns);
  if (!inserted && it->second != ns)
    throw Error(ErrorKind::Duplicate,
                "prefix '" + label + ":' already bound to <" + it->second + ">");
}

std::optional<Iri> PrefixMap::expand(std::string_view curie) const {
  auto colon = curie.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  auto it = bindings_.find(std::string(curie.substr(0, colon)));
  if (it == bindings_.end()) return std::nullopt;
  std::string full = it->second + std::string(curie.substr(colon + 1));
  if (!Iri::is_valid(full)) return std::nullopt;
  return Iri(std::move(full));
}

std::optional<std::string> PrefixMap::namespace_of(std::string_view label) const {
  auto it = bindings_.find(std::string(label));
  if (it == bindings_.end()) return std::nullopt;
  return it->second;
}

void PrefixMap::merge(const PrefixMap& other) {
  for (const auto& [label, ns] : other.bindings_) bind(label, ns);
}

// ---------------------------------------------------------------------------
// TripleStore

std::uint32_t TripleStore::intern(const Term& t) {
  auto it = ids_.find(t);
  if (it != ids_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(terms_.size());
  terms_.push_back(t);
  ids_.emplace(t, id);
  return id;
}

std::uint32_t TripleStore::lookup(const Term& t) const {
  auto it = ids_.find(t);
  return it == ids_.end() ? kNone : it->second;
}

bool TripleStore::insert(const Triple& t) {
  auto s = intern(Term(t.subject));
  auto p = intern(Term(t.predicate));
  auto o = intern(t.object);
  if (!spo_.insert({s, p, o}).second) return false;
  pos_.insert({p, o, s});
  osp_.insert({o, s, p});
  return true;
}

bool TripleStore::contains(const Triple& t) const {
  auto s = lookup(Term(t.subject));
  auto p = lookup(Term(t.predicate));
  auto o = lookup(t.object);
  if (s == kNone || p == kNone || o == kNone) return false;
  return spo_.count({s, p, o}) != 0;
}

void TripleStore::visit(const std::optional<Iri>& s, const std::optional<Iri>& p,
                        const std::optional<Term>& o, const Visitor& visitor) const {
  std::uint32_t sid = kNone, pid = kNone, oid = kNone;
  if (s && (sid = lookup(Term(*s))) == kNone) return;
  if (p && (pid = lookup(Term(*p))) == kNone) return;
  if (o && (oid = lookup(*o)) == kNone) return;

  // Scans `index` over the contiguous block whose key starts with the bound
  // prefix; `order` maps index positions back to (s, p, o).
  auto scan = [&](const std::set<Key>& index, std::array<std::uint32_t, 3> bound,
                  std::size_t bound_count, std::array<int, 3> order) {
    Key lo{0, 0, 0};
    for (std::size_t i = 0; i < bound_count; ++i) lo[i] = bound[i];
    for (auto it = index.lower_bound(lo); it != index.end(); ++it) {
      bool in_range = true;
      for (std::size_t i = 0; i < bound_count; ++i) {
        if ((*it)[i] != bound[i]) {
          in_range = false;
          break;
        }
      }
      if (!in_range) break;
      std::array<std::uint32_t, 3> spo{};
      for (int i = 0; i < 3; ++i) spo[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = (*it)[static_cast<std::size_t>(i)];
      visitor(terms_[spo[0]].iri(), terms_[spo[1]].iri(), terms_[spo[2]]);
    }
  };

  const bool bs = s.has_value(), bp = p.has_value(), bo = o.has_value();
  if (bs && bp && bo) {
    if (spo_.count({sid, pid, oid})) visitor(terms_[sid].iri(), terms_[pid].iri(), terms_[oid]);
  } else if (bs && bp) {
    scan(spo_, {sid, pid, 0}, 2, {0, 1, 2});
  } else if (bs && bo) {
    scan(osp_, {oid, sid, 0}, 2, {2, 0, 1});
  } else if (bp && bo) {
    scan(pos_, {pid, oid, 0}, 2, {1, 2, 0});
  } else if (bs) {
    scan(spo_, {sid, 0, 0}, 1, {0, 1, 2});
  } else if (bp) {
    scan(pos_, {pid, 0, 0}, 1, {1, 2, 0});
  } else if (bo) {
    scan(osp_, {oid, 0, 0}, 1, {2, 0, 1});
  } else {
    scan(spo_, {0, 0, 0}, 0, {0, 1, 2});
  }
}

std::vector<Triple> TripleStore::match(const std::optional<Iri>& s, const std::optional<Iri>& p,
                                       const std::optional<Term>& o) const {
  std::vector<Triple> out;
  visit(s, p, o, [&](const Iri& ts, const Iri& tp, const Term& to) {
    out.push_back(Triple{ts, tp, to});
  });
  return out;
}

std::size_t TripleStore::count(const std::optional<Iri>& s, const std::optional<Iri>& p,
                               const std::optional<Term>& o) const {
  std::size_t n = 0;
  visit(s, p, o, [&](const Iri&, const Iri&, const Term&) { ++n; });
  return n;
}

std::vector<Triple> TripleStore::triples() const {
  struct Row {
    std::array<std::string, 3> key;
    const Key* ids;
  };
  std::vector<Row> rows;
  rows.reserve(spo_.size());
  std::vector<std::string> serialized(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) serialized[i] = terms_[i].serialize();
  for (const auto& k : spo_) rows.push_back({{serialized[k[0]], serialized[k[1]], serialized[k[2]]}, &k});
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.key < b.key; });
  std::vector<Triple> out;
  out.reserve(rows.size());
  for (const auto& r : rows)
    out.push_back(Triple{terms_[(*r.ids)[0]].iri(), terms_[(*r.ids)[1]].iri(), terms_[(*r.ids)[2]]});
  return out;
}

bool operator==(const TripleStore& a, const TripleStore& b) {
  if (a.size() != b.size()) return false;
  bool equal = true;
  a.visit(std::nullopt, std::nullopt, std::nullopt,
          [&](const Iri& s, const Iri& p, const Term& o) {
            if (equal && !b.contains(Triple{s, p, o})) equal = false;
          });
  return equal;
}

// ---------------------------------------------------------------------------
// Line-triples

namespace {

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no, const PrefixMap& prefixes)
      : line_(line), line_no_(line_no), prefixes_(prefixes) {}

  void skip_ws() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
  }
  bool at_end() const { return pos_ >= line_.size(); }
  char peek() const { return at_end() ? '\0' : line_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line_no_, pos_ + 1, msg);
  }

  bool consume_keyword(std::string_view kw) {
    if (line_.substr(pos_, kw.size()) == kw) {
      pos_ += kw.size();
      return true;
    }
    return false;
  }

  std::string read_iri_ref() {
    if (peek() != '<') fail("expected '<'");
    auto close = line_.find('>', pos_);
    if (close == std::string_view::npos) fail("unterminated IRI");
    std::string value(line_.substr(pos_ + 1, close - pos_ - 1));
    if (!Iri::is_valid(value)) fail("invalid IRI '" + value + "'");
    pos_ = close + 1;
    return value;
  }

  std::string read_token() {
    std::size_t start = pos_;
    while (!at_end() && peek() != ' ' && peek() != '\t') ++pos_;
    return std::string(line_.substr(start, pos_ - start));
  }

  Iri read_iri() {
    if (peek() == '<') return Iri(read_iri_ref());
    std::size_t start = pos_;
    std::string token = read_token();
    // A statement terminator glued to the token is not part of the name.
    if (token.size() > 1 && token.back() == '.' && at_end()) {
      token.pop_back();
      --pos_;
    }
    auto colon = token.find(':');
    if (colon == std::string::npos) {
      pos_ = start;
      fail("expected IRI or prefixed name, got '" + token + "'");
    }
    if (!prefixes_.namespace_of(token.substr(0, colon))) {
      pos_ = start;
      fail("unknown prefix '" + token.substr(0, colon) + ":'");
    }
    auto iri = prefixes_.expand(token);
    if (!iri) {
      pos_ = start;
      fail("invalid prefixed name '" + token + "'");
    }
    return *iri;
  }

  Term read_object() {
    if (peek() != '"') return Term(read_iri());
    ++pos_;
    std::string lexical;
    for (;;) {
      if (at_end()) fail("unterminated literal");
      char c = line_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (at_end()) fail("dangling escape");
        char e = line_[pos_++];
        switch (e) {
          case '\\': lexical += '\\'; break;
          case '"': lexical += '"'; break;
          case 'n': lexical += '\n'; break;
          case 'r': lexical += '\r'; break;
          case 't': lexical += '\t'; break;
          default: --pos_; fail(std::string("unknown escape '\\") + e + "'");
        }
      } else {
        lexical += c;
      }
    }
    if (!consume_keyword("^^")) fail("expected '^^datatype' after literal");
    std::size_t dt_start = pos_;
    while (!at_end() && ((peek() >= 'a' && peek() <= 'z') || (peek() >= 'A' && peek() <= 'Z')))
      ++pos_;
    std::string kw(line_.substr(dt_start, pos_ - dt_start));
    auto dt = datatype_from_keyword(kw);
    if (!dt) {
      pos_ = dt_start;
      fail("unknown datatype '" + kw + "'");
    }
    try {
      return Term(Literal(std::move(lexical), *dt));
    } catch (const ParseError& e) {
      pos_ = dt_start;
      fail(e.what());
    }
  }

  void expect_terminator() {
    skip_ws();
    if (peek() != '.') fail("expected '.'");
    ++pos_;
    skip_ws();
    if (!at_end() && peek() != '#') fail("trailing characters after '.'");
  }

 private:
  std::string_view line_;
  std::size_t line_no_;
  const PrefixMap& prefixes_;
  std::size_t pos_ = 0;
};

}  // namespace

void load_line_triples(TripleStore& store, std::string_view document) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  // Parse everything before touching the store so a malformed document
  // leaves it unchanged.
  PrefixMap prefixes = store.prefixes();
  std::vector<Triple> pending;
  while (start <= document.size()) {
    auto end = document.find('\n', start);
    if (end == std::string_view::npos) end = document.size();
    std::string_view line = document.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    start = end + 1;

    LineParser p(line, line_no, prefixes);
    p.skip_ws();
    if (p.at_end() || p.peek() == '#') {
      if (end == document.size()) break;
      continue;
    }
    if (p.consume_keyword("@prefix")) {
      p.skip_ws();
      std::string label = p.read_token();
      if (label.empty() || label.back() != ':') p.fail("expected 'label:' in @prefix");
      label.pop_back();
      p.skip_ws();
      std::string ns = p.read_iri_ref();
      p.expect_terminator();
      try {
        prefixes.bind(label, ns);
      } catch (const Error& e) {
        throw ParseError(line_no, 0, e.what());
      }
    } else {
      Iri s = p.read_iri();
      p.skip_ws();
      Iri pr = p.read_iri();
      p.skip_ws();
      Term o = p.read_object();
      p.expect_terminator();
      pending.push_back(Triple{std::move(s), std::move(pr), std::move(o)});
    }
    if (end == document.size()) break;
  }
  store.prefixes() = std::move(prefixes);
  for (const auto& t : pending) store.insert(t);
}

std::string export_line_triples(const TripleStore& store) {
  std::string out = "# uatrace line-triples\n";
  for (const auto& [label, ns] : store.prefixes().bindings())
    out += "@prefix " + label + ": <" + ns + "> .\n";
  for (const auto& t : store.triples()) {
    out += Term(t.subject).serialize();
    out += ' ';
    out += Term(t.predicate).serialize();
    out += ' ';
    out += t.object.serialize();
    out += " .\n";
  }
  return out;
}

}  // namespace uatrace
