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

#include <algorithm>
#include <cctype>

#include "uatrace/error.hpp"
#include "uatrace/query.hpp"

namespace uatrace::query {

namespace {

constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

enum class Tok { IriRef, Name, Var, String, Integer, Decimal, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
         c == ':' || static_cast<unsigned char>(c) >= 0x80;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, "", line_, col_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, col_, msg); }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Token next() {
    std::size_t line = line_, col = col_;
    char c = peek();
    auto make = [&](Tok kind, std::string text) { return Token{kind, std::move(text), line, col}; };

    if (c == '<') {
      std::string iri;
      advance();
      while (pos_ < text_.size() && peek() != '>') {
        if (std::isspace(static_cast<unsigned char>(peek()))) fail("whitespace inside IRI");
        iri += peek();
        advance();
      }
      if (pos_ >= text_.size()) fail("unterminated IRI");
      advance();
      return make(Tok::IriRef, iri);
    }
    if (c == '?' || c == '$') {
      advance();
      std::string name;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
        name += peek();
        advance();
      }
      if (name.empty()) fail("empty variable name");
      return make(Tok::Var, name);
    }
    if (c == '"' || c == '\'') {
      char quote = c;
      advance();
      std::string value;
      for (;;) {
        if (pos_ >= text_.size() || peek() == '\n') fail("unterminated string");
        char ch = peek();
        advance();
        if (ch == quote) break;
        if (ch == '\\') {
          if (pos_ >= text_.size()) fail("dangling escape");
          char e = peek();
          advance();
          switch (e) {
            case 'n': value += '\n'; break;
            case 't': value += '\t'; break;
            case 'r': value += '\r'; break;
            case '"': value += '"'; break;
            case '\'': value += '\''; break;
            case '\\': value += '\\'; break;
            default: fail(std::string("unknown escape '\\") + e + "'");
          }
        } else {
          value += ch;
        }
      }
      return make(Tok::String, value);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        ((c == '+' || c == '-') && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      std::string num;
      num += c;
      advance();
      bool decimal = false;
      while (std::isdigit(static_cast<unsigned char>(peek())) ||
             (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1))) && !decimal) ||
             ((peek() == 'e' || peek() == 'E') && !num.empty())) {
        if (peek() == '.') decimal = true;
        if (peek() == 'e' || peek() == 'E') {
          decimal = true;
          num += peek();
          advance();
          if (peek() == '+' || peek() == '-') {
            num += peek();
            advance();
          }
          continue;
        }
        num += peek();
        advance();
      }
      return make(decimal ? Tok::Decimal : Tok::Integer, num);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':') {
      std::string name;
      while (pos_ < text_.size() && is_name_char(peek())) {
        name += peek();
        advance();
      }
      // A trailing '.' terminates the statement rather than the name.
      while (!name.empty() && name.back() == '.') {
        name.pop_back();
        --pos_;
        --col_;
      }
      return make(Tok::Name, name);
    }
    if (c == '|' && peek(1) == '|') {
      advance();
      advance();
      return make(Tok::Punct, "||");
    }
    if (c == '^' && peek(1) == '^') {
      advance();
      advance();
      return make(Tok::Punct, "^^");
    }
    if (std::string_view("{}().;,*/=").find(c) != std::string_view::npos) {
      advance();
      return make(Tok::Punct, std::string(1, c));
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

bool keyword_is(const Token& t, std::string_view kw) {
  if (t.kind != Tok::Name || t.text.size() != kw.size()) return false;
  for (std::size_t i = 0; i < kw.size(); ++i)
    if (std::toupper(static_cast<unsigned char>(t.text[i])) != kw[i]) return false;
  return true;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, PrefixMap prefixes)
      : tokens_(std::move(tokens)), prefixes_(std::move(prefixes)) {}

  QueryAst run() {
    while (keyword_is(peek(), "PREFIX")) parse_prefix();

    QueryAst ast;
    expect_keyword("SELECT");
    std::vector<Token> select_tokens;
    while (peek().kind == Tok::Var) {
      select_tokens.push_back(peek());
      ast.select.push_back(Variable{take().text});
    }
    if (ast.select.empty()) fail(peek(), "expected at least one selected variable");

    if (keyword_is(peek(), "WHERE")) take();
    expect_punct("{");
    parse_group(ast.patterns);
    expect_punct("}");

    if (keyword_is(peek(), "ORDER")) {
      take();
      expect_keyword("BY");
      OrderBy order;
      Token order_token = peek();
      if (keyword_is(peek(), "ASC") || keyword_is(peek(), "DESC")) {
        order.order = keyword_is(take(), "ASC") ? SortOrder::Ascending : SortOrder::Descending;
        expect_punct("(");
        order_token = peek();
        order.variable = expect_var();
        expect_punct(")");
      } else {
        order.variable = expect_var();
      }
      ast.order_by = order;
      select_tokens.push_back(order_token);
    }
    if (peek().kind != Tok::End) fail(peek(), "unexpected '" + peek().text + "' after query");

    check_variables(ast, select_tokens);
    return ast;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& take() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    throw ParseError(t.line, t.column, msg);
  }
  bool is_punct(std::string_view p) const {
    return peek().kind == Tok::Punct && peek().text == p;
  }
  void expect_punct(std::string_view p) {
    if (!is_punct(p)) {
      fail(peek(), "expected '" + std::string(p) + "'" +
                       (peek().kind == Tok::End ? " before end of query"
                                                : ", got '" + peek().text + "'"));
    }
    take();
  }
  void expect_keyword(std::string_view kw) {
    if (!keyword_is(peek(), kw)) fail(peek(), "expected " + std::string(kw));
    take();
  }
  Variable expect_var() {
    if (peek().kind != Tok::Var) fail(peek(), "expected variable");
    return Variable{take().text};
  }

  void parse_prefix() {
    take();
    const Token& label = take();
    if (label.kind != Tok::Name || label.text.empty() || label.text.back() != ':' ||
        label.text.find(':') != label.text.size() - 1)
      fail(label, "expected prefix label ending in ':'");
    const Token& ns = take();
    if (ns.kind != Tok::IriRef) fail(ns, "expected <namespace IRI>");
    prefixes_.assign(label.text.substr(0, label.text.size() - 1), ns.text);
  }

  Iri resolve_iri(const Token& t) {
    if (t.kind == Tok::IriRef) {
      if (!Iri::is_valid(t.text)) fail(t, "invalid IRI <" + t.text + ">");
      return Iri(t.text);
    }
    auto colon = t.text.find(':');
    if (t.kind != Tok::Name || colon == std::string::npos) fail(t, "expected IRI, got '" + t.text + "'");
    std::string label = t.text.substr(0, colon);
    if (!prefixes_.namespace_of(label)) fail(t, "unknown prefix '" + label + ":'");
    auto iri = prefixes_.expand(t.text);
    if (!iri) fail(t, "invalid prefixed name '" + t.text + "'");
    return *iri;
  }

  bool at_iri() const {
    return peek().kind == Tok::IriRef ||
           (peek().kind == Tok::Name && peek().text.find(':') != std::string::npos);
  }

  bool at_literal() const {
    const Token& t = peek();
    return t.kind == Tok::String || t.kind == Tok::Integer || t.kind == Tok::Decimal ||
           keyword_is(t, "TRUE") || keyword_is(t, "FALSE");
  }

  Term parse_literal() {
    const Token& t = take();
    try {
      if (t.kind == Tok::Integer) return Term(Literal(t.text, Datatype::Integer));
      if (t.kind == Tok::Decimal) return Term(Literal(t.text, Datatype::Double));
      if (keyword_is(t, "TRUE")) return Term(Literal::boolean(true));
      if (keyword_is(t, "FALSE")) return Term(Literal::boolean(false));
      if (is_punct("^^")) {
        take();
        const Token& dt_tok = peek();
        Iri dt_iri = resolve_iri(take());
        auto dt = datatype_from_xsd_iri(dt_iri.str());
        if (!dt) fail(dt_tok, "unsupported datatype <" + dt_iri.str() + ">");
        return Term(Literal(t.text, *dt));
      }
      return Term(Literal::string(t.text));
    } catch (const ParseError& e) {
      if (e.line() != 0) throw;
      fail(t, e.what());
    }
  }

  Node parse_node() {
    if (peek().kind == Tok::Var) return Variable{take().text};
    if (at_iri()) return Term(resolve_iri(take()));
    if (at_literal()) return parse_literal();
    fail(peek(), "expected variable, IRI or literal, got '" + peek().text + "'");
  }

  void parse_group(std::vector<Pattern>& out) {
    while (!is_punct("}") && peek().kind != Tok::End) {
      if (keyword_is(peek(), "FILTER")) {
        out.push_back(parse_filter());
        if (is_punct(".")) take();
        continue;
      }
      parse_triples(out);
      if (is_punct(".")) {
        take();
      } else if (!is_punct("}") && !keyword_is(peek(), "FILTER")) {
        fail(peek(), "expected '.' or '}', got '" + peek().text + "'");
      }
    }
  }

  Filter parse_filter() {
    take();
    expect_punct("(");
    Filter f;
    for (;;) {
      Variable v = expect_var();
      expect_punct("=");
      if (!at_iri() && !at_literal()) fail(peek(), "expected IRI or literal after '='");
      Term value = at_iri() ? Term(resolve_iri(take())) : parse_literal();
      f.disjuncts.push_back(Comparison{std::move(v), std::move(value)});
      if (is_punct("||")) {
        take();
        continue;
      }
      break;
    }
    expect_punct(")");
    return f;
  }

  void parse_triples(std::vector<Pattern>& out) {
    const Token& subject_tok = peek();
    if (subject_tok.kind == Tok::String || subject_tok.kind == Tok::Integer ||
        subject_tok.kind == Tok::Decimal)
      fail(subject_tok, "literal in subject position");
    Node subject = parse_node();
    for (;;) {
      parse_verb_objects(subject, out);
      if (!is_punct(";")) break;
      take();
      // A trailing ';' before '.' or '}' is allowed.
      if (is_punct(".") || is_punct("}")) break;
    }
  }

  void parse_verb_objects(const Node& subject, std::vector<Pattern>& out) {
    const Token& verb_tok = peek();
    if (peek().kind == Tok::Var) {
      Node predicate = Variable{take().text};
      for (;;) {
        out.push_back(TriplePattern{subject, predicate, parse_object()});
        if (!is_punct(",")) break;
        take();
      }
      return;
    }
    Iri predicate = [&] {
      if (peek().kind == Tok::Name && peek().text == "a") {
        take();
        return Iri(std::string(kRdfType));
      }
      if (!at_iri()) fail(verb_tok, "expected predicate, got '" + verb_tok.text + "'");
      return resolve_iri(take());
    }();

    if (is_punct("*")) {
      take();
      if (is_punct("/")) fail(peek(), "paths combining '*' and '/' are not supported");
      for (;;) {
        out.push_back(PathPattern{subject, PathKind::ZeroOrMore, {predicate}, parse_object()});
        if (!is_punct(",")) break;
        take();
      }
      return;
    }
    if (is_punct("/")) {
      take();
      if (!at_iri()) fail(peek(), "expected IRI after '/'");
      Iri second = resolve_iri(take());
      if (is_punct("/") || is_punct("*"))
        fail(peek(), "only two-step sequence paths are supported");
      for (;;) {
        out.push_back(PathPattern{subject, PathKind::Sequence, {predicate, second}, parse_object()});
        if (!is_punct(",")) break;
        take();
      }
      return;
    }
    if (is_punct("(")) {
      take();
      PropertyFunctionCall call{subject, predicate, {}};
      while (!is_punct(")")) {
        if (peek().kind == Tok::End) fail(peek(), "unterminated argument list");
        call.args.push_back(parse_node());
      }
      take();
      out.push_back(std::move(call));
      return;
    }
    for (;;) {
      out.push_back(TriplePattern{subject, Term(predicate), parse_object()});
      if (!is_punct(",")) break;
      take();
    }
  }

  Node parse_object() {
    if (is_punct("(")) fail(peek(), "argument lists are only valid as a whole object");
    return parse_node();
  }

  static void collect(const Node& n, std::set<std::string>& vars) {
    if (auto v = std::get_if<Variable>(&n)) vars.insert(v->name);
  }

  // `tokens` holds the selected variables, then the ORDER BY variable.
  void check_variables(const QueryAst& ast, const std::vector<Token>& tokens) {
    std::set<std::string> in_patterns;
    for (const auto& p : ast.patterns) {
      if (auto t = std::get_if<TriplePattern>(&p)) {
        collect(t->subject, in_patterns);
        collect(t->predicate, in_patterns);
        collect(t->object, in_patterns);
      } else if (auto path = std::get_if<PathPattern>(&p)) {
        collect(path->subject, in_patterns);
        collect(path->object, in_patterns);
      } else if (auto call = std::get_if<PropertyFunctionCall>(&p)) {
        collect(call->subject, in_patterns);
        for (const auto& a : call->args) collect(a, in_patterns);
      }
    }
    for (std::size_t i = 0; i < ast.select.size(); ++i)
      if (!in_patterns.count(ast.select[i].name))
        fail(tokens[i], "selected variable ?" + ast.select[i].name + " is not bound by any pattern");
    if (ast.order_by && !in_patterns.count(ast.order_by->variable.name))
      fail(tokens.back(), "ORDER BY variable ?" + ast.order_by->variable.name +
                              " is not bound by any pattern");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  PrefixMap prefixes_;
};

std::string print_term(const Term& t) {
  if (t.is_iri()) return "<" + t.iri().str() + ">";
  const auto& lit = t.literal();
  std::string out = "\"";
  for (char c : lit.lexical()) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += "\"";
  if (lit.datatype() != Datatype::String) out += "^^<" + xsd_iri(lit.datatype()) + ">";
  return out;
}

std::string print_node(const Node& n) {
  if (auto v = std::get_if<Variable>(&n)) return "?" + v->name;
  return print_term(std::get<Term>(n));
}

}  // namespace

QueryAst parse_query(std::string_view text, const PrefixMap& defaults) {
  Parser parser(Lexer(text).run(), defaults);
  return parser.run();
}

std::string print(const QueryAst& ast) {
  std::string out = "SELECT";
  for (const auto& v : ast.select) out += " ?" + v.name;
  out += "\nWHERE {\n";
  for (const auto& p : ast.patterns) {
    out += "  ";
    if (auto t = std::get_if<TriplePattern>(&p)) {
      out += print_node(t->subject) + " " + print_node(t->predicate) + " " + print_node(t->object);
    } else if (auto path = std::get_if<PathPattern>(&p)) {
      out += print_node(path->subject) + " ";
      if (path->kind == PathKind::ZeroOrMore) {
        out += "<" + path->predicates.at(0).str() + ">*";
      } else {
        out += "<" + path->predicates.at(0).str() + ">/<" + path->predicates.at(1).str() + ">";
      }
      out += " " + print_node(path->object);
    } else if (auto f = std::get_if<Filter>(&p)) {
      out += "FILTER(";
      for (std::size_t i = 0; i < f->disjuncts.size(); ++i) {
        if (i) out += " || ";
        out += "?" + f->disjuncts[i].variable.name + " = " + print_term(f->disjuncts[i].value);
      }
      out += ")";
    } else if (auto call = std::get_if<PropertyFunctionCall>(&p)) {
      out += print_node(call->subject) + " <" + call->function.str() + "> (";
      for (std::size_t i = 0; i < call->args.size(); ++i) {
        if (i) out += " ";
        out += print_node(call->args[i]);
      }
      out += ")";
    }
    out += " .\n";
  }
  out += "}\n";
  if (ast.order_by) {
    out += std::string("ORDER BY ") +
           (ast.order_by->order == SortOrder::Ascending ? "ASC" : "DESC") + "(?" +
           ast.order_by->variable.name + ")\n";
  }
  return out;
}

}  // namespace uatrace::query
