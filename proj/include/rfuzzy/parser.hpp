#pragma once

#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "model.hpp"

namespace rfuzzy {

enum class severity { error, warning };

struct diagnostic {
  severity sev = severity::error;
  int line = 0;
  int column = 0;
  std::string code;  // stable mnemonic, e.g. "tv-range"
  std::string message;
};

struct source_unit {
  std::string text;
  std::string origin = "<input>";
};

struct parse_result {
  std::optional<program> prog;  // present iff no error diagnostics
  std::vector<diagnostic> diagnostics;

  bool ok() const { return prog.has_value(); }
};

namespace detail {

enum class tok {
  atom,
  variable,
  number,
  lparen,
  rparen,
  lbracket,
  rbracket,
  comma,
  slash,
  clause_end,   // '.' followed by layout or end of input
  colon_dash,   // :-
  colon_tilde,  // :~
  colon_hash,   // :#
  arrow,        // =>
  lt,           // <
  le,           // <= or =<
  gt,           // >
  ge,           // >=
  eq,           // =
  query_mark,   // ?-
  end
};

struct token {
  tok kind = tok::end;
  std::string text;
  double num = 0.0;
  int line = 1;
  int column = 1;
};

inline bool is_layout(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

// Tokenizes a whole source; bad characters produce a diagnostic and are
// skipped so scanning always reaches the end.
inline std::vector<token> scan(std::string_view text, std::vector<diagnostic>& diags) {
  std::vector<token> out;
  std::size_t i = 0;
  int line = 1, col = 1;

  auto bump = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto push = [&](tok kind, std::size_t n) {
    out.push_back({kind, std::string(text.substr(i, n)), 0.0, line, col});
    bump(n);
  };
  auto peek = [&](std::size_t k) -> char { return i + k < text.size() ? text[i + k] : '\0'; };

  while (i < text.size()) {
    char c = text[i];
    if (is_layout(c)) {
      bump(1);
      continue;
    }
    if (c == '%') {
      while (i < text.size() && text[i] != '\n') bump(1);
      continue;
    }
    if (c == '(') { push(tok::lparen, 1); continue; }
    if (c == ')') { push(tok::rparen, 1); continue; }
    if (c == '[') { push(tok::lbracket, 1); continue; }
    if (c == ']') { push(tok::rbracket, 1); continue; }
    if (c == ',') { push(tok::comma, 1); continue; }
    if (c == '/') { push(tok::slash, 1); continue; }
    if (c == ':') {
      char n = peek(1);
      if (n == '-') { push(tok::colon_dash, 2); continue; }
      if (n == '~') { push(tok::colon_tilde, 2); continue; }
      if (n == '#') { push(tok::colon_hash, 2); continue; }
      diags.push_back({severity::error, line, col, "syntax", "stray ':'"});
      bump(1);
      continue;
    }
    if (c == '=') {
      char n = peek(1);
      if (n == '>') { push(tok::arrow, 2); continue; }
      if (n == '<') { push(tok::le, 2); continue; }
      push(tok::eq, 1);
      continue;
    }
    if (c == '<') {
      if (peek(1) == '=') { push(tok::le, 2); continue; }
      push(tok::lt, 1);
      continue;
    }
    if (c == '>') {
      if (peek(1) == '=') { push(tok::ge, 2); continue; }
      push(tok::gt, 1);
      continue;
    }
    if (c == '?') {
      if (peek(1) == '-') { push(tok::query_mark, 2); continue; }
      diags.push_back({severity::error, line, col, "syntax", "stray '?'"});
      bump(1);
      continue;
    }
    if (c == '.') {
      char n = peek(1);
      if (n == '\0' || is_layout(n) || n == '%') { push(tok::clause_end, 1); continue; }
      diags.push_back({severity::error, line, col, "syntax", "unexpected '.'"});
      bump(1);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      std::size_t n = c == '-' ? 1 : 0;
      while (std::isdigit(static_cast<unsigned char>(peek(n)))) ++n;
      if (peek(n) == '.' && std::isdigit(static_cast<unsigned char>(peek(n + 1)))) {
        ++n;
        while (std::isdigit(static_cast<unsigned char>(peek(n)))) ++n;
      }
      if ((peek(n) == 'e' || peek(n) == 'E')) {
        std::size_t m = n + 1;
        if (peek(m) == '+' || peek(m) == '-') ++m;
        if (std::isdigit(static_cast<unsigned char>(peek(m)))) {
          ++m;
          while (std::isdigit(static_cast<unsigned char>(peek(m)))) ++m;
          n = m;
        }
      }
      token t{tok::number, std::string(text.substr(i, n)), 0.0, line, col};
      t.num = std::strtod(t.text.c_str(), nullptr);
      out.push_back(std::move(t));
      bump(n);
      continue;
    }
    if (std::islower(static_cast<unsigned char>(c))) {
      std::size_t n = 1;
      while (std::isalnum(static_cast<unsigned char>(peek(n))) || peek(n) == '_') ++n;
      push(tok::atom, n);
      continue;
    }
    if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t n = 1;
      while (std::isalnum(static_cast<unsigned char>(peek(n))) || peek(n) == '_') ++n;
      push(tok::variable, n);
      continue;
    }
    diags.push_back({severity::error, line, col, "syntax",
                     std::string("unexpected character '") + c + "'"});
    bump(1);
  }
  out.push_back({tok::end, "", 0.0, line, col});
  return out;
}

// One clause at a time, recovering at the next '.' so a bad clause does not
// hide diagnostics in the rest of the file.
class clause_parser {
 public:
  clause_parser(std::vector<token> tokens, std::vector<diagnostic>& diags)
      : toks_(std::move(tokens)), diags_(diags) {}

  std::optional<program> run() {
    while (!at(tok::end)) parse_clause();
    if (failed_) return std::nullopt;
    return prog_;
  }

 private:
  const token& peek(std::size_t k = 0) const {
    std::size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }
  bool at(tok k) const { return peek().kind == k; }
  bool at_atom(std::string_view text) const { return at(tok::atom) && peek().text == text; }
  const token& advance() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool accept(tok k) {
    if (!at(k)) return false;
    advance();
    return true;
  }

  void error_at(const token& t, std::string code, std::string message) {
    diags_.push_back({severity::error, t.line, t.column, std::move(code), std::move(message)});
    failed_ = true;
  }
  void error_here(std::string code, std::string message) {
    error_at(peek(), std::move(code), std::move(message));
  }

  bool expect(tok k, std::string_view what) {
    if (accept(k)) return true;
    error_here("syntax", "expected " + std::string(what) + ", got '" + describe(peek()) + "'");
    return false;
  }

  static std::string describe(const token& t) {
    if (t.kind == tok::end) return "end of input";
    return t.text;
  }

  // Skips past the next clause terminator.
  void sync() {
    while (!at(tok::end)) {
      if (advance().kind == tok::clause_end) return;
    }
  }

  void add(const declaration& decl) {
    program::insert_result r = prog_.insert(decl);
    if (const conflict_error* c = std::get_if<conflict_error>(&r)) {
      diags_.push_back({severity::error, c->pos.line, c->pos.column, "conflict", c->message});
      failed_ = true;
      return;
    }
    prog_ = std::move(*std::get_if<program>(&r));
  }

  static source_pos pos_of(const token& t) { return {t.line, t.column}; }

  // Number token holding an integral value, for arities.
  std::optional<int> parse_small_int(std::string_view what) {
    if (!at(tok::number)) {
      error_here("syntax", "expected " + std::string(what));
      return std::nullopt;
    }
    const token& t = advance();
    if (t.num < 0 || t.num > 64 || t.num != std::floor(t.num)) {
      error_at(t, "syntax", std::string(what) + " must be a small nonnegative integer");
      return std::nullopt;
    }
    return static_cast<int>(t.num);
  }

  std::optional<predicate_key> parse_key() {
    if (!at(tok::atom)) {
      error_here("syntax", "expected predicate name");
      return std::nullopt;
    }
    std::string name = advance().text;
    if (!expect(tok::slash, "'/'")) return std::nullopt;
    std::optional<int> arity = parse_small_int("arity");
    if (!arity) return std::nullopt;
    return predicate_key{std::move(name), *arity};
  }

  std::optional<truth_value> parse_truth_literal() {
    if (!at(tok::number)) {
      error_here("syntax", "expected truth value");
      return std::nullopt;
    }
    const token& t = advance();
    if (t.num < 0.0 || t.num > 1.0) {
      error_at(t, "tv-range", "truth value " + t.text + " outside [0,1]");
      return std::nullopt;
    }
    return truth_value(t.num);
  }

  std::optional<connective> parse_connective() {
    if (!at(tok::atom)) {
      error_here("syntax", "expected connective name");
      return std::nullopt;
    }
    const token& t = advance();
    std::optional<connective> op = connective_from_name(t.text);
    if (!op) error_at(t, "op-unknown", "unknown connective '" + t.text + "'");
    return op;
  }

  // name(t1, ..., tn) with terms as variables or constants.
  struct parsed_atom {
    std::string name;
    std::vector<term> args;
    std::vector<token> arg_tokens;
    source_pos pos;
  };

  std::optional<parsed_atom> parse_compound() {
    parsed_atom out;
    const token& name = advance();
    out.name = name.text;
    out.pos = pos_of(name);
    if (!expect(tok::lparen, "'('")) return std::nullopt;
    for (;;) {
      const token& t = peek();
      if (t.kind == tok::variable) {
        out.args.emplace_back(variable{t.text});
      } else if (t.kind == tok::atom) {
        out.args.emplace_back(constant::symbol(t.text));
      } else if (t.kind == tok::number) {
        out.args.emplace_back(constant::number(t.num));
      } else {
        error_here("syntax", "expected argument, got '" + describe(t) + "'");
        return std::nullopt;
      }
      out.arg_tokens.push_back(t);
      advance();
      if (accept(tok::comma)) continue;
      break;
    }
    if (!expect(tok::rparen, "')'")) return std::nullopt;
    return out;
  }

  // Every argument ground, or a diagnostic naming the first variable.
  std::optional<std::vector<constant>> ground_args(const parsed_atom& atom) {
    std::vector<constant> out;
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
      if (term_is_variable(atom.args[i])) {
        error_at(atom.arg_tokens[i], "ground",
                 "facts must be ground; variable " + term_variable(atom.args[i]).name +
                     " is not allowed here");
        return std::nullopt;
      }
      out.push_back(term_constant(atom.args[i]));
    }
    return out;
  }

  void parse_clause() {
    if (at(tok::clause_end)) {
      error_here("syntax", "stray '.'");
      advance();
      return;
    }
    if (at(tok::colon_dash)) {
      parse_directive();
      return;
    }
    if (at(tok::atom)) {
      if (peek(1).kind == tok::lparen) {
        parse_predicate_clause();
        return;
      }
      if (peek(1).kind == tok::colon_hash) {
        parse_function_clause();
        return;
      }
      error_here("syntax", "clause for '" + peek().text + "' needs an argument list");
      sync();
      return;
    }
    error_here("syntax", "expected a clause, got '" + describe(peek()) + "'");
    sync();
  }

  void parse_directive() {
    const token& start = advance();  // :-
    if (at_atom("set_prop")) {
      advance();
      parse_set_prop(pos_of(start));
      return;
    }
    if (at_atom("default")) {
      advance();
      parse_default(pos_of(start));
      return;
    }
    error_here("syntax", "unknown directive; expected set_prop or default");
    sync();
  }

  void parse_set_prop(source_pos pos) {
    std::optional<predicate_key> target = parse_key();
    if (!target) return sync();
    if (target->arity < 1) {
      error_here("sig-arity", "fuzzy predicate " + target->text() + " needs arity >= 1");
      return sync();
    }
    if (!expect(tok::arrow, "'=>'")) return sync();
    std::vector<predicate_key> arg_types;
    for (;;) {
      const token& at_tok = peek();
      std::optional<predicate_key> ty = parse_key();
      if (!ty) return sync();
      if (ty->arity != 1) {
        error_at(at_tok, "sig-arity", "type predicate " + ty->text() + " must have arity 1");
        return sync();
      }
      arg_types.push_back(std::move(*ty));
      if (!accept(tok::comma)) break;
    }
    if (static_cast<int>(arg_types.size()) != target->arity) {
      error_at(toks_[pos_ - 1], "sig-arity",
               "set_prop for " + target->text() + " lists " +
                   std::to_string(arg_types.size()) + " argument types");
      return sync();
    }
    if (!expect(tok::clause_end, "'.'")) return sync();
    add(type_signature{std::move(*target), std::move(arg_types), pos});
  }

  void parse_default(source_pos pos) {
    if (!expect(tok::lparen, "'('")) return sync();
    std::optional<predicate_key> target = parse_key();
    if (!target) return sync();
    if (!expect(tok::comma, "','")) return sync();
    std::optional<truth_value> tv = parse_truth_literal();
    if (!tv) return sync();
    if (!expect(tok::rparen, "')'")) return sync();
    std::optional<predicate_key> condition;
    if (accept(tok::arrow)) {
      condition = parse_key();
      if (!condition) return sync();
    }
    if (!expect(tok::clause_end, "'.'")) return sync();
    add(default_decl{std::move(*target), *tv, std::move(condition), pos});
  }

  void parse_function_clause() {
    const token& name = advance();
    advance();  // :#
    source_pos pos = pos_of(name);
    if (!expect(tok::lparen, "'('")) return sync();
    if (!expect(tok::lbracket, "'['")) return sync();
    std::vector<fn_point> points;
    const token* bad_order = nullptr;
    for (;;) {
      if (!expect(tok::lparen, "'('")) return sync();
      if (!at(tok::number)) {
        error_here("syntax", "expected number");
        return sync();
      }
      const token& xt = advance();
      if (!expect(tok::comma, "','")) return sync();
      std::optional<truth_value> tv = parse_truth_literal();
      if (!tv) return sync();
      if (!expect(tok::rparen, "')'")) return sync();
      if (!points.empty() && xt.num <= points.back().x && !bad_order) bad_order = &xt;
      points.push_back({xt.num, *tv});
      if (!accept(tok::comma)) break;
    }
    if (!expect(tok::rbracket, "']'")) return sync();
    if (!expect(tok::rparen, "')'")) return sync();
    if (!expect(tok::clause_end, "'.'")) return sync();
    if (points.size() < 2) {
      diags_.push_back({severity::error, pos.line, pos.column, "fn-points",
                        "truth function " + name.text + " needs at least two points"});
      failed_ = true;
      return;
    }
    if (bad_order) {
      error_at(*bad_order, "fn-order",
               "x coordinates of " + name.text + " must be strictly increasing");
      return;
    }
    add(truth_function{predicate_key{name.text, 1}, std::move(points), pos});
  }

  void parse_predicate_clause() {
    std::optional<parsed_atom> head = parse_compound();
    if (!head) return sync();
    if (at_atom("value")) {
      advance();
      std::optional<std::vector<constant>> args = ground_args(*head);
      if (!args) return sync();
      std::optional<truth_value> tv = parse_truth_literal();
      if (!tv) return sync();
      if (!expect(tok::clause_end, "'.'")) return sync();
      predicate_key key{head->name, static_cast<int>(args->size())};
      add(fuzzy_fact{std::move(key), std::move(*args), *tv, head->pos});
      return;
    }
    if (at_atom("cred") || at(tok::colon_tilde)) {
      parse_rule_tail(*head);
      return;
    }
    if (at(tok::colon_dash)) {
      error_here("crisp-rule", "crisp rules are not supported; only ground facts and ':~' rules");
      sync();
      return;
    }
    if (at(tok::clause_end)) {
      advance();
      std::optional<std::vector<constant>> args = ground_args(*head);
      if (!args) return;
      predicate_key key{head->name, static_cast<int>(args->size())};
      add(crisp_fact{std::move(key), std::move(*args), head->pos});
      return;
    }
    error_here("syntax", "expected 'value', 'cred', ':~' or '.' after the head");
    sync();
  }

  void parse_rule_tail(const parsed_atom& head) {
    std::vector<std::string> head_vars;
    for (std::size_t i = 0; i < head.args.size(); ++i) {
      if (!term_is_variable(head.args[i])) {
        error_at(head.arg_tokens[i], "syntax", "rule head arguments must be variables");
        return sync();
      }
      head_vars.push_back(term_variable(head.args[i]).name);
    }
    std::optional<credibility> cred;
    if (at_atom("cred")) {
      advance();
      if (!expect(tok::lparen, "'('")) return sync();
      std::optional<connective> op = parse_connective();
      if (!op) return sync();
      if (!expect(tok::comma, "','")) return sync();
      std::optional<truth_value> tv = parse_truth_literal();
      if (!tv) return sync();
      if (!expect(tok::rparen, "')'")) return sync();
      cred = credibility{*op, *tv};
    }
    if (!expect(tok::colon_tilde, "':~'")) return sync();
    std::optional<connective> body_op = parse_connective();
    if (!body_op) return sync();
    std::vector<body_atom> body;
    for (;;) {
      if (!at(tok::atom) || peek(1).kind != tok::lparen) {
        error_here("syntax", "expected a body atom with arguments");
        return sync();
      }
      std::optional<parsed_atom> atom = parse_compound();
      if (!atom) return sync();
      body.push_back(body_atom{predicate_key{atom->name, static_cast<int>(atom->args.size())},
                               std::move(atom->args), atom->pos});
      if (!accept(tok::comma)) break;
    }
    if (!expect(tok::clause_end, "'.'")) return sync();
    predicate_key key{head.name, static_cast<int>(head_vars.size())};
    add(fuzzy_rule{std::move(key), std::move(head_vars), cred, *body_op, std::move(body),
                   head.pos});
  }

  std::vector<token> toks_;
  std::vector<diagnostic>& diags_;
  std::size_t pos_ = 0;
  program prog_;
  bool failed_ = false;
};

}  // namespace detail

// Parses a whole source unit, collecting every diagnostic it can find. The
// program is returned only when no error-severity diagnostic was produced.
inline parse_result parse_program(const source_unit& src) {
  parse_result out;
  std::vector<detail::token> tokens = detail::scan(src.text, out.diagnostics);
  bool lex_clean = out.diagnostics.empty();
  detail::clause_parser parser(std::move(tokens), out.diagnostics);
  std::optional<program> prog = parser.run();
  if (lex_clean && prog) out.prog = std::move(prog);
  return out;
}

// Cross-declaration checks on a parsed program. Every diagnostic returned is
// an error; a program that passes is safe to hand to the engine.
inline std::vector<diagnostic> validate(const program& p) {
  std::vector<diagnostic> out;
  std::vector<std::string> reported_keys;

  auto require_signature = [&](const predicate_key& key, source_pos pos) {
    if (p.signature_of(key)) return;
    std::string text = key.text();
    if (std::find(reported_keys.begin(), reported_keys.end(), text) != reported_keys.end())
      return;
    reported_keys.push_back(text);
    out.push_back({severity::error, pos.line, pos.column, "undeclared",
                   "fuzzy predicate " + text + " has no set_prop declaration"});
  };

  for (const fuzzy_fact& f : p.fuzzy_facts()) require_signature(f.key, f.pos);
  for (const truth_function& fn : p.functions()) require_signature(fn.key, fn.pos);
  for (const default_decl& d : p.defaults()) {
    require_signature(d.target, d.pos);
    if (d.condition && d.condition->arity != d.target.arity)
      out.push_back({severity::error, d.pos.line, d.pos.column, "default-arity",
                     "condition " + d.condition->text() + " must match the arity of " +
                         d.target.text()});
  }
  for (const fuzzy_rule& r : p.rules()) {
    require_signature(r.head, r.pos);
    if (r.body_op == connective::complement && r.body.size() != 1)
      out.push_back({severity::error, r.pos.line, r.pos.column, "complement-arity",
                     "complement aggregates exactly one body atom, got " +
                         std::to_string(r.body.size())});
    if (r.cred && r.cred->op == connective::complement)
      out.push_back({severity::error, r.pos.line, r.pos.column, "complement-arity",
                     "complement cannot combine a credibility with the body value"});
    for (const std::string& hv : r.head_vars) {
      bool used = false;
      for (const body_atom& a : r.body)
        for (const term& t : a.args)
          if (term_is_variable(t) && term_variable(t).name == hv) used = true;
      if (!used)
        out.push_back({severity::error, r.pos.line, r.pos.column, "var-head",
                       "head variable " + hv + " does not occur in the rule body"});
    }
    for (const body_atom& a : r.body) {
      if (!p.signature_of(a.key) && !p.has_crisp_predicate(a.key))
        out.push_back({severity::error, a.pos.line, a.pos.column, "undeclared",
                       "body atom " + a.key.text() + " refers to an undeclared predicate"});
      for (const term& t : a.args) {
        if (!term_is_variable(t)) continue;
        const std::string& name = term_variable(t).name;
        if (std::find(r.head_vars.begin(), r.head_vars.end(), name) == r.head_vars.end())
          out.push_back({severity::error, a.pos.line, a.pos.column, "var-body",
                         "variable " + name + " is not bound by the rule head"});
      }
    }
  }
  return out;
}

namespace detail {

inline std::string format_term(const term& t) {
  return term_is_variable(t) ? term_variable(t).name : term_constant(t).text();
}

}  // namespace detail

// Canonical text for a program: signatures, defaults, crisp facts, fuzzy
// facts, truth functions, rules, each section in declaration order. Parsing
// the output reproduces the program exactly.
inline std::string format_program(const program& p) {
  std::string out;
  for (const type_signature& s : p.signatures()) {
    out += ":- set_prop " + s.target.text() + " => ";
    for (std::size_t i = 0; i < s.argument_types.size(); ++i) {
      if (i) out += ", ";
      out += s.argument_types[i].text();
    }
    out += ".\n";
  }
  for (const default_decl& d : p.defaults()) {
    out += ":- default(" + d.target.text() + ", " + format_number(d.tv.value()) + ")";
    if (d.condition) out += " => " + d.condition->text();
    out += ".\n";
  }
  for (const crisp_fact& f : p.crisp_facts()) out += program::atom_text(f.key, f.args) + ".\n";
  for (const fuzzy_fact& f : p.fuzzy_facts())
    out += program::atom_text(f.key, f.args) + " value " + format_number(f.tv.value()) + ".\n";
  for (const truth_function& fn : p.functions()) {
    out += fn.key.name + " :# ([";
    for (std::size_t i = 0; i < fn.points.size(); ++i) {
      if (i) out += ", ";
      out += "(" + format_number(fn.points[i].x) + ", " +
             format_number(fn.points[i].tv.value()) + ")";
    }
    out += "]).\n";
  }
  for (const fuzzy_rule& r : p.rules()) {
    out += r.head.name + "(";
    for (std::size_t i = 0; i < r.head_vars.size(); ++i) {
      if (i) out += ", ";
      out += r.head_vars[i];
    }
    out += ")";
    if (r.cred)
      out += " cred (" + std::string(connective_name(r.cred->op)) + ", " +
             format_number(r.cred->tv.value()) + ")";
    out += " :~ " + std::string(connective_name(r.body_op)) + " ";
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      if (i) out += ", ";
      out += r.body[i].key.name + "(";
      for (std::size_t j = 0; j < r.body[i].args.size(); ++j) {
        if (j) out += ", ";
        out += detail::format_term(r.body[i].args[j]);
      }
      out += ")";
    }
    out += ".\n";
  }
  return out;
}

}  // namespace rfuzzy
