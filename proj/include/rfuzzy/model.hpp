#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace rfuzzy {

// Shortest decimal text that strtod parses back to exactly the same double.
// Integral values stay in plain notation so 30 never prints as 3e+01.
inline std::string format_number(double v) {
  char buf[40];
  if (v == static_cast<long long>(v) && std::fabs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
    return buf;
  }
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

// Degree of truth attached to a ground atom. Always within [0,1].
class truth_value {
 public:
  truth_value() = default;
  explicit truth_value(double v) : v_(v) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::domain_error("truth value " + format_number(v) + " outside [0,1]");
  }
  double value() const { return v_; }

  friend bool operator==(truth_value a, truth_value b) { return a.v_ == b.v_; }
  friend bool operator!=(truth_value a, truth_value b) { return a.v_ != b.v_; }

 private:
  double v_ = 0.0;
};

// Ground term: a lowercase-initial symbol or a real number.
// Equality is exact (symbol text or the parsed double value).
class constant {
 public:
  static constant symbol(std::string name) {
    if (name.empty()) throw std::invalid_argument("symbol constants must be nonempty");
    constant c;
    c.symbol_ = std::move(name);
    return c;
  }
  static constant number(double v) {
    constant c;
    c.number_ = v;
    c.is_number_ = true;
    return c;
  }

  bool is_number() const { return is_number_; }
  bool is_symbol() const { return !is_number_; }
  const std::string& symbol_text() const { return symbol_; }
  double number_value() const { return number_; }
  std::string text() const { return is_number_ ? format_number(number_) : symbol_; }

  friend bool operator==(const constant& a, const constant& b) {
    if (a.is_number_ != b.is_number_) return false;
    return a.is_number_ ? a.number_ == b.number_ : a.symbol_ == b.symbol_;
  }
  friend bool operator!=(const constant& a, const constant& b) { return !(a == b); }

 private:
  constant() = default;
  std::string symbol_;
  double number_ = 0.0;
  bool is_number_ = false;
};

// Predicate name plus arity, the key every declaration hangs off.
struct predicate_key {
  std::string name;
  int arity = 0;

  std::string text() const { return name + "/" + std::to_string(arity); }

  friend bool operator==(const predicate_key& a, const predicate_key& b) {
    return a.arity == b.arity && a.name == b.name;
  }
  friend bool operator!=(const predicate_key& a, const predicate_key& b) { return !(a == b); }
};

// Location of a declaration in its source text. 1-based; {0,0} means unknown.
// Carried for diagnostics only and excluded from all equality comparisons.
struct source_pos {
  int line = 0;
  int column = 0;
};

struct type_signature {
  predicate_key target;
  std::vector<predicate_key> argument_types;  // one arity-1 type per argument position
  source_pos pos;

  friend bool operator==(const type_signature& a, const type_signature& b) {
    return a.target == b.target && a.argument_types == b.argument_types;
  }
  friend bool operator!=(const type_signature& a, const type_signature& b) { return !(a == b); }
};

struct crisp_fact {
  predicate_key key;
  std::vector<constant> args;
  source_pos pos;

  friend bool operator==(const crisp_fact& a, const crisp_fact& b) {
    return a.key == b.key && a.args == b.args;
  }
  friend bool operator!=(const crisp_fact& a, const crisp_fact& b) { return !(a == b); }
};

struct fuzzy_fact {
  predicate_key key;
  std::vector<constant> args;
  truth_value tv;
  source_pos pos;

  friend bool operator==(const fuzzy_fact& a, const fuzzy_fact& b) {
    return a.key == b.key && a.args == b.args && a.tv == b.tv;
  }
  friend bool operator!=(const fuzzy_fact& a, const fuzzy_fact& b) { return !(a == b); }
};

// One inflexion point of a piecewise-linear truth function.
struct fn_point {
  double x = 0.0;
  truth_value tv;

  friend bool operator==(const fn_point& a, const fn_point& b) {
    return a.x == b.x && a.tv == b.tv;
  }
  friend bool operator!=(const fn_point& a, const fn_point& b) { return !(a == b); }
};

// Piecewise-linear map from numbers to truth values, given by its
// inflexion points. x-coordinates are strictly increasing, length >= 2.
struct truth_function {
  predicate_key key;  // always arity 1
  std::vector<fn_point> points;
  source_pos pos;

  friend bool operator==(const truth_function& a, const truth_function& b) {
    return a.key == b.key && a.points == b.points;
  }
  friend bool operator!=(const truth_function& a, const truth_function& b) { return !(a == b); }
};

// The fixed connective table. All binary except complement, which is unary;
// binary ops extend to n-ary by left fold.
enum class connective { min, max, prod, luka, dprod, dluka, complement };

inline std::string_view connective_name(connective op) {
  switch (op) {
    case connective::min: return "min";
    case connective::max: return "max";
    case connective::prod: return "prod";
    case connective::luka: return "luka";
    case connective::dprod: return "dprod";
    case connective::dluka: return "dluka";
    case connective::complement: return "complement";
  }
  return "?";
}

inline std::optional<connective> connective_from_name(std::string_view name) {
  for (connective op : {connective::min, connective::max, connective::prod, connective::luka,
                        connective::dprod, connective::dluka, connective::complement})
    if (connective_name(op) == name) return op;
  return std::nullopt;
}

struct variable {
  std::string name;

  friend bool operator==(const variable& a, const variable& b) { return a.name == b.name; }
  friend bool operator!=(const variable& a, const variable& b) { return !(a == b); }
};

// Argument of a body atom: a rule-head variable or a ground constant.
using term = std::variant<variable, constant>;

inline bool term_is_variable(const term& t) { return std::holds_alternative<variable>(t); }
inline const variable& term_variable(const term& t) { return std::get<variable>(t); }
inline const constant& term_constant(const term& t) { return std::get<constant>(t); }

struct body_atom {
  predicate_key key;
  std::vector<term> args;
  source_pos pos;

  friend bool operator==(const body_atom& a, const body_atom& b) {
    return a.key == b.key && a.args == b.args;
  }
  friend bool operator!=(const body_atom& a, const body_atom& b) { return !(a == b); }
};

// Per-rule trust factor: op1 combines value1 with the aggregated body value.
struct credibility {
  connective op;
  truth_value tv;

  friend bool operator==(const credibility& a, const credibility& b) {
    return a.op == b.op && a.tv == b.tv;
  }
  friend bool operator!=(const credibility& a, const credibility& b) { return !(a == b); }
};

struct fuzzy_rule {
  predicate_key head;
  std::vector<std::string> head_vars;  // positional, length == head.arity
  std::optional<credibility> cred;
  connective body_op;
  std::vector<body_atom> body;
  source_pos pos;

  friend bool operator==(const fuzzy_rule& a, const fuzzy_rule& b) {
    return a.head == b.head && a.head_vars == b.head_vars && a.cred == b.cred &&
           a.body_op == b.body_op && a.body == b.body;
  }
  friend bool operator!=(const fuzzy_rule& a, const fuzzy_rule& b) { return !(a == b); }
};

// Default truth value for a predicate; with a condition predicate it covers
// only the individuals the condition holds for (same arity as the target).
struct default_decl {
  predicate_key target;
  truth_value tv;
  std::optional<predicate_key> condition;
  source_pos pos;

  friend bool operator==(const default_decl& a, const default_decl& b) {
    return a.target == b.target && a.tv == b.tv && a.condition == b.condition;
  }
  friend bool operator!=(const default_decl& a, const default_decl& b) { return !(a == b); }
};

using declaration =
    std::variant<type_signature, crisp_fact, fuzzy_fact, truth_function, fuzzy_rule, default_decl>;

struct conflict_error {
  std::string message;
  source_pos pos;
};

// Validated, immutable knowledge base. insert() returns an extended copy (or
// a conflict), never mutates; a built program is safe to share across threads.
class program {
 public:
  using insert_result = std::variant<program, conflict_error>;

  insert_result insert(type_signature s) const {
    if (const type_signature* old = signature_of(s.target)) {
      if (*old == s) return *this;
      return conflict_error{"conflicting set_prop declaration for " + s.target.text(), s.pos};
    }
    program next = *this;
    next.signatures_.push_back(std::move(s));
    return next;
  }

  insert_result insert(crisp_fact f) const {
    program next = *this;
    next.crisp_facts_.push_back(std::move(f));
    return next;
  }

  insert_result insert(fuzzy_fact f) const {
    if (const fuzzy_fact* old = fuzzy_fact_at(f.key, f.args)) {
      if (old->tv == f.tv) return *this;
      return conflict_error{"conflicting truth value for " + atom_text(f.key, f.args) + ": " +
                                format_number(old->tv.value()) + " vs " +
                                format_number(f.tv.value()),
                            f.pos};
    }
    program next = *this;
    next.fuzzy_facts_.push_back(std::move(f));
    return next;
  }

  insert_result insert(truth_function fn) const {
    if (const truth_function* old = function_of(fn.key)) {
      if (*old == fn) return *this;
      return conflict_error{"second truth function for " + fn.key.text(), fn.pos};
    }
    program next = *this;
    next.functions_.push_back(std::move(fn));
    return next;
  }

  insert_result insert(fuzzy_rule r) const {
    program next = *this;
    next.rules_.push_back(std::move(r));
    return next;
  }

  insert_result insert(default_decl d) const {
    if (!d.condition) {
      if (const default_decl* old = general_default_of(d.target)) {
        if (old->tv == d.tv) return *this;
        return conflict_error{"second general default for " + d.target.text() + ": " +
                                  format_number(old->tv.value()) + " vs " +
                                  format_number(d.tv.value()),
                              d.pos};
      }
    } else {
      for (const default_decl& old : defaults_)
        if (old == d) return *this;
    }
    program next = *this;
    next.defaults_.push_back(std::move(d));
    return next;
  }

  insert_result insert(const declaration& decl) const {
    return std::visit([this](const auto& d) { return insert(d); }, decl);
  }

  const std::vector<type_signature>& signatures() const { return signatures_; }
  const std::vector<crisp_fact>& crisp_facts() const { return crisp_facts_; }
  const std::vector<fuzzy_fact>& fuzzy_facts() const { return fuzzy_facts_; }
  const std::vector<truth_function>& functions() const { return functions_; }
  const std::vector<fuzzy_rule>& rules() const { return rules_; }
  const std::vector<default_decl>& defaults() const { return defaults_; }

  const type_signature* signature_of(const predicate_key& key) const {
    for (const type_signature& s : signatures_)
      if (s.target == key) return &s;
    return nullptr;
  }

  const fuzzy_fact* fuzzy_fact_at(const predicate_key& key, std::span<const constant> args) const {
    for (const fuzzy_fact& f : fuzzy_facts_)
      if (f.key == key && std::equal(f.args.begin(), f.args.end(), args.begin(), args.end()))
        return &f;
    return nullptr;
  }

  const truth_function* function_of(const predicate_key& key) const {
    for (const truth_function& fn : functions_)
      if (fn.key == key) return &fn;
    return nullptr;
  }

  std::vector<const fuzzy_rule*> rules_of(const predicate_key& key) const {
    std::vector<const fuzzy_rule*> out;
    for (const fuzzy_rule& r : rules_)
      if (r.head == key) out.push_back(&r);
    return out;
  }

  const default_decl* general_default_of(const predicate_key& key) const {
    for (const default_decl& d : defaults_)
      if (!d.condition && d.target == key) return &d;
    return nullptr;
  }

  std::vector<const default_decl*> conditioned_defaults_of(const predicate_key& key) const {
    std::vector<const default_decl*> out;
    for (const default_decl& d : defaults_)
      if (d.condition && d.target == key) out.push_back(&d);
    return out;
  }

  bool has_crisp_fact(const predicate_key& key, std::span<const constant> args) const {
    for (const crisp_fact& f : crisp_facts_)
      if (f.key == key && std::equal(f.args.begin(), f.args.end(), args.begin(), args.end()))
        return true;
    return false;
  }

  bool has_crisp_predicate(const predicate_key& key) const {
    for (const crisp_fact& f : crisp_facts_)
      if (f.key == key) return true;
    return false;
  }

  bool empty() const {
    return signatures_.empty() && crisp_facts_.empty() && fuzzy_facts_.empty() &&
           functions_.empty() && rules_.empty() && defaults_.empty();
  }

  static std::string atom_text(const predicate_key& key, std::span<const constant> args) {
    std::string out = key.name + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) out += ", ";
      out += args[i].text();
    }
    return out + ")";
  }

  friend bool operator==(const program& a, const program& b) {
    return a.signatures_ == b.signatures_ && a.crisp_facts_ == b.crisp_facts_ &&
           a.fuzzy_facts_ == b.fuzzy_facts_ && a.functions_ == b.functions_ &&
           a.rules_ == b.rules_ && a.defaults_ == b.defaults_;
  }
  friend bool operator!=(const program& a, const program& b) { return !(a == b); }

 private:
  std::vector<type_signature> signatures_;
  std::vector<crisp_fact> crisp_facts_;
  std::vector<fuzzy_fact> fuzzy_facts_;
  std::vector<truth_function> functions_;
  std::vector<fuzzy_rule> rules_;
  std::vector<default_decl> defaults_;
};

inline program::insert_result program_insert(const program& p, const declaration& decl) {
  return p.insert(decl);
}

// Individuals declared for an arity-1 type predicate, in declaration order,
// without duplicates. Unknown types yield an empty list.
inline std::vector<constant> individuals_of_type(const program& p, const predicate_key& type) {
  std::vector<constant> out;
  for (const crisp_fact& f : p.crisp_facts()) {
    if (f.key != type || f.args.size() != 1) continue;
    if (std::find(out.begin(), out.end(), f.args[0]) == out.end()) out.push_back(f.args[0]);
  }
  return out;
}

}  // namespace rfuzzy
