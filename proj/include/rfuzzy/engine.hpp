#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aggregation.hpp"
#include "model.hpp"

namespace rfuzzy {

// Where an answer's truth value came from. Listed in resolution order: each
// tier is consulted only when every tier above it produced nothing.
enum class answer_source { fact, function, rule, conditioned_default, general_default };

inline std::string_view answer_source_name(answer_source s) {
  switch (s) {
    case answer_source::fact: return "fact";
    case answer_source::function: return "function";
    case answer_source::rule: return "rule";
    case answer_source::conditioned_default: return "conditionedDefault";
    case answer_source::general_default: return "generalDefault";
  }
  return "?";
}

struct resolution {
  truth_value tv;
  answer_source source = answer_source::fact;
};

struct eval_limits {
  std::size_t max_resolutions = 10000;  // atom resolutions per top-level goal
};

class resource_limit_error : public std::runtime_error {
 public:
  explicit resource_limit_error(std::size_t limit)
      : std::runtime_error("atom resolution budget of " + std::to_string(limit) + " exhausted") {}
};

enum class comparator { lt, le, gt, ge, eq };

inline bool satisfies(comparator cmp, double lhs, double rhs) {
  switch (cmp) {
    case comparator::lt: return lhs < rhs;
    case comparator::le: return lhs <= rhs;
    case comparator::gt: return lhs > rhs;
    case comparator::ge: return lhs >= rhs;
    case comparator::eq: return lhs == rhs;
  }
  return false;
}

inline std::string_view comparator_text(comparator cmp) {
  switch (cmp) {
    case comparator::lt: return "<";
    case comparator::le: return "=<";
    case comparator::gt: return ">";
    case comparator::ge: return ">=";
    case comparator::eq: return "=";
  }
  return "?";
}

// Restriction on the truth value of an answer. Comparison is exact.
struct tv_constraint {
  comparator cmp;
  double bound = 0.0;
};

struct query {
  body_atom goal;  // subject arguments only; variables are enumerated
  std::vector<tv_constraint> constraints;
  std::string truth_var;  // empty when the truth slot held a literal
};

struct answer {
  std::vector<std::pair<std::string, constant>> bindings;  // first-occurrence order
  truth_value tv;
  answer_source source = answer_source::fact;
};

struct resolution_trace {
  body_atom atom;
  std::vector<answer_source> tiers_tried;
  std::optional<resolution> outcome;  // empty when every tier came up dry
};

namespace detail {

struct budget {
  std::size_t remaining;
  std::size_t limit;

  void charge() {
    if (remaining == 0) throw resource_limit_error(limit);
    --remaining;
  }
};

inline budget make_budget(const eval_limits& limits) {
  return budget{limits.max_resolutions, limits.max_resolutions};
}

// A type with no declared individuals is open: any constant belongs to it.
// Once at least one individual is declared, membership is by enumeration.
inline bool member_of_type(const program& p, const predicate_key& type, const constant& c) {
  bool declared = false;
  for (const crisp_fact& f : p.crisp_facts()) {
    if (f.key != type || f.args.size() != 1) continue;
    declared = true;
    if (f.args[0] == c) return true;
  }
  return !declared;
}

inline bool type_guard(const program& p, const type_signature& sig,
                       std::span<const constant> args) {
  for (std::size_t i = 0; i < args.size(); ++i)
    if (!member_of_type(p, sig.argument_types[i], args[i])) return false;
  return true;
}

struct tier_result {
  std::vector<answer_source> tiers_tried;
  std::vector<resolution> answers;  // all answers of the first tier that produced any
};

inline std::optional<truth_value> eval_rule_impl(const program& p, const fuzzy_rule& rule,
                                                 std::span<const constant> args, budget& b);

inline tier_result resolve_atom(const program& p, const predicate_key& key,
                                std::span<const constant> args, budget& b) {
  tier_result r;
  const type_signature* sig = p.signature_of(key);
  if (!sig || args.size() != static_cast<std::size_t>(key.arity)) return r;
  if (!type_guard(p, *sig, args)) return r;
  b.charge();

  r.tiers_tried.push_back(answer_source::fact);
  if (const fuzzy_fact* f = p.fuzzy_fact_at(key, args)) {
    r.answers.push_back({f->tv, answer_source::fact});
    return r;
  }

  r.tiers_tried.push_back(answer_source::function);
  if (args.size() == 1 && args[0].is_number()) {
    if (const truth_function* fn = p.function_of(key)) {
      if (std::optional<truth_value> tv = interpolate(*fn, args[0].number_value())) {
        r.answers.push_back({*tv, answer_source::function});
        return r;
      }
    }
  }

  r.tiers_tried.push_back(answer_source::rule);
  for (const fuzzy_rule* rule : p.rules_of(key))
    if (std::optional<truth_value> tv = eval_rule_impl(p, *rule, args, b))
      r.answers.push_back({*tv, answer_source::rule});
  if (!r.answers.empty()) return r;

  r.tiers_tried.push_back(answer_source::conditioned_default);
  for (const default_decl* d : p.conditioned_defaults_of(key)) {
    if (p.has_crisp_fact(*d->condition, args)) {
      r.answers.push_back({d->tv, answer_source::conditioned_default});
      return r;
    }
  }

  r.tiers_tried.push_back(answer_source::general_default);
  if (const default_decl* d = p.general_default_of(key)) {
    r.answers.push_back({d->tv, answer_source::general_default});
    return r;
  }
  return r;
}

inline std::optional<truth_value> eval_rule_impl(const program& p, const fuzzy_rule& rule,
                                                 std::span<const constant> args, budget& b) {
  if (args.size() != rule.head_vars.size()) return std::nullopt;

  // Positional binding; a variable repeated in the head must receive the
  // same constant at every position.
  std::vector<std::pair<const std::string*, const constant*>> binding;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const constant* bound = nullptr;
    for (const auto& [name, value] : binding)
      if (*name == rule.head_vars[i]) bound = value;
    if (bound) {
      if (*bound != args[i]) return std::nullopt;
    } else {
      binding.emplace_back(&rule.head_vars[i], &args[i]);
    }
  }

  std::vector<truth_value> body_values;
  std::vector<constant> ground;
  for (const body_atom& atom : rule.body) {
    ground.clear();
    for (const term& t : atom.args) {
      if (!term_is_variable(t)) {
        ground.push_back(term_constant(t));
        continue;
      }
      const constant* bound = nullptr;
      for (const auto& [name, value] : binding)
        if (*name == term_variable(t).name) bound = value;
      if (!bound)
        throw std::logic_error("unbound variable " + term_variable(t).name +
                               " in rule body; program was not validated");
      ground.push_back(*bound);
    }
    if (p.signature_of(atom.key)) {
      tier_result sub = resolve_atom(p, atom.key, ground, b);
      if (sub.answers.empty()) return std::nullopt;
      body_values.push_back(sub.answers.front().tv);
    } else {
      // Crisp subgoal: full truth when the fact is present, failure otherwise.
      if (!p.has_crisp_fact(atom.key, ground)) return std::nullopt;
      body_values.push_back(truth_value(1.0));
    }
  }

  truth_value result = apply_connective(rule.body_op, body_values);
  if (rule.cred) {
    const truth_value pair[2] = {rule.cred->tv, result};
    result = apply_connective(rule.cred->op, pair);
  }
  return result;
}

}  // namespace detail

// Truth value of a ground atom, or nothing when the type guard rejects the
// arguments or no tier yields a value. Among several applicable rules the
// first in declaration order wins here.
inline std::optional<resolution> truth_of(const program& p, const predicate_key& key,
                                          std::span<const constant> args,
                                          const eval_limits& limits = {}) {
  detail::budget b = detail::make_budget(limits);
  detail::tier_result r = detail::resolve_atom(p, key, args, b);
  if (r.answers.empty()) return std::nullopt;
  return r.answers.front();
}

// Evaluates one rule against ground head arguments: binds the head variables
// positionally, resolves each body atom left to right, folds the truth values
// with the rule's connective and applies the credibility pair on top.
inline std::optional<truth_value> eval_rule(const program& p, const fuzzy_rule& rule,
                                            std::span<const constant> args,
                                            const eval_limits& limits = {}) {
  detail::budget b = detail::make_budget(limits);
  return detail::eval_rule_impl(p, rule, args, b);
}

// Which tiers were consulted for a ground atom and what the winning tier
// produced. An atom rejected by the type guard reports no tiers at all.
inline resolution_trace explain(const program& p, const predicate_key& key,
                                std::span<const constant> args,
                                const eval_limits& limits = {}) {
  detail::budget b = detail::make_budget(limits);
  detail::tier_result r = detail::resolve_atom(p, key, args, b);
  resolution_trace trace;
  trace.atom.key = key;
  for (const constant& c : args) trace.atom.args.emplace_back(c);
  trace.tiers_tried = std::move(r.tiers_tried);
  if (!r.answers.empty()) trace.outcome = r.answers.front();
  return trace;
}

// Lazy answer enumeration for a query. Unbound subject variables range over
// the individuals of their argument position's type, leftmost varying
// slowest; every instantiation gets a fresh resolution budget. The stream
// yields one answer per applicable rule when the rule tier wins.
class answer_stream {
 public:
  answer_stream(const program& p, query q, const eval_limits& limits = {})
      : prog_(&p), query_(std::move(q)), limits_(limits) {
    const type_signature* sig = prog_->signature_of(query_.goal.key);
    if (!sig)
      throw std::invalid_argument("query goal " + query_.goal.key.text() +
                                  " has no set_prop declaration");
    if (query_.goal.args.size() != static_cast<std::size_t>(query_.goal.key.arity))
      throw std::invalid_argument("query goal " + query_.goal.key.text() + " applied to " +
                                  std::to_string(query_.goal.args.size()) + " arguments");
    for (std::size_t i = 0; i < query_.goal.args.size(); ++i) {
      if (!term_is_variable(query_.goal.args[i])) continue;
      const std::string& name = term_variable(query_.goal.args[i]).name;
      bool seen = false;
      for (const var_slot& v : vars_) seen = seen || v.name == name;
      if (!seen) vars_.push_back({name, individuals_of_type(*prog_, sig->argument_types[i])});
    }
    odometer_.assign(vars_.size(), 0);
    for (const var_slot& v : vars_)
      if (v.candidates.empty()) exhausted_ = true;
  }

  // Next answer in enumeration order, or nothing once the space is spent.
  // Throws resource_limit_error when one instantiation blows its budget.
  std::optional<answer> next() {
    for (;;) {
      if (pending_ix_ < pending_.size()) return pending_[pending_ix_++];
      if (exhausted_) return std::nullopt;
      if (!started_) {
        started_ = true;
      } else if (!advance_odometer()) {
        exhausted_ = true;
        return std::nullopt;
      }
      evaluate_current();
    }
  }

 private:
  struct var_slot {
    std::string name;
    std::vector<constant> candidates;
  };

  bool advance_odometer() {
    if (odometer_.empty()) return false;
    std::size_t i = odometer_.size();
    while (i-- > 0) {
      if (++odometer_[i] < vars_[i].candidates.size()) return true;
      odometer_[i] = 0;
    }
    return false;
  }

  void evaluate_current() {
    pending_.clear();
    pending_ix_ = 0;

    std::vector<constant> ground;
    for (const term& t : query_.goal.args) {
      if (!term_is_variable(t)) {
        ground.push_back(term_constant(t));
        continue;
      }
      const std::string& name = term_variable(t).name;
      for (std::size_t v = 0; v < vars_.size(); ++v)
        if (vars_[v].name == name) {
          ground.push_back(vars_[v].candidates[odometer_[v]]);
          break;
        }
    }

    detail::budget b = detail::make_budget(limits_);
    detail::tier_result r = detail::resolve_atom(*prog_, query_.goal.key, ground, b);
    for (const resolution& res : r.answers) {
      bool keep = true;
      for (const tv_constraint& c : query_.constraints)
        keep = keep && satisfies(c.cmp, res.tv.value(), c.bound);
      if (!keep) continue;
      answer a;
      for (std::size_t v = 0; v < vars_.size(); ++v)
        a.bindings.emplace_back(vars_[v].name, vars_[v].candidates[odometer_[v]]);
      a.tv = res.tv;
      a.source = res.source;
      pending_.push_back(std::move(a));
    }
  }

  const program* prog_;
  query query_;
  eval_limits limits_;
  std::vector<var_slot> vars_;
  std::vector<std::size_t> odometer_;
  std::vector<answer> pending_;
  std::size_t pending_ix_ = 0;
  bool started_ = false;
  bool exhausted_ = false;
};

// The program must outlive the returned stream.
inline answer_stream solve(const program& p, const query& q, const eval_limits& limits = {}) {
  return answer_stream(p, q, limits);
}

}  // namespace rfuzzy
