#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <rfuzzy/engine.hpp>
#include <rfuzzy/model.hpp>

// Small random knowledge bases for differential testing: one type with up to
// 20 individuals (symbols and numbers mixed), up to 3 fuzzy predicates with
// facts, functions and defaults, and up to 2 non-recursive rules whose bodies
// only mention predicates declared before the head.
namespace testsupport {

struct generated_program {
  rfuzzy::program prog;
  rfuzzy::predicate_key query_key;
};

inline double rand01(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline std::size_t rand_below(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline generated_program make_random_program(std::mt19937_64& rng) {
  using namespace rfuzzy;

  program p;
  auto ins = [&p](auto decl) {
    program::insert_result r = p.insert(std::move(decl));
    p = std::move(std::get<program>(r));
  };

  predicate_key type_key{"t", 1};
  std::size_t n_individuals = 1 + rand_below(rng, 20);
  std::vector<constant> individuals;
  for (std::size_t i = 0; i < n_individuals; ++i) {
    constant c = rand_below(rng, 2) ? constant::symbol("c" + std::to_string(i))
                                    : constant::number(1.5 * static_cast<double>(i) - 3.0);
    individuals.push_back(c);
    ins(crisp_fact{type_key, {c}, {}});
  }

  std::size_t n_preds = 1 + rand_below(rng, 3);
  std::vector<predicate_key> preds;
  int rules_left = 2;

  for (std::size_t k = 0; k < n_preds; ++k) {
    int arity = (k > 0 && rand_below(rng, 4) == 0) ? 2 : 1;
    predicate_key key{"p" + std::to_string(k), arity};
    ins(type_signature{key, std::vector<predicate_key>(arity, type_key), {}});

    std::vector<std::vector<constant>> tuples;
    if (arity == 1) {
      for (const constant& c : individuals) tuples.push_back({c});
    } else {
      for (const constant& a : individuals)
        for (const constant& b : individuals) tuples.push_back({a, b});
    }
    std::shuffle(tuples.begin(), tuples.end(), rng);

    std::size_t n_facts = rand_below(rng, std::min<std::size_t>(tuples.size(), 8) + 1);
    for (std::size_t i = 0; i < n_facts; ++i)
      ins(fuzzy_fact{key, tuples[i], truth_value(rand01(rng)), {}});

    if (arity == 1 && rand_below(rng, 2) == 0) {
      std::vector<fn_point> points;
      double x = -4.0 + 4.0 * rand01(rng);
      std::size_t n_points = 2 + rand_below(rng, 3);
      for (std::size_t i = 0; i < n_points; ++i) {
        points.push_back({x, truth_value(rand01(rng))});
        x += 0.5 + 12.0 * rand01(rng);
      }
      ins(truth_function{key, std::move(points), {}});
    }

    if (rand_below(rng, 2) == 0) {
      predicate_key cond{"m" + std::to_string(k), arity};
      std::size_t n_cond = rand_below(rng, std::min<std::size_t>(tuples.size(), 6) + 1);
      for (std::size_t i = 0; i < n_cond; ++i)
        ins(crisp_fact{cond, tuples[tuples.size() - 1 - i], {}});
      ins(default_decl{key, truth_value(rand01(rng)), cond, {}});
    }
    if (rand_below(rng, 2) == 0)
      ins(default_decl{key, truth_value(rand01(rng)), std::nullopt, {}});

    if (k > 0 && rules_left > 0 && rand_below(rng, 2) == 0) {
      std::vector<std::string> head_vars = arity == 1 ? std::vector<std::string>{"X"}
                                                      : std::vector<std::string>{"X", "Y"};
      std::vector<body_atom> body;
      std::size_t n_atoms = 1 + rand_below(rng, 3);
      for (std::size_t i = 0; i < n_atoms; ++i) {
        predicate_key target =
            rand_below(rng, 5) == 0 ? type_key : preds[rand_below(rng, preds.size())];
        std::vector<term> args;
        for (int a = 0; a < target.arity; ++a) {
          if (rand_below(rng, 6) == 0)
            args.emplace_back(individuals[rand_below(rng, individuals.size())]);
          else
            args.emplace_back(variable{head_vars[rand_below(rng, head_vars.size())]});
        }
        body.push_back(body_atom{target, std::move(args), {}});
      }
      for (const std::string& hv : head_vars) {
        bool used = false;
        for (const body_atom& a : body)
          for (const term& t : a.args)
            used = used || (term_is_variable(t) && term_variable(t).name == hv);
        if (!used) body.push_back(body_atom{type_key, {term(variable{hv})}, {}});
      }
      std::optional<credibility> cred;
      if (rand_below(rng, 5) < 2) {
        connective ops[] = {connective::min, connective::max, connective::prod,
                            connective::luka, connective::dprod, connective::dluka};
        cred = credibility{ops[rand_below(rng, 6)], truth_value(rand01(rng))};
      }
      connective body_op;
      if (body.size() == 1 && rand_below(rng, 6) == 0) {
        body_op = connective::complement;
      } else {
        connective ops[] = {connective::min, connective::max, connective::prod,
                            connective::luka, connective::dprod, connective::dluka};
        body_op = ops[rand_below(rng, 6)];
      }
      ins(fuzzy_rule{key, head_vars, cred, body_op, std::move(body), {}});
      --rules_left;
    }
    preds.push_back(key);
  }
  return {std::move(p), preds.back()};
}

inline rfuzzy::query make_random_query(const generated_program& gen, std::mt19937_64& rng) {
  using namespace rfuzzy;
  query q;
  q.goal.key = gen.query_key;
  q.truth_var = "V";

  std::vector<std::string> names = {"X", "Y"};
  for (int i = 0; i < gen.query_key.arity; ++i) {
    bool ground = rand_below(rng, 4) == 0;
    if (ground) {
      std::vector<constant> inds = individuals_of_type(gen.prog, predicate_key{"t", 1});
      q.goal.args.emplace_back(inds[rand_below(rng, inds.size())]);
    } else if (i == 1 && rand_below(rng, 4) == 0) {
      q.goal.args.emplace_back(variable{names[0]});  // repeated variable
    } else {
      q.goal.args.emplace_back(variable{names[i]});
    }
  }

  switch (rand_below(rng, 6)) {
    case 0: break;
    case 1: q.constraints.push_back({comparator::gt, rand01(rng)}); break;
    case 2: q.constraints.push_back({comparator::ge, rand01(rng)}); break;
    case 3: q.constraints.push_back({comparator::lt, rand01(rng)}); break;
    case 4: q.constraints.push_back({comparator::le, rand01(rng)}); break;
    case 5: {
      // An equality that can actually hit: reuse a declared fact value.
      double bound = rand01(rng);
      for (const fuzzy_fact& f : gen.prog.fuzzy_facts())
        if (f.key == gen.query_key) {
          bound = f.tv.value();
          break;
        }
      q.constraints.push_back({comparator::eq, bound});
      break;
    }
  }
  return q;
}

}  // namespace testsupport
