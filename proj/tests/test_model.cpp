#include <cstdlib>
#include <limits>
#include <stdexcept>

#include <catch2/catch_amalgamated.hpp>

#include <rfuzzy/model.hpp>

using namespace rfuzzy;

namespace {

program inserted(const program& p, const declaration& decl) {
  program::insert_result r = p.insert(decl);
  if (const conflict_error* c = std::get_if<conflict_error>(&r))
    FAIL("unexpected conflict: " << c->message);
  return std::get<program>(r);
}

conflict_error rejected(const program& p, const declaration& decl) {
  program::insert_result r = p.insert(decl);
  if (!std::holds_alternative<conflict_error>(r)) FAIL("insert unexpectedly succeeded");
  return std::get<conflict_error>(r);
}

constant sym(const char* s) { return constant::symbol(s); }

}  // namespace

TEST_CASE("truth values stay inside the unit interval") {
  CHECK(truth_value(0.0).value() == 0.0);
  CHECK(truth_value(1.0).value() == 1.0);
  CHECK(truth_value(0.6).value() == 0.6);
  CHECK(truth_value() == truth_value(0.0));
  CHECK_THROWS_AS(truth_value(1.3), std::domain_error);
  CHECK_THROWS_AS(truth_value(-0.1), std::domain_error);
  CHECK_THROWS_AS(truth_value(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
  CHECK_THROWS_AS(truth_value(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST_CASE("constants compare exactly") {
  CHECK(sym("vw_caddy") == sym("vw_caddy"));
  CHECK(sym("a") != sym("b"));
  CHECK(constant::number(9.5) == constant::number(9.5));
  CHECK(constant::number(9.5) != constant::number(9.0));
  CHECK(sym("9") != constant::number(9.0));
  CHECK(constant::number(9.5).text() == "9.5");
  CHECK(sym("kenzo").text() == "kenzo");
  CHECK_THROWS_AS(constant::symbol(""), std::invalid_argument);
}

TEST_CASE("format_number emits the shortest exact decimal") {
  for (double v : {0.0, 1.0, 0.6, 0.1, 1.0 / 3.0, 0.30000000000000004, 1e-17, 123456.789, -2.5})
    CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
  CHECK(format_number(0.6) == "0.6");
  CHECK(format_number(30.0) == "30");
  CHECK(format_number(0.0) == "0");
}

TEST_CASE("insert returns an extended copy and keeps the original intact") {
  program base;
  program one = inserted(base, crisp_fact{{"car", 1}, {sym("vw_caddy")}, {}});
  CHECK(base.empty());
  CHECK(one.crisp_facts().size() == 1);
  CHECK(one.has_crisp_fact({"car", 1}, one.crisp_facts()[0].args));
}

TEST_CASE("identical declarations are idempotent") {
  program p;
  type_signature sig{{"expensive_car", 1}, {{"car", 1}}, {}};
  p = inserted(p, sig);
  p = inserted(p, sig);
  CHECK(p.signatures().size() == 1);

  fuzzy_fact f{{"expensive_car", 1}, {sym("alfa_romeo_gt")}, truth_value(0.6), {}};
  p = inserted(p, f);
  p = inserted(p, f);
  CHECK(p.fuzzy_facts().size() == 1);

  default_decl d{{"expensive_car", 1}, truth_value(0.5), std::nullopt, {}};
  p = inserted(p, d);
  p = inserted(p, d);
  CHECK(p.defaults().size() == 1);

  truth_function fn{{"teenager", 1}, {{9, truth_value(0)}, {10, truth_value(1)}}, {}};
  p = inserted(p, fn);
  p = inserted(p, fn);
  CHECK(p.functions().size() == 1);

  default_decl cond{{"expensive_car", 1}, truth_value(0.9), predicate_key{"expensive_type", 1}, {}};
  p = inserted(p, cond);
  p = inserted(p, cond);
  CHECK(p.defaults().size() == 2);
}

TEST_CASE("contradictory declarations are conflicts") {
  program p;
  p = inserted(p, fuzzy_fact{{"expensive_car", 1}, {sym("alfa_romeo_gt")}, truth_value(0.6), {}});
  conflict_error c = rejected(
      p, fuzzy_fact{{"expensive_car", 1}, {sym("alfa_romeo_gt")}, truth_value(0.7), {4, 1}});
  CHECK(c.message.find("expensive_car") != std::string::npos);
  CHECK(c.pos.line == 4);

  p = inserted(p, default_decl{{"expensive_car", 1}, truth_value(0.5), std::nullopt, {}});
  rejected(p, default_decl{{"expensive_car", 1}, truth_value(0.4), std::nullopt, {}});

  p = inserted(p, truth_function{{"teenager", 1}, {{9, truth_value(0)}, {10, truth_value(1)}}, {}});
  rejected(p, truth_function{{"teenager", 1}, {{9, truth_value(0)}, {12, truth_value(1)}}, {}});

  p = inserted(p, type_signature{{"expensive_car", 1}, {{"car", 1}}, {}});
  rejected(p, type_signature{{"expensive_car", 1}, {{"vehicle", 1}}, {}});
}

TEST_CASE("crisp facts form a multiset") {
  program p;
  crisp_fact f{{"car", 1}, {sym("vw_caddy")}, {}};
  p = inserted(p, f);
  p = inserted(p, f);
  CHECK(p.crisp_facts().size() == 2);
  CHECK(individuals_of_type(p, {"car", 1}).size() == 1);
}

TEST_CASE("individuals come back in declaration order without duplicates") {
  program p;
  for (const char* name : {"vw_caddy", "alfa_romeo_gt", "aston_martin_bulldog",
                           "lamborghini_urraco", "vw_caddy"})
    p = inserted(p, crisp_fact{{"car", 1}, {sym(name)}, {}});
  std::vector<constant> inds = individuals_of_type(p, {"car", 1});
  REQUIRE(inds.size() == 4);
  CHECK(inds[0] == sym("vw_caddy"));
  CHECK(inds[1] == sym("alfa_romeo_gt"));
  CHECK(inds[2] == sym("aston_martin_bulldog"));
  CHECK(inds[3] == sym("lamborghini_urraco"));
  CHECK(individuals_of_type(p, {"boat", 1}).empty());
}

TEST_CASE("defaults are looked up by kind and order") {
  program p;
  p = inserted(p, default_decl{{"p", 1}, truth_value(0.9), predicate_key{"a", 1}, {}});
  p = inserted(p, default_decl{{"p", 1}, truth_value(0.8), predicate_key{"b", 1}, {}});
  p = inserted(p, default_decl{{"p", 1}, truth_value(0.5), std::nullopt, {}});
  std::vector<const default_decl*> conds = p.conditioned_defaults_of({"p", 1});
  REQUIRE(conds.size() == 2);
  CHECK(conds[0]->condition->name == "a");
  CHECK(conds[1]->condition->name == "b");
  REQUIRE(p.general_default_of({"p", 1}) != nullptr);
  CHECK(p.general_default_of({"p", 1})->tv == truth_value(0.5));
  CHECK(p.general_default_of({"q", 1}) == nullptr);
}

TEST_CASE("lookups respect name, arity and arguments") {
  program p;
  p = inserted(p, type_signature{{"p", 2}, {{"t", 1}, {"t", 1}}, {}});
  p = inserted(p, fuzzy_fact{{"p", 2}, {sym("a"), sym("b")}, truth_value(0.4), {}});
  p = inserted(p, crisp_fact{{"m", 2}, {sym("a"), sym("b")}, {}});
  p = inserted(p, fuzzy_rule{{"p", 2}, {"X", "Y"}, std::nullopt, connective::min,
                             {body_atom{{"p", 2}, {variable{"X"}, variable{"Y"}}, {}}}, {}});

  CHECK(p.signature_of({"p", 2}) != nullptr);
  CHECK(p.signature_of({"p", 1}) == nullptr);
  std::vector<constant> ab = {sym("a"), sym("b")};
  std::vector<constant> ba = {sym("b"), sym("a")};
  CHECK(p.fuzzy_fact_at({"p", 2}, ab) != nullptr);
  CHECK(p.fuzzy_fact_at({"p", 2}, ba) == nullptr);
  CHECK(p.has_crisp_fact({"m", 2}, ab));
  CHECK_FALSE(p.has_crisp_fact({"m", 2}, ba));
  CHECK(p.has_crisp_predicate({"m", 2}));
  CHECK_FALSE(p.has_crisp_predicate({"m", 1}));
  CHECK(p.rules_of({"p", 2}).size() == 1);
  CHECK(p.rules_of({"q", 2}).empty());
}

TEST_CASE("rules may repeat and keep declaration order") {
  program p;
  fuzzy_rule r{{"p", 1}, {"X"}, std::nullopt, connective::min,
               {body_atom{{"q", 1}, {variable{"X"}}, {}}}, {}};
  p = inserted(p, r);
  r.body_op = connective::prod;
  p = inserted(p, r);
  std::vector<const fuzzy_rule*> rules = p.rules_of({"p", 1});
  REQUIRE(rules.size() == 2);
  CHECK(rules[0]->body_op == connective::min);
  CHECK(rules[1]->body_op == connective::prod);
}

TEST_CASE("program equality ignores source positions") {
  program a;
  a = inserted(a, crisp_fact{{"car", 1}, {sym("vw_caddy")}, {1, 1}});
  a = inserted(a, default_decl{{"p", 1}, truth_value(0.5), std::nullopt, {2, 1}});
  program b;
  b = inserted(b, crisp_fact{{"car", 1}, {sym("vw_caddy")}, {17, 3}});
  b = inserted(b, default_decl{{"p", 1}, truth_value(0.5), std::nullopt, {99, 9}});
  CHECK(a == b);

  program c = inserted(b, crisp_fact{{"car", 1}, {sym("kenzo")}, {}});
  CHECK(a != c);
}

TEST_CASE("connective names round-trip") {
  for (connective op : {connective::min, connective::max, connective::prod, connective::luka,
                        connective::dprod, connective::dluka, connective::complement})
    CHECK(connective_from_name(connective_name(op)) == op);
  CHECK_FALSE(connective_from_name("foo").has_value());
}
