#include <catch_amalgamated.hpp>

#include <random>

#include "curvinv/errors.hpp"
#include "curvinv/sym/expr.hpp"
#include "curvinv/sym/tree.hpp"
#include "test_support.hpp"

using namespace curvinv;
using namespace curvinv::sym;

namespace {

EnvPtr kerr_like_env() {
  return SymbolEnv::create({"t", "r", "theta", "phi"}, {"a", "mu"}, {"theta"});
}

Expr P(const EnvPtr& env, std::string_view s) { return parse_expr(s, env); }

bool sine_degree_ok(const Expr& e) {
  const auto& env = *e.env();
  for (const auto& pr : env.trig_pairs()) {
    if (e.numerator().degree_in(pr.sine) > 1) return false;
    if (e.denominator().degree_in(pr.sine) > 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("normalize examples") {
  auto env = kerr_like_env();
  CHECK(P(env, "sin(theta)^2 + cos(theta)^2").is_one());
  CHECK(P(env, "(r^2 - a^2)/(r - a)") == P(env, "r + a"));
  CHECK(P(env, "sin(theta)*sin(theta)*cos(theta)") ==
        P(env, "cos(theta) - cos(theta)^3"));
  CHECK(P(env, "cos(theta) - cos(theta)^3").term_count() == 2);
}

TEST_CASE("arithmetic examples") {
  auto env = kerr_like_env();
  const Expr x = P(env, "r");
  CHECK((x + -x).is_zero());
  CHECK((Expr::integer(env, 1) * P(env, "a*r + mu")) == P(env, "a*r + mu"));
  CHECK((P(env, "mu/r") * x) == P(env, "mu"));
  CHECK(P(env, "r^-2") * P(env, "r^2") == Expr::integer(env, 1));
  CHECK_THROWS_AS(x / Expr::integer(env, 0), DivisionByZero);
  CHECK_THROWS_AS(P(env, "1/(sin(theta)^2 + cos(theta)^2 - 1)"), DivisionByZero);
}

TEST_CASE("division by trig expressions keeps sine out of the denominator") {
  auto env = kerr_like_env();
  const Expr e = P(env, "1/sin(theta)");
  CHECK(sine_degree_ok(e));
  CHECK((e * P(env, "sin(theta)")).is_one());
  const Expr f = P(env, "(r + a*sin(theta))/(r - a*sin(theta))");
  CHECK(sine_degree_ok(f));
  CHECK((f * P(env, "(r - a*sin(theta))/(r + a*sin(theta))")).is_one());
}

TEST_CASE("diff examples") {
  auto env = kerr_like_env();
  CHECK(P(env, "r^2").diff("r") == P(env, "2*r"));
  CHECK(P(env, "cos(theta)^2").diff("theta") == P(env, "-2*sin(theta)*cos(theta)"));
  CHECK(P(env, "r^2 + a^2*cos(theta)^2").diff("theta") ==
        P(env, "-2*a^2*sin(theta)*cos(theta)"));
  CHECK(P(env, "sin(theta)").diff("theta") == P(env, "cos(theta)"));
  CHECK(P(env, "cos(theta)").diff("theta") == P(env, "-sin(theta)"));
  CHECK(P(env, "mu/r").diff("r") == P(env, "-mu/r^2"));
  CHECK(P(env, "mu").diff("t").is_zero());
  CHECK_THROWS_AS(P(env, "r").diff("nope"), std::invalid_argument);
}

TEST_CASE("term_count and eval examples") {
  auto env = kerr_like_env();
  CHECK(Expr().term_count() == 0);
  CHECK(Expr::integer(env, 0).term_count() == 0);
  CHECK(P(env, "r + a^2 - 3").term_count() == 3);
  Assignment at{{*env->find_var("r"), 2}, {*env->find_var("a"), 3}};
  CHECK(P(env, "r + a").eval(at) == 5);
  CHECK(Expr::integer(env, 0).eval({}) == 0);
  CHECK_THROWS_AS(P(env, "1/(r - 2)").eval(at), DivisionByZero);
}

TEST_CASE("parser errors") {
  auto env = kerr_like_env();
  CHECK_THROWS_AS(parse_tree("r +"), ParseError);
  CHECK_THROWS_AS(parse_tree("(r"), ParseError);
  CHECK_THROWS_AS(parse_tree("r ^ x"), ParseError);
  CHECK_THROWS_AS(parse_tree("r $ 2"), ParseError);
  CHECK_THROWS_AS(P(env, "unknown + 1"), std::invalid_argument);
  CHECK_THROWS_AS(P(env, "sin(r)"), std::invalid_argument);
}

TEST_CASE("printing") {
  auto env = kerr_like_env();
  CHECK(P(env, "0").to_string() == "0");
  CHECK(P(env, "12*mu^2/r^6").to_string() == "12*mu^2/r^6");
  CHECK(P(env, "sin(theta)").to_string() == "sin(theta)");
}

TEST_CASE("substitution") {
  auto env = kerr_like_env();
  const auto a = *env->find_var("a");
  CHECK(P(env, "(r^2 + a^2)/(r - a)").substitute(a, 0) == P(env, "r"));
  CHECK(P(env, "mu/(r^2 + a^2*cos(theta)^2)").substitute(a, 0) == P(env, "mu/r^2"));
}

TEST_CASE("randomized properties against a direct tree evaluator") {
  auto env = kerr_like_env();
  std::mt19937_64 rng(20240611);
  const std::vector<Tree> leaves = {Tree::symbol("r"), Tree::symbol("a"), Tree::symbol("mu"),
                                    Tree::sin("theta"), Tree::cos("theta")};
  int checked = 0;
  for (int iter = 0; iter < 150; ++iter) {
    const Tree t = testing_support::random_tree(rng, leaves, 4, true);
    const Expr e = normalize(t, env);
    // Idempotence: re-normalizing the printed form gives the same value.
    CHECK(parse_expr(e.to_string(), env) == e);
    CHECK(sine_degree_ok(e));
    CHECK(e.verified() == e);
    for (int k = 0; k < 10; ++k) {
      const auto at = testing_support::pythagorean_point(env, rng);
      mpq_class want;
      try {
        want = testing_support::eval_tree(t, env, at);
      } catch (const DivisionByZero&) {
        continue;
      }
      CHECK(e.eval(at) == want);
      ++checked;
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("zero test soundness: equal trees normalize identically") {
  auto env = kerr_like_env();
  std::mt19937_64 rng(7);
  const std::vector<Tree> leaves = {Tree::symbol("r"), Tree::symbol("a"), Tree::sin("theta"),
                                    Tree::cos("theta")};
  for (int iter = 0; iter < 60; ++iter) {
    const Tree a = testing_support::random_tree(rng, leaves, 3, true);
    const Tree b = testing_support::random_tree(rng, leaves, 3, true);
    // (a + b)^2 versus a^2 + 2ab + b^2, then with s^2 + c^2 inserted.
    const Tree lhs = Tree::power(a + b, 2);
    const Tree rhs = Tree::power(a, 2) + Tree::integer(2) * a * b +
                     Tree::power(b, 2) * (Tree::power(Tree::sin("theta"), 2) +
                                          Tree::power(Tree::cos("theta"), 2));
    const Expr diff = normalize(lhs - rhs, env);
    CHECK(diff.is_zero());
    CHECK(normalize(lhs, env) == normalize(rhs, env));
  }
}

TEST_CASE("product rule and linearity of diff") {
  auto env = kerr_like_env();
  std::mt19937_64 rng(99);
  const std::vector<Tree> leaves = {Tree::symbol("r"), Tree::symbol("a"), Tree::sin("theta"),
                                    Tree::cos("theta")};
  for (int iter = 0; iter < 60; ++iter) {
    const Expr a = normalize(testing_support::random_tree(rng, leaves, 3, true), env);
    const Expr b = normalize(testing_support::random_tree(rng, leaves, 3, true), env);
    for (const char* c : {"r", "theta", "t"}) {
      CHECK(((a * b).diff(c) - (a.diff(c) * b + a * b.diff(c))).is_zero());
      CHECK(((a + b).diff(c) - a.diff(c) - b.diff(c)).is_zero());
      if (!b.is_zero()) {
        CHECK(((a / b).diff(c) - (a.diff(c) * b - a * b.diff(c)) / (b * b)).is_zero());
      }
    }
  }
}

TEST_CASE("ExprSum agrees with repeated addition") {
  auto env = kerr_like_env();
  std::mt19937_64 rng(5);
  const std::vector<Tree> leaves = {Tree::symbol("r"), Tree::symbol("a"), Tree::sin("theta"),
                                    Tree::cos("theta")};
  for (int iter = 0; iter < 20; ++iter) {
    ExprSum sum;
    Expr direct;
    for (int k = 0; k < 8; ++k) {
      const Expr e = normalize(testing_support::random_tree(rng, leaves, 3, true), env);
      sum.add_scaled(e, k - 3);
      direct = direct + e.scaled(k - 3);
    }
    CHECK(sum.value() == direct);
  }
}
