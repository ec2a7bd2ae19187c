#include <catch_amalgamated.hpp>

#include <array>
#include <random>

#include "curvinv/errors.hpp"
#include "curvinv/metrics/metrics.hpp"
#include "curvinv/sym/tree.hpp"
#include "curvinv/tensor/tensor.hpp"
#include "test_support.hpp"

using namespace curvinv;
using namespace curvinv::tensor;
using sym::Expr;
using sym::SymbolEnv;

namespace {

using Arr4 = std::array<std::uint8_t, 4>;

Expr P(const sym::EnvPtr& env, std::string_view s) { return sym::parse_expr(s, env); }

Metric polar_plane() {
  auto env = SymbolEnv::create({"r", "phi"}, {}, {});
  return Metric("polar", env, {{P(env, "1"), Expr()}, {Expr(), P(env, "r^2")}});
}

// Reference Riemann from the textbook formulas with no symmetry shortcuts.
std::vector<Expr> brute_riemann(const Metric& g) {
  const std::size_t n = g.dim();
  const auto env = g.env();
  auto ginv = [&](std::size_t a, std::size_t b) { return g.inverse().at(std::array{
      static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)}); };
  std::vector<Expr> gam(n * n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        Expr s;
        for (std::size_t d = 0; d < n; ++d) {
          s = s + ginv(a, d) * (g(d, c).diff(b) + g(b, d).diff(c) - g(b, c).diff(d));
        }
        gam[(a * n + b) * n + c] = s / Expr::integer(env, 2);
      }
  auto G = [&](std::size_t a, std::size_t b, std::size_t c) { return gam[(a * n + b) * n + c]; };
  std::vector<Expr> up(n * n * n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d) {
          Expr s = G(a, d, b).diff(c) - G(a, c, b).diff(d);
          for (std::size_t e = 0; e < n; ++e) s = s + G(a, c, e) * G(e, d, b) - G(a, d, e) * G(e, c, b);
          up[((a * n + b) * n + c) * n + d] = s;
        }
  std::vector<Expr> low(n * n * n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d) {
          Expr s;
          for (std::size_t e = 0; e < n; ++e) s = s + g(a, e) * up[((e * n + b) * n + c) * n + d];
          low[((a * n + b) * n + c) * n + d] = s;
        }
  return low;
}

void check_riemann_symmetries(const TensorField& R) {
  const std::size_t n = R.dim();
  for (std::uint8_t a = 0; a < n; ++a)
    for (std::uint8_t b = 0; b < n; ++b)
      for (std::uint8_t c = 0; c < n; ++c)
        for (std::uint8_t d = 0; d < n; ++d) {
          const Expr v = R.at(Arr4{a, b, c, d});
          CHECK((v + R.at(Arr4{b, a, c, d})).is_zero());
          CHECK((v + R.at(Arr4{a, b, d, c})).is_zero());
          CHECK((v - R.at(Arr4{c, d, a, b})).is_zero());
          CHECK((v + R.at(Arr4{a, c, d, b}) + R.at(Arr4{a, d, b, c})).is_zero());
        }
}

}  // namespace

TEST_CASE("tensor field storage") {
  auto env = SymbolEnv::create({"x", "y"}, {}, {});
  TensorField t(env, 2, {Variance::lower, Variance::upper});
  CHECK(t.empty());
  t.set(std::array<std::uint8_t, 2>{1, 0}, P(env, "x"));
  t.set(std::array<std::uint8_t, 2>{0, 1}, P(env, "y"));
  CHECK(t.size() == 2);
  CHECK(t.at(std::array<std::uint8_t, 2>{1, 0}) == P(env, "x"));
  t.set(std::array<std::uint8_t, 2>{1, 0}, Expr::integer(env, 0));
  CHECK(t.size() == 1);
  CHECK(t.find(std::array<std::uint8_t, 2>{1, 0}) == nullptr);
  CHECK(t.at(std::array<std::uint8_t, 2>{0, 1}) == P(env, "y"));
  CHECK(t.decode(t.offset(std::array<std::uint8_t, 2>{1, 1})) == Index{1, 1});
  CHECK_THROWS_AS(t.offset(std::array<std::uint8_t, 2>{2, 0}), ShapeMismatch);
  TensorField mixed(env, 2, {Variance::upper, Variance::lower, Variance::lower, Variance::lower},
                    {{0, 1}, {2, 3}});
  CHECK(mixed.effective_antisym_pairs() == std::vector<SlotPair>{{2, 3}});
}

TEST_CASE("metric validation and inverse") {
  auto env = SymbolEnv::create({"x", "y"}, {"f", "h"}, {});
  CHECK_THROWS_AS(Metric("bad", env, {{P(env, "1"), P(env, "x")}, {Expr(), P(env, "1")}}),
                  ShapeMismatch);
  CHECK_THROWS_AS(Metric("sing", env, {{P(env, "x"), P(env, "x")}, {P(env, "x"), P(env, "x")}}),
                  SingularMetric);
  const Metric d("diag", env, {{P(env, "f"), Expr()}, {Expr(), P(env, "h*x")}});
  const auto inv = inverse_metric(d);
  CHECK(inv.at(std::array<std::uint8_t, 2>{0, 0}) == P(env, "1/f"));
  CHECK(inv.at(std::array<std::uint8_t, 2>{1, 1}) == P(env, "1/(h*x)"));
  CHECK(inv.size() == 2);

  const auto flat = metrics::flat(4);
  CHECK(inverse_metric(flat).size() == 4);
  CHECK(inverse_metric(flat).at(std::array<std::uint8_t, 2>{0, 0}).to_string() == "-1");
}

TEST_CASE("inverse of Kerr satisfies g g^-1 = 1") {
  for (std::size_t D : {4u, 5u, 6u}) {
    const auto g = metrics::kerr(D);
    const auto& inv = g.inverse();
    for (std::uint8_t a = 0; a < D; ++a)
      for (std::uint8_t c = 0; c < D; ++c) {
        Expr s;
        for (std::uint8_t b = 0; b < D; ++b) s = s + g(a, b) * inv.at(std::array{b, c});
        CHECK(s == Expr::integer(g.env(), a == c ? 1 : 0));
      }
  }
}

TEST_CASE("christoffel examples") {
  const auto flat = metrics::flat(3);
  CHECK(christoffel(flat).field().empty());

  const auto polar = polar_plane();
  const auto gp = christoffel(polar);
  CHECK(*gp.find(1, 0, 1) == P(polar.env(), "1/r"));
  CHECK(*gp.find(1, 1, 0) == P(polar.env(), "1/r"));
  CHECK(*gp.find(0, 1, 1) == P(polar.env(), "-r"));
  CHECK(gp.field().size() == 3);

  // Unit 2-sphere on (chi1, chi2): chi2 plays theta, chi1 plays phi.
  const auto s2 = metrics::sphere_metric(2);
  const auto gs = christoffel(s2);
  const auto& env = s2.env();
  CHECK(*gs.find(1, 0, 0) == P(env, "-sin(chi2)*cos(chi2)"));
  CHECK(*gs.find(0, 0, 1) == P(env, "cos(chi2)/sin(chi2)"));
  CHECK(gs.field().size() == 3);
}

TEST_CASE("riemann on flat and constant-curvature metrics") {
  for (std::size_t D = 2; D <= 11; ++D) CHECK(riemann_lowered(metrics::flat(D)).empty());
  CHECK(riemann_lowered(polar_plane()).empty());

  const auto s2 = metrics::sphere_metric(2);
  const auto R = riemann_lowered(s2);
  CHECK(R.at(Arr4{0, 1, 0, 1}) == P(s2.env(), "sin(chi2)^2"));
  CHECK(R.size() == 4);
  CHECK(nonzero_pair_components(R) == 1);
  CHECK(nonzero_independent_components(R) == 1);

  // R^{abcd} on S^2: raising with the diagonal inverse gives 1/sin^2.
  std::uint64_t mults = 0;
  TensorField up = R;
  for (std::size_t s = 0; s < 4; ++s) up = raise_index(up, s, s2.inverse(), &mults);
  CHECK(up.at(Arr4{0, 1, 0, 1}) == P(s2.env(), "1/sin(chi2)^2"));
  CHECK(mults == 16);
}

TEST_CASE("riemann agrees with the brute-force formula") {
  std::vector<Metric> ms = {metrics::sphere_metric(2), metrics::sphere_metric(3), metrics::kerr(4),
                            metrics::kerr(5)};
  {
    auto env = SymbolEnv::create({"t", "x", "y"}, {"k"}, {});
    ms.emplace_back("warped", env,
                    std::vector<std::vector<Expr>>{{P(env, "-x^2"), P(env, "y"), Expr()},
                                                   {P(env, "y"), P(env, "1 + k*y^2"), Expr()},
                                                   {Expr(), Expr(), P(env, "x*y + 1")}});
  }
  for (const auto& g : ms) {
    const auto R = riemann_lowered(g);
    const auto B = brute_riemann(g);
    const std::size_t n = g.dim();
    std::size_t nonzero = 0;
    for (std::size_t off = 0; off < B.size(); ++off) {
      const Expr* v = R.find(off);
      CHECK((v == nullptr ? B[off].is_zero() : *v == B[off]));
      nonzero += !B[off].is_zero();
    }
    CHECK(nonzero == R.size());
    CHECK(nonzero_independent_components(R) <= n * n * (n * n - 1) / 12);
    check_riemann_symmetries(R);
    for (const auto& e : R.entries()) CHECK_FALSE(e.value.is_zero());
  }
}

TEST_CASE("Kerr D=4 Riemann component counts") {
  const auto R = riemann_lowered(metrics::kerr(4));
  CHECK(nonzero_pair_components(R) == 13);
  CHECK(nonzero_independent_components(R) == 12);
}

TEST_CASE("raise and lower round trip") {
  const auto g = metrics::kerr(4);
  const auto R = riemann_lowered(g);
  for (std::size_t s = 0; s < 4; ++s) {
    const auto back = lower_index(raise_index(R, s, g.inverse()), s, g.lowered());
    CHECK(back.size() == R.size());
    for (const auto& e : R.entries()) CHECK(*back.find(e.offset) == e.value);
  }
  CHECK_THROWS_AS(raise_index(raise_index(R, 0, g.inverse()), 0, g.inverse()), ShapeMismatch);
  CHECK_THROWS_AS(raise_index(R, 4, g.inverse()), ShapeMismatch);
}

TEST_CASE("covariant derivative") {
  SECTION("scalar") {
    auto env = SymbolEnv::create({"r", "phi"}, {}, {});
    TensorField f(env, 2, {});
    f.set(std::size_t{0}, P(env, "r^3"));
    const auto df = covariant_derivative(f, christoffel(polar_plane()));
    CHECK(df.at(std::array<std::uint8_t, 1>{0}) == P(env, "3*r^2"));
    CHECK(df.size() == 1);
  }
  SECTION("metric compatibility") {
    for (const auto& g : {metrics::kerr(4), metrics::kerr(5), metrics::sphere_metric(3),
                          polar_plane()}) {
      CHECK(covariant_derivative(g.lowered(), christoffel(g)).empty());
    }
  }
  SECTION("maximally symmetric spaces have parallel curvature") {
    for (const auto& g : {metrics::sphere_metric(2), metrics::sphere_metric(3)}) {
      const auto dR = covariant_derivative(riemann_lowered(g), christoffel(g));
      CHECK(dR.empty());
      CHECK(dR.rank() == 5);
      CHECK(dR.antisym_pairs().size() == 2);
    }
  }
  SECTION("agrees with the unabbreviated four-term formula on Kerr") {
    const auto g = metrics::kerr(4);
    const auto gam = christoffel(g);
    const auto R = riemann_lowered(g, gam);
    const auto dR = covariant_derivative(R, gam);
    const std::size_t n = 4;
    std::size_t nonzero = 0;
    for (std::uint8_t a = 0; a < n; ++a)
      for (std::uint8_t b = 0; b < n; ++b)
        for (std::uint8_t c = 0; c < n; ++c)
          for (std::uint8_t d = 0; d < n; ++d)
            for (std::uint8_t e = 0; e < n; ++e) {
              Expr s = R.at(Arr4{a, b, c, d}).diff(e);
              for (std::uint8_t f = 0; f < n; ++f) {
                auto G = [&](std::uint8_t x) {
                  const Expr* p = gam.find(f, e, x);
                  return p == nullptr ? Expr() : *p;
                };
                s = s - G(a) * R.at(Arr4{f, b, c, d}) - G(b) * R.at(Arr4{a, f, c, d}) -
                    G(c) * R.at(Arr4{a, b, f, d}) - G(d) * R.at(Arr4{a, b, c, f});
              }
              CHECK(dR.at(std::array{a, b, c, d, e}) == s);
              nonzero += !s.is_zero();
            }
    CHECK(nonzero == dR.size());
  }
}

TEST_CASE("second Bianchi identity on Kerr D=4") {
  const auto g = metrics::kerr(4);
  const auto gam = christoffel(g);
  const auto dR = covariant_derivative(riemann_lowered(g, gam), gam);
  for (std::uint8_t a = 0; a < 4; ++a)
    for (std::uint8_t b = 0; b < 4; ++b)
      for (std::uint8_t c = 0; c < 4; ++c)
        for (std::uint8_t d = 0; d < 4; ++d)
          for (std::uint8_t e = 0; e < 4; ++e) {
            const Expr s = dR.at(std::array{a, b, c, d, e}) + dR.at(std::array{a, b, d, e, c}) +
                           dR.at(std::array{a, b, e, c, d});
            CHECK(s.is_zero());
          }
}
