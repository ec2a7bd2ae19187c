#include "curvinv/metrics/metrics.hpp"

#include <set>
#include <stdexcept>

namespace curvinv::metrics {

using sym::EnvPtr;
using sym::Expr;
using sym::SymbolEnv;
using tensor::Metric;

namespace {

using Matrix = std::vector<std::vector<Expr>>;

Matrix zeros(std::size_t n) { return Matrix(n, std::vector<Expr>(n)); }

std::vector<std::string> chi_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t k = 1; k <= n; ++k) out.push_back("chi" + std::to_string(k));
  return out;
}

// Diagonal entries of the unit S^n metric over coordinates first..first+n-1,
// each scaled by `scale`.
void fill_sphere(Matrix& m, const EnvPtr& env, std::size_t first, std::size_t n,
                 const Expr& scale) {
  for (std::size_t k = 0; k < n; ++k) {
    Expr coef = scale;
    for (std::size_t j = k + 1; j < n; ++j) {
      coef = coef * Expr::sin(env, first + j).pow(2);
    }
    m[first + k][first + k] = coef;
  }
}

}  // namespace

Metric flat(std::size_t dim) {
  if (dim < 1) throw std::invalid_argument("flat metric needs D >= 1");
  std::vector<std::string> coords;
  for (std::size_t i = 0; i < dim; ++i) coords.push_back("x" + std::to_string(i));
  const EnvPtr env = SymbolEnv::create(coords, {}, {});
  Matrix m = zeros(dim);
  for (std::size_t i = 0; i < dim; ++i) m[i][i] = Expr::integer(env, i == 0 ? -1 : 1);
  return Metric("flat", env, std::move(m));
}

Metric sphere_metric(std::size_t n) {
  if (n < 1) throw std::invalid_argument("sphere metric needs n >= 1");
  const auto coords = chi_names(n);
  const std::vector<std::string> trig(coords.begin() + 1, coords.end());
  const EnvPtr env = SymbolEnv::create(coords, {}, trig);
  Matrix m = zeros(n);
  fill_sphere(m, env, 0, n, Expr::integer(env, 1));
  return Metric("sphere", env, std::move(m));
}

Metric kerr(std::size_t dim) {
  if (dim < 4) throw std::invalid_argument("kerr metric needs D >= 4");
  const std::size_t nsphere = dim - 4;
  std::vector<std::string> coords = {"t", "r", "theta", "phi"};
  std::vector<std::string> trig = {"theta"};
  const auto chis = chi_names(nsphere);
  coords.insert(coords.end(), chis.begin(), chis.end());
  if (nsphere >= 2) trig.insert(trig.end(), chis.begin() + 1, chis.end());
  const EnvPtr env = SymbolEnv::create(coords, {"a", "mu"}, trig);

  const Expr r = Expr::symbol(env, "r");
  const Expr a = Expr::symbol(env, "a");
  const Expr mu = Expr::symbol(env, "mu");
  const Expr s = Expr::sin(env, 2);
  const Expr c = Expr::cos(env, 2);
  const Expr one = Expr::integer(env, 1);

  const Expr rho2 = r * r + a * a * c * c;
  const Expr rpow = r.pow(static_cast<int>(dim) - 5);
  const Expr delta = mu / (rpow * rho2);
  const Expr psi = rho2 / ((r * r + a * a) - mu / rpow);

  Matrix m = zeros(dim);
  m[0][0] = delta - one;
  m[0][3] = m[3][0] = delta * a * s * s;
  m[1][1] = psi;
  m[2][2] = rho2;
  m[3][3] = (r * r + a * a) * s * s + delta * a * a * s.pow(4);
  fill_sphere(m, env, 4, nsphere, r * r * c * c);
  return Metric("kerr", env, std::move(m));
}

Metric make_metric(std::string_view name, std::size_t dim) {
  if (name == "flat") return flat(dim);
  if (name == "sphere") return sphere_metric(dim);
  if (name == "kerr") return kerr(dim);
  throw std::invalid_argument("unknown metric: " + std::string(name));
}

std::vector<std::string> metric_names() { return {"flat", "sphere", "kerr"}; }

std::vector<std::string> metric_symbols(const Metric& g) {
  const auto& env = *g.env();
  std::uint32_t mask = 0;
  for (const auto& e : g.lowered().entries()) mask |= e.value.variables();
  std::set<std::string> names;
  for (std::size_t v = 0; v < env.var_count(); ++v) {
    if (!((mask >> v) & 1u)) continue;
    const auto& var = env.var(v);
    if (var.kind == sym::VarKind::sine || var.kind == sym::VarKind::cosine) {
      names.insert(env.coordinate_name(var.coordinate));
    } else {
      names.insert(var.name);
    }
  }
  return {names.begin(), names.end()};
}

}  // namespace curvinv::metrics
