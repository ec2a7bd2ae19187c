#include "curvinv/sym/symbol_env.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <stdexcept>

namespace curvinv::sym {

std::shared_ptr<const SymbolEnv> SymbolEnv::create(
    std::vector<std::string> coordinates, std::vector<std::string> parameters,
    const std::vector<std::string>& trig_coordinates) {
  std::set<std::string> seen;
  for (const auto& n : coordinates) {
    if (n.empty() || !seen.insert(n).second) {
      throw std::invalid_argument("duplicate or empty symbol name: " + n);
    }
  }
  for (const auto& n : parameters) {
    if (n.empty() || !seen.insert(n).second) {
      throw std::invalid_argument("duplicate or empty symbol name: " + n);
    }
  }
  std::shared_ptr<SymbolEnv> env(new SymbolEnv());
  env->coordinates_ = std::move(coordinates);
  env->parameters_ = std::move(parameters);
  const std::size_t n = env->coordinates_.size();
  std::vector<bool> trig(n, false);
  for (const auto& t : trig_coordinates) {
    auto it = std::find(env->coordinates_.begin(), env->coordinates_.end(), t);
    if (it == env->coordinates_.end()) {
      throw std::invalid_argument("trig pair on unknown coordinate: " + t);
    }
    trig[static_cast<std::size_t>(it - env->coordinates_.begin())] = true;
  }
  env->coordinate_var_.assign(n, std::nullopt);
  env->coordinate_sine_.assign(n, std::nullopt);
  env->coordinate_cosine_.assign(n, std::nullopt);
  for (std::size_t i = 0; i < n; ++i) {
    if (trig[i]) continue;
    env->coordinate_var_[i] = env->vars_.size();
    env->vars_.push_back({env->coordinates_[i], VarKind::coordinate, i});
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!trig[i]) continue;
    const std::size_t s = env->vars_.size();
    env->vars_.push_back(
        {"sin(" + env->coordinates_[i] + ")", VarKind::sine, i});
    env->vars_.push_back(
        {"cos(" + env->coordinates_[i] + ")", VarKind::cosine, i});
    env->coordinate_sine_[i] = s;
    env->coordinate_cosine_[i] = s + 1;
    env->trig_pairs_.push_back({s, s + 1});
    env->sine_mask_ |= 1u << s;
  }
  for (const auto& p : env->parameters_) {
    env->vars_.push_back({p, VarKind::parameter, 0});
  }
  if (env->vars_.size() > kMaxVars) {
    throw std::invalid_argument("too many ring variables (max 32)");
  }
  return env;
}

std::optional<std::size_t> SymbolEnv::coordinate_index(
    std::string_view name) const {
  for (std::size_t i = 0; i < coordinates_.size(); ++i) {
    if (coordinates_[i] == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> SymbolEnv::find_var(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if ((vars_[i].kind == VarKind::coordinate ||
         vars_[i].kind == VarKind::parameter) &&
        vars_[i].name == name) {
      return i;
    }
  }
  return std::nullopt;
}

Poly reduce_trig(const Poly& p, std::span<const TrigPair> pairs,
                 bool* rewrote) {
  bool needed = false;
  for (const auto& t : p.terms()) {
    for (const auto& pr : pairs) needed |= t.mono[pr.sine] >= 2;
    if (needed) break;
  }
  if (rewrote != nullptr) *rewrote = needed;
  if (!needed) return p;
  std::vector<Term> out;
  std::vector<Term> cur;
  std::vector<Term> next;
  mpz_class binom;
  for (const auto& t : p.terms()) {
    cur.assign(1, t);
    for (const auto& pr : pairs) {
      next.clear();
      for (auto& u : cur) {
        const unsigned e = u.mono[pr.sine];
        if (e < 2) {
          next.push_back(std::move(u));
          continue;
        }
        // s^(2k+r) = s^r (1 - c^2)^k
        const unsigned k = e / 2;
        Monomial base = u.mono;
        base.set(pr.sine, e % 2);
        const unsigned c0 = base[pr.cosine];
        for (unsigned j = 0; j <= k; ++j) {
          mpz_bin_uiui(binom.get_mpz_t(), k, j);
          Monomial m = base;
          m.set(pr.cosine, c0 + 2 * j);
          mpz_class c = u.coef * binom;
          if (j % 2 == 1) c = -c;
          next.push_back({m, std::move(c)});
        }
      }
      std::swap(cur, next);
    }
    for (auto& u : cur) out.push_back(std::move(u));
  }
  return Poly::from_terms(std::move(out));
}

Poly trig_derivative(const Poly& p, const TrigPair& pair,
                     std::span<const TrigPair> pairs) {
  std::vector<Term> out;
  for (const auto& t : p.terms()) {
    const unsigned i = t.mono[pair.sine];
    const unsigned j = t.mono[pair.cosine];
    // d/dx sin^i cos^j = i sin^(i-1) cos^(j+1) - j sin^(i+1) cos^(j-1)
    if (i > 0) {
      Monomial m = t.mono;
      m.set(pair.sine, i - 1);
      m.set(pair.cosine, j + 1);
      out.push_back({m, t.coef * i});
    }
    if (j > 0) {
      Monomial m = t.mono;
      m.set(pair.sine, i + 1);
      m.set(pair.cosine, j - 1);
      out.push_back({m, -(t.coef * j)});
    }
  }
  return reduce_trig(Poly::from_terms(std::move(out)), pairs);
}

// ---------------------------------------------------------------------------

AtomPtr AtomRegistry::intern(const Poly& p) {
  std::lock_guard lock(mu_);
  if (auto it = by_poly_.find(p); it != by_poly_.end()) return it->second;
  auto atom = std::make_shared<const Atom>(Atom{next_id_++, p});
  by_poly_.emplace(p, atom);
  active_.push_back(atom);
  return atom;
}

std::size_t AtomRegistry::size() const {
  std::lock_guard lock(mu_);
  return active_.size();
}

std::vector<AtomPtr> AtomRegistry::snapshot() const {
  std::lock_guard lock(mu_);
  return active_;
}

void AtomRegistry::retire(const AtomPtr& atom, std::span<const Poly> pieces) {
  {
    std::lock_guard lock(mu_);
    by_poly_.erase(atom->poly);
    std::erase(active_, atom);
  }
  for (const auto& p : pieces) intern(p);
}

namespace {

std::vector<mpz_class> divisors_upto(const mpz_class& n, unsigned long limit) {
  std::vector<mpz_class> out;
  mpz_class a = abs(n);
  if (a == 0 || a > limit) return out;
  const unsigned long v = a.get_ui();
  for (unsigned long d = 1; d * d <= v; ++d) {
    if (v % d != 0) continue;
    out.emplace_back(d);
    if (d * d != v) out.emplace_back(v / d);
  }
  return out;
}

}  // namespace

void AtomRegistry::split_into(const Poly& input, std::vector<Poly>& out) const {
  if (input.is_constant()) return;
  Poly q = input;
  const Monomial mc = q.monomial_content();
  if (!mc.is_one()) {
    for (std::size_t v = 0; v < kMaxVars; ++v) {
      for (unsigned e = 0; e < mc[v]; ++e) out.push_back(Poly::variable(v));
    }
    q = q.divexact(mc);
    if (q.is_constant()) return;
  }
  q = primitive_positive(q);
  const std::uint32_t vars = q.variables();
  for (std::size_t v = 0; v < kMaxVars; ++v) {
    if (!((vars >> v) & 1u)) continue;
    const Poly cv = content_in(q, v);
    if (!cv.is_constant()) {
      split_into(cv, out);
      split_into(*q.divide(cv), out);
      return;
    }
  }
  for (std::size_t v = 0; v < kMaxVars; ++v) {
    if (!((vars >> v) & 1u)) continue;
    const Poly g = gcd(q, q.derivative(v));
    if (!g.is_constant()) {
      split_into(g, out);
      split_into(*q.divide(g), out);
      return;
    }
  }
  if (std::popcount(vars) == 1) {
    const std::size_t v = static_cast<std::size_t>(std::countr_zero(vars));
    const auto coeffs = q.coefficients_in(v);
    const mpz_class c0 = coeffs.front().constant_value();
    const mpz_class cn = coeffs.back().constant_value();
    constexpr unsigned long kLimit = 1000000;
    for (const auto& num : divisors_upto(c0, kLimit)) {
      for (const auto& den : divisors_upto(cn, kLimit)) {
        for (int sign : {1, -1}) {
          // Factor (den * v - sign * num).
          const Poly lin = primitive_positive(
              Poly::monomial(Monomial::variable(v), den) -
              Poly::constant(sign * num));
          if (auto rest = q.divide(lin)) {
            out.push_back(lin);
            split_into(*rest, out);
            return;
          }
        }
      }
    }
  }
  out.push_back(q);
}

Factorization AtomRegistry::factor(const Poly& p) {
  if (p.is_zero()) throw std::domain_error("factor of zero polynomial");
  Factorization result;
  Poly q = primitive_positive(p, &result.unit);
  std::map<std::size_t, std::pair<AtomPtr, unsigned>> exps;
  auto bump = [&exps](const AtomPtr& a, unsigned e) {
    auto [it, inserted] = exps.try_emplace(a->id, a, 0u);
    it->second.second += e;
  };
  const Monomial mc = q.monomial_content();
  if (!mc.is_one()) {
    for (std::size_t v = 0; v < kMaxVars; ++v) {
      if (mc[v] != 0) bump(intern(Poly::variable(v)), mc[v]);
    }
    q = q.divexact(mc);
  }
  for (const auto& atom : snapshot()) {
    if (q.is_constant()) break;
    while (!q.is_constant() && may_divide(q, atom->poly)) {
      auto d = q.divide(atom->poly);
      if (!d) break;
      q = *std::move(d);
      bump(atom, 1);
    }
  }
  if (!q.is_constant()) {
    std::vector<Poly> pieces;
    split_into(q, pieces);
    for (const auto& piece : pieces) bump(intern(piece), 1);
  } else {
    result.unit *= q.constant_value();
  }
  for (auto& [id, f] : exps) result.factors.push_back(f);
  return result;
}

}  // namespace curvinv::sym
