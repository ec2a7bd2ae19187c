#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "curvinv/sym/poly.hpp"

namespace curvinv::sym {

namespace {

constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  std::uint64_t lo = static_cast<std::uint64_t>(p & kPrime);
  std::uint64_t hi = static_cast<std::uint64_t>(p >> 61);
  std::uint64_t s = lo + hi;
  if (s >= kPrime) s -= kPrime;
  return s;
}

std::uint64_t addmod(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;
  if (s >= kPrime) s -= kPrime;
  return s;
}

std::uint64_t submod(std::uint64_t a, std::uint64_t b) {
  return a >= b ? a - b : a + kPrime - b;
}

std::uint64_t powmod(std::uint64_t b, std::uint64_t e) {
  std::uint64_t r = 1;
  while (e > 0) {
    if (e & 1) r = mulmod(r, b);
    b = mulmod(b, b);
    e >>= 1;
  }
  return r;
}

std::uint64_t invmod(std::uint64_t a) { return powmod(a, kPrime - 2); }

// Powers of a fixed pseudo-random evaluation point, one value per variable.
struct PowerTable {
  std::array<std::array<std::uint64_t, Monomial::kMaxExponent + 1>, kMaxVars>
      pw{};
  PowerTable() {
    std::uint64_t state = 0x9E3779B97F4A7C15ull;
    for (std::size_t v = 0; v < kMaxVars; ++v) {
      state += 0x9E3779B97F4A7C15ull;
      std::uint64_t z = state;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
      z ^= z >> 31;
      const std::uint64_t x = z % (kPrime - 2) + 2;
      pw[v][0] = 1;
      for (std::size_t e = 1; e <= Monomial::kMaxExponent; ++e) {
        pw[v][e] = mulmod(pw[v][e - 1], x);
      }
    }
  }
};

const PowerTable& power_table() {
  static const PowerTable table;
  return table;
}

std::size_t highest_degree_var(const Poly& p) {
  std::size_t best = 0;
  unsigned best_deg = 0;
  for (std::size_t v = 0; v < kMaxVars; ++v) {
    const unsigned d = p.degree_in(v);
    if (d > best_deg) {
      best_deg = d;
      best = v;
    }
  }
  return best;
}

Poly divide_exact(const Poly& a, const Poly& b) {
  auto q = a.divide(b);
  if (!q) throw std::logic_error("gcd: expected exact division");
  return *std::move(q);
}

Poly positive(Poly p) {
  if (!p.is_zero() && p.leading().coef < 0) p = -p;
  return p;
}

// a, b nonzero with unit integer content and no monomial content.
Poly gcd_primitive(const Poly& a, const Poly& b) {
  if (a.is_constant() || b.is_constant()) return Poly::constant(1);
  if (positive(a) == positive(b)) return positive(a);
  const std::uint32_t va = a.variables();
  const std::uint32_t vb = b.variables();
  // A variable present in only one operand cannot occur in the gcd.
  for (std::size_t v = 0; v < kMaxVars; ++v) {
    const bool in_a = (va >> v) & 1u;
    const bool in_b = (vb >> v) & 1u;
    if (in_a != in_b) {
      const Poly& with = in_a ? a : b;
      Poly g = in_a ? b : a;
      for (const auto& c : with.coefficients_in(v)) {
        if (c.is_zero()) continue;
        g = gcd(c, g);
        if (g.is_constant()) break;
      }
      return g;
    }
  }
  if (certainly_coprime(a, b)) return Poly::constant(1);
  if (auto q = a.divide(b)) return positive(b);
  if (auto q = b.divide(a)) return positive(a);

  std::size_t x = 0;
  unsigned best = ~0u;
  for (std::size_t v = 0; v < kMaxVars; ++v) {
    if (!((va >> v) & 1u)) continue;
    const unsigned d = std::max(a.degree_in(v), b.degree_in(v));
    if (d < best) {
      best = d;
      x = v;
    }
  }
  const Poly ca = content_in(a, x);
  const Poly cb = content_in(b, x);
  const Poly c = gcd(ca, cb);
  Poly f = divide_exact(a, ca);
  Poly g = divide_exact(b, cb);
  if (f.degree_in(x) < g.degree_in(x)) std::swap(f, g);
  while (true) {
    Poly r = pseudo_remainder(f, g, x);
    if (r.is_zero()) break;
    if (r.degree_in(x) == 0) {
      g = Poly::constant(1);
      break;
    }
    f = std::move(g);
    r = r.divexact(r.content());
    g = divide_exact(r, content_in(r, x));
  }
  if (!g.is_constant()) {
    g = g.divexact(g.content());
    g = divide_exact(g, content_in(g, x));
  }
  return positive(c * positive(g));
}

}  // namespace

Poly content_in(const Poly& p, std::size_t var) {
  const auto coeffs = p.coefficients_in(var);
  Poly g;
  for (const auto& c : coeffs) {
    if (c.is_zero()) continue;
    g = gcd(g, c);
    if (g.is_one()) break;
  }
  return g;
}

Poly primitive_positive(const Poly& p, mpz_class* removed) {
  if (p.is_zero()) throw std::domain_error("primitive part of zero");
  mpz_class c = p.content();
  if (p.leading().coef < 0) c = -c;
  if (removed != nullptr) *removed = c;
  return p.divexact(c);
}

Poly gcd(const Poly& a, const Poly& b) {
  if (a.is_zero()) return positive(b);
  if (b.is_zero()) return positive(a);
  const mpz_class ca = a.content();
  const mpz_class cb = b.content();
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
  if (a.is_constant() || b.is_constant()) return Poly::constant(g);
  const Monomial ma = a.monomial_content();
  const Monomial mb = b.monomial_content();
  const Monomial mg = Monomial::gcd(ma, mb);
  const Poly pa = a.divexact(ca).divexact(ma);
  const Poly pb = b.divexact(cb).divexact(mb);
  Poly h = gcd_primitive(pa, pb);
  return positive(h.mul_term(mg, g));
}

Poly pseudo_remainder(const Poly& a, const Poly& b, std::size_t var) {
  const unsigned db = b.degree_in(var);
  const Poly lcb = b.coefficient_in(var, db);
  Poly r = a;
  while (!r.is_zero()) {
    const unsigned dr = r.degree_in(var);
    if (dr < db) break;
    const Poly lcr = r.coefficient_in(var, dr);
    Poly shifted = (lcr * b).mul_term(Monomial::variable(var, dr - db), 1);
    r = r * lcb - shifted;
  }
  return r;
}

std::vector<std::uint64_t> modular_image(const Poly& p, std::size_t var) {
  const auto& pw = power_table().pw;
  std::vector<std::uint64_t> out(p.degree_in(var) + 1, 0);
  for (const auto& t : p.terms()) {
    std::uint64_t val = mpz_fdiv_ui(t.coef.get_mpz_t(), kPrime);
    for (std::size_t v = 0; v < kMaxVars; ++v) {
      const unsigned e = t.mono[v];
      if (e != 0 && v != var) val = mulmod(val, pw[v][e]);
    }
    auto& slot = out[t.mono[var]];
    slot = addmod(slot, val);
  }
  return out;
}

bool may_divide(const Poly& dividend, const Poly& divisor) {
  if (dividend.is_zero() || divisor.is_constant()) return true;
  const std::size_t var = highest_degree_var(divisor);
  std::array<unsigned, kMaxVars> need{};
  for (const auto& t : divisor.terms()) {
    for (std::size_t v = 0; v < kMaxVars; ++v) {
      need[v] = std::max(need[v], t.mono[v]);
    }
  }
  std::array<unsigned, kMaxVars> have{};
  for (const auto& t : dividend.terms()) {
    for (std::size_t v = 0; v < kMaxVars; ++v) {
      have[v] = std::max(have[v], t.mono[v]);
    }
  }
  for (std::size_t v = 0; v < kMaxVars; ++v) {
    if (need[v] > have[v]) return false;
  }
  const auto d = modular_image(divisor, var);
  if (d.back() == 0) return true;
  auto n = modular_image(dividend, var);
  const std::uint64_t inv_lc = invmod(d.back());
  const std::size_t dd = d.size() - 1;
  for (std::size_t k = n.size(); k-- > dd;) {
    if (n[k] == 0) continue;
    const std::uint64_t q = mulmod(n[k], inv_lc);
    for (std::size_t j = 0; j <= dd; ++j) {
      auto& slot = n[k - dd + j];
      slot = submod(slot, mulmod(q, d[j]));
    }
  }
  for (std::size_t k = 0; k < dd; ++k) {
    if (n[k] != 0) return false;
  }
  return true;
}

namespace {

void trim(std::vector<std::uint64_t>& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

// Degree of the monic gcd over GF(p); inputs have nonzero leading entries.
std::size_t gcd_degree_mod(std::vector<std::uint64_t> a, std::vector<std::uint64_t> b) {
  if (a.size() < b.size()) std::swap(a, b);
  while (!b.empty()) {
    const std::uint64_t inv = invmod(b.back());
    const std::size_t db = b.size() - 1;
    while (a.size() >= b.size()) {
      const std::uint64_t q = mulmod(a.back(), inv);
      const std::size_t shift = a.size() - 1 - db;
      for (std::size_t j = 0; j <= db; ++j) {
        a[shift + j] = submod(a[shift + j], mulmod(q, b[j]));
      }
      trim(a);
    }
    std::swap(a, b);
  }
  return a.empty() ? 0 : a.size() - 1;
}

}  // namespace

bool certainly_coprime(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return false;
  const std::uint32_t shared = a.variables() & b.variables();
  for (std::size_t v = 0; v < kMaxVars; ++v) {
    if (!((shared >> v) & 1u)) continue;
    const auto ia = modular_image(a, v);
    const auto ib = modular_image(b, v);
    if (ia.back() == 0 || ib.back() == 0) return false;
    if (gcd_degree_mod(ia, ib) != 0) return false;
  }
  return true;
}

}  // namespace curvinv::sym
