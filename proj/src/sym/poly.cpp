#include "curvinv/sym/poly.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>

namespace curvinv::sym {

namespace {

bool term_greater(const Term& a, const Term& b) { return a.mono > b.mono; }

// Merges two sorted term lists; `sign` is +1 or -1 for the second operand.
std::vector<Term> merge_terms(const std::vector<Term>& a,
                              const std::vector<Term>& b, int sign) {
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const auto cmp = a[i].mono <=> b[j].mono;
    if (cmp > 0) {
      out.push_back(a[i++]);
    } else if (cmp < 0) {
      out.push_back(b[j++]);
      if (sign < 0) out.back().coef = -out.back().coef;
    } else {
      mpz_class c = sign > 0 ? mpz_class(a[i].coef + b[j].coef)
                             : mpz_class(a[i].coef - b[j].coef);
      if (c != 0) out.push_back({a[i].mono, std::move(c)});
      ++i;
      ++j;
    }
  }
  for (; i < a.size(); ++i) out.push_back(a[i]);
  for (; j < b.size(); ++j) {
    out.push_back(b[j]);
    if (sign < 0) out.back().coef = -out.back().coef;
  }
  return out;
}

}  // namespace

Poly Poly::constant(const mpz_class& c) {
  Poly p;
  if (c != 0) p.terms_.push_back({Monomial{}, c});
  return p;
}

Poly Poly::variable(std::size_t var) {
  Poly p;
  p.terms_.push_back({Monomial::variable(var), mpz_class(1)});
  return p;
}

Poly Poly::monomial(const Monomial& m, const mpz_class& c) {
  Poly p;
  if (c != 0) p.terms_.push_back({m, c});
  return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), term_greater);
  Poly p;
  p.terms_.reserve(terms.size());
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().mono == t.mono) {
      p.terms_.back().coef += t.coef;
    } else {
      if (!p.terms_.empty() && p.terms_.back().coef == 0) p.terms_.pop_back();
      p.terms_.push_back(std::move(t));
    }
  }
  if (!p.terms_.empty() && p.terms_.back().coef == 0) p.terms_.pop_back();
  return p;
}

Poly Poly::from_coefficients(std::size_t var, std::span<const Poly> coeffs) {
  std::vector<Term> terms;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    for (const auto& t : coeffs[k].terms_) {
      Monomial m = t.mono;
      m.set(var, m[var] + static_cast<unsigned>(k));
      terms.push_back({m, t.coef});
    }
  }
  return from_terms(std::move(terms));
}

bool Poly::is_one() const {
  return terms_.size() == 1 && terms_[0].mono.is_one() && terms_[0].coef == 1;
}

mpz_class Poly::constant_value() const {
  if (!terms_.empty() && terms_.back().mono.is_one()) return terms_.back().coef;
  return 0;
}

unsigned Poly::degree_in(std::size_t var) const {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max(d, t.mono[var]);
  return d;
}

unsigned Poly::total_degree() const {
  return terms_.empty() ? 0 : terms_.front().mono.degree();
}

std::uint32_t Poly::variables() const {
  std::uint32_t mask = 0;
  for (const auto& t : terms_) {
    for (std::size_t v = 0; v < kMaxVars; ++v) {
      if (t.mono[v] != 0) mask |= (1u << v);
    }
  }
  return mask;
}

Poly Poly::operator-() const {
  Poly p = *this;
  for (auto& t : p.terms_) t.coef = -t.coef;
  return p;
}

Poly& Poly::operator+=(const Poly& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  terms_ = merge_terms(terms_, o.terms_, +1);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.is_zero()) return *this;
  terms_ = merge_terms(terms_, o.terms_, -1);
  return *this;
}

Poly& Poly::operator*=(const Poly& o) { return *this = *this * o; }

Poly Poly::mul_term(const Monomial& m, const mpz_class& c) const {
  Poly p;
  if (c == 0) return p;
  p.terms_.reserve(terms_.size());
  for (const auto& t : terms_) p.terms_.push_back({t.mono * m, t.coef * c});
  return p;
}

Poly Poly::scaled(const mpz_class& c) const { return mul_term(Monomial{}, c); }

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly{};
  const Poly& small = a.size() <= b.size() ? a : b;
  const Poly& big = a.size() <= b.size() ? b : a;
  if (small.size() == 1) {
    return big.mul_term(small.terms_[0].mono, small.terms_[0].coef);
  }
  if (small.size() <= 4) {
    Poly acc = big.mul_term(small.terms_[0].mono, small.terms_[0].coef);
    for (std::size_t i = 1; i < small.size(); ++i) {
      acc += big.mul_term(small.terms_[i].mono, small.terms_[i].coef);
    }
    return acc;
  }
  std::vector<Term> prod;
  prod.reserve(a.size() * b.size());
  for (const auto& ta : a.terms_) {
    for (const auto& tb : b.terms_) {
      prod.push_back({ta.mono * tb.mono, ta.coef * tb.coef});
    }
  }
  return Poly::from_terms(std::move(prod));
}

Poly Poly::pow(unsigned n) const {
  Poly result = Poly::constant(1);
  Poly base = *this;
  while (n > 0) {
    if (n & 1u) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

bool operator==(const Poly& a, const Poly& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (!(a.terms_[i].mono == b.terms_[i].mono) ||
        a.terms_[i].coef != b.terms_[i].coef) {
      return false;
    }
  }
  return true;
}

bool operator<(const Poly& a, const Poly& b) {
  const std::size_t n = std::min(a.terms_.size(), b.terms_.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = a.terms_[i].mono <=> b.terms_[i].mono;
    if (c != 0) return c < 0;
    const int cc = cmp(a.terms_[i].coef, b.terms_[i].coef);
    if (cc != 0) return cc < 0;
  }
  return a.terms_.size() < b.terms_.size();
}

std::size_t Poly::hash() const {
  std::size_t h = terms_.size();
  for (const auto& t : terms_) {
    h = h * 31 + t.mono.hash();
    h = h * 31 + static_cast<std::size_t>(mpz_get_si(t.coef.get_mpz_t()));
  }
  return h;
}

mpz_class Poly::content() const {
  mpz_class g = 0;
  for (const auto& t : terms_) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coef.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

Monomial Poly::monomial_content() const {
  if (terms_.empty()) return Monomial{};
  Monomial m = terms_[0].mono;
  for (const auto& t : terms_) {
    m = Monomial::gcd(m, t.mono);
    if (m.is_one()) break;
  }
  return m;
}

Poly Poly::divexact(const mpz_class& c) const {
  if (c == 1) return *this;
  Poly p = *this;
  for (auto& t : p.terms_) {
    mpz_divexact(t.coef.get_mpz_t(), t.coef.get_mpz_t(), c.get_mpz_t());
  }
  return p;
}

Poly Poly::divexact(const Monomial& m) const {
  if (m.is_one()) return *this;
  Poly p = *this;
  for (auto& t : p.terms_) t.mono = t.mono / m;
  return p;
}

std::optional<Poly> Poly::divide(const Poly& d) const {
  if (d.is_zero()) throw std::domain_error("polynomial division by zero");
  if (is_zero()) return Poly{};
  const Term& lt = d.leading();
  if (d.size() == 1) {
    Poly q;
    q.terms_.reserve(terms_.size());
    for (const auto& t : terms_) {
      if (!lt.mono.divides(t.mono) ||
          !mpz_divisible_p(t.coef.get_mpz_t(), lt.coef.get_mpz_t())) {
        return std::nullopt;
      }
      mpz_class c;
      mpz_divexact(c.get_mpz_t(), t.coef.get_mpz_t(), lt.coef.get_mpz_t());
      q.terms_.push_back({t.mono / lt.mono, std::move(c)});
    }
    return q;
  }
  if (!lt.mono.divides(leading().mono) ||
      !d.terms_.back().mono.divides(terms_.back().mono)) {
    return std::nullopt;
  }
  for (std::size_t v = 0; v < kMaxVars; ++v) {
    if (d.degree_in(v) > degree_in(v)) return std::nullopt;
  }
  std::map<Monomial, mpz_class, std::greater<>> rem;
  for (const auto& t : terms_) rem.emplace_hint(rem.end(), t.mono, t.coef);
  Poly q;
  mpz_class qc;
  mpz_class tmp;
  while (!rem.empty()) {
    auto it = rem.begin();
    if (!lt.mono.divides(it->first) ||
        !mpz_divisible_p(it->second.get_mpz_t(), lt.coef.get_mpz_t())) {
      return std::nullopt;
    }
    const Monomial qm = it->first / lt.mono;
    mpz_divexact(qc.get_mpz_t(), it->second.get_mpz_t(), lt.coef.get_mpz_t());
    rem.erase(it);
    for (std::size_t k = 1; k < d.terms_.size(); ++k) {
      const Monomial m = qm * d.terms_[k].mono;
      tmp = qc * d.terms_[k].coef;
      auto [pos, inserted] = rem.try_emplace(m);
      pos->second -= tmp;
      if (pos->second == 0) rem.erase(pos);
    }
    q.terms_.push_back({qm, qc});
  }
  return q;
}

Poly Poly::derivative(std::size_t var) const {
  Poly p;
  for (const auto& t : terms_) {
    const unsigned e = t.mono[var];
    if (e == 0) continue;
    Monomial m = t.mono;
    m.set(var, e - 1);
    p.terms_.push_back({m, t.coef * e});
  }
  return p;
}

std::vector<Poly> Poly::coefficients_in(std::size_t var) const {
  std::vector<std::vector<Term>> buckets(degree_in(var) + 1);
  for (const auto& t : terms_) {
    Monomial m = t.mono;
    const unsigned e = m[var];
    m.set(var, 0);
    buckets[e].push_back({m, t.coef});
  }
  std::vector<Poly> out;
  out.reserve(buckets.size());
  for (auto& b : buckets) out.push_back(from_terms(std::move(b)));
  return out;
}

Poly Poly::coefficient_in(std::size_t var, unsigned k) const {
  std::vector<Term> terms;
  for (const auto& t : terms_) {
    if (t.mono[var] != k) continue;
    Monomial m = t.mono;
    m.set(var, 0);
    terms.push_back({m, t.coef});
  }
  return from_terms(std::move(terms));
}

}  // namespace curvinv::sym
