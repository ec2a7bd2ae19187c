#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "curvinv/sym/monomial.hpp"

namespace curvinv::sym {

struct Term {
  Monomial mono;
  mpz_class coef;
};

/// Sparse multivariate polynomial over the integers.
///
/// Terms are kept sorted in strictly decreasing monomial order with no zero
/// coefficients, so structural equality is polynomial equality. The class
/// knows nothing about trigonometric relations; see `TrigRules`.
class Poly {
 public:
  Poly() = default;

  static Poly constant(const mpz_class& c);
  static Poly variable(std::size_t var);
  static Poly monomial(const Monomial& m, const mpz_class& c);
  /// Accepts unsorted terms with repeats and zeros.
  static Poly from_terms(std::vector<Term> terms);
  /// Assembles sum_k coeffs[k] * var^k; the coefficients must not involve var.
  static Poly from_coefficients(std::size_t var, std::span<const Poly> coeffs);

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one());
  }
  bool is_one() const;
  const Term& leading() const { return terms_.front(); }
  /// Constant term value (0 if absent).
  mpz_class constant_value() const;

  unsigned degree_in(std::size_t var) const;
  unsigned total_degree() const;
  /// Bit i set iff variable i occurs.
  std::uint32_t variables() const;
  bool depends_on(std::size_t var) const {
    return (variables() >> var) & 1u;
  }

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly scaled(const mpz_class& c) const;
  Poly mul_term(const Monomial& m, const mpz_class& c) const;
  Poly pow(unsigned n) const;

  friend bool operator==(const Poly& a, const Poly& b);

  /// Positive gcd of the coefficients; 0 for the zero polynomial.
  mpz_class content() const;
  /// Largest monomial dividing every term.
  Monomial monomial_content() const;
  Poly divexact(const mpz_class& c) const;
  Poly divexact(const Monomial& m) const;
  /// Exact division; nullopt when `divisor` does not divide *this.
  std::optional<Poly> divide(const Poly& divisor) const;

  Poly derivative(std::size_t var) const;
  /// Coefficients with respect to `var`; index k holds the var^k coefficient.
  std::vector<Poly> coefficients_in(std::size_t var) const;
  /// Coefficient of var^k.
  Poly coefficient_in(std::size_t var, unsigned k) const;

  /// Total order used for deterministic sorting of polynomials.
  friend bool operator<(const Poly& a, const Poly& b);
  std::size_t hash() const;

 private:
  std::vector<Term> terms_;
};

struct PolyHash {
  std::size_t operator()(const Poly& p) const { return p.hash(); }
};

/// Greatest common divisor in Z[x...], with positive leading coefficient.
/// gcd(0, 0) = 0.
Poly gcd(const Poly& a, const Poly& b);

/// Divides out integer content and flips sign so the leading coefficient is
/// positive. Returns the sign-and-content factor removed (nonzero input).
Poly primitive_positive(const Poly& p, mpz_class* removed = nullptr);

/// Content with respect to var: gcd of the coefficients in var.
Poly content_in(const Poly& p, std::size_t var);

/// Pseudo-remainder of a by b with respect to var.
Poly pseudo_remainder(const Poly& a, const Poly& b, std::size_t var);

/// Modular univariate image used to reject trial divisions cheaply.
/// Evaluates every variable except `var` at a fixed pseudo-random point
/// modulo 2^61 - 1.
std::vector<std::uint64_t> modular_image(const Poly& p, std::size_t var);

/// False only when `divisor` certainly does not divide `dividend`.
bool may_divide(const Poly& dividend, const Poly& divisor);

/// True only when a and b certainly share no nonconstant factor. Checks, per
/// shared variable, that the modular univariate images have a constant gcd
/// while both leading coefficients survive the evaluation.
bool certainly_coprime(const Poly& a, const Poly& b);

}  // namespace curvinv::sym
