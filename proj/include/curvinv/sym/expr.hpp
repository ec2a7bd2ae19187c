#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "curvinv/sym/poly.hpp"
#include "curvinv/sym/symbol_env.hpp"

namespace curvinv::sym {

struct DenFactor {
  AtomPtr atom;
  unsigned exp;
};

/// Values for ring variables, keyed by variable index.
using Assignment = std::map<std::size_t, mpq_class>;

/// Exact rational function of the ring variables of a SymbolEnv, modulo
/// sin^2 + cos^2 = 1 for every trig pair.
///
/// Canonical representation: an expanded numerator in which every sine has
/// degree <= 1, over `den_const * prod(atom^exp)` where the atoms are
/// sine-free, primitive, positive-leading and pairwise distinct, and no
/// atom divides the numerator. Because denominators are sine-free, a value
/// has exactly one such representation, so zero testing and equality are
/// structural. Values are immutable and safe to share across threads.
class Expr {
 public:
  /// The zero expression (no environment attached).
  Expr() = default;

  static Expr integer(const EnvPtr& env, const mpz_class& v);
  static Expr rational(const EnvPtr& env, const mpq_class& v);
  static Expr from_poly(const EnvPtr& env, const Poly& p);
  /// Non-trig coordinate or parameter, by name.
  static Expr symbol(const EnvPtr& env, std::string_view name);
  static Expr variable(const EnvPtr& env, std::size_t var);
  static Expr sin(const EnvPtr& env, std::size_t coordinate);
  static Expr cos(const EnvPtr& env, std::size_t coordinate);

  const EnvPtr& env() const { return env_; }
  const Poly& numerator() const { return num_; }
  const mpz_class& denominator_constant() const { return den_const_; }
  const std::vector<DenFactor>& denominator_factors() const { return den_; }
  /// Expanded denominator polynomial.
  Poly denominator() const;

  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return den_.empty() && den_const_ == 1 && num_.is_one(); }
  /// Number of monomials of the expanded numerator.
  std::size_t term_count() const { return num_.size(); }

  Expr operator-() const;
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }
  Expr scaled(const mpz_class& c) const;
  Expr pow(int n) const;

  /// Partial derivative with respect to a coordinate.
  Expr diff(std::size_t coordinate) const;
  Expr diff(std::string_view coordinate) const;

  /// Exact value at a point; throws DivisionByZero if the denominator
  /// vanishes there and std::invalid_argument if a variable is unassigned.
  mpq_class eval(const Assignment& at) const;

  /// Replaces a non-sine variable by a rational value.
  Expr substitute(std::size_t var, const mpq_class& value) const;

  /// Rechecks numerator/denominator coprimality with a full gcd against
  /// every denominator atom, splitting atoms that turn out reducible.
  Expr verified() const;

  /// Bit mask of the ring variables occurring in numerator or denominator.
  std::uint32_t variables() const;

  std::string to_string() const;

  /// Representation equality; meaningful on canonical values.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  Expr(EnvPtr env, Poly num, mpz_class den_const, std::vector<DenFactor> den);
  static Expr reduced(EnvPtr env, Poly num, mpz_class den_const,
                      std::vector<DenFactor> den);
  friend class ExprSum;

  EnvPtr env_;
  Poly num_;
  mpz_class den_const_ = 1;
  std::vector<DenFactor> den_;  // sorted by atom id
};

/// Sum of many expressions that defers cancellation to `value()`.
///
/// Terms are brought over a growing common denominator; no gcd work is done
/// until the total is requested.
class ExprSum {
 public:
  ExprSum() = default;
  void add(const Expr& e);
  void add_scaled(const Expr& e, const mpz_class& c);
  Expr value() const;
  bool empty() const { return count_ == 0; }
  std::size_t count() const { return count_; }

 private:
  EnvPtr env_;
  Poly num_;
  mpz_class den_const_ = 1;
  std::vector<DenFactor> den_;
  std::size_t count_ = 0;
};

/// Prints a polynomial with the environment's variable names.
std::string format_poly(const Poly& p, const SymbolEnv& env);

}  // namespace curvinv::sym
