#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <stdexcept>

namespace curvinv::sym {

/// Maximum number of ring variables a SymbolEnv may declare.
inline constexpr std::size_t kMaxVars = 32;

/// Dense exponent vector with a cached total degree.
///
/// Ordering is graded lexicographic: total degree first, then the exponent
/// of variable 0, variable 1, ... (a larger exponent on an earlier variable
/// is the larger monomial).
class Monomial {
 public:
  using exponent_type = std::uint8_t;
  static constexpr unsigned kMaxExponent = 255;

  Monomial() = default;

  static Monomial variable(std::size_t var, unsigned power = 1) {
    Monomial m;
    m.set(var, power);
    return m;
  }

  unsigned operator[](std::size_t var) const { return exps_[var]; }
  unsigned degree() const { return degree_; }
  bool is_one() const { return degree_ == 0; }

  void set(std::size_t var, unsigned power) {
    if (power > kMaxExponent) {
      throw std::overflow_error("monomial exponent exceeds 255");
    }
    degree_ = static_cast<std::uint16_t>(degree_ - exps_[var] + power);
    exps_[var] = static_cast<exponent_type>(power);
  }

  bool divides(const Monomial& other) const {
    if (degree_ > other.degree_) return false;
    for (std::size_t i = 0; i < kMaxVars; ++i) {
      if (exps_[i] > other.exps_[i]) return false;
    }
    return true;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial r;
    bool overflow = false;
    for (std::size_t i = 0; i < kMaxVars; ++i) {
      const unsigned s = unsigned{a.exps_[i]} + b.exps_[i];
      overflow |= s > kMaxExponent;
      r.exps_[i] = static_cast<exponent_type>(s);
    }
    if (overflow) throw std::overflow_error("monomial exponent exceeds 255");
    r.degree_ = static_cast<std::uint16_t>(a.degree_ + b.degree_);
    return r;
  }

  /// Exact quotient; requires b.divides(a).
  friend Monomial operator/(const Monomial& a, const Monomial& b) {
    Monomial r;
    for (std::size_t i = 0; i < kMaxVars; ++i) {
      r.exps_[i] = static_cast<exponent_type>(a.exps_[i] - b.exps_[i]);
    }
    r.degree_ = static_cast<std::uint16_t>(a.degree_ - b.degree_);
    return r;
  }

  /// Componentwise minimum (monomial gcd).
  static Monomial gcd(const Monomial& a, const Monomial& b) {
    Monomial r;
    unsigned deg = 0;
    for (std::size_t i = 0; i < kMaxVars; ++i) {
      r.exps_[i] = a.exps_[i] < b.exps_[i] ? a.exps_[i] : b.exps_[i];
      deg += r.exps_[i];
    }
    r.degree_ = static_cast<std::uint16_t>(deg);
    return r;
  }

  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.degree_ == b.degree_ &&
           std::memcmp(a.exps_.data(), b.exps_.data(), kMaxVars) == 0;
  }

  friend std::strong_ordering operator<=>(const Monomial& a,
                                          const Monomial& b) {
    if (a.degree_ != b.degree_) return a.degree_ <=> b.degree_;
    const int c = std::memcmp(a.exps_.data(), b.exps_.data(), kMaxVars);
    return c <=> 0;
  }

  std::size_t hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (auto e : exps_) {
      h ^= e;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }

 private:
  std::array<exponent_type, kMaxVars> exps_{};
  std::uint16_t degree_ = 0;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

}  // namespace curvinv::sym
