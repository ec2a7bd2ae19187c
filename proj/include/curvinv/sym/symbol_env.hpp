#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "curvinv/sym/poly.hpp"

namespace curvinv::sym {

enum class VarKind { coordinate, parameter, sine, cosine };

/// One polynomial ring variable.
struct Variable {
  std::string name;  // display name, e.g. "r", "mu", "sin(theta)"
  VarKind kind;
  std::size_t coordinate = 0;  // coordinate index for coordinate/sine/cosine
};

struct TrigPair {
  std::size_t sine;
  std::size_t cosine;
};

/// An irreducible (as far as could be detected) sine-free polynomial used
/// as a denominator factor. Primitive with positive leading coefficient.
struct Atom {
  std::size_t id;
  Poly poly;
};
using AtomPtr = std::shared_ptr<const Atom>;

/// unit * prod(atom^exp); `unit` carries sign and integer content.
struct Factorization {
  mpz_class unit;
  std::vector<std::pair<AtomPtr, unsigned>> factors;
};

/// Thread-safe interning table of denominator atoms.
class AtomRegistry {
 public:
  /// Returns the atom for a primitive, positive, nonconstant polynomial.
  AtomPtr intern(const Poly& p);
  /// Factors a nonzero sine-free polynomial over the registered atoms,
  /// registering new atoms for whatever does not divide out.
  Factorization factor(const Poly& p);
  /// Records that `atom` splits as the product of `pieces`.
  void retire(const AtomPtr& atom, std::span<const Poly> pieces);
  std::size_t size() const;

 private:
  std::vector<AtomPtr> snapshot() const;
  void split_into(const Poly& q, std::vector<Poly>& out) const;

  mutable std::mutex mu_;
  std::unordered_map<Poly, AtomPtr, PolyHash> by_poly_;
  std::vector<AtomPtr> active_;
  std::size_t next_id_ = 0;
};

/// Coordinates, parameters and sine/cosine pairs that make up the
/// polynomial ring of an expression.
///
/// Ring variable order (which fixes the monomial order) is: coordinates
/// without a trig pair, then sin/cos per trig coordinate, then parameters.
class SymbolEnv {
 public:
  static std::shared_ptr<const SymbolEnv> create(
      std::vector<std::string> coordinates, std::vector<std::string> parameters,
      const std::vector<std::string>& trig_coordinates);

  std::size_t coordinate_count() const { return coordinates_.size(); }
  const std::string& coordinate_name(std::size_t i) const {
    return coordinates_[i];
  }
  std::optional<std::size_t> coordinate_index(std::string_view name) const;
  const std::vector<std::string>& coordinates() const { return coordinates_; }
  const std::vector<std::string>& parameters() const { return parameters_; }
  bool is_trig(std::size_t coordinate) const {
    return coordinate_sine_[coordinate].has_value();
  }

  std::size_t var_count() const { return vars_.size(); }
  const Variable& var(std::size_t i) const { return vars_[i]; }
  /// Ring variable of a non-trig coordinate or a parameter, by name.
  std::optional<std::size_t> find_var(std::string_view name) const;
  /// Ring variable of the coordinate itself (nullopt for trig coordinates).
  std::optional<std::size_t> coordinate_var(std::size_t coordinate) const {
    return coordinate_var_[coordinate];
  }
  std::optional<std::size_t> sine_var(std::size_t coordinate) const {
    return coordinate_sine_[coordinate];
  }
  std::optional<std::size_t> cosine_var(std::size_t coordinate) const {
    return coordinate_cosine_[coordinate];
  }
  std::span<const TrigPair> trig_pairs() const { return trig_pairs_; }
  /// Mask with the bits of every sine variable set.
  std::uint32_t sine_mask() const { return sine_mask_; }

  AtomRegistry& atoms() const { return atoms_; }

 private:
  SymbolEnv() = default;

  std::vector<std::string> coordinates_;
  std::vector<std::string> parameters_;
  std::vector<Variable> vars_;
  std::vector<std::optional<std::size_t>> coordinate_var_;
  std::vector<std::optional<std::size_t>> coordinate_sine_;
  std::vector<std::optional<std::size_t>> coordinate_cosine_;
  std::vector<TrigPair> trig_pairs_;
  std::uint32_t sine_mask_ = 0;
  mutable AtomRegistry atoms_;
};

using EnvPtr = std::shared_ptr<const SymbolEnv>;

/// Rewrites sin^2 -> 1 - cos^2 until every sine has degree <= 1.
/// Sets *rewrote when any rewrite happened.
Poly reduce_trig(const Poly& p, std::span<const TrigPair> pairs,
                 bool* rewrote = nullptr);

/// d/d(theta) of a polynomial in sin(theta), cos(theta), reduced.
Poly trig_derivative(const Poly& p, const TrigPair& pair,
                     std::span<const TrigPair> pairs);

}  // namespace curvinv::sym
