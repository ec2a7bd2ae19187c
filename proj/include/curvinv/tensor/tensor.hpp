#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "curvinv/sym/expr.hpp"

namespace curvinv::tensor {

using sym::EnvPtr;
using sym::Expr;

enum class Variance : std::uint8_t { upper, lower };

using Index = std::vector<std::uint8_t>;
/// Slot pair (p, p + 1).
using SlotPair = std::pair<std::size_t, std::size_t>;

/// Sparse rank-k array of canonical nonzero expressions.
///
/// Components are addressed by a dense row-major offset (first slot most
/// significant); absent offsets are zero. Iteration follows insertion order.
class TensorField {
 public:
  struct Entry {
    std::size_t offset;
    Expr value;
  };

  TensorField() = default;
  TensorField(EnvPtr env, std::size_t dim, std::vector<Variance> variance,
              std::vector<SlotPair> antisym_pairs = {});

  const EnvPtr& env() const { return env_; }
  std::size_t dim() const { return dim_; }
  std::size_t rank() const { return variance_.size(); }
  const std::vector<Variance>& variance() const { return variance_; }
  /// Declared antisymmetric slot pairs, independent of variance.
  const std::vector<SlotPair>& antisym_pairs() const { return antisym_; }
  /// Declared pairs whose two slots currently share a variance; only these
  /// can be exploited when contracting.
  std::vector<SlotPair> effective_antisym_pairs() const;

  std::size_t offset(std::span<const std::uint8_t> index) const;
  Index decode(std::size_t offset) const;
  std::size_t extent() const { return slot_.size(); }

  /// Nullptr when the component is zero.
  const Expr* find(std::size_t offset) const {
    const std::int32_t s = slot_[offset];
    return s < 0 ? nullptr : &entries_[static_cast<std::size_t>(s)].value;
  }
  const Expr* find(std::span<const std::uint8_t> index) const { return find(offset(index)); }
  Expr at(std::span<const std::uint8_t> index) const;

  /// Stores a component; zero values erase it.
  void set(std::size_t offset, Expr value);
  void set(std::span<const std::uint8_t> index, Expr value) { set(offset(index), std::move(value)); }

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  EnvPtr env_;
  std::size_t dim_ = 0;
  std::vector<Variance> variance_;
  std::vector<SlotPair> antisym_;
  std::vector<std::size_t> stride_;
  std::vector<std::int32_t> slot_;
  std::vector<Entry> entries_;
};

/// Symmetric, invertible metric g_{ab} with its inverse.
class Metric {
 public:
  /// Throws ShapeMismatch for a wrong shape or an asymmetric matrix and
  /// SingularMetric when the matrix is not invertible.
  Metric(std::string name, EnvPtr env, std::vector<std::vector<Expr>> components);

  const std::string& name() const { return name_; }
  const EnvPtr& env() const { return g_.env(); }
  std::size_t dim() const { return g_.dim(); }
  /// Lower-lower field.
  const TensorField& lowered() const { return g_; }
  /// Upper-upper field.
  const TensorField& inverse() const { return inv_; }
  Expr operator()(std::size_t a, std::size_t b) const;

  /// Same metric with a symbol replaced by a rational value.
  Metric substituted(std::string_view symbol, const mpq_class& value) const;

 private:
  std::string name_;
  TensorField g_;
  TensorField inv_;
};

/// Gauss-Jordan inverse of a square matrix; throws SingularMetric.
std::vector<std::vector<Expr>> invert(const std::vector<std::vector<Expr>>& m);

TensorField inverse_metric(const Metric& g);

/// Gamma^a_{bc}, symmetric in (b, c).
class ChristoffelField {
 public:
  explicit ChristoffelField(TensorField field) : field_(std::move(field)) {}
  const TensorField& field() const { return field_; }
  std::size_t dim() const { return field_.dim(); }
  const Expr* find(std::size_t a, std::size_t b, std::size_t c) const {
    const std::size_t d = field_.dim();
    return field_.find((a * d + b) * d + c);
  }

 private:
  TensorField field_;
};

ChristoffelField christoffel(const Metric& g);

/// R_{abcd}, all lower, antisymmetric pairs (0,1) and (2,3).
TensorField riemann_lowered(const Metric& g);
TensorField riemann_lowered(const Metric& g, const ChristoffelField& gamma);

/// Raises one lower slot with g^{ab}. Adds the number of nonzero component
/// products formed to *multiplications when given.
TensorField raise_index(const TensorField& t, std::size_t slot, const TensorField& g_inv,
                        std::uint64_t* multiplications = nullptr);

/// Lowers one upper slot with g_{ab}.
TensorField lower_index(const TensorField& t, std::size_t slot, const TensorField& g);

/// nabla_e T_{...} with the new slot appended last. Requires all-lower input.
TensorField covariant_derivative(const TensorField& t, const ChristoffelField& gamma);

/// Nonzero R_{abcd} with a < b, c < d and (a, b) <= (c, d): the count over
/// the D(D-1)/2 x D(D-1)/2 pair matrix, upper triangle.
std::size_t nonzero_pair_components(const TensorField& riemann);

/// Nonzero components in a basis that also uses the cyclic identity
/// R_{abcd} + R_{acdb} + R_{adbc} = 0: the pair count minus one for every
/// set of four distinct indices carrying a nonzero component. Bounded by
/// D^2(D^2-1)/12.
std::size_t nonzero_independent_components(const TensorField& riemann);

}  // namespace curvinv::tensor
