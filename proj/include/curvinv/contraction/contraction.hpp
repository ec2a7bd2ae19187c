#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "curvinv/sym/expr.hpp"
#include "curvinv/tensor/tensor.hpp"

namespace curvinv::contraction {

using tensor::SlotPair;
using tensor::TensorField;
using tensor::Variance;

/// One Riemann factor: slots 0..3 are the tensor, slots 4.. are covariant
/// derivative slots.
struct FactorSpec {
  unsigned derivative_order = 0;
  std::vector<Variance> variance;
  std::vector<std::size_t> labels;  // label id per slot
  std::vector<SlotPair> antisym_pairs;

  std::size_t rank() const { return labels.size(); }
};

struct InvariantSpec {
  std::vector<FactorSpec> factors;
  /// Label names by id, ids assigned in order of first appearance.
  std::vector<std::string> label_names;
  std::vector<bool> free;

  std::size_t label_count() const { return label_names.size(); }
  std::vector<std::size_t> free_labels() const;
  bool is_scalar() const { return free_labels().empty(); }
  /// DSL text that parses back to this spec.
  std::string to_string() const;
};

/// Parses `R(+a,+b,+c,+d;-e) R(...)`. A `*` before or after the sign marks
/// a free label. Throws ParseError.
InvariantSpec parse_spec(std::string_view text);

/// Named invariants: I_a, I_b, I_c, I_1, I_2, kretschmann.
std::string preset_spec(std::string_view name);
std::vector<std::string> preset_names();

struct Abbreviation {
  /// Label id pairs (first, second); enumeration keeps value(first) < value(second).
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::uint64_t multiplier = 1;
};

/// Label pairs carried by adjacent antisymmetric slots of two factors in
/// the same order. A slot pair only counts as antisymmetric when both slots
/// share a variance.
Abbreviation detect_abbreviable_pairs(const InvariantSpec& spec);

/// Label pairs carried by the two derivative slots of two factors in the
/// same order.
std::vector<std::pair<std::size_t, std::size_t>> detect_symmetric_derivative_pairs(
    const InvariantSpec& spec);

/// Upper bound on products: D(D-1)/2 per abbreviated pair, D(D+1)/2 per
/// symmetric derivative pair and D per remaining label. Throws
/// std::overflow_error past 2^64.
std::uint64_t worst_case_product_count(const InvariantSpec& spec, std::size_t dim);

/// Reduction available from R_{abcd} = R_{cdab}: 2D(D-1) / (D(D-1) + 2).
/// Informational; enumeration never applies it.
double pair_exchange_factor(std::size_t dim);

/// D^2 (D^2 - 1) / 12.
std::uint64_t independent_component_count(std::size_t dim);

struct ContractionPlan {
  std::size_t label_count = 0;
  std::size_t dim = 0;
  std::vector<std::uint8_t> values;  // entry-major, label_count per entry
  std::uint64_t multiplier = 1;
  std::vector<std::pair<std::size_t, std::size_t>> abbreviated_pairs;

  std::size_t size() const { return label_count == 0 ? 0 : values.size() / label_count; }
  bool empty() const { return values.empty(); }
  std::span<const std::uint8_t> entry(std::size_t i) const {
    return {values.data() + i * label_count, label_count};
  }
};

struct EnumerateOptions {
  bool abbreviate = true;
};

/// All label assignments whose factor components are nonzero, in odometer
/// order (label 0 varies fastest). Throws ShapeMismatch when the tensors do
/// not match `spec`.
ContractionPlan enumerate_indices(const InvariantSpec& spec,
                                  std::span<const TensorField> tensors, std::size_t dim,
                                  EnumerateOptions options = {});

/// Product of the components addressed by one plan entry; zero when any
/// component is absent. Throws ShapeMismatch for a spec with no factors.
sym::Expr evaluate_product(const InvariantSpec& spec, std::span<const std::uint8_t> entry,
                           std::span<const TensorField> tensors);

/// Fully raised factor tensors for a spec on a metric.
struct MaterializedFactors {
  std::vector<TensorField> tensors;
  /// Nonzero products formed while raising; each distinct variance pattern
  /// is raised once.
  std::uint64_t raise_multiplications = 0;
  /// Stored components of the all-lower tensors, per derivative order.
  std::vector<std::size_t> lowered_sizes;
};

MaterializedFactors materialize_factors(const InvariantSpec& spec, const tensor::Metric& g);

/// Free-index contraction: one scalar contraction per assignment of the
/// free labels. The result has one slot per free label in id order.
TensorField contract_free(const InvariantSpec& spec, std::span<const TensorField> tensors,
                          std::size_t dim);

}  // namespace curvinv::contraction
