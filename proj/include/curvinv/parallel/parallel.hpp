#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "curvinv/contraction/contraction.hpp"
#include "curvinv/sym/expr.hpp"
#include "curvinv/tensor/tensor.hpp"

namespace curvinv::parallel {

enum class Cadence { per_parcel, per_entry };

struct RunConfig {
  std::size_t workers = 1;
  std::size_t parcels_per_worker = 1;
  Cadence cadence = Cadence::per_parcel;
};

/// Half-open slice [begin, end) of a plan.
struct Parcel {
  std::size_t id = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

/// min(N, workers * parcels_per_worker) contiguous parcels whose sizes differ
/// by at most one, larger parcels first.
std::vector<Parcel> partition(std::size_t entries, const RunConfig& cfg);
std::vector<Parcel> partition(const contraction::ContractionPlan& plan, const RunConfig& cfg);

struct WorkerStats {
  std::size_t entries = 0;
  std::size_t parcels = 0;
  double wall_ms = 0;
};

struct RunReport {
  sym::Expr invariant;
  std::uint64_t P = 0;
  std::size_t T = 0;
  std::size_t entries = 0;
  std::uint64_t raise_products = 0;
  std::uint64_t multiplier = 1;
  std::size_t workers = 0;
  std::size_t parcels = 0;
  std::vector<WorkerStats> per_worker;
  double wall_ms = 0;
  std::string metric;
  std::vector<std::string> coordinates;
  std::size_t dim = 0;
  std::string spec;
};

/// Runs the plan on a pool of workers that pull parcels as they go idle.
/// Each worker keeps one partial sum; partial sums are merged, multiplied by
/// the plan multiplier and canonicalized once. P counts plan entries only.
/// A worker exception is rethrown after all workers stop.
RunReport execute(const contraction::InvariantSpec& spec,
                  const contraction::ContractionPlan& plan,
                  std::span<const tensor::TensorField> tensors, const RunConfig& cfg);

/// Single-threaded reference: one addition per plan entry, in plan order.
sym::Expr sequential_oracle(const contraction::InvariantSpec& spec,
                            const contraction::ContractionPlan& plan,
                            std::span<const tensor::TensorField> tensors);

/// Riemann, derivatives, raising, enumeration and execution for a scalar
/// spec on a metric. P includes the raising products.
RunReport run_invariant(const tensor::Metric& g, const contraction::InvariantSpec& spec,
                        const RunConfig& cfg);

}  // namespace curvinv::parallel
