#include "curvinv/parallel/parallel.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace curvinv::parallel {

using contraction::ContractionPlan;
using contraction::InvariantSpec;
using sym::Expr;
using sym::ExprSum;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

std::vector<Parcel> partition(std::size_t entries, const RunConfig& cfg) {
  if (cfg.workers < 1 || cfg.parcels_per_worker < 1) {
    throw std::invalid_argument("workers and parcels per worker must be at least 1");
  }
  std::vector<Parcel> out;
  if (entries == 0) return out;
  const std::size_t count = std::min(entries, cfg.workers * cfg.parcels_per_worker);
  const std::size_t base = entries / count;
  const std::size_t extra = entries % count;
  std::size_t at = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t len = base + (i < extra ? 1 : 0);
    out.push_back({i, at, at + len});
    at += len;
  }
  return out;
}

std::vector<Parcel> partition(const ContractionPlan& plan, const RunConfig& cfg) {
  return partition(plan.size(), cfg);
}

RunReport execute(const InvariantSpec& spec, const ContractionPlan& plan,
                  std::span<const tensor::TensorField> tensors, const RunConfig& cfg) {
  const auto t0 = Clock::now();
  const auto parcels = partition(plan, cfg);
  const std::size_t n = cfg.workers;

  std::vector<Expr> partials(n);
  std::vector<WorkerStats> stats(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;

  auto work = [&](std::size_t w) {
    const auto start = Clock::now();
    try {
      Expr partial;
      while (!failed.load(std::memory_order_relaxed)) {
        const std::size_t p = next.fetch_add(1, std::memory_order_relaxed);
        if (p >= parcels.size()) break;
        const Parcel& parcel = parcels[p];
        if (cfg.cadence == Cadence::per_entry) {
          for (std::size_t i = parcel.begin; i < parcel.end; ++i) {
            partial = partial + contraction::evaluate_product(spec, plan.entry(i), tensors);
          }
        } else {
          ExprSum sum;
          for (std::size_t i = parcel.begin; i < parcel.end; ++i) {
            sum.add(contraction::evaluate_product(spec, plan.entry(i), tensors));
          }
          partial = partial + sum.value();
        }
        stats[w].entries += parcel.size();
        ++stats[w].parcels;
      }
      partials[w] = std::move(partial);
    } catch (...) {
      failed = true;
      std::lock_guard lock(error_mu);
      if (!error) error = std::current_exception();
    }
    stats[w].wall_ms = ms_since(start);
  };

  {
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(work, w);
  }
  if (error) std::rethrow_exception(error);

  ExprSum merged;
  for (const auto& p : partials) {
    if (!p.is_zero()) merged.add(p);
  }
  Expr total = merged.empty() ? Expr() : merged.value().scaled(plan.multiplier).verified();

  RunReport report;
  report.T = total.term_count();
  report.invariant = std::move(total);
  report.entries = plan.size();
  report.P = plan.size();
  report.multiplier = plan.multiplier;
  report.workers = n;
  report.parcels = parcels.size();
  report.per_worker = std::move(stats);
  report.dim = plan.dim;
  report.spec = spec.to_string();
  report.wall_ms = ms_since(t0);
  return report;
}

Expr sequential_oracle(const InvariantSpec& spec, const ContractionPlan& plan,
                       std::span<const tensor::TensorField> tensors) {
  Expr total;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    total = total + contraction::evaluate_product(spec, plan.entry(i), tensors);
  }
  return total.scaled(plan.multiplier).verified();
}

RunReport run_invariant(const tensor::Metric& g, const InvariantSpec& spec, const RunConfig& cfg) {
  if (!spec.is_scalar()) throw std::invalid_argument("run_invariant needs a scalar spec");
  const auto t0 = Clock::now();
  const auto mf = contraction::materialize_factors(spec, g);
  const auto plan = contraction::enumerate_indices(spec, mf.tensors, g.dim());
  RunReport report = execute(spec, plan, mf.tensors, cfg);
  report.raise_products = mf.raise_multiplications;
  report.P = plan.size() + mf.raise_multiplications;
  report.metric = g.name();
  for (std::size_t i = 0; i < g.dim(); ++i) {
    report.coordinates.push_back(g.env()->coordinate_name(i));
  }
  report.wall_ms = ms_since(t0);
  return report;
}

}  // namespace curvinv::parallel
