#include <algorithm>
#include <map>

#include "curvinv/contraction/contraction.hpp"
#include "curvinv/errors.hpp"

namespace curvinv::contraction {

using sym::Expr;
using sym::ExprSum;

namespace {

void check_tensors(const InvariantSpec& spec, std::span<const TensorField> tensors,
                   std::size_t dim) {
  if (tensors.size() != spec.factors.size()) {
    throw ShapeMismatch("expected one tensor per factor");
  }
  if (dim < 1 || dim > 255) throw ShapeMismatch("dimension out of range");
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& f = spec.factors[i];
    const auto& t = tensors[i];
    if (t.rank() != f.rank()) {
      throw ShapeMismatch("factor " + std::to_string(i + 1) + " rank mismatch");
    }
    if (t.dim() != dim) throw ShapeMismatch("factor " + std::to_string(i + 1) + " dimension mismatch");
    if (t.variance() != f.variance) {
      throw ShapeMismatch("factor " + std::to_string(i + 1) + " variance mismatch");
    }
  }
}

std::size_t factor_offset(const FactorSpec& f, std::span<const std::uint8_t> values,
                          std::size_t dim) {
  std::size_t off = 0;
  for (const std::size_t l : f.labels) off = off * dim + values[l];
  return off;
}

}  // namespace

ContractionPlan enumerate_indices(const InvariantSpec& spec, std::span<const TensorField> tensors,
                                  std::size_t dim, EnumerateOptions options) {
  check_tensors(spec, tensors, dim);
  ContractionPlan plan;
  plan.label_count = spec.label_count();
  plan.dim = dim;
  if (options.abbreviate) {
    const Abbreviation ab = detect_abbreviable_pairs(spec);
    plan.multiplier = ab.multiplier;
    plan.abbreviated_pairs = ab.pairs;
  }
  const std::size_t n = plan.label_count;
  if (n == 0) return plan;

  // Checks that become decidable once label k is bound.
  std::vector<std::vector<std::size_t>> factor_checks(n);
  for (std::size_t fi = 0; fi < spec.factors.size(); ++fi) {
    const auto& labels = spec.factors[fi].labels;
    factor_checks[*std::max_element(labels.begin(), labels.end())].push_back(fi);
  }
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> order_checks(n);
  for (const auto& pr : plan.abbreviated_pairs) {
    order_checks[std::max(pr.first, pr.second)].push_back(pr);
  }

  std::vector<std::uint8_t> values(n, 0);
  std::vector<std::uint8_t> found;
  auto ok_at = [&](std::size_t k) {
    for (const auto& [a, b] : order_checks[k]) {
      if (!(values[b] > values[a])) return false;
    }
    for (const std::size_t fi : factor_checks[k]) {
      if (tensors[fi].find(factor_offset(spec.factors[fi], values, dim)) == nullptr) return false;
    }
    return true;
  };
  // Depth-first over labels in id order.
  std::size_t k = 0;
  values[0] = 0;
  while (true) {
    if (values[k] < dim && ok_at(k)) {
      if (k + 1 == n) {
        found.insert(found.end(), values.begin(), values.end());
        ++values[k];
        continue;
      }
      ++k;
      values[k] = 0;
      continue;
    }
    if (values[k] >= dim) {
      if (k == 0) break;
      --k;
    }
    ++values[k];
  }

  // Odometer order: the last label is the most significant digit.
  const std::size_t count = found.size() / n;
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const std::uint8_t* a = found.data() + x * n;
    const std::uint8_t* b = found.data() + y * n;
    for (std::size_t l = n; l-- > 0;) {
      if (a[l] != b[l]) return a[l] < b[l];
    }
    return false;
  });
  plan.values.reserve(found.size());
  for (const std::size_t i : order) {
    plan.values.insert(plan.values.end(), found.begin() + static_cast<std::ptrdiff_t>(i * n),
                       found.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
  }
  return plan;
}

Expr evaluate_product(const InvariantSpec& spec, std::span<const std::uint8_t> entry,
                      std::span<const TensorField> tensors) {
  if (spec.factors.empty()) throw ShapeMismatch("spec has no factors");
  Expr product;
  for (std::size_t fi = 0; fi < spec.factors.size(); ++fi) {
    const TensorField& t = tensors[fi];
    const Expr* v = t.find(factor_offset(spec.factors[fi], entry, t.dim()));
    if (v == nullptr) return Expr();
    product = fi == 0 ? *v : product * *v;
  }
  return product;
}

MaterializedFactors materialize_factors(const InvariantSpec& spec, const tensor::Metric& g) {
  MaterializedFactors out;
  const auto gamma = tensor::christoffel(g);
  std::vector<TensorField> lowered;
  lowered.push_back(tensor::riemann_lowered(g, gamma));
  unsigned max_order = 0;
  for (const auto& f : spec.factors) max_order = std::max(max_order, f.derivative_order);
  while (lowered.size() <= max_order) {
    lowered.push_back(tensor::covariant_derivative(lowered.back(), gamma));
  }
  for (const auto& t : lowered) out.lowered_sizes.push_back(t.size());

  std::map<std::pair<unsigned, std::vector<Variance>>, TensorField> cache;
  for (const auto& f : spec.factors) {
    std::vector<Variance> pattern(f.rank(), Variance::lower);
    const TensorField* cur = &lowered[f.derivative_order];
    for (std::size_t s = 0; s < f.rank(); ++s) {
      if (f.variance[s] != Variance::upper) continue;
      pattern[s] = Variance::upper;
      auto key = std::make_pair(f.derivative_order, pattern);
      auto it = cache.find(key);
      if (it == cache.end()) {
        it = cache
                 .emplace(std::move(key), tensor::raise_index(*cur, s, g.inverse(),
                                                              &out.raise_multiplications))
                 .first;
      }
      cur = &it->second;
    }
    out.tensors.push_back(*cur);
  }
  return out;
}

TensorField contract_free(const InvariantSpec& spec, std::span<const TensorField> tensors,
                          std::size_t dim) {
  check_tensors(spec, tensors, dim);
  const auto free = spec.free_labels();
  std::vector<Variance> variance;
  for (const std::size_t l : free) {
    for (const auto& f : spec.factors) {
      for (std::size_t s = 0; s < f.rank(); ++s) {
        if (f.labels[s] == l) variance.push_back(f.variance[s]);
      }
    }
  }
  const sym::EnvPtr env = tensors.empty() ? nullptr : tensors.front().env();
  TensorField out(env, dim, variance);
  const ContractionPlan plan = enumerate_indices(spec, tensors, dim);
  std::map<std::size_t, ExprSum> sums;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto entry = plan.entry(i);
    std::size_t off = 0;
    for (const std::size_t l : free) off = off * dim + entry[l];
    sums[off].add(evaluate_product(spec, entry, tensors));
  }
  for (auto& [off, sum] : sums) {
    out.set(off, sum.value().scaled(plan.multiplier));
  }
  return out;
}

}  // namespace curvinv::contraction
