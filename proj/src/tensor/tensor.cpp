#include "curvinv/tensor/tensor.hpp"

#include <algorithm>
#include <stdexcept>

#include "curvinv/errors.hpp"

namespace curvinv::tensor {

using sym::ExprSum;

TensorField::TensorField(EnvPtr env, std::size_t dim, std::vector<Variance> variance,
                         std::vector<SlotPair> antisym_pairs)
    : env_(std::move(env)),
      dim_(dim),
      variance_(std::move(variance)),
      antisym_(std::move(antisym_pairs)) {
  if (dim_ == 0 || dim_ > 255) throw ShapeMismatch("tensor dimension out of range");
  for (const auto& [p, q] : antisym_) {
    if (q != p + 1 || q >= variance_.size()) {
      throw ShapeMismatch("antisymmetric pairs must be adjacent slots");
    }
  }
  stride_.assign(variance_.size(), 1);
  std::size_t total = 1;
  for (std::size_t s = variance_.size(); s-- > 0;) {
    stride_[s] = total;
    total *= dim_;
  }
  slot_.assign(total, -1);
}

std::vector<SlotPair> TensorField::effective_antisym_pairs() const {
  std::vector<SlotPair> out;
  for (const auto& pr : antisym_) {
    if (variance_[pr.first] == variance_[pr.second]) out.push_back(pr);
  }
  return out;
}

std::size_t TensorField::offset(std::span<const std::uint8_t> index) const {
  if (index.size() != variance_.size()) throw ShapeMismatch("index rank mismatch");
  std::size_t off = 0;
  for (std::size_t s = 0; s < index.size(); ++s) {
    if (index[s] >= dim_) throw ShapeMismatch("index value out of range");
    off += index[s] * stride_[s];
  }
  return off;
}

Index TensorField::decode(std::size_t offset) const {
  Index idx(variance_.size());
  for (std::size_t s = 0; s < idx.size(); ++s) {
    idx[s] = static_cast<std::uint8_t>(offset / stride_[s]);
    offset %= stride_[s];
  }
  return idx;
}

Expr TensorField::at(std::span<const std::uint8_t> index) const {
  const Expr* e = find(index);
  return e == nullptr ? Expr() : *e;
}

void TensorField::set(std::size_t offset, Expr value) {
  const std::int32_t s = slot_.at(offset);
  if (value.is_zero()) {
    if (s < 0) return;
    const auto pos = static_cast<std::size_t>(s);
    if (pos + 1 != entries_.size()) {
      entries_[pos] = std::move(entries_.back());
      slot_[entries_[pos].offset] = s;
    }
    entries_.pop_back();
    slot_[offset] = -1;
    return;
  }
  if (s >= 0) {
    entries_[static_cast<std::size_t>(s)].value = std::move(value);
    return;
  }
  slot_[offset] = static_cast<std::int32_t>(entries_.size());
  entries_.push_back({offset, std::move(value)});
}

// ---------------------------------------------------------------------------

std::vector<std::vector<Expr>> invert(const std::vector<std::vector<Expr>>& m) {
  const std::size_t n = m.size();
  std::vector<std::vector<Expr>> a = m;
  std::vector<std::vector<Expr>> inv(n, std::vector<Expr>(n));
  const EnvPtr env = [&]() -> EnvPtr {
    for (const auto& row : m) {
      for (const auto& e : row) {
        if (e.env()) return e.env();
      }
    }
    return nullptr;
  }();
  if (!env) throw SingularMetric("zero matrix");
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = Expr::integer(env, 1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = n;
    for (std::size_t r = col; r < n; ++r) {
      if (!a[r][col].is_zero()) {
        pivot = r;
        break;
      }
    }
    if (pivot == n) throw SingularMetric("matrix is singular");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const Expr p = a[col][col];
    for (std::size_t k = 0; k < n; ++k) {
      if (!a[col][k].is_zero()) a[col][k] = a[col][k] / p;
      if (!inv[col][k].is_zero()) inv[col][k] = inv[col][k] / p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col].is_zero()) continue;
      const Expr f = a[r][col];
      for (std::size_t k = 0; k < n; ++k) {
        if (!a[col][k].is_zero()) a[r][k] = a[r][k] - f * a[col][k];
        if (!inv[col][k].is_zero()) inv[r][k] = inv[r][k] - f * inv[col][k];
      }
    }
  }
  return inv;
}

namespace {

TensorField matrix_field(const EnvPtr& env, const std::vector<std::vector<Expr>>& m,
                         Variance v) {
  TensorField f(env, m.size(), {v, v});
  for (std::size_t a = 0; a < m.size(); ++a) {
    for (std::size_t b = 0; b < m.size(); ++b) {
      if (!m[a][b].is_zero()) f.set(a * m.size() + b, m[a][b]);
    }
  }
  return f;
}

}  // namespace

Metric::Metric(std::string name, EnvPtr env, std::vector<std::vector<Expr>> components)
    : name_(std::move(name)) {
  const std::size_t n = components.size();
  if (n < 1 || n != env->coordinate_count()) {
    throw ShapeMismatch("metric size must equal the coordinate count");
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (components[a].size() != n) throw ShapeMismatch("metric must be square");
    for (std::size_t b = 0; b < a; ++b) {
      if (!(components[a][b] - components[b][a]).is_zero()) {
        throw ShapeMismatch("metric must be symmetric");
      }
    }
  }
  g_ = matrix_field(env, components, Variance::lower);
  inv_ = matrix_field(env, invert(components), Variance::upper);
}

Expr Metric::operator()(std::size_t a, std::size_t b) const {
  const Expr* e = g_.find(a * dim() + b);
  return e == nullptr ? Expr() : *e;
}

Metric Metric::substituted(std::string_view symbol, const mpq_class& value) const {
  const auto var = env()->find_var(symbol);
  if (!var) throw std::invalid_argument("unknown symbol: " + std::string(symbol));
  const std::size_t n = dim();
  std::vector<std::vector<Expr>> m(n, std::vector<Expr>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) m[a][b] = (*this)(a, b).substitute(*var, value);
  }
  return Metric(name_, env(), std::move(m));
}

TensorField inverse_metric(const Metric& g) { return g.inverse(); }

// ---------------------------------------------------------------------------

ChristoffelField christoffel(const Metric& g) {
  const std::size_t n = g.dim();
  const EnvPtr& env = g.env();
  // dg[k][a][b] = d_k g_{ab}
  std::vector<Expr> dg(n * n * n);
  for (const auto& e : g.lowered().entries()) {
    const std::size_t a = e.offset / n;
    const std::size_t b = e.offset % n;
    for (std::size_t k = 0; k < n; ++k) dg[(k * n + a) * n + b] = e.value.diff(k);
  }
  auto d = [&](std::size_t k, std::size_t a, std::size_t b) -> const Expr& {
    return dg[(k * n + a) * n + b];
  };
  // First kind: Gamma_{dbc} = (d_b g_{dc} + d_c g_{bd} - d_d g_{bc}) / 2.
  std::vector<Expr> first(n * n * n);
  for (std::size_t dd = 0; dd < n; ++dd) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = b; c < n; ++c) {
        ExprSum s;
        if (!d(b, dd, c).is_zero()) s.add(d(b, dd, c));
        if (!d(c, b, dd).is_zero()) s.add(d(c, b, dd));
        if (!d(dd, b, c).is_zero()) s.add_scaled(d(dd, b, c), -1);
        if (s.empty()) continue;
        first[(dd * n + b) * n + c] = s.value() / Expr::integer(env, 2);
      }
    }
  }
  TensorField out(env, n, {Variance::upper, Variance::lower, Variance::lower});
  const TensorField& inv = g.inverse();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = b; c < n; ++c) {
        ExprSum s;
        for (std::size_t dd = 0; dd < n; ++dd) {
          const Expr* gi = inv.find(a * n + dd);
          const Expr& f = first[(dd * n + b) * n + c];
          if (gi == nullptr || f.is_zero()) continue;
          s.add(*gi * f);
        }
        if (s.empty()) continue;
        Expr v = s.value();
        if (v.is_zero()) continue;
        out.set((a * n + b) * n + c, v);
        if (b != c) out.set((a * n + c) * n + b, std::move(v));
      }
    }
  }
  return ChristoffelField(std::move(out));
}

TensorField riemann_lowered(const Metric& g) { return riemann_lowered(g, christoffel(g)); }

TensorField riemann_lowered(const Metric& g, const ChristoffelField& gamma) {
  const std::size_t n = g.dim();
  const EnvPtr& env = g.env();
  const TensorField& gf = gamma.field();
  // dgam[k] of Gamma^a_{bc} at offset (a,b,c)
  std::vector<std::vector<Expr>> dgam(n);
  for (std::size_t k = 0; k < n; ++k) {
    dgam[k].resize(gf.extent());
    for (const auto& e : gf.entries()) dgam[k][e.offset] = e.value.diff(k);
  }
  auto G = [&](std::size_t a, std::size_t b, std::size_t c) { return gamma.find(a, b, c); };
  auto dG = [&](std::size_t k, std::size_t a, std::size_t b, std::size_t c) -> const Expr& {
    return dgam[k][(a * n + b) * n + c];
  };

  TensorField out(env, n, std::vector<Variance>(4, Variance::lower), {{0, 1}, {2, 3}});
  std::vector<Expr> mixed(n);  // R^e_{bcd} for fixed b, c, d
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t dd = c + 1; dd < n; ++dd) {
      for (std::size_t b = 0; b < n; ++b) {
        bool any = false;
        for (std::size_t a = 0; a < n; ++a) {
          ExprSum s;
          if (!dG(c, a, dd, b).is_zero()) s.add(dG(c, a, dd, b));
          if (!dG(dd, a, c, b).is_zero()) s.add_scaled(dG(dd, a, c, b), -1);
          for (std::size_t e = 0; e < n; ++e) {
            const Expr* x1 = G(a, c, e);
            const Expr* y1 = G(e, dd, b);
            if (x1 != nullptr && y1 != nullptr) s.add(*x1 * *y1);
            const Expr* x2 = G(a, dd, e);
            const Expr* y2 = G(e, c, b);
            if (x2 != nullptr && y2 != nullptr) s.add_scaled(*x2 * *y2, -1);
          }
          mixed[a] = s.empty() ? Expr() : s.value();
          any |= !mixed[a].is_zero();
        }
        if (!any) continue;
        for (std::size_t a = 0; a < b; ++a) {
          ExprSum s;
          for (std::size_t e = 0; e < n; ++e) {
            const Expr* ge = g.lowered().find(a * n + e);
            if (ge != nullptr && !mixed[e].is_zero()) s.add(*ge * mixed[e]);
          }
          if (s.empty()) continue;
          const Expr v = s.value();
          if (v.is_zero()) continue;
          const Expr nv = -v;
          const std::uint8_t A = static_cast<std::uint8_t>(a), B = static_cast<std::uint8_t>(b),
                             C = static_cast<std::uint8_t>(c), Dd = static_cast<std::uint8_t>(dd);
          out.set(std::array{A, B, C, Dd}, v);
          out.set(std::array{B, A, Dd, C}, v);
          out.set(std::array{B, A, C, Dd}, nv);
          out.set(std::array{A, B, Dd, C}, nv);
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

TensorField change_slot(const TensorField& t, std::size_t slot, const TensorField& m,
                        Variance from, Variance to, std::uint64_t* multiplications) {
  if (slot >= t.rank()) throw ShapeMismatch("slot out of range");
  if (t.variance()[slot] != from) {
    throw ShapeMismatch(from == Variance::lower ? "slot is not lower" : "slot is not upper");
  }
  if (m.dim() != t.dim()) throw ShapeMismatch("metric dimension mismatch");
  std::vector<Variance> var = t.variance();
  var[slot] = to;
  TensorField out(t.env(), t.dim(), std::move(var), t.antisym_pairs());
  const std::size_t n = t.dim();
  std::size_t stride = 1;
  for (std::size_t s = slot + 1; s < t.rank(); ++s) stride *= n;
  // Group stored entries by their offset with the slot zeroed.
  std::vector<std::size_t> bases;
  {
    std::vector<char> seen(t.extent() / n + 1, 0);
    for (const auto& e : t.entries()) {
      const std::size_t hi = e.offset / (stride * n);
      const std::size_t lo = e.offset % stride;
      const std::size_t key = hi * stride + lo;
      if (!seen[key]) {
        seen[key] = 1;
        bases.push_back(hi * stride * n + lo);
      }
    }
    std::sort(bases.begin(), bases.end());
  }
  std::uint64_t count = 0;
  for (const std::size_t base : bases) {
    for (std::size_t a = 0; a < n; ++a) {
      ExprSum s;
      for (std::size_t b = 0; b < n; ++b) {
        const Expr* mv = m.find(a * n + b);
        const Expr* tv = t.find(base + b * stride);
        if (mv == nullptr || tv == nullptr) continue;
        s.add(*mv * *tv);
        ++count;
      }
      if (s.empty()) continue;
      Expr v = s.value();
      if (!v.is_zero()) out.set(base + a * stride, std::move(v));
    }
  }
  if (multiplications != nullptr) *multiplications += count;
  return out;
}

}  // namespace

TensorField raise_index(const TensorField& t, std::size_t slot, const TensorField& g_inv,
                        std::uint64_t* multiplications) {
  return change_slot(t, slot, g_inv, Variance::lower, Variance::upper, multiplications);
}

TensorField lower_index(const TensorField& t, std::size_t slot, const TensorField& g) {
  return change_slot(t, slot, g, Variance::upper, Variance::lower, nullptr);
}

TensorField covariant_derivative(const TensorField& t, const ChristoffelField& gamma) {
  for (const Variance v : t.variance()) {
    if (v != Variance::lower) throw ShapeMismatch("covariant derivative needs all-lower input");
  }
  const std::size_t n = t.dim();
  const std::size_t k = t.rank();
  std::vector<Variance> var(k + 1, Variance::lower);
  TensorField out(t.env(), n, std::move(var), t.antisym_pairs());
  const auto& pairs = t.antisym_pairs();

  Index idx(k + 1, 0);
  Index sub(k, 0);
  while (true) {
    bool canonical = true;
    for (const auto& [p, q] : pairs) canonical &= idx[p] < idx[q];
    if (canonical) {
      const std::size_t e = idx[k];
      ExprSum s;
      std::copy(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), sub.begin());
      if (const Expr* v = t.find(sub)) {
        Expr dv = v->diff(e);
        if (!dv.is_zero()) s.add(dv);
      }
      for (std::size_t slot = 0; slot < k; ++slot) {
        const std::uint8_t keep = sub[slot];
        for (std::size_t f = 0; f < n; ++f) {
          const Expr* G = gamma.find(f, e, keep);
          if (G == nullptr) continue;
          sub[slot] = static_cast<std::uint8_t>(f);
          if (const Expr* v = t.find(sub)) s.add_scaled(*G * *v, -1);
        }
        sub[slot] = keep;
      }
      if (!s.empty()) {
        const Expr v = s.value();
        if (!v.is_zero()) {
          // Fill every antisymmetric image of this representative.
          const std::size_t images = std::size_t{1} << pairs.size();
          for (std::size_t mask = 0; mask < images; ++mask) {
            Index img = idx;
            bool neg = false;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
              if ((mask >> i) & 1u) {
                std::swap(img[pairs[i].first], img[pairs[i].second]);
                neg = !neg;
              }
            }
            out.set(img, neg ? -v : v);
          }
        }
      }
    }
    std::size_t pos = k + 1;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < n) break;
      idx[pos] = 0;
      if (pos == 0) return out;
    }
  }
}

std::size_t nonzero_pair_components(const TensorField& riemann) {
  if (riemann.rank() != 4) throw ShapeMismatch("expected a rank-4 tensor");
  const std::size_t n = riemann.dim();
  std::size_t count = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t c = a; c < n; ++c) {
        for (std::size_t d = c + 1; d < n; ++d) {
          if (c == a && d < b) continue;
          if (riemann.find(((a * n + b) * n + c) * n + d) != nullptr) ++count;
        }
      }
    }
  }
  return count;
}

std::size_t nonzero_independent_components(const TensorField& riemann) {
  std::size_t count = nonzero_pair_components(riemann);
  const std::size_t n = riemann.dim();
  auto nz = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    return riemann.find(((a * n + b) * n + c) * n + d) != nullptr;
  };
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t c = b + 1; c < n; ++c) {
        for (std::size_t d = c + 1; d < n; ++d) {
          if (nz(a, b, c, d) || nz(a, c, b, d) || nz(a, d, b, c)) --count;
        }
      }
    }
  }
  return count;
}

}  // namespace curvinv::tensor
