#include "curvinv/sym/expr.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <utility>

#include "curvinv/errors.hpp"

namespace curvinv::sym {

namespace {

const EnvPtr& common_env(const Expr& a, const Expr& b) {
  if (a.env() && b.env() && a.env() != b.env()) {
    throw std::invalid_argument("expressions belong to different SymbolEnvs");
  }
  return a.env() ? a.env() : b.env();
}

std::span<const TrigPair> pairs_of(const EnvPtr& env) {
  return env ? env->trig_pairs() : std::span<const TrigPair>{};
}

// Divides `num` by `atom` while possible and while `exp` allows.
void cancel_atom(Poly& num, const Atom& atom, unsigned& exp) {
  while (exp > 0 && !num.is_zero()) {
    if (atom.poly.size() > 1 && !may_divide(num, atom.poly)) return;
    auto q = num.divide(atom.poly);
    if (!q) return;
    num = *std::move(q);
    --exp;
  }
}

void drop_empty(std::vector<DenFactor>& den) {
  std::erase_if(den, [](const DenFactor& f) { return f.exp == 0; });
}

void cancel_integer(Poly& num, mpz_class& k) {
  if (k == 1) return;
  mpz_class g = num.content();
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), k.get_mpz_t());
  if (g != 1) {
    num = num.divexact(g);
    mpz_divexact(k.get_mpz_t(), k.get_mpz_t(), g.get_mpz_t());
  }
}

// Sum of exponents, merged by atom id.
std::vector<DenFactor> merge_sum(const std::vector<DenFactor>& a,
                                 const std::vector<DenFactor>& b) {
  std::vector<DenFactor> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].atom->id < b[j].atom->id)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].atom->id < a[i].atom->id) {
      out.push_back(b[j++]);
    } else {
      out.push_back({a[i].atom, a[i].exp + b[j].exp});
      ++i;
      ++j;
    }
  }
  drop_empty(out);
  return out;
}

// Elementwise maximum of exponents.
std::vector<DenFactor> merge_max(const std::vector<DenFactor>& a,
                                 const std::vector<DenFactor>& b) {
  std::vector<DenFactor> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].atom->id < b[j].atom->id)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].atom->id < a[i].atom->id) {
      out.push_back(b[j++]);
    } else {
      out.push_back({a[i].atom, std::max(a[i].exp, b[j].exp)});
      ++i;
      ++j;
    }
  }
  return out;
}

// Multiplies `num` by the atoms needed to lift `from` up to `to`.
Poly lift(const Poly& num, const std::vector<DenFactor>& from,
          const std::vector<DenFactor>& to) {
  Poly out = num;
  std::size_t i = 0;
  for (const auto& f : to) {
    while (i < from.size() && from[i].atom->id < f.atom->id) ++i;
    const unsigned have =
        (i < from.size() && from[i].atom->id == f.atom->id) ? from[i].exp : 0;
    if (f.exp > have) out = out * f.atom->poly.pow(f.exp - have);
  }
  return out;
}

bool same_den(const std::vector<DenFactor>& a,
              const std::vector<DenFactor>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].atom != b[i].atom || a[i].exp != b[i].exp) return false;
  }
  return true;
}

mpz_class lcm(const mpz_class& a, const mpz_class& b) {
  mpz_class r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

mpq_class eval_poly(const Poly& p, const Assignment& at, const SymbolEnv* env) {
  mpq_class sum = 0;
  mpq_class term;
  mpz_class pn;
  mpz_class pd;
  for (const auto& t : p.terms()) {
    term = t.coef;
    for (std::size_t v = 0; v < kMaxVars; ++v) {
      const unsigned e = t.mono[v];
      if (e == 0) continue;
      auto it = at.find(v);
      if (it == at.end()) {
        throw std::invalid_argument(
            "eval: no value for variable " +
            (env != nullptr && v < env->var_count() ? env->var(v).name
                                                    : std::to_string(v)));
      }
      mpz_pow_ui(pn.get_mpz_t(), it->second.get_num_mpz_t(), e);
      mpz_pow_ui(pd.get_mpz_t(), it->second.get_den_mpz_t(), e);
      term *= mpq_class(pn, pd);
    }
    sum += term;
  }
  return sum;
}

// P(var = p/q) * q^deg_var(P), with the degree returned separately.
std::pair<Poly, unsigned> substitute_poly(const Poly& poly, std::size_t var,
                                          const mpq_class& value) {
  const unsigned d = poly.degree_in(var);
  std::vector<Term> terms;
  terms.reserve(poly.size());
  mpz_class pp;
  mpz_class qq;
  for (const auto& t : poly.terms()) {
    const unsigned e = t.mono[var];
    mpz_pow_ui(pp.get_mpz_t(), value.get_num_mpz_t(), e);
    mpz_pow_ui(qq.get_mpz_t(), value.get_den_mpz_t(), d - e);
    Monomial m = t.mono;
    m.set(var, 0);
    terms.push_back({m, t.coef * pp * qq});
  }
  return {Poly::from_terms(std::move(terms)), d};
}

std::string format_term_body(const Monomial& m, const SymbolEnv& env) {
  std::string out;
  for (std::size_t v = 0; v < env.var_count(); ++v) {
    const unsigned e = m[v];
    if (e == 0) continue;
    if (!out.empty()) out += '*';
    out += env.var(v).name;
    if (e > 1) out += '^' + std::to_string(e);
  }
  return out;
}

}  // namespace

Expr::Expr(EnvPtr env, Poly num, mpz_class den_const, std::vector<DenFactor> den)
    : env_(std::move(env)),
      num_(std::move(num)),
      den_const_(std::move(den_const)),
      den_(std::move(den)) {
  if (num_.is_zero()) {
    den_const_ = 1;
    den_.clear();
  }
}

Expr Expr::reduced(EnvPtr env, Poly num, mpz_class k,
                   std::vector<DenFactor> den) {
  if (num.is_zero()) return Expr(std::move(env), Poly{}, 1, {});
  for (auto& f : den) cancel_atom(num, *f.atom, f.exp);
  drop_empty(den);
  cancel_integer(num, k);
  return Expr(std::move(env), std::move(num), std::move(k), std::move(den));
}

Expr Expr::integer(const EnvPtr& env, const mpz_class& v) {
  return Expr(env, Poly::constant(v), 1, {});
}

Expr Expr::rational(const EnvPtr& env, const mpq_class& v) {
  mpq_class c = v;
  c.canonicalize();
  return Expr(env, Poly::constant(c.get_num()), c.get_den(), {});
}

Expr Expr::from_poly(const EnvPtr& env, const Poly& p) {
  return Expr(env, reduce_trig(p, pairs_of(env)), 1, {});
}

Expr Expr::variable(const EnvPtr& env, std::size_t var) {
  if (var >= env->var_count()) throw std::out_of_range("unknown variable");
  return Expr(env, Poly::variable(var), 1, {});
}

Expr Expr::symbol(const EnvPtr& env, std::string_view name) {
  auto v = env->find_var(name);
  if (!v) throw std::invalid_argument("unknown symbol: " + std::string(name));
  return variable(env, *v);
}

Expr Expr::sin(const EnvPtr& env, std::size_t coordinate) {
  auto v = env->sine_var(coordinate);
  if (!v) throw std::invalid_argument("coordinate has no trig pair");
  return variable(env, *v);
}

Expr Expr::cos(const EnvPtr& env, std::size_t coordinate) {
  auto v = env->cosine_var(coordinate);
  if (!v) throw std::invalid_argument("coordinate has no trig pair");
  return variable(env, *v);
}

Poly Expr::denominator() const {
  Poly d = Poly::constant(den_const_);
  for (const auto& f : den_) d = d * f.atom->poly.pow(f.exp);
  return d;
}

Expr Expr::operator-() const {
  return Expr(env_, -num_, den_const_, den_);
}

Expr Expr::scaled(const mpz_class& c) const {
  if (c == 0 || is_zero()) return Expr(env_, Poly{}, 1, {});
  Poly num = num_.scaled(c);
  mpz_class k = den_const_;
  cancel_integer(num, k);
  return Expr(env_, std::move(num), std::move(k), den_);
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b.env_ ? b : Expr(a.env_, b.num_, 1, {});
  if (b.is_zero()) return a;
  const EnvPtr& env = common_env(a, b);
  if (a.den_const_ == b.den_const_ && same_den(a.den_, b.den_)) {
    return Expr::reduced(env, a.num_ + b.num_, a.den_const_, a.den_);
  }
  auto den = merge_max(a.den_, b.den_);
  const mpz_class k = lcm(a.den_const_, b.den_const_);
  Poly na = lift(a.num_, a.den_, den).scaled(k / a.den_const_);
  Poly nb = lift(b.num_, b.den_, den).scaled(k / b.den_const_);
  return Expr::reduced(env, na + nb, k, std::move(den));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  const EnvPtr& env = common_env(a, b);
  if (a.is_zero() || b.is_zero()) return Expr(env, Poly{}, 1, {});
  Poly na = a.num_;
  Poly nb = b.num_;
  auto da = a.den_;
  auto db = b.den_;
  for (auto& f : da) cancel_atom(nb, *f.atom, f.exp);
  for (auto& f : db) cancel_atom(na, *f.atom, f.exp);
  mpz_class ka = a.den_const_;
  mpz_class kb = b.den_const_;
  cancel_integer(na, kb);
  cancel_integer(nb, ka);
  bool rewrote = false;
  Poly num = reduce_trig(na * nb, pairs_of(env), &rewrote);
  auto den = merge_sum(da, db);
  mpz_class k = ka * kb;
  if (rewrote) return Expr::reduced(env, std::move(num), std::move(k), std::move(den));
  return Expr(env, std::move(num), std::move(k), std::move(den));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw DivisionByZero("division by an expression equal to zero");
  const EnvPtr& env = common_env(a, b);
  if (a.is_zero()) return Expr(env, Poly{}, 1, {});
  const auto pairs = pairs_of(env);
  // Make the divisor's numerator sine-free by multiplying with conjugates.
  Poly n = b.num_;
  Poly conj = Poly::constant(1);
  for (const auto& pr : pairs) {
    if (n.degree_in(pr.sine) == 0) continue;
    const Poly c0 = n.coefficient_in(pr.sine, 0);
    const Poly c1 = n.coefficient_in(pr.sine, 1);
    const Poly c = c0 - c1 * Poly::variable(pr.sine);
    n = reduce_trig(n * c, pairs);
    conj = reduce_trig(conj * c, pairs);
  }
  Factorization f = env->atoms().factor(n);
  Poly num = reduce_trig(a.num_ * b.denominator() * conj, pairs);
  if (f.unit < 0) num = -num;
  std::vector<DenFactor> fd;
  fd.reserve(f.factors.size());
  for (auto& [atom, e] : f.factors) fd.push_back({atom, e});
  auto den = merge_sum(a.den_, fd);
  mpz_class k = a.den_const_ * abs(f.unit);
  return Expr::reduced(env, std::move(num), std::move(k), std::move(den));
}

Expr Expr::pow(int n) const {
  if (n < 0) {
    return (Expr::integer(env_, 1) / *this).pow(-n);
  }
  Expr result = Expr::integer(env_, 1);
  Expr base = *this;
  unsigned e = static_cast<unsigned>(n);
  while (e > 0) {
    if (e & 1u) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

Expr Expr::diff(std::string_view coordinate) const {
  if (!env_) return *this;
  auto c = env_->coordinate_index(coordinate);
  if (!c) throw std::invalid_argument("unknown coordinate: " + std::string(coordinate));
  return diff(*c);
}

Expr Expr::diff(std::size_t coordinate) const {
  if (!env_ || is_zero()) return Expr(env_, Poly{}, 1, {});
  if (coordinate >= env_->coordinate_count()) {
    throw std::invalid_argument("unknown coordinate index");
  }
  const auto pairs = env_->trig_pairs();
  std::optional<TrigPair> trig;
  if (auto s = env_->sine_var(coordinate)) {
    trig = TrigPair{*s, *env_->cosine_var(coordinate)};
  }
  const auto var = env_->coordinate_var(coordinate);
  auto d = [&](const Poly& p) {
    return trig ? trig_derivative(p, *trig, pairs) : p.derivative(*var);
  };
  Poly dn = d(num_);
  std::vector<std::size_t> moving;
  std::vector<Poly> dA;
  for (std::size_t i = 0; i < den_.size(); ++i) {
    Poly da = d(den_[i].atom->poly);
    if (!da.is_zero()) {
      moving.push_back(i);
      dA.push_back(std::move(da));
    }
  }
  if (moving.empty()) return reduced(env_, std::move(dn), den_const_, den_);
  // (N' prod A - N sum e_i A_i' prod_{j != i} A_j) / (den * prod A)
  Poly prod_all = Poly::constant(1);
  for (auto i : moving) prod_all = prod_all * den_[i].atom->poly;
  Poly correction;
  for (std::size_t m = 0; m < moving.size(); ++m) {
    Poly term = dA[m].scaled(den_[moving[m]].exp);
    for (std::size_t o = 0; o < moving.size(); ++o) {
      if (o != m) term = term * den_[moving[o]].atom->poly;
    }
    correction += term;
  }
  Poly num = reduce_trig(dn * prod_all - num_ * correction, pairs);
  auto den = den_;
  for (auto i : moving) den[i].exp += 1;
  return reduced(env_, std::move(num), den_const_, std::move(den));
}

mpq_class Expr::eval(const Assignment& at) const {
  if (is_zero()) return 0;
  const SymbolEnv* env = env_.get();
  mpq_class d = den_const_;
  for (const auto& f : den_) {
    mpq_class v = eval_poly(f.atom->poly, at, env);
    mpq_class p = 1;
    for (unsigned i = 0; i < f.exp; ++i) p *= v;
    d *= p;
  }
  if (d == 0) throw DivisionByZero("denominator vanishes at the assignment");
  mpq_class r = eval_poly(num_, at, env) / d;
  r.canonicalize();
  return r;
}

Expr Expr::substitute(std::size_t var, const mpq_class& value) const {
  if (!env_ || is_zero()) return *this;
  if (env_->var(var).kind == VarKind::sine || env_->var(var).kind == VarKind::cosine) {
    throw std::invalid_argument("cannot substitute a trig symbol");
  }
  mpq_class v = value;
  v.canonicalize();
  const mpz_class q = v.get_den();
  auto qpow = [&](unsigned d) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), q.get_mpz_t(), d);
    return r;
  };
  auto [n, dn] = substitute_poly(num_, var, v);
  Expr result = from_poly(env_, n) / integer(env_, qpow(dn) * den_const_);
  for (const auto& f : den_) {
    auto [a, da] = substitute_poly(f.atom->poly, var, v);
    const Expr factor = from_poly(env_, a) / integer(env_, qpow(da));
    result = result / factor.pow(static_cast<int>(f.exp));
  }
  return result;
}

Expr Expr::verified() const {
  Expr cur = *this;
  bool changed = true;
  while (changed && !cur.is_zero()) {
    changed = false;
    for (std::size_t i = 0; i < cur.den_.size(); ++i) {
      const AtomPtr atom = cur.den_[i].atom;
      const Poly g = gcd(cur.num_, atom->poly);
      if (g.is_constant()) continue;
      const Poly h = *atom->poly.divide(g);
      const Poly pieces[] = {primitive_positive(g), primitive_positive(h)};
      cur.env_->atoms().retire(atom, pieces);
      const int e = static_cast<int>(cur.den_[i].exp);
      auto rest = cur.den_;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
      Expr base(cur.env_, cur.num_, cur.den_const_, std::move(rest));
      cur = base / from_poly(cur.env_, atom->poly).pow(e);
      changed = true;
      break;
    }
  }
  return cur;
}

std::uint32_t Expr::variables() const {
  std::uint32_t m = num_.variables();
  for (const auto& f : den_) m |= f.atom->poly.variables();
  return m;
}

bool operator==(const Expr& a, const Expr& b) {
  return a.num_ == b.num_ && a.den_const_ == b.den_const_ &&
         same_den(a.den_, b.den_);
}

std::string format_poly(const Poly& p, const SymbolEnv& env) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : p.terms()) {
    const bool neg = t.coef < 0;
    const mpz_class mag = abs(t.coef);
    if (first) {
      if (neg) out += '-';
    } else {
      out += neg ? " - " : " + ";
    }
    first = false;
    const std::string body = format_term_body(t.mono, env);
    if (body.empty()) {
      out += mag.get_str();
    } else if (mag == 1) {
      out += body;
    } else {
      out += mag.get_str() + "*" + body;
    }
  }
  return out;
}

std::string Expr::to_string() const {
  if (is_zero() || !env_) return "0";
  std::string n = format_poly(num_, *env_);
  if (den_.empty() && den_const_ == 1) return n;
  const Poly d = denominator();
  std::string ds = format_poly(d, *env_);
  if (num_.size() > 1) n = "(" + n + ")";
  const bool bare =
      d.is_constant() ||
      (d.size() == 1 && d.leading().coef == 1 &&
       std::popcount(d.variables()) == 1);
  if (!bare) ds = "(" + ds + ")";
  return n + "/" + ds;
}

// ---------------------------------------------------------------------------

void ExprSum::add(const Expr& e) { add_scaled(e, 1); }

void ExprSum::add_scaled(const Expr& e, const mpz_class& c) {
  ++count_;
  if (e.is_zero() || c == 0) {
    if (!env_) env_ = e.env_;
    return;
  }
  if (env_ && e.env_ && env_ != e.env_) {
    throw std::invalid_argument("expressions belong to different SymbolEnvs");
  }
  if (!env_) env_ = e.env_;
  if (num_.is_zero() && den_.empty() && den_const_ == 1) {
    num_ = e.num_.scaled(c);
    den_const_ = e.den_const_;
    den_ = e.den_;
    return;
  }
  auto den = merge_max(den_, e.den_);
  const mpz_class k = lcm(den_const_, e.den_const_);
  if (!same_den(den, den_) || k != den_const_) {
    num_ = lift(num_, den_, den).scaled(k / den_const_);
  }
  num_ += lift(e.num_, e.den_, den).scaled(c * (k / e.den_const_));
  den_ = std::move(den);
  den_const_ = k;
}

Expr ExprSum::value() const {
  return Expr::reduced(env_, num_, den_const_, den_);
}

}  // namespace curvinv::sym
