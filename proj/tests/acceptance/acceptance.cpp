// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion other than the informational scaling check fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "curvinv/contraction/contraction.hpp"
#include "curvinv/errors.hpp"
#include "curvinv/metrics/metrics.hpp"
#include "curvinv/parallel/parallel.hpp"
#include "curvinv/sym/tree.hpp"

using namespace curvinv;
using contraction::InvariantSpec;
using contraction::parse_spec;
using contraction::preset_spec;
using sym::Expr;

namespace {

// Pinned limits.
constexpr double kFlatBudgetSeconds = 5.0;
constexpr double kSchwarzschildBudgetSeconds = 30.0;
constexpr double kAbbreviationBudgetSeconds = 60.0;
constexpr int kPointChecks = 10;
constexpr double kScalingTarget = 2.0;

const char* const kPresets[] = {"I_a", "I_b", "I_c"};

// Reference T and P for the single-rotation Kerr metric, D = 4..11.
constexpr std::size_t kTableFirstDim = 4;
const std::vector<std::vector<std::size_t>> kTableT = {
    {4, 3, 5, 5, 5, 5, 5, 5}, {5, 4, 6, 7, 7, 7, 7, 7}, {11, 12, 21, 21, 21, 21, 21, 21}};
const std::vector<std::vector<std::uint64_t>> kTableP = {
    {172, 224, 290, 373, 477, 606, 764, 955},
    {244, 309, 391, 495, 628, 798, 1014, 1286},
    {1160, 1919, 2749, 3982, 5703, 8109, 11390, 15769}};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool any_required_failed = false;

void verdict(int id, const std::string& title, bool pass, const std::string& detail,
             bool informational = false) {
  std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << title;
  if (!detail.empty()) std::cout << "  [" << detail << "]";
  if (informational) std::cout << "  (informational)";
  std::cout << std::endl;
  if (!pass && !informational) any_required_failed = true;
}

void note(const std::string& line) { std::cout << "    " << line << '\n'; }

struct Run {
  parallel::RunReport report;
  InvariantSpec spec;
  contraction::MaterializedFactors factors;
  contraction::ContractionPlan plan;
};

Run run_preset(const tensor::Metric& g, const char* name, parallel::RunConfig cfg = {}) {
  Run r;
  r.spec = parse_spec(preset_spec(name));
  r.factors = contraction::materialize_factors(r.spec, g);
  r.plan = contraction::enumerate_indices(r.spec, r.factors.tensors, g.dim());
  r.report = parallel::execute(r.spec, r.plan, r.factors.tensors, cfg);
  r.report.raise_products = r.factors.raise_multiplications;
  r.report.P = r.plan.size() + r.factors.raise_multiplications;
  return r;
}

// Sum over every assignment of every label with no enumeration, no
// abbreviation and no multiplier.
Expr brute_force_sum(const InvariantSpec& spec, const std::vector<tensor::TensorField>& ts,
                     std::size_t dim) {
  sym::ExprSum sum;
  std::vector<std::uint8_t> v(spec.label_count(), 0);
  while (true) {
    Expr p = Expr::integer(ts.front().env(), 1);
    for (std::size_t f = 0; f < spec.factors.size() && !p.is_zero(); ++f) {
      tensor::Index idx;
      for (const auto l : spec.factors[f].labels) idx.push_back(v[l]);
      const Expr* c = ts[f].find(idx);
      p = c == nullptr ? Expr() : p * *c;
    }
    if (!p.is_zero()) sum.add(p);
    std::size_t k = 0;
    while (k < v.size() && ++v[k] == dim) v[k++] = 0;
    if (k == v.size()) break;
  }
  return sum.empty() ? Expr() : sum.value();
}

// Random rational point; every sin/cos pair lies on the unit circle.
sym::Assignment random_point(const sym::EnvPtr& env, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(1, 60);
  std::uniform_int_distribution<int> den(1, 13);
  sym::Assignment at;
  for (std::size_t v = 0; v < env->var_count(); ++v) {
    const auto& var = env->var(v);
    if (var.kind == sym::VarKind::sine) {
      mpq_class t(num(rng), den(rng) + 60);
      t.canonicalize();
      at[v] = 2 * t / (1 + t * t);
      at[v + 1] = (1 - t * t) / (1 + t * t);
    } else if (var.kind != sym::VarKind::cosine) {
      mpq_class q(num(rng), den(rng));
      q.canonicalize();
      at[v] = q;
    }
  }
  return at;
}

// Exact agreement at kPointChecks points where both sides are defined.
bool points_agree(const Expr& a, const Expr& b, const sym::EnvPtr& env, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int checked = 0;
  for (int attempt = 0; attempt < 10 * kPointChecks && checked < kPointChecks; ++attempt) {
    const auto at = random_point(env, rng);
    try {
      if (a.eval(at) != b.eval(at)) return false;
      ++checked;
    } catch (const DivisionByZero&) {
    }
  }
  return checked == kPointChecks;
}

std::string join(const std::vector<std::string>& parts, const char* sep = ", ") {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : sep) + p;
  return out;
}

void criterion_1() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::vector<std::string> bad;
  for (std::size_t d = 2; d <= 11; ++d) {
    const auto g = metrics::flat(d);
    for (const char* name : kPresets) {
      const auto r = run_preset(g, name).report;
      if (!r.invariant.is_zero() || r.T != 0) {
        ok = false;
        bad.push_back(std::string(name) + "@D=" + std::to_string(d));
      }
    }
  }
  const double s = seconds_since(t0);
  std::ostringstream detail;
  detail << "D=2..11 x {I_a,I_b,I_c}, " << s << " s, budget " << kFlatBudgetSeconds << " s";
  if (!bad.empty()) detail << ", nonzero: " << join(bad);
  verdict(1, "zero-curvature suite", ok && s < kFlatBudgetSeconds, detail.str());
}

void criterion_2() {
  const auto t0 = Clock::now();
  const auto g = metrics::kerr(4).substituted("a", mpq_class(0));
  const auto r = run_preset(g, "I_a", {2, 4});
  const auto full = contraction::enumerate_indices(r.spec, r.factors.tensors, 4, {false});
  const Expr oracle = parallel::sequential_oracle(r.spec, full, r.factors.tensors);
  const Expr expected = sym::parse_expr("12*mu^2/r^6", g.env());
  const double s = seconds_since(t0);
  const bool ok = r.report.invariant == expected && oracle == expected &&
                  s < kSchwarzschildBudgetSeconds;
  std::ostringstream detail;
  detail << "I_a = " << r.report.invariant.to_string() << ", oracle = " << oracle.to_string()
         << ", " << s << " s";
  verdict(2, "Schwarzschild reduction", ok, detail.str());
}

struct KerrRow {
  std::size_t dim;
  std::size_t T[3];
  std::uint64_t P[3];
  std::size_t entries[3];
  std::uint64_t raised[3];
  bool points_ok[3];
};

std::vector<KerrRow> kerr_rows;

void compute_kerr_table() {
  for (std::size_t d = kTableFirstDim; d <= 11; ++d) {
    const auto g = metrics::kerr(d);
    KerrRow row{};
    row.dim = d;
    for (int i = 0; i < 3; ++i) {
      const auto r = run_preset(g, kPresets[i]);
      row.T[i] = r.report.T;
      row.P[i] = r.report.P;
      row.entries[i] = r.report.entries;
      row.raised[i] = r.report.raise_products;
      row.points_ok[i] = true;
      if (d <= 6) {
        // Independent path: no abbreviation, one addition per product.
        const auto full = contraction::enumerate_indices(r.spec, r.factors.tensors, d, {false});
        const Expr oracle = parallel::sequential_oracle(r.spec, full, r.factors.tensors);
        row.points_ok[i] = points_agree(r.report.invariant, oracle, g.env(), 1000 * d + i);
      }
    }
    kerr_rows.push_back(row);
  }
}

void criterion_3() {
  bool required = true;
  std::vector<std::string> stretch;
  for (const auto& row : kerr_rows) {
    std::ostringstream line;
    line << "D=" << row.dim;
    bool row_ok = true;
    for (int i = 0; i < 3; ++i) {
      const std::size_t want = kTableT[i][row.dim - kTableFirstDim];
      line << "  T(" << kPresets[i] << ")=" << row.T[i] << " table " << want;
      if (row.dim <= 6) line << (row.points_ok[i] ? " pts ok" : " pts MISMATCH");
      row_ok = row_ok && row.T[i] == want && row.points_ok[i];
    }
    note(line.str());
    if (row.dim <= 6) {
      required = required && row_ok;
    } else {
      stretch.push_back("D=" + std::to_string(row.dim) + (row_ok ? " match" : " differ"));
    }
  }
  verdict(3, "Kerr term counts", required,
          "required D=4..6 with " + std::to_string(kPointChecks) +
              "-point oracle checks; beyond: " + join(stretch));
}

void criterion_4() {
  if (kerr_rows.size() < 3) throw std::runtime_error("Kerr table unavailable");
  bool exact = true;
  bool constant_offset = true;
  for (int i = 0; i < 3; ++i) {
    std::ostringstream line;
    line << "P(" << kPresets[i] << ")";
    long long first_offset = 0;
    for (const auto& row : kerr_rows) {
      const auto want = kTableP[i][row.dim - kTableFirstDim];
      const long long offset = static_cast<long long>(row.P[i]) - static_cast<long long>(want);
      line << "  D=" << row.dim << ": " << row.P[i] << " (" << row.entries[i] << "+"
           << row.raised[i] << ") table " << want;
      if (row.dim > 6) continue;
      if (row.dim == kTableFirstDim) first_offset = offset;
      exact = exact && offset == 0;
      constant_offset = constant_offset && offset == first_offset;
    }
    note(line.str());
  }
  verdict(4, "Kerr product counts", exact || constant_offset,
          exact ? "exact match D=4..6"
                : constant_offset ? "constant offset across D=4..6"
                                  : "P = enumerated products + raising products; offsets vary with D");
}

void criterion_5() {
  const auto i1 = parse_spec(preset_spec("I_1"));
  const auto worst = contraction::worst_case_product_count(i1, 4);
  const auto indep = contraction::independent_component_count(11);
  const auto r4 = tensor::riemann_lowered(metrics::kerr(4));
  const auto r11 = tensor::riemann_lowered(metrics::kerr(11));
  const std::size_t pairs4 = tensor::nonzero_pair_components(r4);
  const std::size_t cyc4 = tensor::nonzero_independent_components(r4);
  const std::size_t pairs11 = tensor::nonzero_pair_components(r11);
  const std::size_t cyc11 = tensor::nonzero_independent_components(r11);
  note("Kerr nonzero Riemann components: D=4 pair-symmetric " + std::to_string(pairs4) +
       " of 21, cyclic-reduced " + std::to_string(cyc4) + " of 20; D=11 pair-symmetric " +
       std::to_string(pairs11) + " of 1540, cyclic-reduced " + std::to_string(cyc11) +
       " of 1210");
  const bool ok = worst == 6553600 && indep == 1210 && pairs4 == 13 && cyc11 == 68;
  std::ostringstream detail;
  detail << "worst(I_1,4)=" << worst << " indep(11)=" << indep << " nonzero(D=4)=" << pairs4
         << " of 21, nonzero(D=11)=" << cyc11 << " of 1210";
  verdict(5, "counting formulas", ok, detail.str());
}

tensor::Metric generic_2d() {
  auto env = sym::SymbolEnv::create({"x", "y"}, {"k"}, {});
  auto P = [&](const char* s) { return sym::parse_expr(s, env); };
  return tensor::Metric("generic", env,
                        {{P("1 + x^2"), P("k*x*y")}, {P("k*x*y"), P("2 + y^2 + x")}});
}

tensor::Metric generic_3d() {
  auto env = sym::SymbolEnv::create({"x", "y", "z"}, {"k"}, {});
  auto P = [&](const char* s) { return sym::parse_expr(s, env); };
  return tensor::Metric("generic", env,
                        {{P("1 + x^2"), P("k*y"), Expr()},
                         {P("k*y"), P("2 + z"), P("x")},
                         {Expr(), P("x"), P("1 + y^2")}});
}

void criterion_6() {
  const auto t0 = Clock::now();
  std::vector<tensor::Metric> ms = {metrics::sphere_metric(2), generic_2d(),
                                    metrics::sphere_metric(3), generic_3d()};
  bool ok = true;
  std::vector<std::string> cases;
  for (const auto& g : ms) {
    for (const char* name : {"I_a", "I_b"}) {
      const auto r = run_preset(g, name);
      const Expr full = brute_force_sum(r.spec, r.factors.tensors, g.dim());
      const bool same = r.report.invariant == full;
      ok = ok && same;
      cases.push_back(g.name() + std::to_string(g.dim()) + "/" + name + (same ? "" : " MISMATCH"));
    }
  }
  const double s = seconds_since(t0);
  std::ostringstream detail;
  detail << join(cases) << "; " << s << " s";
  verdict(6, "abbreviation soundness", ok && s < kAbbreviationBudgetSeconds, detail.str());
}

void criterion_7() {
  const auto g = metrics::kerr(4);
  bool ok = true;
  int runs = 0;
  for (const char* name : kPresets) {
    const auto base = run_preset(g, name);
    const std::string reference = base.report.invariant.to_string();
    for (std::size_t n : {1u, 2u, 4u, 8u}) {
      for (std::size_t m : {1u, 4u, 16u}) {
        const auto r = parallel::execute(base.spec, base.plan, base.factors.tensors, {n, m});
        ok = ok && r.invariant.to_string() == reference;
        ++runs;
      }
    }
  }
  verdict(7, "determinism", ok,
          std::to_string(runs) + " runs over {1,2,4,8} x {1,4,16} on Kerr D=4");
}

void criterion_8() {
  const auto g = metrics::kerr(6);
  const auto spec = parse_spec(preset_spec("I_c"));
  const auto mf = contraction::materialize_factors(spec, g);
  const auto plan = contraction::enumerate_indices(spec, mf.tensors, 6);
  auto best = [&](std::size_t n) {
    double t = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = Clock::now();
      parallel::execute(spec, plan, mf.tensors, {n, 4});
      t = std::min(t, seconds_since(t0));
    }
    return t;
  };
  const double t1 = best(1);
  const double t4 = best(4);
  const double speedup = t1 / t4;
  std::ostringstream detail;
  detail << "Kerr D=6 I_c execute: n=1 " << t1 << " s, n=4 " << t4 << " s, speedup " << speedup
         << ", target " << kScalingTarget << ", hardware threads "
         << std::thread::hardware_concurrency();
  verdict(8, "parallel scaling", speedup >= kScalingTarget, detail.str(), true);
}

}  // namespace

int main() {
  std::cout.setf(std::ios::fixed);
  std::cout.precision(3);
  const std::vector<std::pair<int, std::function<void()>>> steps = {
      {1, criterion_1}, {2, criterion_2}, {3, [] {
         compute_kerr_table();
         criterion_3();
       }},
      {4, criterion_4}, {5, criterion_5}, {6, criterion_6}, {7, criterion_7}, {8, criterion_8}};
  for (const auto& [id, step] : steps) {
    try {
      step();
    } catch (const std::exception& e) {
      verdict(id, "raised an exception", false, e.what(), id == 8);
    }
  }
  return any_required_failed ? 1 : 0;
}
