#include "curvinv/cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "curvinv/contraction/contraction.hpp"
#include "curvinv/errors.hpp"
#include "curvinv/metrics/metrics.hpp"

namespace curvinv::cli {

using nlohmann::json;
using parallel::RunReport;

namespace {

mpq_class parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  mpz_class num;
  mpz_class den = 1;
  const std::string n = text.substr(0, slash);
  if (n.empty() || num.set_str(n, 10) != 0) {
    throw std::invalid_argument("not a rational number: '" + text + "'");
  }
  if (slash != std::string::npos) {
    const std::string d = text.substr(slash + 1);
    if (d.empty() || den.set_str(d, 10) != 0) {
      throw std::invalid_argument("not a rational number: '" + text + "'");
    }
    if (den == 0) throw DivisionByZero("zero denominator in '" + text + "'");
  }
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

std::string coordinate_list(const tensor::Metric& g) {
  std::string out = "(";
  for (std::size_t i = 0; i < g.dim(); ++i) {
    if (i > 0) out += ", ";
    out += g.env()->coordinate_name(i);
  }
  return out + ")";
}

contraction::InvariantSpec checked_spec(const Job& job) {
  return contraction::parse_spec(resolve_spec(job));
}

}  // namespace

std::string resolve_spec(const Job& job) {
  if (job.preset.empty() == job.spec_text.empty()) {
    throw std::invalid_argument("give exactly one of --invariant and --spec");
  }
  if (job.spec_text.empty()) {
    if (job.preset == "I_1" && job.dim >= 4 && !job.allow_large) {
      const auto spec = contraction::parse_spec(contraction::preset_spec("I_1"));
      throw std::invalid_argument(
          "I_1 at D=" + std::to_string(job.dim) + " has a worst case of " +
          std::to_string(contraction::worst_case_product_count(spec, job.dim)) +
          " products; pass --allow-large to run it");
    }
    return contraction::preset_spec(job.preset);
  }
  return job.spec_text;
}

tensor::Metric build_metric(const Job& job) {
  tensor::Metric g = metrics::make_metric(job.metric, job.dim);
  for (const auto& [name, value] : job.substitutions) {
    if (g.env()->coordinate_index(name)) {
      throw std::invalid_argument("cannot substitute coordinate '" + name + "'");
    }
    g = g.substituted(name, parse_rational(value));
  }
  return g;
}

RunReport run(const Job& job) {
  const auto spec = checked_spec(job);
  const tensor::Metric g = build_metric(job);
  if (g.dim() != job.dim) {
    throw ShapeMismatch("metric '" + job.metric + "' has dimension " + std::to_string(g.dim()));
  }
  RunReport r = parallel::run_invariant(g, spec, {job.workers, job.parcels});
  r.metric = job.metric;
  return r;
}

std::string report_text(const RunReport& r) {
  std::ostringstream os;
  os << "invariant = " << r.invariant.to_string() << '\n'
     << "metric: " << r.metric << "  D=" << r.dim << '\n';
  if (!r.coordinates.empty()) {
    os << "coordinates: (";
    for (std::size_t i = 0; i < r.coordinates.size(); ++i) {
      os << (i > 0 ? ", " : "") << r.coordinates[i];
    }
    os << ")\n";
  }
  os << "spec: " << r.spec << '\n'
     << "multiplier: " << r.multiplier << '\n'
     << "P: " << r.P << " (entries " << r.entries << ", raising " << r.raise_products << ")\n"
     << "T: " << r.T << '\n'
     << "workers: " << r.workers << "  parcels: " << r.parcels << '\n';
  for (std::size_t w = 0; w < r.per_worker.size(); ++w) {
    os << "  worker " << w << ": " << r.per_worker[w].entries << " entries in "
       << r.per_worker[w].parcels << " parcels, " << r.per_worker[w].wall_ms << " ms\n";
  }
  os << "wall_ms: " << r.wall_ms << '\n';
  return os.str();
}

std::string report_json(const RunReport& r) {
  json per_worker = json::array();
  for (const auto& w : r.per_worker) {
    per_worker.push_back({{"entries", w.entries}, {"parcels", w.parcels}, {"wall_ms", w.wall_ms}});
  }
  const json j = {{"metric", r.metric},
                  {"dim", r.dim},
                  {"spec", r.spec},
                  {"multiplier", r.multiplier},
                  {"P", r.P},
                  {"T", r.T},
                  {"entries", r.entries},
                  {"raise_products", r.raise_products},
                  {"expression", r.invariant.to_string()},
                  {"workers", r.workers},
                  {"parcels", r.parcels},
                  {"wall_ms", r.wall_ms},
                  {"per_worker", per_worker}};
  return j.dump();
}

namespace {

void add_spec_options(CLI::App& app, Job& job) {
  auto* inv = app.add_option("--invariant", job.preset,
                             "Preset: I_a, I_b, I_c, I_1, I_2 or kretschmann");
  auto* spec = app.add_option("--spec", job.spec_text, "Invariant in index notation");
  inv->excludes(spec);
  app.add_option("--dim", job.dim, "Spacetime dimension")->check(CLI::Range(1, 255));
  app.add_flag("--allow-large", job.allow_large, "Permit I_1 at D >= 4");
  app.add_flag("--json", job.json, "Print a JSON report");
}

void add_metric_options(CLI::App& app, Job& job, std::vector<std::string>& sets) {
  app.add_option("--metric", job.metric, "flat, sphere or kerr");
  app.add_option("--set", sets, "Substitute a parameter before differentiating, e.g. a=0");
}

void apply_sets(Job& job, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("--set expects symbol=value, got '" + s + "'");
    }
    job.substitutions.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
}

int do_count(Job job, std::ostream& out) {
  // Worst-case counting touches no tensors, so only enumeration is gated.
  job.allow_large = job.allow_large || !job.enumerate;
  const auto spec = checked_spec(job);
  const auto ab = contraction::detect_abbreviable_pairs(spec);
  json j = {{"spec", spec.to_string()},
            {"dim", job.dim},
            {"worst_case", contraction::worst_case_product_count(spec, job.dim)},
            {"independent_components", contraction::independent_component_count(job.dim)},
            {"multiplier", ab.multiplier},
            {"pair_exchange_factor", contraction::pair_exchange_factor(job.dim)}};
  if (job.enumerate) {
    const auto g = build_metric(job);
    const auto mf = contraction::materialize_factors(spec, g);
    j["metric"] = job.metric;
    j["enumerated"] = contraction::enumerate_indices(spec, mf.tensors, g.dim()).size();
  }
  if (job.json) {
    out << j.dump() << '\n';
    return 0;
  }
  out << "spec: " << spec.to_string() << "  D=" << job.dim << '\n'
      << "worst case products: " << j["worst_case"].get<std::uint64_t>() << '\n'
      << "independent components: " << j["independent_components"].get<std::uint64_t>() << '\n'
      << "abbreviation multiplier: " << ab.multiplier << '\n'
      << "pair exchange factor: " << j["pair_exchange_factor"].get<double>() << '\n';
  if (job.enumerate) {
    out << "enumerated products on " << job.metric << ": " << j["enumerated"].get<std::size_t>()
        << '\n';
  }
  return 0;
}

int do_components(const Job& job, std::ostream& out) {
  const auto g = build_metric(job);
  const auto R = tensor::riemann_lowered(g);
  const std::size_t n = g.dim();
  auto name = [&](std::size_t i) { return g.env()->coordinate_name(i); };
  json rows = json::array();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t c = a; c < n; ++c) {
        for (std::size_t d = c + 1; d < n; ++d) {
          if (c == a && d < b) continue;
          const sym::Expr* v = R.find(tensor::Index{static_cast<std::uint8_t>(a),
                                                    static_cast<std::uint8_t>(b),
                                                    static_cast<std::uint8_t>(c),
                                                    static_cast<std::uint8_t>(d)});
          if (v == nullptr) continue;
          rows.push_back({{"index", {name(a), name(b), name(c), name(d)}},
                          {"value", v->to_string()}});
        }
      }
    }
  }
  if (job.json) {
    out << json{{"metric", job.metric}, {"dim", n}, {"components", rows}}.dump() << '\n';
    return 0;
  }
  out << "coordinates: " << coordinate_list(g) << '\n';
  for (const auto& row : rows) {
    const auto& idx = row["index"];
    out << "R_{" << idx[0].get<std::string>() << ',' << idx[1].get<std::string>() << ','
        << idx[2].get<std::string>() << ',' << idx[3].get<std::string>()
        << "} = " << row["value"].get<std::string>() << '\n';
  }
  out << rows.size() << " nonzero components up to symmetry\n";
  return 0;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact curvature invariants of metrics"};
  app.require_subcommand(0, 1);

  Job run_job;
  std::vector<std::string> run_sets;
  add_metric_options(app, run_job, run_sets);
  add_spec_options(app, run_job);
  app.add_option("--workers", run_job.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--parcels", run_job.parcels, "Parcels per worker")->check(CLI::PositiveNumber);

  Job count_job;
  std::vector<std::string> count_sets;
  auto* count = app.add_subcommand("count", "Product counts without computing the invariant");
  add_spec_options(*count, count_job);
  add_metric_options(*count, count_job, count_sets);
  count->add_flag("--enumerate", count_job.enumerate, "Also count realized products on --metric");

  Job comp_job;
  std::vector<std::string> comp_sets;
  auto* comps = app.add_subcommand("components", "Nonzero Riemann components of a metric");
  add_metric_options(*comps, comp_job, comp_sets);
  comps->add_option("--dim", comp_job.dim, "Dimension")->check(CLI::Range(1, 255));
  comps->add_flag("--json", comp_job.json, "Print JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (count->parsed()) {
      apply_sets(count_job, count_sets);
      return do_count(count_job, out);
    }
    if (comps->parsed()) {
      apply_sets(comp_job, comp_sets);
      return do_components(comp_job, out);
    }
    apply_sets(run_job, run_sets);
    const RunReport r = run(run_job);
    out << (run_job.json ? report_json(r) + "\n" : report_text(r));
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace curvinv::cli
