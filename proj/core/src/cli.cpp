#include "acim/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "acim/builtins.hpp"
#include "acim/common.hpp"
#include "acim/ergodics.hpp"
#include "acim/first_return.hpp"
#include "acim/io.hpp"
#include "acim/map_config.hpp"
#include "acim/sampler.hpp"
#include "acim/transfer.hpp"
#include "acim/ulam.hpp"
#include "acim/validate.hpp"

namespace acim::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct Options {
  std::string command;
  std::string map_arg;
  std::size_t bins = 1024;
  double tail_tol = 1e-8;
  double tol = 1e-12;
  std::size_t max_iter = 100000;
  std::size_t n_max = 0;  // resolved per command when the flag is absent
  std::uint64_t seed = 0;
  std::size_t k = 5;
  double eps = 0.5;
  std::string out = ".";
  bool force = false;
};

std::size_t default_n_max(const std::string& cmd) {
  if (cmd == "correlations") return 24;
  if (cmd == "clt") return 2048;
  if (cmd == "sample") return 65536;
  if (cmd == "ly-check") return 1;
  if (cmd == "first-return") return 64;
  return 24;
}

bool map_is_affine(const PiecewiseMap& map) {
  if (!map.finite() && !map.tail_full_affine()) return false;
  for (std::size_t i = 1; i <= map.stored_count(); ++i)
    if (!map.branch(i).is_affine()) return false;
  return true;
}

ordered_json class_json(const ClassReport& rep, const std::string& status) {
  ordered_json j;
  j["status"] = status;
  j["in_T"] = rep.in_T;
  j["in_TE"] = rep.in_TE;
  j["alpha"] = rep.alpha;
  j["beta"] = rep.beta;
  if (rep.r) j["r"] = *rep.r;
  j["r_relaxed"] = rep.r_relaxed;
  j["slope_sum"] = rep.slope_sum;
  j["accumulates_at_zero"] = rep.accumulates_at_zero;
  j["branches_checked"] = rep.branches_checked;
  ordered_json v = ordered_json::array();
  for (const auto& viol : rep.violations) {
    ordered_json e;
    e["condition"] = viol.condition;
    e["branch"] = viol.branch;
    e["detail"] = viol.detail;
    v.push_back(e);
  }
  j["violations"] = v;
  return j;
}

std::string violations_csv(const ClassReport& rep) {
  std::ostringstream os;
  os << "condition,branch,detail\n";
  for (const auto& v : rep.violations) {
    std::string d = v.detail;
    for (char& c : d)
      if (c == ',' || c == '\n') c = ';';
    os << v.condition << ',' << v.branch << ',' << d << '\n';
  }
  return os.str();
}

void write_text(const Options& o, const std::string& name, const std::string& text) {
  write_file((fs::path(o.out) / name).string(), text);
}

int dispatch(const Options& o) {
  fs::create_directories(o.out);
  const bool is_name = is_builtin_name(o.map_arg);
  PiecewiseMap map =
      is_name ? builtin(o.map_arg, o.k) : load_map_file(o.map_arg, 64, o.tail_tol);

  ValidateOptions vopt;
  vopt.tail_tol = o.tail_tol;
  const ClassReport rep = validate(map, vopt);
  const std::string status = is_name              ? "builtin"
                             : rep.in_T           ? "validated"
                             : o.force            ? "unverified class membership"
                                                  : "rejected";

  ordered_json manifest;
  manifest["command"] = o.command;
  manifest["map"] = o.map_arg;
  {
    ordered_json knobs;
    knobs["bins"] = o.bins;
    knobs["tail_tol"] = o.tail_tol;
    knobs["tol"] = o.tol;
    knobs["max_iter"] = o.max_iter;
    knobs["n_max"] = o.n_max;
    knobs["seed"] = o.seed;
    knobs["k"] = o.k;
    knobs["eps"] = o.eps;
    knobs["force"] = o.force;
    manifest["knobs"] = knobs;
  }
  manifest["map_class"] = class_json(rep, status);
  ordered_json results;

  if (o.command == "validate") {
    write_text(o, "violations.csv", violations_csv(rep));
    std::ostringstream g;
    write_map_graph(map, g, 10000);
    write_text(o, "graph.csv", g.str());
    results["admissible"] = rep.in_T;
    manifest["results"] = results;
    write_text(o, "manifest.json", manifest.dump(2) + "\n");
    std::cout << (rep.in_T ? "admissible" : "rejected") << " alpha=" << g17(rep.alpha)
              << " beta=" << g17(rep.beta) << " violations=" << rep.violations.size() << '\n';
    return rep.in_T ? 0 : 2;
  }

  if (!is_name && !rep.in_T && !o.force) {
    write_text(o, "violations.csv", violations_csv(rep));
    manifest["results"] = results;
    write_text(o, "manifest.json", manifest.dump(2) + "\n");
    std::cerr << "map failed validation (" << rep.violations.size()
              << " violations); pass --force to compute anyway\n";
    for (const auto& v : rep.violations)
      std::cerr << "  " << v.condition << " branch " << v.branch << ": " << v.detail << '\n';
    return 2;
  }

  if (o.command == "density") {
    UlamMatrix m = build_ulam(map, o.bins, o.tail_tol);
    PowerResult pr = invariant_masses(m, o.tol, o.max_iter);
    std::ostringstream cs;
    write_step_csv(masses_to_density(pr.masses), cs);
    write_text(o, "density.csv", cs.str());
    results["iterations"] = pr.iterations;
    results["residual"] = pr.residual;
    results["converged"] = pr.converged;
    results["max_row_defect"] = m.max_defect();
    std::cout << "density at " << o.bins << " bins; residual " << g17(pr.residual) << '\n';
  } else if (o.command == "spectrum") {
    UlamMatrix m = build_ulam(map, o.bins, o.tail_tol);
    PowerResult pr = invariant_masses(m, o.tol, o.max_iter);
    EigenEstimate ee = second_eigenvalue(m, pr.masses, std::max(o.tol, 1e-10), o.max_iter,
                                         o.seed == 0 ? 1 : o.seed);
    GapProbe gp = spectral_gap_probe(m, 12, o.seed + 7, 8);
    std::ostringstream cs;
    write_step_csv(masses_to_density(pr.masses), cs);
    write_text(o, "density.csv", cs.str());
    std::ostringstream es;
    write_sequence_csv(gp.envelope, es, "envelope");
    write_text(o, "envelope.csv", es.str());
    results["lambda2_abs"] = ee.lambda2_abs;
    results["eigen_residual"] = ee.residual;
    results["eigen_converged"] = ee.converged;
    results["power_iterations"] = pr.iterations;
    results["power_residual"] = pr.residual;
    results["power_converged"] = pr.converged;
    results["q_fit"] = gp.q_fit;
    results["H_fit"] = gp.H_fit;
    results["fit_degenerate"] = gp.degenerate;
    results["max_row_defect"] = m.max_defect();
    std::cout << "lambda2 " << g17(ee.lambda2_abs) << "; envelope rate " << g17(gp.q_fit)
              << '\n';
  } else if (o.command == "correlations") {
    UlamMatrix m = build_ulam(map, o.bins, o.tail_tol);
    PowerResult pr = invariant_masses(m, o.tol, o.max_iter);
    StepFunction mu = masses_to_density(pr.masses);
    StepFunction f = StepFunction::centered_identity(o.bins);
    const CorrMethod method =
        map_is_affine(map) ? CorrMethod::exact_matrix : CorrMethod::orbit_average;
    CorrelationReport cr =
        correlations(map, mu, f, f, o.n_max, method, o.tail_tol, 1000000, 1000, o.seed);
    std::ostringstream cs;
    write_sequence_csv(cr.values, cs, "C_n");
    write_text(o, "correlations.csv", cs.str());
    results["method"] =
        method == CorrMethod::exact_matrix ? "exact-matrix" : "orbit-average";
    results["q_fit"] = cr.q_fit;
    results["prefactor"] = cr.prefactor;
    results["fit_degenerate"] = cr.fit_degenerate;
    results["orbit_se"] = cr.orbit_se;
    std::cout << "correlations to lag " << o.n_max << "; fitted rate " << g17(cr.q_fit)
              << '\n';
  } else if (o.command == "clt") {
    UlamMatrix m = build_ulam(map, o.bins, o.tail_tol);
    PowerResult pr = invariant_masses(m, o.tol, o.max_iter);
    StepFunction mu = masses_to_density(pr.masses);
    StepFunction f0 = StepFunction::centered_identity(o.bins);
    StepFunction f = f0 - StepFunction::constant(inner(f0, mu));
    constexpr std::size_t kSamples = 4096;
    CltReport cr = clt_probe(map, mu, f, o.n_max, kSamples, o.seed, 24, o.tail_tol);
    std::ostringstream cs;
    write_sequence_csv(cr.sums, cs, "S");
    write_text(o, "sums.csv", cs.str());
    results["sigma2"] = cr.sigma2;
    results["normal_distance"] = cr.normal_distance;
    results["green_kubo"] = cr.green_kubo;
    results["degenerate"] = cr.degenerate;
    results["n"] = cr.n;
    results["samples"] = cr.samples;
    std::cout << "sigma2 " << g17(cr.sigma2) << "; sup CDF distance "
              << g17(cr.normal_distance) << '\n';
  } else if (o.command == "sample") {
    std::vector<double> xs = sample(map, 0.3141592653589793, o.n_max, 1024, o.seed);
    std::ostringstream cs;
    write_sequence_csv(xs, cs, "x");
    write_text(o, "samples.csv", cs.str());
    results["count"] = xs.size();
    results["lag1_autocorrelation"] = lag1_autocorrelation(xs);
    std::cout << xs.size() << " samples; lag-1 autocorrelation "
              << g17(lag1_autocorrelation(xs)) << '\n';
  } else if (o.command == "ly-check") {
    LyConstants c = ly_constants(map, o.tail_tol);
    results["alpha"] = c.alpha;
    results["D"] = c.D;
    results["K"] = c.K;
    if (c.r) results["r"] = *c.r;
    results["truncation_bound"] = c.truncation_bound;
    if (map_is_affine(map)) {
      LyProbeReport lp = ly_probe(map, o.n_max, 32, o.tail_tol, o.seed);
      std::ostringstream ws;
      write_step_csv(lp.worst, ws);
      write_text(o, "worst.csv", ws.str());
      results["probe"] = "run";
      results["B_n_est"] = lp.B_n_est;
      results["C_est"] = lp.C_est;
      results["worst_ratio"] = lp.worst_ratio;
      results["expansion_certified"] = lp.expansion_certified;
      results["family_size"] = lp.family_size;
    } else {
      results["probe"] = "skipped: exact step pushforward needs affine branches";
    }
    std::cout << "alpha " << g17(c.alpha) << " D " << g17(c.D) << " K " << g17(c.K) << '\n';
  } else if (o.command == "first-return") {
    FirstReturnOptions fo;
    fo.max_return_time = o.n_max;
    fo.tail_tol = o.tail_tol;
    FirstReturnResult fr = first_return_map(map, o.eps, fo);
    std::ostringstream bs;
    bs << "return_time,base_a,base_b,affine,slope,intercept\n";
    for (const auto& b : fr.branches)
      bs << b.return_time << ',' << g17(b.base_a) << ',' << g17(b.base_b) << ','
         << (b.affine ? 1 : 0) << ',' << g17(b.slope) << ',' << g17(b.intercept) << '\n';
    write_text(o, "branches.csv", bs.str());
    std::ostringstream g;
    write_map_graph(fr.map, g, 10000);
    write_text(o, "graph.csv", g.str());
    const ClassReport rrep = validate(fr.map, vopt);
    results["eps"] = fr.eps;
    results["captured_fraction"] = fr.captured_fraction;
    results["unreturned_fraction"] = fr.unreturned_fraction;
    results["branches"] = fr.branches.size();
    results["return_map_in_T"] = rrep.in_T;
    results["return_map_alpha"] = rrep.alpha;
    std::cout << fr.branches.size() << " return branches; captured "
              << g17(fr.captured_fraction) << '\n';
  } else {
    fail(errc::usage_error, "unknown command " + o.command);
  }

  manifest["results"] = results;
  write_text(o, "manifest.json", manifest.dump(2) + "\n");
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  Options o;
  CLI::App app{"piecewise convex interval map toolkit"};
  app.fallthrough(true);
  app.require_subcommand(1);
  app.add_option("--map", o.map_arg, "builtin name or map config path")->required();
  app.add_option("--bins", o.bins, "Ulam bin count")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  app.add_option("--tail-tol", o.tail_tol, "tail truncation tolerance");
  app.add_option("--tol", o.tol, "iteration tolerance");
  app.add_option("--max-iter", o.max_iter, "power iteration cap")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000000000}));
  auto* nopt = app.add_option("--n-max", o.n_max, "lag / step / count bound (per command)")
                   ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--k", o.k, "branch count for conjugated builtins")
      ->check(CLI::Range(std::size_t{2}, std::size_t{65536}));
  app.add_option("--eps", o.eps, "first-return base point");
  app.add_option("--out", o.out, "artifact directory");
  app.add_flag("--force", o.force, "compute even when validation fails");

  for (const char* name : {"validate", "density", "spectrum", "correlations", "clt",
                           "sample", "ly-check", "first-return"})
    app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  o.command = app.get_subcommands().front()->get_name();
  if (nopt->count() == 0) o.n_max = default_n_max(o.command);

  try {
    if (!(o.tail_tol > 0.0) || o.tail_tol > 0.1)
      fail(errc::usage_error, "--tail-tol must lie in (0, 0.1]");
    if (!(o.tol > 0.0) || o.tol > 1.0) fail(errc::usage_error, "--tol must lie in (0, 1]");
    if (!(o.eps > 0.0) || !(o.eps < 1.0)) fail(errc::usage_error, "--eps must lie in (0, 1)");
    return dispatch(o);
  } catch (const error& e) {
    std::cerr << e.what() << '\n';
    return e.code() == errc::validation_failure ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace acim::cli
