#include "superlap/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "superlap/csv.hpp"
#include "superlap/eigensolve.hpp"
#include "superlap/error.hpp"
#include "superlap/solve.hpp"
#include "superlap/verify.hpp"

namespace superlap::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Non-finite values have no JSON form; they are written as null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, double>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
  } else if (j.is_number()) {
    out.emplace_back(prefix, j.get<double>());
  } else if (j.is_boolean()) {
    out.emplace_back(prefix, j.get<bool>() ? 1.0 : 0.0);
  }
}

void write_summary(const fs::path& dir, const json& j) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "summary.json");
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + (dir / "summary.json").string());
    out << j.dump(2) << '\n';
  }
  std::vector<std::pair<std::string, double>> flat;
  flatten(j, "", flat);
  std::ofstream out(dir / "summary.csv");
  require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + (dir / "summary.csv").string());
  out << "key,value\n";
  for (const auto& [k, v] : flat) out << k << ',' << format_double(v) << '\n';
}

void write_grid(const fs::path& path, const Domain& d, const GridFunction& u) {
  std::vector<std::vector<double>> rows;
  rows.reserve(d.n());
  for (int i = 0; i < d.n(); ++i) {
    const auto c = d.center(i);
    if (d.dim() == 1)
      rows.push_back({c[0], u[i]});
    else
      rows.push_back({c[0], c[1], u[i]});
  }
  write_csv(path, d.dim() == 1 ? std::vector<std::string>{"x", "u"} : std::vector<std::string>{"x", "y", "u"}, rows);
}

void write_history(const fs::path& path, const std::vector<IterRecord>& h) {
  std::vector<std::vector<double>> rows;
  for (const auto& r : h) rows.push_back({static_cast<double>(r.iter), r.value, r.step, r.measure});
  write_csv(path, {"iter", "value", "step", "measure"}, rows);
}

void write_trace(const fs::path& path, const std::vector<PsRecord>& t) {
  std::vector<std::vector<double>> rows;
  for (const auto& r : t) rows.push_back({static_cast<double>(r.iter), r.energy, r.residual_norm, r.step});
  write_csv(path, {"iter", "E", "residual_norm", "step_length"}, rows);
}

json domain_json(const Domain& d) {
  return {{"dim", d.dim()}, {"h", d.h()}, {"cells", d.n()}, {"volume", d.volume()}, {"nx", d.nx()}, {"ny", d.ny()}};
}

json measure_json(const ValidatedMeasure& m) {
  json atoms = json::array();
  for (const auto& a : m.atoms) atoms.push_back({{"order", a.order}, {"weight", a.weight}});
  return {{"atoms", atoms},
          {"s_bar", m.s_bar},
          {"gamma", m.gamma},
          {"s_sharp", m.s_sharp},
          {"mass_plus_high", m.mass_plus_high},
          {"mass_minus_low", m.mass_minus_low},
          {"tail_mass", m.tail_mass},
          {"plus_count", m.plus_count()},
          {"minus_count", m.minus_count()}};
}

json eigen_json(const EigenReport& e) {
  return {{"lambda1", e.lambda1},
          {"iterations", e.iterations},
          {"converged", e.converged},
          {"residual_norm", num(e.residual_norm)}};
}

json thresholds_json(const ThresholdReport& t) {
  return {{"l", t.l},
          {"lambda_l", t.lambda_l},
          {"lambda", t.lambda},
          {"sobolev", t.sobolev},
          {"c_star", t.c_star},
          {"theta0", t.theta0},
          {"window_lo", t.window_lo},
          {"window_hi", t.window_hi},
          {"gamma", t.gamma_diag},
          {"in_window", t.in_window},
          {"theta0_valid", t.theta0_valid}};
}

json scan_json(const ScanReport& r) {
  json j = {{"samples", r.samples},
            {"worst_ratio", num(r.worst_ratio)},
            {"bound", num(r.bound)},
            {"violations", r.violations},
            {"asserted", r.asserted},
            {"passed", r.passed()},
            {"csv", fs::path(r.details).filename().string()}};
  for (const auto& [k, v] : r.extra) j["diagnostics"][k] = num(v);
  return j;
}

struct Context {
  const RunConfig& cfg;
  std::ostream& log;
  fs::path out;
  Domain domain;
  ValidatedMeasure measure;
};

EigenOptions eigen_options(const RunConfig& cfg) {
  EigenOptions eo;
  eo.seed = cfg.seed;
  eo.tol = cfg.opt("eigen_tol", eo.tol);
  eo.max_iter = cfg.opt_int("max_iter", eo.max_iter);
  return eo;
}

SolveOptions solve_options(const RunConfig& cfg) {
  SolveOptions so;
  so.seed = cfg.seed;
  so.tol = cfg.opt("tol", so.tol);
  so.max_iter = cfg.opt_int("max_iter", so.max_iter);
  so.polish = cfg.opt_int("polish", so.polish);
  so.perturbation = cfg.opt("perturbation", so.perturbation);
  so.eta_samples = cfg.opt_int("eta_samples", so.eta_samples);
  return so;
}

/// Problem with lambda resolved; an "auto" lambda computes the first eigenpair,
/// which is handed back for reuse.
Problem resolve_problem(Context& ctx, std::optional<EigenReport>& eig) {
  Problem prob = Problem::build(ctx.domain, ctx.measure, ctx.cfg.p, ctx.cfg.lambda.value);
  if (ctx.cfg.lambda.factor_of_lambda1) {
    eig = lambda1(prob, eigen_options(ctx.cfg));
    prob = prob.with_lambda(*ctx.cfg.lambda.factor_of_lambda1 * eig->lambda1);
  }
  return prob;
}

json base_json(const Context& ctx, const std::string& command) {
  return {{"command", command},
          {"seed", ctx.cfg.seed},
          {"p", ctx.cfg.p},
          {"domain", domain_json(ctx.domain)},
          {"measure", measure_json(ctx.measure)}};
}

int cmd_validate(Context& ctx) {
  json j = base_json(ctx, "validate-measure");
  const Problem prob = Problem::build(ctx.domain, ctx.measure, ctx.cfg.p);
  j["critical"] = {{"condition_holds", prob.p_star.has_value()}, {"p_star", prob.p_star ? json(*prob.p_star) : json(nullptr)}};
  std::vector<std::vector<double>> rows;
  for (const auto& a : ctx.measure.atoms) rows.push_back({a.order, a.weight});
  write_csv(ctx.out / "atoms.csv", {"order", "weight"}, rows);
  write_summary(ctx.out, j);
  ctx.log << "gamma = " << ctx.measure.gamma << ", s_sharp = " << ctx.measure.s_sharp << '\n';
  return kSuccess;
}

const char* kind_name(KernelKind k) {
  switch (k) {
    case KernelKind::Lebesgue: return "lebesgue";
    case KernelKind::Gradient: return "gradient";
    default: return "fractional";
  }
}

int cmd_assemble(Context& ctx) {
  json j = base_json(ctx, "assemble");
  const Problem prob = Problem::build(ctx.domain, ctx.measure, ctx.cfg.p);
  const GridFunction bump = test_function(TestKind::Bump, ctx.domain);
  json tables = json::array();
  std::vector<std::vector<double>> rows;
  for (std::size_t a = 0; a < prob.tables.size(); ++a) {
    const auto& t = *prob.tables[a];
    const double semi = seminorm(bump, t, ctx.domain);
    json tj = {{"order", ctx.measure.atoms[a].order}, {"weight", ctx.measure.atoms[a].weight}, {"kind", kind_name(t.kind)},
               {"c", t.c}, {"bump_seminorm", semi}};
    if (t.kind == KernelKind::Fractional) {
      tj["W_max"] = t.W.maxCoeff();
      tj["row_sum_min"] = t.W_rows.minCoeff();
      tj["row_sum_max"] = t.W_rows.maxCoeff();
      tj["tail_min"] = t.tail.minCoeff();
      tj["tail_max"] = t.tail.maxCoeff();
    }
    rows.push_back({ctx.measure.atoms[a].order, ctx.measure.atoms[a].weight, t.c, semi});
    tables.push_back(tj);
  }
  j["tables"] = tables;
  write_csv(ctx.out / "tables.csv", {"order", "weight", "c", "bump_seminorm"}, rows);
  write_summary(ctx.out, j);
  return kSuccess;
}

int cmd_eigen(Context& ctx) {
  json j = base_json(ctx, "eigen");
  const Problem prob = Problem::build(ctx.domain, ctx.measure, ctx.cfg.p);
  const EigenOptions eo = eigen_options(ctx.cfg);
  const EigenReport e = lambda1(prob, eo);
  j["eigen"] = eigen_json(e);
  write_history(ctx.out / "rayleigh_history.csv", e.rayleigh_history);
  write_grid(ctx.out / "eigenfunction.csv", ctx.domain, e.u1);
  if (ctx.cfg.opt_int("lambda2", 0) != 0) {
    const auto l2 = lambda2_estimate(prob, eo);
    j["lambda2"] = {{"value", l2.value}, {"best_cut", l2.best_cut}, {"best_axis", l2.best_axis}, {"heuristic", l2.heuristic}};
  }
  write_summary(ctx.out, j);
  ctx.log << "lambda1 = " << e.lambda1 << " (" << e.iterations << " iterations)\n";
  return e.converged ? kSuccess : kAssertionFailure;
}

int cmd_sobolev(Context& ctx) {
  json j = base_json(ctx, "sobolev");
  const Problem prob = Problem::build(ctx.domain, ctx.measure, ctx.cfg.p);
  const double q = prob.critical_exponent();
  const SobolevReport s = sobolev_constant(prob, eigen_options(ctx.cfg));
  j["sobolev"] = {{"value", s.value}, {"p_star", q}, {"starts", s.starts}};
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < s.starts.size(); ++i) rows.push_back({static_cast<double>(i), s.starts[i]});
  write_csv(ctx.out / "sobolev_starts.csv", {"start", "value"}, rows);
  write_grid(ctx.out / "sobolev_minimizer.csv", ctx.domain, s.u);
  write_summary(ctx.out, j);
  ctx.log << "S = " << s.value << '\n';
  return kSuccess;
}

int cmd_thresholds(Context& ctx) {
  json j = base_json(ctx, "thresholds");
  std::optional<EigenReport> eig;
  const Problem prob = resolve_problem(ctx, eig);
  prob.critical_exponent();
  const EigenOptions eo = eigen_options(ctx.cfg);
  if (!eig) eig = lambda1(prob, eo);
  const int l = ctx.cfg.opt_int("l", 1);
  if (l != 1 && l != 2) ctx.cfg.file.fail("command.l", "only l = 1 (computed) and l = 2 (heuristic) are supported");
  const double lambda_l = l == 1 ? eig->lambda1 : lambda2_estimate(prob, eo).value;
  const SobolevReport sob = sobolev_constant(prob, eo);
  const ThresholdReport t = thresholds(prob, l, lambda_l, sob.value);
  j["lambda_heuristic"] = l != 1;
  j["thresholds"] = thresholds_json(t);
  j["peak_bound"] = peak_bound(prob, lambda_l);

  // theta0 at the quarter point and window flags on a 5-point grid.
  const double vol_pow = std::pow(ctx.domain.volume(), ctx.measure.s_sharp * ctx.cfg.p / ctx.domain.dim());
  const double lambda_q = lambda_l - sob.value / (2.0 * vol_pow);
  const double theta_q = thresholds(prob.with_lambda(lambda_q), l, lambda_l, sob.value).theta0;
  const bool quarter_ok = std::abs(theta_q - 0.25) <= 1e-12;
  json grid = json::array();
  std::vector<std::vector<double>> rows;
  bool consistent = true;
  const double width = t.window_hi - t.window_lo;
  for (double frac : {-0.25, 0.25, 0.5, 0.75, 1.25}) {
    const double lam = t.window_lo + frac * width;
    const ThresholdReport g = thresholds(prob.with_lambda(lam), l, lambda_l, sob.value);
    const bool expected = frac > 0.0 && frac < 1.0;
    const bool theta_in_half = g.theta0 > 0.0 && g.theta0 < 0.5;
    consistent = consistent && g.in_window == expected && theta_in_half == expected;
    grid.push_back({{"lambda", lam}, {"theta0", g.theta0}, {"c_star", g.c_star}, {"in_window", g.in_window},
                    {"theta0_valid", g.theta0_valid}});
    rows.push_back({lam, g.theta0, g.c_star, g.in_window ? 1.0 : 0.0, expected ? 1.0 : 0.0});
  }
  j["quarter"] = {{"lambda", lambda_q}, {"theta0", theta_q}, {"ok", quarter_ok}};
  j["grid"] = grid;
  j["grid_consistent"] = consistent;
  write_csv(ctx.out / "thresholds_grid.csv", {"lambda", "theta0", "c_star", "in_window", "expected"}, rows);
  write_summary(ctx.out, j);
  ctx.log << "theta0 = " << t.theta0 << ", c* = " << t.c_star << '\n';
  return quarter_ok && consistent ? kSuccess : kAssertionFailure;
}

json report_json(const SolveReport& r, const Problem& prob) {
  const double ref = dual_norm(residual_reference(r.u, prob), prob.domain, prob.p);
  return {{"energy", r.energy},
          {"residual_norm", r.residual_norm},
          {"reference_residual_norm", ref},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"nontrivial", r.nontrivial},
          {"below_cstar", r.below_cstar}};
}

// Energy non-increasing along the trace (relative round-off slack).
bool trace_monotone(const std::vector<PsRecord>& t) {
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i].energy > t[i - 1].energy + 1e-12 * std::max(1.0, std::abs(t[i - 1].energy))) return false;
  return true;
}

// Final 10 recorded iterates below 10 tol.
bool trace_tail_small(const std::vector<PsRecord>& t, double tol) {
  if (t.size() < 10) return false;
  return std::all_of(t.end() - 10, t.end(), [&](const PsRecord& r) { return r.residual_norm <= 10.0 * tol; });
}

struct PointOutcome {
  json j;
  bool ok = false;
};

PointOutcome solve_point(const Problem& prob, const EigenReport& eig, const SobolevReport& sob, const SolveOptions& so,
                         const fs::path& out) {
  PointOutcome po;
  const PairReport pr = find_pair(prob, eig, sob, so);
  json& j = po.j;
  j["lambda"] = prob.lambda;
  j["lambda1"] = eig.lambda1;
  j["sobolev"] = sob.value;
  j["p_star"] = prob.critical_exponent();
  j["thresholds"] = thresholds_json(pr.thresholds);
  j["path"] = {{"R", pr.path.R}, {"t_peak", pr.path.t_peak}, {"E_peak", pr.path.E_peak}};
  j["peak_bound"] = pr.peak_bound;
  j["peak_ok"] = pr.peak_ok;
  j["eta"] = pr.eta;
  j["reliable"] = pr.reliable;
  j["diverged"] = pr.diverged;
  fs::create_directories(out);
  write_history(out / "rayleigh_history.csv", eig.rayleigh_history);
  if (pr.diverged) {
    j["pair_ok"] = false;
    po.ok = !pr.reliable;
    return po;
  }
  j["plus"] = report_json(pr.plus, prob);
  j["minus"] = report_json(pr.minus, prob);
  j["pair_ok"] = pr.pair_ok;
  const bool monotone = trace_monotone(pr.plus.ps_trace) && trace_monotone(pr.minus.ps_trace);
  const bool tail = !(pr.plus.converged && pr.plus.below_cstar) || trace_tail_small(pr.plus.ps_trace, so.tol);
  const bool ref_ok = j["plus"]["reference_residual_norm"].get<double>() <= so.tol &&
                      j["minus"]["reference_residual_norm"].get<double>() <= so.tol;
  j["trace_monotone"] = monotone;
  j["trace_tail_small"] = tail;
  j["reference_ok"] = ref_ok;
  write_trace(out / "ps_trace_plus.csv", pr.plus.ps_trace);
  write_trace(out / "ps_trace_minus.csv", pr.minus.ps_trace);
  write_grid(out / "solution.csv", prob.domain, pr.plus.u);
  po.ok = !pr.reliable || (pr.pair_ok && pr.peak_ok && monotone && tail && ref_ok);
  return po;
}

int cmd_solve(Context& ctx) {
  json j = base_json(ctx, "solve");
  // Fail fast on the critical-exponent condition before any eigen work.
  Problem::build(ctx.domain, ctx.measure, ctx.cfg.p).critical_exponent();
  std::optional<EigenReport> eig;
  const Problem prob = resolve_problem(ctx, eig);
  const EigenOptions eo = eigen_options(ctx.cfg);
  if (!eig) eig = lambda1(prob, eo);
  const SobolevReport sob = sobolev_constant(prob, eo);
  const PointOutcome po = solve_point(prob, *eig, sob, solve_options(ctx.cfg), ctx.out);
  j["solve"] = po.j;
  write_summary(ctx.out, j);
  ctx.log << "pair: " << (po.j.value("pair_ok", false) ? "ok" : "FAILED") << ", E = "
          << (po.j.contains("plus") ? po.j["plus"]["energy"].get<double>() : NAN) << '\n';
  return po.ok ? kSuccess : kAssertionFailure;
}

std::vector<std::string> words(const std::string& s) {
  std::string t = s;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream in(t);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

int cmd_verify(Context& ctx) {
  json j = base_json(ctx, "verify");
  const RunConfig& cfg = ctx.cfg;
  const Problem prob = Problem::build(ctx.domain, ctx.measure, cfg.p);
  const int samples = cfg.opt_int("samples", 100);
  const std::uint64_t seed = cfg.seed;
  std::vector<std::string> scans = words(cfg.file.str(
      "command.scans", "embedding monotonicity reabsorption convexity brezis_lieb scalar limit identity pairing"));
  if (prob.p_star && !cfg.file.has("command.scans")) {
    scans.push_back("gradient");
    scans.push_back("f_checks");
  }
  bool all_ok = true;
  auto record = [&](ScanReport r) {
    r.write_csv(ctx.out / ("scan_" + r.name + ".csv"));
    all_ok = all_ok && r.passed();
    ctx.log << r.name << ": " << (!r.asserted ? "report" : r.passed() ? "pass" : "FAIL") << " (" << r.violations << " violations)\n";
    j["scans"][r.name] = scan_json(r);
  };
  fs::create_directories(ctx.out);
  for (const auto& s : scans) {
    if (s == "embedding") {
      std::vector<double> grid;
      for (int k = 0; k <= 10; ++k) grid.push_back(k / 10.0);
      record(embedding_scan(ctx.domain, cfg.p, cfg.opt_list("s_grid", grid), samples, seed));
    } else if (s == "monotonicity") {
      const auto flat = cfg.opt_list("pairs", {0.0, 1.0, 0.3, 0.3, 0.25, 0.75});
      if (flat.size() % 2 != 0) cfg.file.fail("command.pairs", "pairs need an even number of entries");
      std::vector<std::pair<double, double>> pairs;
      for (std::size_t i = 0; i < flat.size(); i += 2) pairs.emplace_back(flat[i], flat[i + 1]);
      record(monotonicity_scan(ctx.domain, cfg.p, pairs, samples, seed));
    } else if (s == "reabsorption") {
      record(reabsorption_check(prob, samples, seed));
    } else if (s == "convexity") {
      record(convexity_modulus(prob, cfg.opt("eps", 0.5), samples, seed));
    } else if (s == "brezis_lieb") {
      std::vector<int> widths;
      for (double w : cfg.opt_list("widths", {8, 4, 2, 1})) widths.push_back(static_cast<int>(w));
      auto bl = brezis_lieb_check(prob, widths);
      record(bl.plus);
      if (bl.minus.asserted) record(bl.minus);
    } else if (s == "scalar") {
      auto sc = scalar_inequalities(cfg.opt_int("scalar_samples", 100000), seed);
      record(sc.plas);
      record(sc.lipschitz);
      record(sc.holder);
      j["phi"] = {{"c_star", sc.c_star},
                  {"at_1e6", sc.phi_at_large_pos},
                  {"at_-1e6", sc.phi_at_large_neg},
                  {"at_1e-6", sc.phi_at_small}};
    } else if (s == "limit") {
      record(limit_consistency(ctx.domain, cfg.p, test_function(TestKind::Bump, ctx.domain)));
    } else if (s == "identity") {
      record(identity_scan(prob, samples, seed));
    } else if (s == "pairing") {
      auto pb = pairing_bounds(prob, samples, seed);
      record(pb.a_bound);
      record(pb.b_bound);
      if (pb.l_bound.asserted) record(pb.l_bound);
    } else if (s == "gradient") {
      const double tol = cfg.opt("gradient_tol", cfg.p == 2.0 ? 1e-5 : 1e-4);
      record(gradient_check(prob, cfg.opt_int("gradient_samples", 10), cfg.opt("fd_eps", 1e-6), tol, seed));
    } else if (s == "f_checks") {
      auto fr = f_checks(prob, samples, seed);
      record(fr.f1);
      record(fr.f2);
    } else {
      cfg.file.fail("command.scans", "unknown scan '" + s + "'");
    }
  }
  j["all_passed"] = all_ok;
  write_summary(ctx.out, j);
  return all_ok ? kSuccess : kAssertionFailure;
}

int cmd_sweep(Context& ctx) {
  json j = base_json(ctx, "sweep");
  const RunConfig& cfg = ctx.cfg;
  Problem base = Problem::build(ctx.domain, ctx.measure, cfg.p);
  base.critical_exponent();
  const EigenOptions eo = eigen_options(cfg);
  const EigenReport eig = lambda1(base, eo);
  const SobolevReport sob = sobolev_constant(base, eo);
  const ThresholdReport window = thresholds(base, 1, eig.lambda1, sob.value);
  const int points = cfg.opt_int("lambda_points", 5);
  if (points < 1) cfg.file.fail("command.lambda_points", "need at least one point");
  std::vector<double> lambdas;
  for (int k = 0; k < points; ++k)
    lambdas.push_back(window.window_lo + (k + 1.0) / (points + 1.0) * (window.window_hi - window.window_lo));

  const SolveOptions so = solve_options(cfg);
  std::vector<PointOutcome> results(points);
  std::vector<std::string> errors(points);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k; (k = next.fetch_add(1)) < points;) {
      char name[32];
      std::snprintf(name, sizeof name, "point_%03d", k);
      try {
        const fs::path dir = ctx.out / name;
        results[k] = solve_point(base.with_lambda(lambdas[k]), eig, sob, so, dir);
        write_summary(dir, results[k].j);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int threads = std::clamp(cfg.opt_int("threads", static_cast<int>(hw)), 1, points);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  json arr = json::array();
  std::vector<std::vector<double>> rows;
  bool all_ok = true;
  for (int k = 0; k < points; ++k) {
    const json& r = results[k].j;
    const bool solved = errors[k].empty() && r.contains("plus");
    all_ok = all_ok && errors[k].empty() && results[k].ok;
    const double energy = solved ? r["plus"]["energy"].get<double>() : NAN;
    const double res = solved ? r["plus"]["residual_norm"].get<double>() : NAN;
    const double c_star = r.contains("thresholds") ? r["thresholds"]["c_star"].get<double>() : NAN;
    const double theta0 = r.contains("thresholds") ? r["thresholds"]["theta0"].get<double>() : NAN;
    const bool pair_ok = r.value("pair_ok", false);
    const bool below = solved && r["plus"]["below_cstar"].get<bool>();
    arr.push_back({{"lambda", lambdas[k]}, {"theta0", num(theta0)}, {"c_star", num(c_star)}, {"energy", num(energy)},
                   {"residual_norm", num(res)}, {"pair_ok", pair_ok}, {"below_cstar", below},
                   {"error", errors[k]}});
    rows.push_back({static_cast<double>(k), lambdas[k], theta0, c_star, energy, res, pair_ok ? 1.0 : 0.0, below ? 1.0 : 0.0});
  }
  j["lambda1"] = eig.lambda1;
  j["sobolev"] = sob.value;
  j["window"] = {{"lo", window.window_lo}, {"hi", window.window_hi}};
  j["points"] = arr;
  j["all_ok"] = all_ok;
  write_csv(ctx.out / "sweep.csv", {"point", "lambda", "theta0", "c_star", "energy", "residual_norm", "pair_ok", "below_cstar"},
            rows);
  write_summary(ctx.out, j);
  return all_ok ? kSuccess : kAssertionFailure;
}

bool is_config_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::Config:
    case ErrorCode::InvalidArgument:
    case ErrorCode::ZeroDensity:
    case ErrorCode::ZeroHighMass:
    case ErrorCode::NegativeHighAtom:
    case ErrorCode::NonMonotoneSeries:
    case ErrorCode::CriticalExponent:
    case ErrorCode::DomainError: return true;
    default: return false;
  }
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {"validate-measure", "assemble", "eigen", "sobolev",
                                                 "thresholds",       "solve",    "verify", "sweep"};
  return names;
}

int run(const std::string& command, const RunConfig& cfg, std::ostream& log) {
  try {
    if (std::find(commands().begin(), commands().end(), command) == commands().end())
      throw Error(ErrorCode::Config, "unknown command '" + command + "'");
    if (cfg.file.has("command.kernel_cache")) KernelCache::global().set_directory(cfg.file.str("command.kernel_cache", ""));
    Context ctx{cfg, log, cfg.out_dir, cfg.domain(), cfg.measure()};
    fs::create_directories(ctx.out);
    if (command == "validate-measure") return cmd_validate(ctx);
    if (command == "assemble") return cmd_assemble(ctx);
    if (command == "eigen") return cmd_eigen(ctx);
    if (command == "sobolev") return cmd_sobolev(ctx);
    if (command == "thresholds") return cmd_thresholds(ctx);
    if (command == "solve") return cmd_solve(ctx);
    if (command == "verify") return cmd_verify(ctx);
    return cmd_sweep(ctx);
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return is_config_error(e.code()) ? kConfigError : kAssertionFailure;
  }
}

int run(const Invocation& inv, std::ostream& log) {
  try {
    ConfigFile file = ConfigFile::load(inv.config_path);
    for (const auto& o : inv.overrides) file.set(o);
    if (inv.seed) file.set("command.seed=" + std::to_string(*inv.seed));
    RunConfig cfg = interpret(std::move(file));
    if (inv.out_dir) cfg.out_dir = *inv.out_dir;
    else if (cfg.file.has("command.out")) cfg.out_dir = cfg.file.str("command.out", "out");
    return run(inv.command, cfg, log);
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return is_config_error(e.code()) ? kConfigError : kAssertionFailure;
  }
}

}  // namespace superlap::cli
