// ymflow: command-line front end.
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 usage error,
// 3 numerical failure, 4 anything else.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "ymflow/closed_forms.hpp"
#include "ymflow/errors.hpp"
#include "ymflow/evolution.hpp"
#include "ymflow/function_space.hpp"
#include "ymflow/io.hpp"
#include "ymflow/resolvent.hpp"
#include "ymflow/spectrum.hpp"

using namespace ymflow;
using io::json;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kNumerical = 3, kOther = 4 };

struct Common {
  std::string output_dir = "ymflow-out";
  unsigned long long seed = 20240917ULL;
  std::string format = "csv";
  std::string config_path;
};

struct Check {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string detail;
};

json checks_json(const std::vector<Check>& cs) {
  json a = json::array();
  for (const auto& c : cs)
    a.push_back({{"name", c.name}, {"value", c.value}, {"tol", c.tol}, {"pass", c.pass}, {"detail", c.detail}});
  return a;
}

void print_checks(const std::vector<Check>& cs) {
  for (const auto& c : cs)
    std::printf("%-28s %12.4e  tol %9.2e  %s%s%s\n", c.name.c_str(), c.value, c.tol, c.pass ? "PASS" : "FAIL",
                c.detail.empty() ? "" : "  ", c.detail.c_str());
}

bool all_pass(const std::vector<Check>& cs) {
  for (const auto& c : cs)
    if (!c.pass) return false;
  return true;
}

Check below(std::string name, double value, double tol, std::string detail = {}) {
  return Check{std::move(name), value, tol, value < tol, std::move(detail)};
}

// Writes the artefacts, the manifest and the stdout report shared by every command.
int finish(const Common& c, const std::string& command, const json& config, const json& results,
           const json& diagnostics, const std::vector<Check>& checks,
           std::vector<std::pair<std::string, std::string>> files) {
  const json env = io::envelope(command, config, results, diagnostics);
  files.emplace_back(command + ".json", env.dump(2) + "\n");
  std::vector<std::string> names;
  for (const auto& [name, text] : files) {
    io::write_text(std::filesystem::path(c.output_dir) / name, text);
    names.push_back(name);
  }
  json full = config;
  full["output_dir"] = c.output_dir;
  full["format"] = c.format;
  io::write_manifest(c.output_dir, command, full, c.seed, names);
  if (c.format == "json") {
    std::cout << env.dump(2) << "\n";
  } else {
    print_checks(checks);
    std::printf("%s: %s (artifacts in %s)\n", command.c_str(), all_pass(checks) ? "PASS" : "FAIL",
                c.output_dir.c_str());
  }
  return all_pass(checks) ? kPass : kFail;
}

// ---- verify -----------------------------------------------------------------

std::vector<Check> closed_form_checks() {
  std::vector<Check> cs;
  for (int d = 5; d <= 9; ++d) {
    const DimensionParams p = DimensionParams::make(d);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double rho = std::pow(10.0, -2.0 + 4.0 * i / 99.0);
      worst = std::max(worst, std::abs(self_similar_residual(p, rho)));
    }
    cs.push_back(below("profile_residual_d" + std::to_string(d), worst, 1e-10));
  }
  {
    const ClosedForm W = weinkove_profile(DimensionParams::make(5));
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double r = 0.1 * i, w = W(r), v = potential_v(r);
      worst = std::max(worst, std::abs(v + 18.0 * w + 9.0 * r * r * w * w) / std::abs(v));
    }
    cs.push_back(below("potential_identity", worst, 1e-12));
  }
  {
    const ClosedForm g = symmetry_mode(), h = second_solution();
    double worst = 0.0;
    for (int i = 0; i <= 100; ++i) {
      const double r = 0.25 + (6.0 - 0.25) * i / 100.0;
      const double wr = g(r) * h.deriv1(r) - g.deriv1(r) * h(r);
      worst = std::max(worst, std::abs(std::pow(r, 6) * std::exp(-r * r / 4.0) * wr - 1.0));
    }
    cs.push_back(below("wronskian_g_h", worst, 1e-8, "on [0.25, 6]"));
    double eg = 0.0;
    for (double r : {0.25, 1.0, 4.0, 16.0}) eg = std::max(eg, std::abs(eigen_residual(g, 1.0, r)));
    cs.push_back(below("g_eigen_residual", eg, 1e-10));
    double eh = 0.0;
    for (double r : {0.5, 2.0})
      eh = std::max(eh, std::abs(eigen_residual(h, 1.0, r)) / std::max(std::abs(h(r)), std::abs(h.deriv2(r))));
    cs.push_back(below("h_eigen_residual", eh, 1e-8));
  }
  {
    const GridPtr ig = RadialGrid::interval(0.2, 10.0, 8000);
    const ClosedForm g = symmetry_mode();
    const RadialField v = RadialField::sample(ig, [&](double r) { return r * r * r * std::exp(-r * r / 8.0) * g(r); });
    const auto [Bv, Bpv] = factorization_ops(v);
    cs.push_back(below("kernel_of_B", sup_norm(Bv) / sup_norm(v), 1e-8, "rho^3 exp(-rho^2/8) g on [0.2, 10]"));
  }
  {
    const double q25 = susy_potential(2.5);
    cs.push_back(Check{"q(5/2) - 1/75", q25 - 1.0 / 75.0, 0.0, q25 > 1.0 / 75.0, "must be positive"});
    const QMinimum qm = susy_potential_minimum();
    const double gap = 1.0 / 6.25 + qm.value - q25;
    const bool inside = qm.rho > 0.0 && qm.rho < 2.5;
    cs.push_back(Check{"gamma^-2 + q_min - q(5/2)", gap, 0.0, gap > 0.0 && inside,
                       "q_min at rho = " + io::format_double(qm.rho)});
    bool increasing = true;
    double prev = susy_potential(2.5);
    for (int i = 1; i <= 1000; ++i) {
      const double q = susy_potential(2.5 + 47.5 * i / 1000.0);
      increasing = increasing && q > prev;
      prev = q;
    }
    cs.push_back(Check{"q increasing on [5/2, 50]", increasing ? 0.0 : 1.0, 0.0, increasing, ""});
  }
  {
    const DimensionParams p = DimensionParams::make(5);
    const double e = std::max(std::abs(p.a1 - 0.5 * std::sqrt(1.5)), std::abs(p.a2 - 15.0 / (18.0 + 7.0 * std::sqrt(6.0))));
    cs.push_back(below("d5_constants", e, 1e-15));
  }
  return cs;
}

int cmd_verify(const Common& c, double corrupt_a2) {
  if (corrupt_a2 != 0.0) consts::set_a2_offset(corrupt_a2);
  const auto checks = closed_form_checks();
  json config{{"corrupt_a2", corrupt_a2}};
  return finish(c, "verify", config, json{{"checks", checks_json(checks)}}, json::object(), checks, {});
}

// ---- spectrum / susy --------------------------------------------------------

struct SpectrumArgs {
  double re_min = -1.0 / 75.0 + 1e-3, re_max = 3.0, im_min = -3.0, im_max = 3.0;
  std::size_t shoot_n = 2048;
  std::size_t n = 256;
  double r_max = 40.0;
  double tol = 5e-3;
  bool susy = false;
  std::size_t susy_n = 4000;
  double susy_r_min = 0.02;
};

std::vector<Check> susy_checks(const SpectrumArgs& a, json& out) {
  const SusyBound sb = susy_ground_bound(RadialGrid::interval(a.susy_r_min, a.r_max, a.susy_n));
  out = json{{"rayleigh_min", sb.rayleigh_min}, {"lowest", sb.lowest}, {"symmetry_defect", sb.symmetry_defect}};
  std::vector<Check> cs;
  cs.push_back(Check{"A rayleigh floor", sb.rayleigh_min, 1.0 / 75.0 - 1e-4, sb.rayleigh_min >= 1.0 / 75.0 - 1e-4,
                     "must be >= tol"});
  const double q25 = susy_potential(2.5);
  const QMinimum qm = susy_potential_minimum();
  cs.push_back(Check{"q(5/2) - 1/75", q25 - 1.0 / 75.0, 0.0, q25 > 1.0 / 75.0, "must be positive"});
  cs.push_back(Check{"gamma^-2 + q_min - q(5/2)", 0.16 + qm.value - q25, 0.0, 0.16 + qm.value > q25, ""});
  return cs;
}

int cmd_spectrum(const Common& c, const SpectrumArgs& a) {
  const Window w{a.re_min, a.re_max, a.im_min, a.im_max};
  json config{{"re_min", a.re_min}, {"re_max", a.re_max}, {"im_min", a.im_min}, {"im_max", a.im_max},
              {"shoot_n", a.shoot_n}, {"n", a.n}, {"r_max", a.r_max}, {"tol", a.tol}, {"susy", a.susy}};
  const SpectralResult shot = find_eigenvalues(w, RadialGrid::uniform(a.shoot_n, a.r_max));
  const GridPtr cg = RadialGrid::chebyshev(a.n, a.r_max);
  const SpectralResult dir = collocation_spectrum(cg, 16, FarField::Dirichlet);
  const SpectralResult rob = collocation_spectrum(cg, 16, FarField::Robin);

  std::vector<Check> cs;
  const double floor = -1.0 / 75.0 + a.tol;
  auto inspect = [&](const SpectralResult& r, const std::string& tag, bool window_only) {
    double dist = INFINITY;
    double others = -INFINITY;
    for (const auto& e : r.eigenvalues) {
      const double d = std::abs(e.lambda - 1.0);
      if (d < 1e-2) {
        dist = std::min(dist, d);
      } else if (!window_only || (e.lambda.real() >= w.re_min && e.lambda.real() <= w.re_max &&
                                  e.lambda.imag() >= w.im_min && e.lambda.imag() <= w.im_max)) {
        others = std::max(others, e.lambda.real());
      }
    }
    cs.push_back(below(tag + " |lambda-1|", dist, 1e-4));
    cs.push_back(Check{tag + " next Re lambda", others, floor, !(others > floor),
                       std::isfinite(others) ? "" : "no other eigenvalue"});
  };
  inspect(shot, "shooting", true);
  inspect(dir, "collocation", false);
  inspect(rob, "collocation-robin", false);
  json results{{"shooting", io::spectral_json(shot)},
               {"collocation_dirichlet", io::spectral_json(dir)},
               {"collocation_robin", io::spectral_json(rob)}};
  if (a.susy) {
    json s;
    for (auto& k : susy_checks(a, s)) cs.push_back(k);
    results["susy"] = s;
  }
  std::vector<std::pair<std::string, std::string>> files;
  if (!dir.eigenvalues.empty()) files.emplace_back("eigenfunction.csv", io::eigenfunction_csv(dir.eigenvalues.front()));
  return finish(c, "spectrum", config, results, json::object(), cs, files);
}

int cmd_susy(const Common& c, const SpectrumArgs& a) {
  json s;
  const auto cs = susy_checks(a, s);
  json config{{"r_min", a.susy_r_min}, {"r_max", a.r_max}, {"n", a.susy_n}};
  return finish(c, "susy", config, s, json::object(), cs, {});
}

// ---- resolvent scan ---------------------------------------------------------

struct ScanArgs {
  double alpha = 0.0;
  std::vector<double> omegas{2, 5, 10, 20, 50, 100};
  std::size_t n = 256;
  double r_max = 40.0;
  int random_probes = 0;
  double max_slope = 0.05;
};

int cmd_resolvent_scan(const Common& c, const ScanArgs& a) {
  for (double om : a.omegas)
    if (std::abs(om) < 1.0) throw UsageError("resolvent-scan needs |omega| >= 1 (got " + io::format_double(om) + ")");
  const GridPtr grid = RadialGrid::chebyshev(a.n, a.r_max);
  std::vector<RadialField> probes = default_probes(grid);
  for (RadialField f : random_corpus(grid, a.random_probes, c.seed)) {
    const double nh = norm_H(f);
    for (double& v : f.values) v /= nh;
    probes.push_back(std::move(f));
  }
  const ResolventOptions opt;
  const ScanSummary s = resolvent_bound_scan(a.alpha, a.omegas, probes, opt);
  int bad = 0;
  for (const auto& r : s.rows) bad += r.status != "ok";
  std::vector<Check> cs;
  cs.push_back(Check{"slope d log ratio/d log w", s.slope, a.max_slope, s.slope <= a.max_slope, "must be <= tol"});
  cs.push_back(below("max residual", s.max_residual, 1e-6));
  cs.push_back(Check{"failed rows", double(bad), 0.0, bad == 0, ""});
  json config{{"alpha", a.alpha}, {"omegas", a.omegas}, {"n", a.n}, {"r_max", a.r_max},
              {"probes", probes.size()}, {"random_probes", a.random_probes}};
  return finish(c, "resolvent-scan", config, io::scan_json(s), json::object(), cs, {{"scan.csv", io::scan_csv(s)}});
}

// ---- evolve -----------------------------------------------------------------

struct EvolveArgs {
  std::string frame = "similarity";
  std::string init = "W";
  double eps = 0.0;
  std::string grid = "auto";
  std::size_t n = 0;
  double r_max = 0.0;
  double map_scale = 2.0;
  double dt = 1e-2;
  double t_end = 5.0;
  std::string scheme = "imex-cn";
  double threshold = 0.0;
  int record_every = 10;
  double max_drift = 1e-8;
};

int cmd_evolve(const Common& c, EvolveArgs a) {
  const Frame frame = parse_frame(a.frame);
  const Scheme scheme = parse_scheme(a.scheme);
  if (a.init != "W" && a.init != "zero" && a.init != "g" && a.init != "gaussian")
    throw UsageError("--init must be W, zero, g or gaussian");
  if (a.grid == "auto") a.grid = frame == Frame::Physical ? "uniform" : "chebyshev";
  if (a.grid != "uniform" && a.grid != "chebyshev") throw UsageError("--grid must be uniform or chebyshev");
  if (a.n == 0) a.n = a.grid == "uniform" ? 4096 : 64;
  if (a.r_max <= 0.0) a.r_max = frame == Frame::Physical ? 10.0 : 40.0;
  if (!(a.dt > 0.0) || !(a.t_end > 0.0)) throw UsageError("--dt and --t-end must be positive");

  const ClosedForm W = weinkove_profile(DimensionParams::make(5));
  const ClosedForm g = symmetry_mode();
  EvolutionConfig ec;
  ec.frame = frame;
  ec.grid = a.grid == "uniform" ? RadialGrid::uniform(a.n, a.r_max) : RadialGrid::chebyshev(a.n, a.r_max, a.map_scale);
  ec.dt = a.dt;
  ec.t_end = a.t_end;
  ec.scheme = scheme;
  ec.record_every = a.record_every;
  if (frame == Frame::Physical)
    ec.blowup_threshold = a.threshold > 0.0 ? a.threshold : 1e4 * std::abs(W(0.0));

  auto base = [&](double r) {
    if (frame == Frame::Perturbation) return 0.0;
    return a.init == "W" ? W(r) : 0.0;
  };
  auto bump = [&](double r) {
    if (a.init == "g") return g(r);
    if (a.init == "gaussian") return std::exp(-r * r);
    return 0.0;
  };
  const RadialField u0 = RadialField::sample(ec.grid, [&](double r) { return base(r) + a.eps * bump(r); });
  const RadialField ref = RadialField::sample(ec.grid, base);
  const bool drift_test = frame == Frame::Similarity && a.init == "W" && a.eps == 0.0;

  // Drift is the displacement at the end over the elapsed time; the largest
  // displacement along the way is reported too.
  double drift = 0.0, max_disp = 0.0;
  const ExperimentRecord rec = run_evolution(ec, u0.values, nullptr, [&](double t, std::span<const double> u) {
    if (!drift_test || t <= 0.0) return;
    RadialField d{ec.grid, std::vector<double>(u.begin(), u.end())};
    for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] -= ref.values[i];
    const double disp = norm_H(d);
    max_disp = std::max(max_disp, disp);
    drift = disp / t;
  });
  ExperimentRecord r = rec;
  std::vector<Check> cs;
  json results = io::record_json(r);
  if (drift_test) {
    cs.push_back(below("drift per unit tau", drift, a.max_drift, "norm_H(psi - W) / tau at the end"));
    results["drift_per_tau"] = drift;
    results["max_displacement"] = max_disp;
  }
  if (frame == Frame::Physical) {
    cs.push_back(Check{"threshold reached", r.stopped_on_threshold ? 1.0 : 0.0, 1.0, r.stopped_on_threshold, ""});
    if (r.stopped_on_threshold) {
      const double T = detect_blowup_time(r);
      results["fitted_T"] = T;
      results["fit_residual"] = r.fit_residual;
    }
  }
  if (cs.empty()) cs.push_back(Check{"completed", r.final_time, a.t_end, true, ""});
  json config{{"frame", a.frame}, {"init", a.init}, {"eps", a.eps}, {"grid", a.grid}, {"n", a.n},
              {"r_max", a.r_max}, {"map_scale", a.map_scale}, {"dt", a.dt}, {"t_end", a.t_end},
              {"scheme", a.scheme}, {"threshold", ec.blowup_threshold}, {"record_every", a.record_every}};
  return finish(c, "evolve", config, results, json::object(), cs,
                {{"evolution.csv", io::record_csv(r, frame == Frame::Physical ? "t" : "tau")}});
}

// ---- stability --------------------------------------------------------------

struct StabilityArgs {
  std::string v0 = "gaussian";
  double eps = 1e-3;
  double fixed_T = 0.0;
  bool no_refit = false;
  StabilityConfig cfg{};
};

int cmd_stability(const Common& c, const StabilityArgs& a) {
  std::function<double(double)> v0;
  const ClosedForm g = symmetry_mode();
  if (a.v0 == "gaussian") v0 = [](double r) { return std::exp(-r * r); };
  else if (a.v0 == "g") v0 = [g](double r) { return g(r); };
  else if (a.v0 == "zero") v0 = [](double) { return 0.0; };
  else throw UsageError("--v0 must be gaussian, g or zero");
  StabilityConfig cfg = a.cfg;
  cfg.refit = !a.no_refit;
  if (a.fixed_T > 0.0) cfg.fixed_T = a.fixed_T;
  {
    const GridPtr grid = RadialGrid::chebyshev(cfg.similarity_n, cfg.similarity_r_max, cfg.similarity_map_scale);
    const ClosedForm W = weinkove_profile(DimensionParams::make(5));
    const double nv = std::abs(a.eps) * norm_H(RadialField::sample(grid, v0));
    const double nw = norm_H(RadialField::sample(grid, [&](double r) { return W(r); }));
    if (nv > 0.05 * nw)
      throw UsageError("perturbation too large: norm_H(eps v0) = " + io::format_double(nv) + " > 0.05 norm_H(W)");
  }
  const StabilityResult r = run_stability_experiment(v0, a.eps, cfg);
  std::vector<Check> cs;
  const double need = 1.0 / 150.0 - 0.002;
  if (r.trivial) {
    cs.push_back(Check{"trivial (eps = 0)", 0.0, 0.0, false, "no decay rate to fit"});
  } else {
    cs.push_back(Check{"decay exponent", r.decay_rate, need, r.decay_rate >= need, "must be >= tol"});
    cs.push_back(Check{"|T - T0|", std::abs(r.fitted_T - cfg.T0), 0.05, std::abs(r.fitted_T - cfg.T0) <= 0.05, ""});
  }
  json config{{"v0", a.v0}, {"eps", a.eps}, {"T0", cfg.T0}, {"fixed_T", a.fixed_T}, {"refit", cfg.refit},
              {"physical_n", cfg.physical_n}, {"physical_r_max", cfg.physical_r_max},
              {"physical_cfl", cfg.physical_cfl}, {"n", cfg.similarity_n}, {"r_max", cfg.similarity_r_max},
              {"map_scale", cfg.similarity_map_scale}, {"dt", cfg.dt}, {"tau_end", cfg.tau_end},
              {"tau_star", cfg.tau_star}, {"fit_t0", cfg.fit_t0}, {"record_every", cfg.record_every}};
  std::vector<std::pair<std::string, std::string>> files{
      {"perturbation.csv", io::record_csv(r.perturbation, "tau")}};
  if (!r.physical.times.empty()) files.emplace_back("physical.csv", io::record_csv(r.physical, "t"));
  return finish(c, "stability", config, io::stability_json(r), json::object(), cs, files);
}

// ---- config file --------------------------------------------------------------

// Splices "--key value" pairs from a JSON object into argv after the
// subcommand, skipping keys already given on the command line.
std::vector<std::string> with_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config file " + path);
  json cfg;
  try {
    cfg = json::parse(f);
  } catch (const std::exception& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
  // Flags belong to the subcommand, so they go right after it.
  std::size_t at = args.size();
  for (std::size_t i = 1; i < args.size(); ++i)
    if (args[i].rfind("-", 0) != 0) {
      at = i + 1;
      break;
    }
  std::vector<std::string> extra;
  for (const auto& [key, value] : cfg.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin() + 2, flag.end(), '_', '-');
    bool given = false;
    for (const auto& s : args) given = given || s == flag || s.rfind(flag + "=", 0) == 0;
    if (given) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back(flag);
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
      extra.push_back(flag);
      extra.push_back(joined);
    } else {
      extra.push_back(flag);
      extra.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(std::min(at, args.size())), extra.begin(), extra.end());
  return args;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--output-dir", c.output_dir, "Directory for artifacts and manifest.json");
  sub->add_option("--seed", c.seed, "Seed of the random corpora");
  sub->add_option("--format", c.format, "Report format on stdout")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--config", c.config_path, "JSON file of flag values (flags win)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Yang-Mills heat flow: profile, spectrum, resolvent and stability checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::version());

  Common common;
  double corrupt_a2 = 0.0;
  SpectrumArgs sp;
  ScanArgs sc;
  EvolveArgs ev;
  StabilityArgs st;
  std::function<int()> run;

  auto* verify = app.add_subcommand("verify", "Closed-form identities");
  add_common(verify, common);
  verify->add_option("--corrupt-a2", corrupt_a2)->group("");
  verify->callback([&] { run = [&] { return cmd_verify(common, corrupt_a2); }; });

  auto spectrum_flags = [&](CLI::App* s) {
    s->add_option("--n", sp.n, "Chebyshev collocation size");
    s->add_option("--r-max", sp.r_max);
    s->add_option("--susy-n", sp.susy_n, "Intervals of the SUSY grid");
    s->add_option("--susy-r-min", sp.susy_r_min);
  };
  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of the linearised operator");
  add_common(spectrum, common);
  spectrum_flags(spectrum);
  spectrum->add_option("--re-min", sp.re_min);
  spectrum->add_option("--re-max", sp.re_max);
  spectrum->add_option("--im-min", sp.im_min);
  spectrum->add_option("--im-max", sp.im_max);
  spectrum->add_option("--shoot-n", sp.shoot_n, "Uniform intervals of the shooting grid");
  spectrum->add_option("--tol", sp.tol, "Allowance above -1/75 for other eigenvalues");
  spectrum->add_flag("--susy", sp.susy, "Also certify the partner operator floor");
  spectrum->callback([&] {
    if (!(sp.re_max > sp.re_min) || !(sp.im_max > sp.im_min))
      throw CLI::ValidationError("window", "malformed window: need re-min < re-max and im-min < im-max");
    run = [&] { return cmd_spectrum(common, sp); };
  });

  auto* susy = app.add_subcommand("susy", "Rayleigh floor of the partner operator");
  add_common(susy, common);
  spectrum_flags(susy);
  susy->callback([&] { run = [&] { return cmd_susy(common, sp); }; });

  auto* scan = app.add_subcommand("resolvent-scan", "Resolvent norms along a vertical line");
  add_common(scan, common);
  scan->add_option("--alpha", sc.alpha);
  scan->add_option("--omegas", sc.omegas)->delimiter(',');
  scan->add_option("--n", sc.n);
  scan->add_option("--r-max", sc.r_max);
  scan->add_option("--random-probes", sc.random_probes, "Extra seeded random probes");
  scan->add_option("--max-slope", sc.max_slope);
  scan->callback([&] {
    if (sc.alpha <= -1.0 / 75.0) throw CLI::ValidationError("--alpha", "alpha must exceed -1/75");
    run = [&] { return cmd_resolvent_scan(common, sc); };
  });

  auto* evolve = app.add_subcommand("evolve", "Time evolution in one frame");
  add_common(evolve, common);
  evolve->add_option("--frame", ev.frame)->check(CLI::IsMember({"physical", "similarity", "perturbation"}));
  evolve->add_option("--init", ev.init)->check(CLI::IsMember({"W", "zero", "g", "gaussian"}));
  evolve->add_option("--eps", ev.eps);
  evolve->add_option("--grid", ev.grid)->check(CLI::IsMember({"auto", "uniform", "chebyshev"}));
  evolve->add_option("--n", ev.n);
  evolve->add_option("--r-max", ev.r_max);
  evolve->add_option("--map-scale", ev.map_scale);
  evolve->add_option("--dt", ev.dt);
  evolve->add_option("--t-end", ev.t_end);
  evolve->add_option("--scheme", ev.scheme)->check(CLI::IsMember({"imex-cn", "imex-bdf2", "explicit-rk4"}));
  evolve->add_option("--threshold", ev.threshold);
  evolve->add_option("--record-every", ev.record_every)->check(CLI::PositiveNumber);
  evolve->add_option("--max-drift", ev.max_drift);
  evolve->callback([&] { run = [&] { return cmd_evolve(common, ev); }; });

  auto* stab = app.add_subcommand("stability", "Perturbed blowup: fitted T and decay rate");
  add_common(stab, common);
  stab->add_option("--v0", st.v0)->check(CLI::IsMember({"gaussian", "g", "zero"}));
  stab->add_option("--eps", st.eps);
  stab->add_option("--T0", st.cfg.T0)->check(CLI::PositiveNumber);
  stab->add_option("--fixed-T", st.fixed_T, "Skip the physical run and use this T");
  stab->add_flag("--no-refit", st.no_refit);
  stab->add_option("--physical-n", st.cfg.physical_n);
  stab->add_option("--physical-r-max", st.cfg.physical_r_max);
  stab->add_option("--n", st.cfg.similarity_n);
  stab->add_option("--r-max", st.cfg.similarity_r_max);
  stab->add_option("--map-scale", st.cfg.similarity_map_scale);
  stab->add_option("--dt", st.cfg.dt)->check(CLI::PositiveNumber);
  stab->add_option("--tau-end", st.cfg.tau_end)->check(CLI::PositiveNumber);
  stab->add_option("--tau-star", st.cfg.tau_star);
  stab->add_option("--fit-t0", st.cfg.fit_t0);
  stab->add_option("--record-every", st.cfg.record_every)->check(CLI::PositiveNumber);
  stab->callback([&] { run = [&] { return cmd_stability(common, st); }; });

  try {
    std::vector<std::string> args = with_config(argc, argv);
    std::vector<char*> cargs;
    for (auto& s : args) cargs.push_back(s.data());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  }

  try {
    return run();
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kOther;
  }
}
