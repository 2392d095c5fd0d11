#include "ymflow/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

#include "ymflow/errors.hpp"

namespace ymflow::io {

const char* version() { return YMFLOW_VERSION; }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

// JSON has no NaN; those become null.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json num_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

}  // namespace

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw UsageError("csv: header and column count differ");
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) out += (j ? "," : "") + header[j];
  out += '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw UsageError("csv: columns have different lengths");
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) out += (j ? "," : "") + format_double(columns[j][i]);
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path.string());
  f << text;
}

std::string field_csv(const RadialField& u) {
  return csv_table({"rho", "value"}, {u.grid->nodes(), u.values});
}

json field_json(const RadialField& u) {
  return json{{"grid", grid_json(*u.grid)}, {"rho", num_array(u.grid->nodes())}, {"values", num_array(u.values)}};
}

json grid_json(const RadialGrid& g) {
  json j{{"kind", to_string(g.kind())}, {"N", g.resolution()}, {"R_max", g.r_max()}, {"order", g.order()}};
  if (g.kind() == GridKind::Interval) j["R_min"] = g.r_min();
  if (g.kind() == GridKind::Chebyshev) j["map_scale"] = g.map_scale();
  return j;
}

json spectral_json(const SpectralResult& r) {
  json ev = json::array();
  for (const auto& e : r.eigenvalues)
    ev.push_back({{"re", e.lambda.real()}, {"im", e.lambda.imag()}, {"residual", num(e.residual)}, {"method", e.method}});
  json j{{"method", r.method},
         {"window", {{"re_min", r.window.re_min}, {"re_max", r.window.re_max},
                     {"im_min", r.window.im_min}, {"im_max", r.window.im_max}}},
         {"eigenvalues", ev},
         {"grid", r.grid ? grid_json(*r.grid) : json(nullptr)}};
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

std::string eigenfunction_csv(const Eigenpair& e) {
  if (!e.eigenfunction) return csv_table({"rho", "re", "im"}, {{}, {}, {}});
  const ComplexField& f = *e.eigenfunction;
  std::vector<double> re(f.values.size()), im(f.values.size());
  for (std::size_t i = 0; i < re.size(); ++i) {
    re[i] = f.values[i].real();
    im[i] = f.values[i].imag();
  }
  return csv_table({"rho", "re", "im"}, {f.grid->nodes(), re, im});
}

std::string scan_csv(const ScanSummary& s) {
  std::string out = "alpha,omega,probe_id,ratio,residual,status\n";
  for (const auto& r : s.rows) {
    out += format_double(r.alpha) + "," + format_double(r.omega) + "," + std::to_string(r.probe_id) + "," +
           format_double(r.ratio) + "," + format_double(r.residual) + "," + r.status + "\n";
  }
  return out;
}

json scan_json(const ScanSummary& s) {
  json per = json::array();
  for (std::size_t i = 0; i < s.omegas.size(); ++i)
    per.push_back({{"omega", s.omegas[i]}, {"max_ratio", num(s.max_ratio[i])}});
  return json{{"per_omega", per},
              {"max_ratio", num(s.max_ratio.empty() ? NAN : *std::max_element(s.max_ratio.begin(), s.max_ratio.end()))},
              {"slope", num(s.slope)},
              {"max_residual", num(s.max_residual)}};
}

std::string record_csv(const ExperimentRecord& r, const std::string& time_label) {
  std::vector<std::string> header{time_label, "sup", "norm1", "norm2"};
  std::vector<std::vector<double>> cols{r.times, r.sup_norms, r.norm1_series, r.norm2_series};
  if (!r.g_coefficients.empty()) {
    header.push_back("g_coefficient");
    cols.push_back(r.g_coefficients);
  }
  return csv_table(header, cols);
}

json record_json(const ExperimentRecord& r) {
  json j{{"samples", r.times.size()},
         {"final_time", r.final_time},
         {"fitted_T", num(r.fitted_T)},
         {"refit_T", num(r.refit_T)},
         {"fitted_rate", num(r.fitted_rate)},
         {"fit_residual", num(r.fit_residual)},
         {"trivial", r.trivial},
         {"stopped_on_threshold", r.stopped_on_threshold}};
  if (!r.convergence_linf.empty()) {
    j["convergence_linf_first"] = r.convergence_linf.front();
    j["convergence_linf_last"] = r.convergence_linf.back();
  }
  if (!r.notes.empty()) j["notes"] = r.notes;
  if (!r.config_echo.empty()) j["config"] = json::parse(r.config_echo);
  return j;
}

json stability_json(const StabilityResult& r) {
  json j{{"fitted_T", num(r.fitted_T)},
         {"refit_T", num(r.refit_T)},
         {"decay_rate", num(r.decay_rate)},
         {"decay_fit_residual", num(r.decay_fit_residual)},
         {"trivial", r.trivial},
         {"unstable", r.unstable},
         {"physical", record_json(r.physical)},
         {"perturbation", record_json(r.perturbation)}};
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

json envelope(const std::string& command, const json& config, const json& results, const json& diagnostics) {
  return json{{"command", command}, {"version", version()}, {"config", config}, {"results", results},
              {"diagnostics", diagnostics}};
}

void write_manifest(const std::filesystem::path& dir, const std::string& command, const json& config,
                    unsigned long long seed, const std::vector<std::string>& files) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  json m{{"command", command}, {"version", version()}, {"seed", seed}, {"config", config},
         {"timestamp", stamp}, {"files", files}};
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace ymflow::io
