#pragma once

// Method-of-lines evolution in physical, similarity and perturbation
// coordinates, blowup-time fitting and the stability experiments.

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ymflow/banded.hpp"
#include "ymflow/function_space.hpp"
#include "ymflow/spectrum.hpp"

namespace ymflow {

enum class Frame { Physical, Similarity, Perturbation };
/// ImexCN: Crank-Nicolson for A with a Heun predictor-corrector for N.
/// ImexBDF2: second-order backward differences for A with extrapolated N; damps
/// stiff modes, which keeps roundoff from accumulating over long runs.
enum class Scheme { ImexCN, ImexBDF2, ExplicitRK4 };

std::string to_string(Frame f);
std::string to_string(Scheme s);
Frame parse_frame(const std::string& s);
Scheme parse_scheme(const std::string& s);

struct EvolutionConfig {
  Frame frame = Frame::Similarity;
  GridPtr grid;
  double dt = 1e-2;
  double t_end = 1.0;  // t (physical) or tau
  Scheme scheme = Scheme::ImexCN;
  /// Physical frame: stop once sup|u| reaches this.
  double blowup_threshold = std::numeric_limits<double>::infinity();
  int record_every = 1;
  /// Physical frame: the step is min(dt, cfl / sup|u|).
  double cfl = 2e-3;
};

/// Spatial operator of one frame: a linear part A and a pointwise
/// nonlinearity N. On uniform grids A is banded; in the physical frame the last
/// node carries the far-field condition r u' + 2u = 0 instead of an evolution
/// equation. On Chebyshev grids (similarity and perturbation frames only) A is
/// a dense collocation matrix with no condition at R.
class FrameOperator {
 public:
  FrameOperator(Frame frame, GridPtr grid);

  Frame frame() const { return frame_; }
  const RadialGrid& grid() const { return *grid_; }
  int kl() const { return kl_; }
  int ku() const { return ku_; }

  void apply_linear(std::span<const double> u, std::span<double> out) const;
  void apply_nonlinear(std::span<const double> u, std::span<double> out) const;
  /// A u + N(u); the constraint row (if any) is reported as zero.
  std::vector<double> rhs(std::span<const double> u) const;

  /// (I - theta dt A) with the constraint row in place, unfactored.
  BandedMatrix implicit_matrix(double theta_dt) const;
  bool has_constraint() const { return frame_ == Frame::Physical; }
  bool dense() const { return dense_.size() > 0; }
  /// Dense A (Chebyshev grids only).
  const Eigen::MatrixXd& dense_matrix() const { return dense_; }
  /// Overwrite the last value so that the far-field constraint holds.
  void enforce_constraint(std::span<double> u) const;

 private:
  struct Row {
    std::size_t start = 0;
    std::vector<double> w;
  };
  Frame frame_;
  GridPtr grid_;
  std::vector<Row> rows_;
  Row constraint_;
  Eigen::MatrixXd dense_;
  std::vector<double> n2_, n3_;  // N(u) = n2 u^2 + n3 u^3
  int kl_ = 0, ku_ = 0;
};

RadialField rhs_physical(const RadialField& u);
RadialField rhs_similarity(const RadialField& psi);
RadialField rhs_perturbation(const RadialField& phi);

/// Time stepper holding a factorisation for the current step size.
class Stepper {
 public:
  explicit Stepper(const EvolutionConfig& config);
  /// Advance u by dt in place. Throws BlowupError (with the last finite state)
  /// if the result is not finite.
  void step(std::vector<double>& u, double dt);
  const FrameOperator& op() const { return op_; }

 private:
  EvolutionConfig cfg_;
  FrameOperator op_;
  std::unique_ptr<BandedMatrix> lu_;
  std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> dense_lu_;
  double lu_theta_ = 0.0;
  // Previous state and nonlinearity for the two-step scheme.
  std::vector<double> prev_, prev_n_;
  double prev_dt_ = 0.0;
  void factor(double theta_dt);
  void solve(std::vector<double>& x) const;
  std::vector<double> a_, b_, n0_, n1_, tmp_;
};

/// Carries the last finite state of a failed step.
struct InstabilityError : BlowupError {
  InstabilityError(const std::string& what, std::vector<double> last)
      : BlowupError(what), last_state(std::move(last)) {}
  std::vector<double> last_state;
};

/// One step with a fresh stepper.
std::vector<double> step(const std::vector<double>& state, const EvolutionConfig& config);

struct ExperimentRecord {
  std::vector<double> times, sup_norms, norm1_series, norm2_series;
  std::vector<double> g_coefficients;  // filled when a projection is supplied
  double fitted_T = std::numeric_limits<double>::quiet_NaN();
  double fitted_rate = std::numeric_limits<double>::quiet_NaN();
  double fit_residual = std::numeric_limits<double>::quiet_NaN();
  double refit_T = std::numeric_limits<double>::quiet_NaN();
  /// sup|u(t) - w_T(t)| / sup|w_T(t)| along the physical run (with the fitted T).
  std::vector<double> convergence_linf;
  std::vector<double> final_state;
  double final_time = 0.0;
  bool trivial = false;
  bool stopped_on_threshold = false;
  std::vector<std::string> notes;
  std::string config_echo;  // JSON text
};

/// Evolve u0 and record norms every config.record_every steps. If `projection`
/// is given, the g-coefficient of the state is recorded as well.
using RecordHook = std::function<void(double t, std::span<const double> u)>;
ExperimentRecord run_evolution(const EvolutionConfig& config, std::vector<double> u0,
                               const SpectralProjection* projection = nullptr,
                               const RecordHook& on_record = {});

/// g-coefficient of a field on any grid, via interpolation onto the projection grid.
double g_component(const SpectralProjection& P, const RadialGrid& grid, std::span<const double> u);

/// Root of the least-squares line through (t, 1/sup) over the last decade of growth.
double detect_blowup_time(ExperimentRecord& record);

/// U(v0, T) = T v0(sqrt(T) rho) + (T/T0) W(sqrt(T/T0) rho) - W(rho) on `grid`.
RadialField initial_data(const std::function<double(double)>& v0, double T, double T0, GridPtr grid);
/// Same with v0 given on its own grid (cubic interpolation, zero beyond its R).
RadialField initial_data(const RadialField& v0, double T, double T0, GridPtr grid);

/// Slope of log(norm) against time over [t0, t1], returned as a decay rate
/// (positive when decaying); residual is the rms deviation of the fit.
std::pair<double, double> fit_decay_rate(const std::vector<double>& t, const std::vector<double>& norm,
                                         double t0, double t1);

struct StabilityConfig {
  double T0 = 1.0;
  // Physical run.
  std::size_t physical_n = 4096;
  double physical_r_max = 10.0;
  double physical_cfl = 2e-3;
  double blowup_factor = 1e4;  // stop at blowup_factor * |W(0)|
  // Perturbation run on a Chebyshev grid; the projection uses the same grid.
  std::size_t similarity_n = 128;
  double similarity_r_max = 40.0;
  double similarity_map_scale = 4.0;
  Scheme scheme = Scheme::ImexCN;
  double dt = 1e-2;
  double tau_end = 6.0;
  double fit_t0 = 1.0;
  /// Probe time for the T refit; non-positive means tau_end.
  double tau_star = 2.0;
  bool refit = true;
  int max_refit_iterations = 8;
  int record_every = 5;
  /// Skip the physical run and start from this T (e.g. T0 for the linear test).
  std::optional<double> fixed_T;
};

struct StabilityResult {
  ExperimentRecord physical;
  ExperimentRecord perturbation;  // with the final (refit) T
  ExperimentRecord unrefit;       // with the physically fitted T, before refit
  double fitted_T = std::numeric_limits<double>::quiet_NaN();
  double refit_T = std::numeric_limits<double>::quiet_NaN();
  double decay_rate = std::numeric_limits<double>::quiet_NaN();
  double decay_fit_residual = std::numeric_limits<double>::quiet_NaN();
  bool trivial = false;
  bool unstable = false;
  std::vector<std::string> notes;
};

StabilityResult run_stability_experiment(const std::function<double(double)>& v0, double eps,
                                         const StabilityConfig& cfg,
                                         std::shared_ptr<const SpectralProjection> projection = nullptr);

}  // namespace ymflow
