#pragma once

// Adaptive Dormand-Prince integration of small complex linear systems with
// output at prescribed radii and optional rescaling of the state.

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "ymflow/errors.hpp"

namespace ymflow {

template <std::size_t N>
using CState = std::array<std::complex<double>, N>;

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
  double initial_step = 1e-3;
  double max_step = 0.25;
  /// Rescale the whole state once max|y| exceeds this. Only valid for linear
  /// systems (the scale is carried in log_scale).
  double renorm_threshold = 1e100;
  /// Also rescale when the monitored size drops below this (0 disables).
  double renorm_floor = 0.0;
  /// Number of leading components whose size drives the rescaling (0 = all).
  std::size_t renorm_components = 0;
  std::size_t max_steps = 2000000;
};

template <std::size_t N>
struct Trajectory {
  std::vector<double> t;
  std::vector<CState<N>> y;
  /// Accumulated log of the rescaling applied up to each stop: true state = y * exp(log_scale).
  std::vector<double> log_scale;
  std::size_t steps = 0;
};

template <std::size_t N>
double max_abs(const CState<N>& y) {
  double m = 0.0;
  for (const auto& v : y) m = std::max(m, std::abs(v));
  return m;
}

/// Integrate dy/dt = rhs(y, t) from a to b (either direction) and return the
/// state at every stop. Stops must be ordered from a towards b and lie in [a, b].
template <std::size_t N, class Rhs>
Trajectory<N> integrate_stops(Rhs&& rhs, CState<N> y, double a, double b,
                              std::span<const double> stops, const OdeOptions& opt = {}) {
  namespace odeint = boost::numeric::odeint;
  auto stepper =
      odeint::make_controlled<odeint::runge_kutta_dopri5<CState<N>>>(opt.atol, opt.rtol);
  auto sys = [&rhs](const CState<N>& x, CState<N>& dx, double t) { rhs(x, dx, t); };

  const double dir = b >= a ? 1.0 : -1.0;
  Trajectory<N> out;
  out.t.reserve(stops.size());
  out.y.reserve(stops.size());
  out.log_scale.reserve(stops.size());
  double t = a;
  double dt = dir * std::min(opt.initial_step, std::abs(b - a));
  double log_scale = 0.0;

  auto advance_to = [&](double target) {
    while (dir * (target - t) > 0.0) {
      if (++out.steps > opt.max_steps) throw AccuracyError("ODE integration exceeded step budget at t = " + std::to_string(t));
      double h = dir * std::min({std::abs(dt), std::abs(target - t), opt.max_step});
      const bool last = std::abs(h) >= std::abs(target - t);
      const double t_before = t;
      if (stepper.try_step(sys, y, t, h) == odeint::success) {
        if (last) t = target;
        dt = h;
        const std::size_t nc = opt.renorm_components == 0 ? N : std::min(N, opt.renorm_components);
        double m = 0.0;
        for (std::size_t i = 0; i < nc; ++i) m = std::max(m, std::abs(y[i]));
        if (!std::isfinite(max_abs(y))) throw AccuracyError("ODE state became non-finite");
        if (m > opt.renorm_threshold || (m > 0.0 && m < opt.renorm_floor)) {
          for (auto& v : y) v /= m;
          log_scale += std::log(m);
          stepper.reset();  // the cached FSAL derivative belongs to the old scale
        }
      } else {
        dt = h;
        if (std::abs(dt) < 1e-14 * std::max(1.0, std::abs(t_before)))
          throw AccuracyError("ODE step size underflow at t = " + std::to_string(t_before));
      }
    }
  };

  for (double s : stops) {
    advance_to(s);
    out.t.push_back(s);
    out.y.push_back(y);
    out.log_scale.push_back(log_scale);
  }
  advance_to(b);
  if (stops.empty() || stops.back() != b) {
    out.t.push_back(b);
    out.y.push_back(y);
    out.log_scale.push_back(log_scale);
  }
  return out;
}

}  // namespace ymflow
