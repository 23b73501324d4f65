#include "epirep/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <ostream>
#include <string>

#include "epirep/csv.hpp"

namespace epirep {

namespace {

constexpr double kMinStep = 1e-14;

// Dormand-Prince 5(4) tableau. The field is autonomous, so the nodes c_i are not needed.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class Recorder {
 public:
  Recorder(const ModelParams& p, const IntegratorConfig& cfg, Trajectory& tr)
      : p_(p), cfg_(cfg), tr_(tr) {}

  void start(double t, const SystemState& s) {
    anchor_ = s;
    anchor_t_ = t;
    record(t, s);
  }

  void record(double t, const SystemState& s) {
    tr_.times.push_back(t);
    tr_.states.push_back(s);
    tr_.beta_eff_series.push_back(beta_eff(p_, s));
    tr_.delta_F_series.push_back(delta_F(p_, s));
  }

  // Returns true when integration may stop early.
  bool accepted(double t, const SystemState& s, bool last) {
    ++tr_.accepted_steps;
    const bool converged = track_convergence(t, s);
    const bool stop = last || (converged && cfg_.stop_on_convergence);
    if (stop || tr_.accepted_steps % static_cast<std::size_t>(cfg_.record_every) == 0) record(t, s);
    return stop;
  }

  void finish() {
    if (quiescent_) tr_.converged_to = tr_.states.back();
  }

 private:
  bool track_convergence(double t, const SystemState& s) {
    if ((s - anchor_).cwiseAbs().maxCoeff() >= cfg_.convergence_eps) {
      anchor_ = s;
      anchor_t_ = t;
      quiescent_ = false;
    } else if (t - anchor_t_ >= cfg_.convergence_window) {
      quiescent_ = true;
    }
    return quiescent_;
  }

  const ModelParams& p_;
  const IntegratorConfig& cfg_;
  Trajectory& tr_;
  SystemState anchor_ = SystemState::Zero();
  double anchor_t_ = 0.0;
  bool quiescent_ = false;
};

// Internally the state is (log y, logit z_S, logit z_I). In these coordinates
// each right-hand side is the per-capita growth rate: the SIS bracket for y,
// the payoff difference for z_S and z_I. A fraction within one ulp of a face
// of the cube would otherwise round onto that face and stay there, since the
// faces are invariant; here it keeps its exact distance. An initial value on
// a face maps to an infinite coordinate with zero velocity.
using Internal = Eigen::Vector3d;

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_odds(double z) {
  if (z <= 0.0) return -kInf;
  if (z >= 1.0) return kInf;
  return std::log(z) - std::log1p(-z);
}

double fraction(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

Internal to_internal(const SystemState& s) {
  return Internal(s(kY) > 0.0 ? std::log(s(kY)) : -kInf, log_odds(s(kZs)), log_odds(s(kZi)));
}

SystemState to_state(const Internal& w) { return SystemState(std::exp(w(kY)), fraction(w(kZs)), fraction(w(kZi))); }

Internal internal_rhs(const ModelParams& p, const Internal& w, const TimeScales& eps) {
  const SystemState s = to_state(w);
  Internal k;
  k(kY) = std::isfinite(w(kY)) ? ((1.0 - s(kY)) * beta_eff(p, s) - p.gamma()) / eps.epidemic : 0.0;
  k(kZs) = std::isfinite(w(kZs)) ? delta_F(p, s) / eps.behavior : 0.0;
  k(kZi) = std::isfinite(w(kZi)) ? p.infected_payoff_gap() / eps.behavior : 0.0;
  return k;
}

// Only the upper face y = 1 can be overshot; returns the move in y.
double clamp_infected(Internal& w) {
  if (!(w(kY) > 0.0)) return 0.0;
  const double moved = std::expm1(w(kY));
  w(kY) = 0.0;
  return moved;
}

// Increment that treats an infinite coordinate with zero velocity as fixed.
Internal advance(const Internal& w, const Internal& dw) {
  Internal out = w;
  for (Eigen::Index i = 0; i < 3; ++i) {
    if (dw(i) != 0.0) out(i) += dw(i);
  }
  return out;
}

void run_rk4(const ModelParams& p, const SystemState& s0, const IntegratorConfig& cfg,
             const TimeScales& eps, Trajectory& tr) {
  Recorder rec(p, cfg, tr);
  rec.start(0.0, s0);
  const auto n = static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.dt * (1.0 - 1e-12)));
  const double h = cfg.t_end / static_cast<double>(n);
  Internal w = to_internal(s0);
  for (std::size_t i = 1; i <= n; ++i) {
    const Internal k1 = internal_rhs(p, w, eps);
    const Internal k2 = internal_rhs(p, advance(w, 0.5 * h * k1), eps);
    const Internal k3 = internal_rhs(p, advance(w, 0.5 * h * k2), eps);
    const Internal k4 = internal_rhs(p, advance(w, h * k3), eps);
    w = advance(w, (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    tr.max_clamp = std::max(tr.max_clamp, clamp_infected(w));
    if (rec.accepted(static_cast<double>(i) * h, to_state(w), i == n)) break;
  }
  rec.finish();
}

// The tolerance abs_tol + rel_tol*|x| on a state component, pulled back to the
// internal coordinate through dx/dw. Capped at 1 so that a component near a
// face, where any state-space error is tiny, cannot take an arbitrary jump.
double internal_scale(Eigen::Index i, const Internal& w, const Internal& next, const IntegratorConfig& cfg) {
  const SystemState a = to_state(w);
  const SystemState b = to_state(next);
  double x = std::max(a(i), b(i));
  double slope = x;  // d y / d log y
  if (i != kY) slope = std::max(a(i) * (1.0 - a(i)), b(i) * (1.0 - b(i)));
  if (!(slope > 0.0)) return 1.0;
  return std::min(1.0, (cfg.abs_tol + cfg.rel_tol * x) / slope);
}

void run_dopri(const ModelParams& p, const SystemState& s0, const IntegratorConfig& cfg,
               const TimeScales& eps, Trajectory& tr) {
  Recorder rec(p, cfg, tr);
  rec.start(0.0, s0);

  double t = 0.0;
  double h = std::min(cfg.dt, cfg.max_dt);
  Internal w = to_internal(s0);
  Internal k1 = internal_rhs(p, w, eps);

  while (true) {
    const double remaining = cfg.t_end - t;
    if (remaining <= kMinStep * std::max(1.0, cfg.t_end)) break;
    const bool truncated = h >= remaining;
    const double step = truncated ? remaining : h;

    const Internal k2 = internal_rhs(p, advance(w, step * (a21 * k1)), eps);
    const Internal k3 = internal_rhs(p, advance(w, step * (a31 * k1 + a32 * k2)), eps);
    const Internal k4 = internal_rhs(p, advance(w, step * (a41 * k1 + a42 * k2 + a43 * k3)), eps);
    const Internal k5 = internal_rhs(p, advance(w, step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)), eps);
    const Internal k6 =
        internal_rhs(p, advance(w, step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)), eps);
    Internal next = advance(w, step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6));
    const Internal k7 = internal_rhs(p, next, eps);

    const Internal err_vec = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err = 0.0;
    for (Eigen::Index i = 0; i < 3; ++i) {
      if (err_vec(i) == 0.0) continue;
      err = std::max(err, std::abs(err_vec(i)) / internal_scale(i, w, next, cfg));
    }

    if (!std::isfinite(err)) {
      h = 0.2 * step;
    } else if (err <= 1.0) {
      t = truncated ? cfg.t_end : t + step;
      const double moved = clamp_infected(next);
      tr.max_clamp = std::max(tr.max_clamp, moved);
      w = next;
      k1 = moved > 0.0 ? internal_rhs(p, w, eps) : k7;
      const bool last = cfg.t_end - t <= kMinStep * std::max(1.0, cfg.t_end);
      if (rec.accepted(t, to_state(w), last)) break;
      const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = std::min(step * grow, cfg.max_dt);
      continue;
    } else {
      ++tr.rejected_steps;
      h = step * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
    }
    if (h < kMinStep) {
      throw StiffnessError("adaptive step size underflow at t = " + format_double(t), t);
    }
  }
  rec.finish();
}

}  // namespace

void validate(const IntegratorConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw InvalidParameters("integrator dt must be > 0");
  if (!(cfg.t_end > 0.0)) throw InvalidParameters("integrator t_end must be > 0");
  if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol > 0.0)) throw InvalidParameters("integrator tolerances must be > 0");
  if (!(cfg.max_dt > 0.0)) throw InvalidParameters("integrator max_dt must be > 0");
  if (cfg.record_every < 1) throw InvalidParameters("record_every must be >= 1");
  if (!(cfg.convergence_eps > 0.0) || !(cfg.convergence_window >= 0.0)) {
    throw InvalidParameters("convergence_eps must be > 0 and convergence_window >= 0");
  }
}

Derivative scaled_field(const ModelParams& p, const SystemState& s, const TimeScales& eps) {
  Derivative f = vector_field(p, s);
  f(kY) /= eps.epidemic;
  f(kZs) /= eps.behavior;
  f(kZi) /= eps.behavior;
  return f;
}

Trajectory integrate(const ModelParams& p, const SystemState& s0, const IntegratorConfig& cfg,
                     const TimeScales& eps) {
  validate(cfg);
  if (!s0.allFinite() || !in_unit_cube(s0)) throw InvalidParameters("initial state outside the unit cube");
  for (double e : {eps.epidemic, eps.behavior}) {
    if (!(e > 0.0 && e <= 1.0)) throw InvalidParameters("timescale factors must lie in (0, 1]");
  }
  Trajectory tr;
  if (cfg.method == Method::Rk4Fixed) {
    run_rk4(p, s0, cfg, eps, tr);
  } else {
    run_dopri(p, s0, cfg, eps, tr);
  }
  return tr;
}

std::vector<Crossing> crossing_events(std::span<const double> times, std::span<const double> values) {
  std::vector<Crossing> out;
  const std::size_t n = std::min(times.size(), values.size());
  std::size_t last = n;  // index of the last sample with a nonzero value
  for (std::size_t i = 0; i < n; ++i) {
    const double v = values[i];
    if (v == 0.0 || std::isnan(v)) continue;
    if (last != n && (v > 0.0) != (values[last] > 0.0)) {
      const double v0 = values[last];
      double tc;
      if (i == last + 1) {
        tc = times[last] + (times[i] - times[last]) * (v0 / (v0 - v));
      } else {
        tc = times[last + 1];  // first exact zero in between
      }
      out.push_back({tc, v > 0.0 ? +1 : -1});
    }
    last = i;
  }
  return out;
}

std::vector<Crossing> crossing_events(const Trajectory& tr,
                                      const std::function<double(const SystemState&)>& threshold_fn) {
  std::vector<double> values;
  values.reserve(tr.size());
  for (const auto& s : tr.states) values.push_back(threshold_fn(s));
  return crossing_events(tr.times, values);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << kTrajectoryCsvHeader << '\n';
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const SystemState& s = tr.states[i];
    os << format_double(tr.times[i]) << ',' << format_double(s(kY)) << ',' << format_double(s(kZs)) << ','
       << format_double(s(kZi)) << ',' << format_double(tr.beta_eff_series[i]) << ','
       << format_double(tr.delta_F_series[i]) << '\n';
  }
}

}  // namespace epirep
