#include "epirep/slowfast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "epirep/csv.hpp"

namespace epirep {

namespace {

// SIS right-hand side with a fixed transmission rate.
struct ScalarSis {
  double beta;
  double gamma;

  double operator()(double y) const { return ((1.0 - y) * beta - gamma) * y; }

  double rk4(double y, double h) const {
    const double k1 = (*this)(y);
    const double k2 = (*this)(y + 0.5 * h * k1);
    const double k3 = (*this)(y + 0.5 * h * k2);
    const double k4 = (*this)(y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
};

struct Pieces {
  ScalarSis below;  // nobody protects
  ScalarSis above;  // every susceptible protects
  double surface;

  explicit Pieces(const ModelParams& p)
      : below{p.beta_p(), p.gamma()},
        above{p.alpha() * p.beta_p(), p.gamma()},
        surface(critical_levels(p).y_int) {}

  bool sliding() const { return below(surface) >= 0.0 && above(surface) <= 0.0; }
};

}  // namespace

double reduced_epidemic_rhs(const ModelParams& p, double y) {
  const Pieces f(p);
  if (y < f.surface) return f.below(y);
  if (y > f.surface) return f.above(y);
  const double a = f.below(y);
  const double b = f.above(y);
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  if (lo <= 0.0 && hi >= 0.0) return 0.0;
  return std::abs(lo) < std::abs(hi) ? lo : hi;
}

ReducedTrajectory integrate_reduced_epidemic(const ModelParams& p, double y0, double t_end, double dt) {
  if (!(y0 >= 0.0 && y0 <= 1.0)) throw InvalidParameters("reduced initial state must lie in [0, 1]");
  if (!(dt > 0.0) || !(t_end > 0.0)) throw InvalidParameters("reduced integration needs dt > 0 and t_end > 0");

  const Pieces f(p);
  ReducedTrajectory out;
  // -1: below the surface, +1: above, 0: sliding on it
  int side = y0 < f.surface ? -1 : (y0 > f.surface ? 1 : 0);
  if (side == 0) {
    if (f.sliding()) {
      out.sliding_onset = 0.0;
    } else {
      side = f.below(f.surface) < 0.0 ? -1 : 1;
    }
  }

  double t = 0.0;
  double y = y0;
  out.times.push_back(t);
  out.y.push_back(y);
  const double stop = t_end * (1.0 - 1e-14);
  while (t < stop) {
    const double h = std::min(dt, t_end - t);
    if (side == 0) {
      t += h;
      y = f.surface;
    } else {
      const ScalarSis& piece = side < 0 ? f.below : f.above;
      const double next = piece.rk4(y, h);
      const bool crossed = side < 0 ? next >= f.surface : next <= f.surface;
      if (!crossed) {
        t += h;
        y = next;
      } else {
        // Cut the step where it reaches the surface.
        double lo = 0.0;
        double hi = 1.0;
        for (int it = 0; it < 80; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double ym = piece.rk4(y, mid * h);
          const bool past = side < 0 ? ym >= f.surface : ym <= f.surface;
          (past ? hi : lo) = mid;
        }
        t += hi * h;
        y = f.surface;
        if (f.sliding()) {
          side = 0;
          out.sliding_onset = t;
        } else {
          side = -side;
        }
      }
    }
    out.times.push_back(t);
    out.y.push_back(y);
  }
  return out;
}

Prop2Case classify_prop2(const ModelParams& p) {
  const CriticalLevels cl = critical_levels(p);
  using L = Prop2Case::Limit;
  if (coincident(cl.y_u, 0.0)) throw BoundaryCase("reduced dynamics on a case boundary: y_u = 0");
  if (cl.y_u < 0.0) return {1, L::Origin, 0.0, true};
  if (coincident(cl.y_u, cl.y_int)) throw BoundaryCase("reduced dynamics on a case boundary: y_u = y_int");
  if (cl.y_u < cl.y_int) return {2, L::EndemicUnprotected, cl.y_u, true};
  if (coincident(cl.y_p, cl.y_int)) throw BoundaryCase("reduced dynamics on a case boundary: y_p = y_int");
  if (cl.y_p < cl.y_int) return {3, L::Interior, cl.y_int, false};
  return {4, L::EndemicProtected, cl.y_p, true};
}

QuasiSteady quasi_steady_y(const ModelParams& p, double z_S, double z_I) {
  const double be = susceptibility(p, z_S) * infectiousness(p, z_I);
  if (std::abs(be - p.gamma()) <= 1e-12) return {0.0, true};
  if (be < p.gamma()) return {0.0, false};
  return {1.0 - p.gamma() / be, false};
}

std::pair<double, double> reduced_behavioral_rhs(const ModelParams& p, double z_S, double z_I) {
  const double y = quasi_steady_y(p, z_S, z_I).y;
  const Derivative f = vector_field(p, SystemState(y, z_S, z_I));
  return {f(kZs), f(kZi)};
}

DelayResult measure_bifurcation_delay(const Trajectory& tr, const ModelParams& p, double delta) {
  if (tr.empty()) return {std::nullopt, "empty trajectory"};
  const double gamma = p.gamma();
  if (!(tr.beta_eff_series.front() < gamma)) {
    return {std::nullopt, "beta_eff does not start below gamma"};
  }

  std::vector<double> margin(tr.size());
  std::transform(tr.beta_eff_series.begin(), tr.beta_eff_series.end(), margin.begin(),
                 [gamma](double b) { return b - gamma; });
  const auto rises = crossing_events(tr.times, margin);
  const auto up = std::find_if(rises.begin(), rises.end(), [](const Crossing& c) { return c.direction > 0; });
  if (up == rises.end()) return {std::nullopt, "beta_eff never rises through gamma"};
  const double t_cross = up->time;

  std::vector<double> above(tr.size());
  std::transform(tr.states.begin(), tr.states.end(), above.begin(),
                 [delta](const SystemState& s) { return s(kY) - delta; });

  // y relative to delta at the crossing time, by linear interpolation.
  const auto after = std::lower_bound(tr.times.begin(), tr.times.end(), t_cross);
  const auto k = static_cast<std::size_t>(after - tr.times.begin());
  double at_cross = above[std::min(k, tr.size() - 1)];
  if (k > 0 && k < tr.size() && tr.times[k] > tr.times[k - 1]) {
    const double w = (t_cross - tr.times[k - 1]) / (tr.times[k] - tr.times[k - 1]);
    at_cross = (1.0 - w) * above[k - 1] + w * above[k];
  }
  if (at_cross > 0.0) return {std::nullopt, "y already above the takeoff threshold when beta_eff crossed gamma"};

  for (const Crossing& c : crossing_events(tr.times, above)) {
    if (c.direction > 0 && c.time >= t_cross) {
      return {DelayMeasurement{t_cross, c.time, c.time - t_cross}, {}};
    }
  }
  return {std::nullopt, "y never rises through the takeoff threshold"};
}

void write_delay_csv(std::ostream& os, double gamma, double eps, double delta, const DelayResult& r) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const DelayMeasurement m = r.measurement.value_or(DelayMeasurement{nan, nan, nan});
  os << kDelayCsvHeader << '\n'
     << format_double(gamma) << ',' << format_double(eps) << ',' << format_double(delta) << ','
     << format_double(m.t_cross) << ',' << format_double(m.t_takeoff) << ',' << format_double(m.delay) << '\n';
}

}  // namespace epirep
