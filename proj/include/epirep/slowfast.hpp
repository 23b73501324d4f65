#ifndef EPIREP_SLOWFAST_HPP
#define EPIREP_SLOWFAST_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "epirep/equilibria.hpp"
#include "epirep/integrate.hpp"

namespace epirep {

// ---------------------------------------------------------------------------
// Fast behavior: the replicator dynamics relax instantly to z_S in {0, 1},
// z_I = 0, leaving a piecewise-smooth scalar SIS equation for y with a
// switching surface at y = y_int.
// ---------------------------------------------------------------------------

/// Scalar SIS right-hand side with full protection above y_int and none below.
/// On the surface itself the Filippov value nearest zero is returned.
double reduced_epidemic_rhs(const ModelParams& p, double y);

struct ReducedTrajectory {
  std::vector<double> times;
  std::vector<double> y;
  std::optional<double> sliding_onset;  ///< time the solution got trapped on y = y_int
};

/**
 * Integrates the reduced epidemic equation with fixed-step RK4 on each smooth
 * piece. Steps that would cross y_int are cut exactly at the surface; there
 * the solution either crosses (transversal flow) or stays (sliding).
 */
ReducedTrajectory integrate_reduced_epidemic(const ModelParams& p, double y0, double t_end, double dt);

struct Prop2Case {
  enum class Limit { Origin, EndemicUnprotected, Interior, EndemicProtected };

  int case_id;  ///< 1..4
  Limit limit;
  double predicted_limit;
  bool monotone;
};

/// Throws BoundaryCase exactly on a case boundary.
Prop2Case classify_prop2(const ModelParams& p);

// ---------------------------------------------------------------------------
// Fast epidemic: y relaxes instantly to the stable SIS level for the current
// effective infection rate, and the behavior evolves on that manifold.
// ---------------------------------------------------------------------------

struct QuasiSteady {
  double y;
  bool critical;  ///< beta_eff within 1e-12 of gamma; y is then 0
};

QuasiSteady quasi_steady_y(const ModelParams& p, double z_S, double z_I);

std::pair<double, double> reduced_behavioral_rhs(const ModelParams& p, double z_S, double z_I);

struct DelayMeasurement {
  double t_cross;    ///< beta_eff rises through gamma
  double t_takeoff;  ///< y rises through the takeoff threshold, after t_cross
  double delay;
};

struct DelayResult {
  std::optional<DelayMeasurement> measurement;
  std::string reason;  ///< why the measurement is not applicable

  bool applicable() const { return measurement.has_value(); }
};

inline constexpr double kDefaultTakeoff = 1e-2;

/// Time spent near the disease-free branch after it lost stability.
DelayResult measure_bifurcation_delay(const Trajectory& tr, const ModelParams& p, double delta = kDefaultTakeoff);

inline constexpr std::string_view kDelayCsvHeader = "gamma,eps,delta,t_cross,t_takeoff,delay";

/// One data row; not-applicable results are written with nan fields.
void write_delay_csv(std::ostream& os, double gamma, double eps, double delta, const DelayResult& r);

}  // namespace epirep

#endif  // EPIREP_SLOWFAST_HPP
