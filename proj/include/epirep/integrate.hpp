#ifndef EPIREP_INTEGRATE_HPP
#define EPIREP_INTEGRATE_HPP

#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epirep/model.hpp"

namespace epirep {

enum class Method { Rk4Fixed, Rk45Adaptive };

struct IntegratorConfig {
  Method method = Method::Rk45Adaptive;
  double dt = 1e-2;  ///< fixed step (rk4) or initial step (rk45)
  double abs_tol = 1e-8;
  double rel_tol = 1e-8;
  double max_dt = 1.0;  ///< rk45 step ceiling
  double t_end = 1000.0;
  int record_every = 1;  ///< keep every n-th accepted step (the last step is always kept)
  double convergence_eps = 1e-9;
  double convergence_window = 10.0;
  bool stop_on_convergence = false;
};

/// Throws InvalidParameters on a malformed config.
void validate(const IntegratorConfig& cfg);

/**
 * Timescale factors dividing the epidemic and behavioral right-hand sides.
 * {1, 1} is the unscaled model; behavior < 1 makes replicator dynamics fast,
 * epidemic < 1 makes the SIS dynamics fast.
 */
struct TimeScales {
  double epidemic = 1.0;
  double behavior = 1.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SystemState> states;
  std::vector<double> beta_eff_series;
  std::vector<double> delta_F_series;
  std::optional<SystemState> converged_to;
  double max_clamp = 0.0;  ///< largest single-step projection back into the cube
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  const SystemState& final_state() const { return states.back(); }
};

/// Right-hand side with the timescale factors applied.
Derivative scaled_field(const ModelParams& p, const SystemState& s, const TimeScales& eps);

/// Throws StiffnessError when the adaptive step underflows.
Trajectory integrate(const ModelParams& p, const SystemState& s0, const IntegratorConfig& cfg,
                     const TimeScales& eps = {});

struct Crossing {
  double time;
  int direction;  ///< +1 upward, -1 downward
};

/// Sign changes of a sampled scalar, located by linear interpolation. Exact zeros are skipped over.
std::vector<Crossing> crossing_events(std::span<const double> times, std::span<const double> values);

std::vector<Crossing> crossing_events(const Trajectory& tr,
                                      const std::function<double(const SystemState&)>& threshold_fn);

inline constexpr std::string_view kTrajectoryCsvHeader = "t,y,z_S,z_I,beta_eff,delta_F";

void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

}  // namespace epirep

#endif  // EPIREP_INTEGRATE_HPP
