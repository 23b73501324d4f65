#ifndef EPIREP_EQUILIBRIA_HPP
#define EPIREP_EQUILIBRIA_HPP

#include <array>
#include <complex>
#include <string_view>
#include <vector>

#include "epirep/model.hpp"

namespace epirep {

/// Equality up to 1e-12 relative; used to detect parameters sitting on a regime boundary.
bool coincident(double a, double b);

/// Threshold infection levels and the interior protection level (all at z_I = 0).
struct CriticalLevels {
  double y_u;      ///< endemic level when nobody protects: 1 - gamma/beta_p
  double y_int;    ///< level at which protecting and not protecting pay the same
  double y_p;      ///< endemic level when every susceptible protects: 1 - gamma/(alpha beta_p)
  double z_S_int;  ///< unprotected fraction at the interior equilibrium
};

/// Throws DegenerateParameters when beta_p == 0.
CriticalLevels critical_levels(const ModelParams& p);

enum class EquilibriumId { E0 = 0, E1, E2, E3, E4 };

inline constexpr std::array<EquilibriumId, 5> kAllEquilibria = {
    EquilibriumId::E0, EquilibriumId::E1, EquilibriumId::E2, EquilibriumId::E3, EquilibriumId::E4};

std::string_view to_string(EquilibriumId id);

enum class Stability { Stable, Unstable, Marginal };

std::string_view to_string(Stability s);

using Eigenvalues = std::array<std::complex<double>, 3>;

struct EquilibriumReport {
  EquilibriumId id;
  SystemState point;  ///< closed-form location; meaningful even when !exists
  bool exists;        ///< point is a physical state (inside the unit cube)
  Eigenvalues eigenvalues;
  Stability stable;
};

/// Closed-form location of an equilibrium. May lie outside the unit cube.
SystemState equilibrium_point(const ModelParams& p, EquilibriumId id);

/// Whether the closed-form equilibrium is a physical state for these parameters.
bool equilibrium_exists(const ModelParams& p, EquilibriumId id);

/**
 * Roots of the characteristic polynomial of a 3x3 real matrix.
 *
 * A real root is bracketed and refined, the remaining quadratic factor is
 * solved directly, and every root gets one Newton polish step on the full
 * cubic. Sorted by real part, descending (ties: imaginary part descending).
 */
Eigenvalues eigenvalues_3x3(const Eigen::Matrix3d& m);

/// Absolute tolerance below which a real part counts as zero.
double stability_tolerance(const Eigen::Matrix3d& J);

Stability classify(const Eigenvalues& ev, double tol);

/// Linearization verdict at an arbitrary point.
EquilibriumReport analyze_point(const ModelParams& p, EquilibriumId id, const SystemState& point);

/// E0..E4 in that order. Non-physical equilibria are returned with exists = false.
std::vector<EquilibriumReport> all_equilibria(const ModelParams& p);

/// Rows of the existence/stability table, top to bottom.
enum class Regime {
  DiseaseFree,             ///< gamma > beta_p
  ModerateUnprotected,     ///< alpha beta_p < gamma < beta_p, y_u < y_int
  ModerateInterior,        ///< alpha beta_p < gamma < beta_p, y_int < y_u
  LowRecoveryUnprotected,  ///< gamma < alpha beta_p, y_u < y_int
  LowRecoveryInterior,     ///< gamma < alpha beta_p, y_p < y_int < y_u
  LowRecoveryProtected,    ///< gamma < alpha beta_p, y_int < y_p
};

std::string_view to_string(Regime r);

/// The equilibrium the table marks as the unique stable one in this regime.
EquilibriumId stable_equilibrium(Regime r);

/// Throws BoundaryCase naming the coincident quantities when on a row boundary.
Regime regime(const ModelParams& p);

}  // namespace epirep

#endif  // EPIREP_EQUILIBRIA_HPP
