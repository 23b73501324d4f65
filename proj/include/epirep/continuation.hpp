#ifndef EPIREP_CONTINUATION_HPP
#define EPIREP_CONTINUATION_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "epirep/equilibria.hpp"

namespace epirep {

// Natural-parameter continuation in the recovery rate gamma. Every branch is
// a graph over gamma, so the closed forms serve as predictor and a Newton
// iteration on the vector field as corrector.

struct GammaRange {
  double lo;
  double hi;
};

struct BranchSample {
  double gamma;
  SystemState state;
  double re_lambda_max;
  bool stable;
  bool physical;  ///< inside the unit cube
};

struct Branch {
  EquilibriumId id;
  std::vector<BranchSample> samples;            ///< ascending gamma
  std::optional<GammaRange> valid_range;        ///< sampled gamma span with a physical equilibrium
};

/// Newton iteration on the vector field at fixed parameters. Throws BranchTraceError
/// after more than five iterations without a residual decrease.
SystemState correct_equilibrium(const ModelParams& p, const SystemState& guess);

Branch trace_branch(const ModelParams& p_base, EquilibriumId id, GammaRange range, int n_steps,
                    bool include_nonphysical = false);

struct BranchOutcome {
  EquilibriumId id;
  std::optional<Branch> branch;
  std::string error;
};

/// Traces E0..E4 on up to `threads` workers; the result is ordered by branch id.
std::vector<BranchOutcome> trace_all_branches(const ModelParams& p_base, GammaRange range, int n_steps,
                                              bool include_nonphysical, unsigned threads);

struct BifurcationPoint {
  std::string label;  ///< T0..T3, keyed to the pair of branches exchanging stability
  double gamma_star;
  EquilibriumId branch_a;
  EquilibriumId branch_b;  ///< branch_a < branch_b
};

/// Label of a transcritical point by the exchanging pair: {E0,E4} T0, {E1,E2} T1, {E2,E3} T2, {E3,E4} T3.
std::string transcritical_label(EquilibriumId a, EquilibriumId b);

/**
 * Locates gamma values where a branch's Jacobian becomes singular and another
 * branch passes through the same physical state. The determinant is scanned
 * on a grid of `n_grid` points and bracketed zeros are bisected to 1e-12.
 * Sorted by gamma_star.
 */
std::vector<BifurcationPoint> detect_transcritical(const ModelParams& p_base, GammaRange range,
                                                   int n_grid = 2001);

inline constexpr std::string_view kBranchCsvHeader = "branch,gamma,y,z_S,z_I,re_lambda_max,stable";
inline constexpr std::string_view kBifurcationCsvHeader = "label,gamma_star,branch_a,branch_b";

void write_branch_csv(std::ostream& os, const std::vector<Branch>& branches);
void write_bifurcation_csv(std::ostream& os, const std::vector<BifurcationPoint>& points);

}  // namespace epirep

#endif  // EPIREP_CONTINUATION_HPP
