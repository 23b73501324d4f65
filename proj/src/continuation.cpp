#include "epirep/continuation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

#include "epirep/csv.hpp"

namespace epirep {

namespace {

constexpr double kCoincide = 1e-7;

double residual(const ModelParams& p, const SystemState& x) {
  return vector_field(p, x).cwiseAbs().maxCoeff();
}

double branch_determinant(const ModelParams& p_base, EquilibriumId id, double gamma) {
  const ModelParams p = p_base.with_gamma(gamma);
  const SystemState x = equilibrium_point(p, id);
  if (!x.allFinite()) return std::numeric_limits<double>::quiet_NaN();
  return jacobian(p, x).determinant();
}

double smallest_real_part(const ModelParams& p, const SystemState& x) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& l : eigenvalues_3x3(jacobian(p, x))) m = std::min(m, std::abs(l.real()));
  return m;
}

double bisect_determinant(const ModelParams& p_base, EquilibriumId id, double lo, double hi) {
  double flo = branch_determinant(p_base, id, lo);
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = branch_determinant(p_base, id, mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SystemState correct_equilibrium(const ModelParams& p, const SystemState& guess) {
  SystemState x = guess;
  double r = residual(p, x);
  int stalled = 0;
  for (int it = 0; it < 50 && r > 1e-15; ++it) {
    const Eigen::FullPivLU<Eigen::Matrix3d> lu(jacobian(p, x));
    if (!lu.isInvertible()) break;  // singular at a bifurcation point; keep the predictor
    const SystemState next = x + lu.solve(-vector_field(p, x));
    const double rn = residual(p, next);
    if (rn < r) {
      x = next;
      r = rn;
      stalled = 0;
    } else if (++stalled > 5) {
      break;
    }
  }
  if (!(r <= 1e-10)) {
    throw BranchTraceError("Newton correction failed at gamma = " + format_double(p.gamma()) +
                               " (residual " + format_double(r) + ")",
                           p.gamma());
  }
  return x;
}

Branch trace_branch(const ModelParams& p_base, EquilibriumId id, GammaRange range, int n_steps,
                    bool include_nonphysical) {
  if (n_steps < 2) throw InvalidParameters("n_steps must be >= 2");
  if (!(range.lo > 0.0) || !(range.hi > range.lo)) throw InvalidParameters("gamma range must satisfy 0 < lo < hi");

  Branch b{id, {}, std::nullopt};
  for (int i = 0; i < n_steps; ++i) {
    const double g = i + 1 == n_steps ? range.hi : range.lo + (range.hi - range.lo) * i / (n_steps - 1);
    const ModelParams p = p_base.with_gamma(g);
    const SystemState guess = equilibrium_point(p, id);
    if (!guess.allFinite()) continue;
    const bool physical = equilibrium_exists(p, id);
    if (!physical && !include_nonphysical) continue;

    const SystemState x = correct_equilibrium(p, guess);
    const EquilibriumReport rep = analyze_point(p, id, x);
    b.samples.push_back({g, x, rep.eigenvalues[0].real(), rep.stable == Stability::Stable, physical});
    if (physical) {
      if (!b.valid_range) b.valid_range = GammaRange{g, g};
      b.valid_range->hi = g;
    }
  }
  return b;
}

std::vector<BranchOutcome> trace_all_branches(const ModelParams& p_base, GammaRange range, int n_steps,
                                              bool include_nonphysical, unsigned threads) {
  std::vector<BranchOutcome> out;
  for (EquilibriumId id : kAllEquilibria) out.push_back({id, std::nullopt, {}});

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < out.size(); i = next++) {
      try {
        out[i].branch = trace_branch(p_base, out[i].id, range, n_steps, include_nonphysical);
      } catch (const Error& e) {
        out[i].error = e.what();
      }
    }
  };
  const unsigned n = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(out.size()));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  return out;
}

std::string transcritical_label(EquilibriumId a, EquilibriumId b) {
  if (b < a) std::swap(a, b);
  using E = EquilibriumId;
  if (a == E::E0 && b == E::E4) return "T0";
  if (a == E::E1 && b == E::E2) return "T1";
  if (a == E::E2 && b == E::E3) return "T2";
  if (a == E::E3 && b == E::E4) return "T3";
  return std::string(to_string(a)) + "-" + std::string(to_string(b));
}

std::vector<BifurcationPoint> detect_transcritical(const ModelParams& p_base, GammaRange range, int n_grid) {
  if (n_grid < 2) throw InvalidParameters("n_grid must be >= 2");
  if (!(range.lo > 0.0) || !(range.hi > range.lo)) throw InvalidParameters("gamma range must satisfy 0 < lo < hi");

  std::vector<BifurcationPoint> found;
  auto record = [&](EquilibriumId a, double g) {
    const ModelParams p = p_base.with_gamma(g);
    const SystemState xa = equilibrium_point(p, a);
    if (!in_unit_cube(xa, kCoincide)) return;
    for (EquilibriumId b : kAllEquilibria) {
      if (b == a) continue;
      const SystemState xb = equilibrium_point(p, b);
      if (!xb.allFinite() || (xa - xb).cwiseAbs().maxCoeff() > kCoincide) continue;
      if (smallest_real_part(p, xa) > kCoincide || smallest_real_part(p, xb) > kCoincide) continue;
      const EquilibriumId lo = std::min(a, b);
      const EquilibriumId hi = std::max(a, b);
      const bool dup = std::any_of(found.begin(), found.end(), [&](const BifurcationPoint& q) {
        return q.branch_a == lo && q.branch_b == hi && std::abs(q.gamma_star - g) < 1e-8;
      });
      if (!dup) found.push_back({transcritical_label(lo, hi), g, lo, hi});
    }
  };

  for (EquilibriumId id : kAllEquilibria) {
    double g_prev = range.lo;
    double d_prev = branch_determinant(p_base, id, g_prev);
    if (d_prev == 0.0) record(id, g_prev);
    for (int i = 1; i < n_grid; ++i) {
      const double g = i + 1 == n_grid ? range.hi : range.lo + (range.hi - range.lo) * i / (n_grid - 1);
      const double d = branch_determinant(p_base, id, g);
      if (d == 0.0) {
        record(id, g);
      } else if (std::isfinite(d) && std::isfinite(d_prev) && d_prev != 0.0 && (d > 0.0) != (d_prev > 0.0)) {
        record(id, bisect_determinant(p_base, id, g_prev, g));
      }
      g_prev = g;
      d_prev = d;
    }
  }
  std::sort(found.begin(), found.end(),
            [](const BifurcationPoint& l, const BifurcationPoint& r) { return l.gamma_star < r.gamma_star; });
  return found;
}

void write_branch_csv(std::ostream& os, const std::vector<Branch>& branches) {
  os << kBranchCsvHeader << '\n';
  for (const Branch& b : branches) {
    for (const BranchSample& s : b.samples) {
      os << to_string(b.id) << ',' << format_double(s.gamma) << ',' << format_double(s.state(kY)) << ','
         << format_double(s.state(kZs)) << ',' << format_double(s.state(kZi)) << ','
         << format_double(s.re_lambda_max) << ',' << (s.stable ? 1 : 0) << '\n';
    }
  }
}

void write_bifurcation_csv(std::ostream& os, const std::vector<BifurcationPoint>& points) {
  os << kBifurcationCsvHeader << '\n';
  for (const BifurcationPoint& b : points) {
    os << b.label << ',' << format_double(b.gamma_star) << ',' << to_string(b.branch_a) << ','
       << to_string(b.branch_b) << '\n';
  }
}

}  // namespace epirep
