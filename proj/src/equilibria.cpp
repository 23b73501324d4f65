#include "epirep/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epirep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Monic characteristic polynomial lambda^3 + a lambda^2 + b lambda + c.
struct Cubic {
  double a, b, c;

  template <typename T>
  T value(T x) const {
    return ((x + a) * x + b) * x + c;
  }
  template <typename T>
  T slope(T x) const {
    return (3.0 * x + 2.0 * a) * x + b;
  }
};

Cubic characteristic(const Eigen::Matrix3d& m) {
  const double minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) +
                        m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  return Cubic{-m.trace(), minors, -m.determinant()};
}

// Safeguarded Newton inside a sign-change bracket; always converges to a real root.
double real_root(const Cubic& p) {
  const double bound = 1.0 + std::max({std::abs(p.a), std::abs(p.b), std::abs(p.c)});
  double lo = -bound;
  double hi = bound;
  double x = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double fx = p.value(x);
    if (fx == 0.0) return x;
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double d = p.slope(x);
    double next = d != 0.0 ? x - fx / d : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 2.0 * kEps * std::max(1.0, std::abs(x))) return next;
    x = next;
  }
  return x;
}

template <typename T>
T polish(const Cubic& p, T x) {
  const T d = p.slope(x);
  if (d == T(0.0)) return x;
  const T next = x - p.value(x) / d;
  return std::abs(p.value(next)) < std::abs(p.value(x)) ? next : x;
}

}  // namespace

bool coincident(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string_view to_string(EquilibriumId id) {
  switch (id) {
    case EquilibriumId::E0: return "E0";
    case EquilibriumId::E1: return "E1";
    case EquilibriumId::E2: return "E2";
    case EquilibriumId::E3: return "E3";
    case EquilibriumId::E4: return "E4";
  }
  return "?";
}

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Marginal: return "marginal";
  }
  return "?";
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::DiseaseFree: return "gamma>beta_p";
    case Regime::ModerateUnprotected: return "alpha*beta_p<gamma<beta_p,y_u<y_int";
    case Regime::ModerateInterior: return "alpha*beta_p<gamma<beta_p,y_int<y_u";
    case Regime::LowRecoveryUnprotected: return "gamma<alpha*beta_p,y_u<y_int";
    case Regime::LowRecoveryInterior: return "gamma<alpha*beta_p,y_p<y_int<y_u";
    case Regime::LowRecoveryProtected: return "gamma<alpha*beta_p,y_int<y_p";
  }
  return "?";
}

CriticalLevels critical_levels(const ModelParams& p) {
  if (p.beta_p() == 0.0) {
    throw DegenerateParameters("critical levels undefined for beta_p = 0");
  }
  CriticalLevels cl{};
  cl.y_u = 1.0 - p.gamma() / p.beta_p();
  cl.y_int = p.c_P() / (p.L() * (1.0 - p.alpha()) * p.beta_p());
  cl.y_p = 1.0 - p.gamma() / (p.alpha() * p.beta_p());
  cl.z_S_int = (p.gamma() / (p.beta_p() * (1.0 - cl.y_int)) - p.alpha()) / (1.0 - p.alpha());
  return cl;
}

SystemState equilibrium_point(const ModelParams& p, EquilibriumId id) {
  switch (id) {
    case EquilibriumId::E0: return SystemState(0.0, 0.0, 0.0);
    case EquilibriumId::E1: return SystemState(0.0, 1.0, 0.0);
    default: break;
  }
  if (p.beta_p() == 0.0) return SystemState::Constant(kNaN);
  const CriticalLevels cl = critical_levels(p);
  switch (id) {
    case EquilibriumId::E2: return SystemState(cl.y_u, 1.0, 0.0);
    case EquilibriumId::E3: return SystemState(cl.y_int, cl.z_S_int, 0.0);
    case EquilibriumId::E4: return SystemState(cl.y_p, 0.0, 0.0);
    default: break;
  }
  return SystemState::Constant(kNaN);
}

bool equilibrium_exists(const ModelParams& p, EquilibriumId id) {
  switch (id) {
    case EquilibriumId::E0:
    case EquilibriumId::E1: return true;
    case EquilibriumId::E2: return p.beta_p() > p.gamma();
    case EquilibriumId::E3: {
      if (p.beta_p() == 0.0) return false;
      const CriticalLevels cl = critical_levels(p);
      return cl.y_int < 1.0 && cl.z_S_int > 0.0 && cl.z_S_int < 1.0;
    }
    case EquilibriumId::E4: return p.gamma() < p.alpha() * p.beta_p();
  }
  return false;
}

Eigenvalues eigenvalues_3x3(const Eigen::Matrix3d& m) {
  using cd = std::complex<double>;
  const Cubic p = characteristic(m);

  const double r = polish(p, real_root(p));
  // p(x) = (x - r)(x^2 + e1 x + e0)
  const double e1 = p.a + r;
  const double e0 = p.b + r * e1;

  Eigenvalues ev;
  ev[0] = r;
  const double disc = e1 * e1 - 4.0 * e0;
  const double disc_noise = 64.0 * kEps * (e1 * e1 + 4.0 * std::abs(e0));
  if (disc >= -disc_noise) {
    const double sq = std::sqrt(std::max(disc, 0.0));
    const double q = -0.5 * (e1 + std::copysign(sq, e1));
    const double r1 = q;
    const double r2 = q != 0.0 ? e0 / q : 0.0;
    ev[1] = polish(p, r1);
    ev[2] = polish(p, r2);
  } else {
    const cd z = polish(p, cd(-0.5 * e1, 0.5 * std::sqrt(-disc)));
    ev[1] = cd(z.real(), std::abs(z.imag()));
    ev[2] = std::conj(ev[1]);
  }

  std::sort(ev.begin(), ev.end(), [](const cd& lhs, const cd& rhs) {
    if (lhs.real() != rhs.real()) return lhs.real() > rhs.real();
    return lhs.imag() > rhs.imag();
  });
  return ev;
}

double stability_tolerance(const Eigen::Matrix3d& J) { return 1e-9 * (1.0 + J.norm()); }

Stability classify(const Eigenvalues& ev, double tol) {
  bool marginal = false;
  for (const auto& l : ev) {
    if (!std::isfinite(l.real())) return Stability::Unstable;
    if (l.real() > tol) return Stability::Unstable;
    if (std::abs(l.real()) <= tol) marginal = true;
  }
  return marginal ? Stability::Marginal : Stability::Stable;
}

EquilibriumReport analyze_point(const ModelParams& p, EquilibriumId id, const SystemState& point) {
  EquilibriumReport rep{id, point, equilibrium_exists(p, id), {}, Stability::Unstable};
  if (!point.allFinite()) {
    rep.eigenvalues.fill(std::complex<double>(kNaN, kNaN));
    return rep;
  }
  const Eigen::Matrix3d J = jacobian(p, point);
  rep.eigenvalues = eigenvalues_3x3(J);
  rep.stable = classify(rep.eigenvalues, stability_tolerance(J));
  return rep;
}

std::vector<EquilibriumReport> all_equilibria(const ModelParams& p) {
  std::vector<EquilibriumReport> out;
  out.reserve(kAllEquilibria.size());
  for (EquilibriumId id : kAllEquilibria) {
    out.push_back(analyze_point(p, id, equilibrium_point(p, id)));
  }
  return out;
}

EquilibriumId stable_equilibrium(Regime r) {
  switch (r) {
    case Regime::DiseaseFree: return EquilibriumId::E1;
    case Regime::ModerateUnprotected:
    case Regime::LowRecoveryUnprotected: return EquilibriumId::E2;
    case Regime::ModerateInterior:
    case Regime::LowRecoveryInterior: return EquilibriumId::E3;
    case Regime::LowRecoveryProtected: return EquilibriumId::E4;
  }
  return EquilibriumId::E0;
}

Regime regime(const ModelParams& p) {
  const double g = p.gamma();
  if (coincident(g, p.beta_p())) throw BoundaryCase("parameters on a regime boundary: gamma = beta_p");
  if (g > p.beta_p()) return Regime::DiseaseFree;
  if (coincident(g, p.alpha() * p.beta_p())) {
    throw BoundaryCase("parameters on a regime boundary: gamma = alpha*beta_p");
  }
  const CriticalLevels cl = critical_levels(p);
  if (coincident(cl.y_u, cl.y_int)) throw BoundaryCase("parameters on a regime boundary: y_u = y_int");
  if (g > p.alpha() * p.beta_p()) {
    return cl.y_u < cl.y_int ? Regime::ModerateUnprotected : Regime::ModerateInterior;
  }
  if (cl.y_u < cl.y_int) return Regime::LowRecoveryUnprotected;
  if (coincident(cl.y_p, cl.y_int)) throw BoundaryCase("parameters on a regime boundary: y_p = y_int");
  return cl.y_p < cl.y_int ? Regime::LowRecoveryInterior : Regime::LowRecoveryProtected;
}

}  // namespace epirep
