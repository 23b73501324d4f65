#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <random>

#include "epirep/equilibria.hpp"

using namespace epirep;

namespace {

bool near_boundary(double a, double b) { return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(a)); }

struct Verdict {
  bool exists;
  bool stable;
};

// Existence and stability rules stated for the closed-form equilibria.
std::array<Verdict, 5> stated_rules(const ParamValues<double>& v) {
  const double y_u = 1 - v.gamma / v.beta_p;
  const double y_int = v.c_P / (v.L * (1 - v.alpha) * v.beta_p);
  const double y_p = 1 - v.gamma / (v.alpha * v.beta_p);
  return {{{true, false},
           {true, v.beta_p < v.gamma},
           {v.beta_p > v.gamma, y_u < y_int},
           {y_p < y_int && y_int < y_u, true},
           {v.gamma < v.alpha * v.beta_p, y_p > y_int}}};
}

}  // namespace

TEST_SUITE("equilibria") {
  TEST_CASE("critical levels at gamma = 0.1") {
    const CriticalLevels cl = critical_levels(reference_params(0.1));
    CHECK(cl.y_u == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(cl.y_int == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(cl.y_p == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
    CHECK(cl.z_S_int == doctest::Approx(0.6).epsilon(1e-14));
  }

  TEST_CASE("degenerate protected transmission") {
    ParamValues<double> v = reference_values(0.1);
    v.beta_p = 0.0;
    const ModelParams p(v);
    CHECK_THROWS_AS(critical_levels(p), DegenerateParameters);
    CHECK(equilibrium_exists(p, EquilibriumId::E1));
    CHECK_FALSE(equilibrium_exists(p, EquilibriumId::E2));
  }

  TEST_CASE("closed-form points") {
    const ModelParams p = reference_params(0.05);
    CHECK(equilibrium_point(p, EquilibriumId::E0) == SystemState(0, 0, 0));
    CHECK(equilibrium_point(p, EquilibriumId::E1) == SystemState(0, 1, 0));
    CHECK(equilibrium_point(p, EquilibriumId::E2)(kY) == doctest::Approx(2.0 / 3.0));
    CHECK(equilibrium_point(p, EquilibriumId::E4)(kY) == doctest::Approx(1.0 / 3.0));
  }

  TEST_CASE("eigenvalues against the library-independent solver") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
      Eigen::Matrix3d m;
      for (int k = 0; k < 9; ++k) m(k) = n(rng) * (i % 5 == 0 ? 100.0 : 1.0);
      const Eigenvalues ev = eigenvalues_3x3(m);
      Eigen::EigenSolver<Eigen::Matrix3d> es(m, false);
      std::vector<std::complex<double>> want(es.eigenvalues().begin(), es.eigenvalues().end());
      const double scale = 1.0 + m.norm();
      for (const auto& l : ev) {
        const auto best = std::min_element(want.begin(), want.end(), [&](auto a, auto b) {
          return std::abs(a - l) < std::abs(b - l);
        });
        CHECK(std::abs(*best - l) <= 1e-8 * scale);
        want.erase(best);
      }
      CHECK(ev[0].real() >= ev[1].real());
      CHECK(ev[1].real() >= ev[2].real());
    }
  }

  TEST_CASE("eigenvalues of triangular and repeated-root matrices") {
    Eigen::Matrix3d m;
    m << -0.02, 0.3, 0.1, 0, -0.2, 0, 0, 0, -1;
    const Eigenvalues ev = eigenvalues_3x3(m);
    CHECK(ev[0].real() == doctest::Approx(-0.02));
    CHECK(ev[1].real() == doctest::Approx(-0.2));
    CHECK(ev[2].real() == doctest::Approx(-1.0));

    const Eigenvalues zero = eigenvalues_3x3(Eigen::Matrix3d::Zero());
    for (const auto& l : zero) CHECK(std::abs(l) == 0.0);
  }

  TEST_CASE("Jacobian at E2 is upper triangular with the stated diagonal") {
    const ModelParams p = reference_params(0.13);
    const Eigen::Matrix3d J = jacobian(p, equilibrium_point(p, EquilibriumId::E2));
    CHECK(J(1, 0) == 0.0);
    CHECK(J(2, 0) == 0.0);
    CHECK(J(2, 1) == 0.0);
    CHECK(J(0, 0) == doctest::Approx(-0.02).epsilon(1e-12));
    CHECK(J(1, 1) == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(J(2, 2) == -1.0);
  }

  TEST_CASE("interior equilibrium block") {
    const ModelParams p = reference_params(0.1);
    const Eigen::Matrix3d J = jacobian(p, equilibrium_point(p, EquilibriumId::E3));
    CHECK(J(0, 0) + J(1, 1) == doctest::Approx(-0.02).epsilon(1e-12));
    CHECK(J.topLeftCorner<2, 2>().determinant() > 0.0);
    CHECK(analyze_point(p, EquilibriumId::E3, equilibrium_point(p, EquilibriumId::E3)).stable == Stability::Stable);
  }

  TEST_CASE("classification") {
    using C = std::complex<double>;
    CHECK(classify({C(-1), C(-2), C(-3)}, 1e-9) == Stability::Stable);
    CHECK(classify({C(1e-3), C(-2), C(-3)}, 1e-9) == Stability::Unstable);
    CHECK(classify({C(1e-12), C(-2), C(-3)}, 1e-9) == Stability::Marginal);
    CHECK(classify({C(1.0), C(1e-12), C(-3)}, 1e-9) == Stability::Unstable);
  }

  TEST_CASE("random parameters agree with the stated rules") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    while (checked < 1000) {
      ParamValues<double> v;
      v.beta_p = 0.05 + 0.5 * u(rng);
      v.beta_u = v.beta_p * (1.0 + 2.0 * u(rng)) + 1e-3;
      v.alpha = 0.05 + 0.9 * u(rng);
      v.c_P = 0.1 + 2.0 * u(rng);
      v.c_IP = 2.0 * u(rng);
      v.c_IU = v.c_IP + 0.1 + u(rng);
      v.L = 1.0 + 150.0 * u(rng);
      v.gamma = 0.01 + 0.6 * u(rng);
      const double y_u = 1 - v.gamma / v.beta_p;
      const double y_int = v.c_P / (v.L * (1 - v.alpha) * v.beta_p);
      const double y_p = 1 - v.gamma / (v.alpha * v.beta_p);
      if (near_boundary(v.gamma, v.beta_p) || near_boundary(v.gamma, v.alpha * v.beta_p) ||
          near_boundary(y_u, y_int) || near_boundary(y_p, y_int)) {
        continue;
      }
      ++checked;
      const ModelParams p(v);
      const auto want = stated_rules(v);
      const auto got = all_equilibria(p);
      int n_stable = 0;
      for (int k = 0; k < 5; ++k) {
        CHECK(got[k].exists == want[k].exists);
        if (!got[k].exists) continue;
        CHECK(got[k].stable == (want[k].stable ? Stability::Stable : Stability::Unstable));
        if (got[k].stable == Stability::Stable) ++n_stable;
      }
      CHECK(n_stable == 1);
      const EquilibriumId named = stable_equilibrium(regime(p));
      CHECK(got[static_cast<int>(named)].stable == Stability::Stable);
    }
  }

  TEST_CASE("regimes of the reference parameters") {
    CHECK(regime(reference_params(0.2)) == Regime::DiseaseFree);
    CHECK(regime(reference_params(0.13)) == Regime::ModerateUnprotected);
    CHECK(regime(reference_params(0.1)) == Regime::ModerateInterior);
    CHECK(regime(reference_params(0.07)) == Regime::LowRecoveryInterior);
    CHECK(regime(reference_params(0.05)) == Regime::LowRecoveryProtected);
    ParamValues<double> v = reference_values(0.05);
    v.L = 20.0;  // y_int = 2/3 above y_u = 0.6
    v.gamma = 0.06;
    CHECK(regime(ModelParams(v)) == Regime::LowRecoveryUnprotected);
  }

  TEST_CASE("boundaries are reported by name") {
    auto message = [](double gamma) {
      try {
        (void)regime(reference_params(gamma));
      } catch (const BoundaryCase& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(message(0.15).find("gamma = beta_p") != std::string::npos);
    CHECK(message(0.075).find("gamma = alpha*beta_p") != std::string::npos);
    CHECK(message(0.125).find("y_u = y_int") != std::string::npos);
    CHECK(message(0.0625).find("y_p = y_int") != std::string::npos);
    CHECK(message(0.1).empty());
  }

  TEST_CASE("knife-edge verdicts are marginal") {
    const ModelParams p = reference_params(0.15);
    const auto got = all_equilibria(p);
    CHECK(got[1].stable == Stability::Marginal);
  }
}
