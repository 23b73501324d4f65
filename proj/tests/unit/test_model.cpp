#include <doctest.h>

#include <random>

#include "epirep/model.hpp"

using namespace epirep;

namespace {

// Long-hand field, expanded independently of the library's helpers.
SystemState field_oracle(const ParamValues<double>& v, double y, double zs, double zi) {
  const double infect = v.beta_u * zi + v.beta_p * (1 - zi);
  const double sus = zs + v.alpha * (1 - zs);
  return SystemState(((1 - y) * sus * infect - v.gamma) * y,
                     zs * (1 - zs) * (v.c_P - v.L * (1 - v.alpha) * infect * y),
                     zi * (1 - zi) * (v.c_IP - v.c_IU));
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("field matches the long-hand expression") {
    const auto v = reference_values(0.1);
    const ModelParams p(v);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      const SystemState s(u(rng), u(rng), u(rng));
      const SystemState want = field_oracle(v, s(0), s(1), s(2));
      CHECK((vector_field(p, s) - want).cwiseAbs().maxCoeff() <= 1e-15);
    }
  }

  TEST_CASE("hand-computed values") {
    const ModelParams p = reference_params(0.1);
    const SystemState s(0.1, 1.0, 0.0);
    CHECK(beta_eff(p, s) == doctest::Approx(0.15));
    CHECK(vector_field(p, s)(kY) == doctest::Approx(0.0035));
    CHECK(delta_F(p, s) == doctest::Approx(1.0 - 80 * 0.5 * 0.15 * 0.1));
    CHECK(p.infected_payoff_gap() == -1.0);
  }

  TEST_CASE("analytic Jacobian against long-double central differences") {
    const ModelParams p = reference_params(0.13);
    const BasicModelParams<long double> pl(ParamValues<long double>{1, 0.5L, 0.3L, 0.15L, 2, 1, 80, 0.13L});
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      const SystemState s(u(rng), u(rng), u(rng));
      const Eigen::Matrix3d J = jacobian(p, s);
      const long double h = 1e-7L;
      for (int c = 0; c < 3; ++c) {
        State<long double> a = s.cast<long double>(), b = a;
        a(c) += h;
        b(c) -= h;
        const State<long double> col = (vector_field(pl, a) - vector_field(pl, b)) / (2 * h);
        CHECK((col.cast<double>() - J.col(c)).cwiseAbs().maxCoeff() <= 1e-8);
      }
    }
  }

  TEST_CASE("faces of the cube are invariant and z_I always decreases") {
    const ModelParams p = reference_params(0.1);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      const double a = u(rng), b = u(rng);
      CHECK(vector_field(p, SystemState(0.0, a, b))(kY) == 0.0);
      CHECK(vector_field(p, SystemState(a, 0.0, b))(kZs) == 0.0);
      CHECK(vector_field(p, SystemState(a, 1.0, b))(kZs) == 0.0);
      CHECK(vector_field(p, SystemState(a, b, 0.0))(kZi) == 0.0);
      CHECK(vector_field(p, SystemState(a, b, 1.0))(kZi) == 0.0);
      CHECK(vector_field(p, SystemState(1.0, a, b))(kY) < 0.0);
      const double zi = 0.01 + 0.98 * u(rng);
      CHECK(vector_field(p, SystemState(a, b, zi))(kZi) < 0.0);
    }
  }

  TEST_CASE("parameter validation") {
    auto bad = [](auto mutate) {
      ParamValues<double> v = reference_values(0.1);
      mutate(v);
      return v;
    };
    CHECK_THROWS_AS(ModelParams(bad([](auto& v) { v.beta_p = 0.3; })), InvalidParameters);
    CHECK_THROWS_AS(ModelParams(bad([](auto& v) { v.beta_p = -0.1; })), InvalidParameters);
    CHECK_THROWS_AS(ModelParams(bad([](auto& v) { v.c_IP = 2.0; })), InvalidParameters);
    CHECK_THROWS_AS(ModelParams(bad([](auto& v) { v.alpha = 1.0; })), InvalidParameters);
    CHECK_THROWS_AS(ModelParams(bad([](auto& v) { v.alpha = 0.0; })), InvalidParameters);
    CHECK_THROWS_AS(ModelParams(bad([](auto& v) { v.c_P = 0.0; })), InvalidParameters);
    CHECK_THROWS_AS(ModelParams(bad([](auto& v) { v.L = -1.0; })), InvalidParameters);
    CHECK_THROWS_AS(ModelParams(bad([](auto& v) { v.gamma = 0.0; })), InvalidParameters);
    CHECK_THROWS_AS(ModelParams(bad([](auto& v) { v.L = std::numeric_limits<double>::infinity(); })),
                    InvalidParameters);
    CHECK_NOTHROW(ModelParams(bad([](auto& v) { v.beta_p = 0.0; })));
    CHECK_THROWS_AS(reference_params(0.1).with_gamma(-1.0), InvalidParameters);
  }

  TEST_CASE("unit cube membership") {
    CHECK(in_unit_cube(SystemState(0, 1, 0.5)));
    CHECK_FALSE(in_unit_cube(SystemState(-1e-9, 1, 0.5)));
    CHECK(in_unit_cube(SystemState(-1e-9, 1, 0.5), 1e-8));
  }
}
