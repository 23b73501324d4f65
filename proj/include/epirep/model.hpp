#ifndef EPIREP_MODEL_HPP
#define EPIREP_MODEL_HPP

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <string>

#include "epirep/errors.hpp"

namespace epirep {

/**
 * Coupled SIS epidemic / replicator behavior model.
 *
 * The state is (y, z_S, z_I): infected fraction, unprotected fraction among
 * susceptibles and unprotected fraction among infected. All three live in
 * the unit cube, which the exact flow leaves invariant.
 */

template <typename Scalar>
using State = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Jacobian = Eigen::Matrix<Scalar, 3, 3>;

using SystemState = State<double>;
using Derivative = State<double>;

enum StateIndex : Eigen::Index { kY = 0, kZs = 1, kZi = 2 };

/// Raw, unvalidated parameter values. Plain aggregate for config plumbing.
template <typename Scalar>
struct ParamValues {
  Scalar c_P{};     ///< cost of adopting protection
  Scalar alpha{};   ///< infection-probability factor of a protected susceptible
  Scalar beta_u{};  ///< transmission rate of an unprotected infected
  Scalar beta_p{};  ///< transmission rate of a protected infected
  Scalar c_IU{};    ///< cost of an infected remaining unprotected
  Scalar c_IP{};    ///< cost of an infected adopting protection
  Scalar L{};       ///< loss upon infection
  Scalar gamma{};   ///< recovery rate
};

/// Validated model constants. Construction is the only place invariants are checked.
template <typename Scalar>
class BasicModelParams {
 public:
  explicit BasicModelParams(const ParamValues<Scalar>& v) : v_(v) { validate(v_); }

  Scalar c_P() const { return v_.c_P; }
  Scalar alpha() const { return v_.alpha; }
  Scalar beta_u() const { return v_.beta_u; }
  Scalar beta_p() const { return v_.beta_p; }
  Scalar c_IU() const { return v_.c_IU; }
  Scalar c_IP() const { return v_.c_IP; }
  Scalar L() const { return v_.L; }
  Scalar gamma() const { return v_.gamma; }

  const ParamValues<Scalar>& values() const { return v_; }

  BasicModelParams with_gamma(Scalar gamma) const {
    ParamValues<Scalar> v = v_;
    v.gamma = gamma;
    return BasicModelParams(v);
  }

  /// Constant payoff advantage of protection for infected individuals, c_IP - c_IU (< 0).
  Scalar infected_payoff_gap() const { return v_.c_IP - v_.c_IU; }

 private:
  static void validate(const ParamValues<Scalar>& v) {
    using std::isfinite;
    std::ostringstream why;
    const Scalar all[] = {v.c_P, v.alpha, v.beta_u, v.beta_p, v.c_IU, v.c_IP, v.L, v.gamma};
    for (Scalar x : all) {
      if (!isfinite(x)) {
        throw InvalidParameters("model parameters must be finite");
      }
    }
    if (!(v.beta_u > v.beta_p && v.beta_p >= Scalar(0))) why << " requires beta_u > beta_p >= 0;";
    if (!(v.c_IU > v.c_IP && v.c_IP >= Scalar(0))) why << " requires c_IU > c_IP >= 0;";
    if (!(v.alpha > Scalar(0) && v.alpha < Scalar(1))) why << " requires 0 < alpha < 1;";
    if (!(v.c_P > Scalar(0))) why << " requires c_P > 0;";
    if (!(v.L > Scalar(0))) why << " requires L > 0;";
    if (!(v.gamma > Scalar(0))) why << " requires gamma > 0;";
    const std::string msg = why.str();
    if (!msg.empty()) {
      throw InvalidParameters("invalid model parameters:" + msg.substr(0, msg.size() - 1));
    }
  }

  ParamValues<Scalar> v_;
};

using ModelParams = BasicModelParams<double>;

/// Reference parameter set; gamma is free.
inline ParamValues<double> reference_values(double gamma) {
  return ParamValues<double>{1.0, 0.5, 0.3, 0.15, 2.0, 1.0, 80.0, gamma};
}

inline ModelParams reference_params(double gamma) { return ModelParams(reference_values(gamma)); }

/// Infection rate weighted by the infected population's protection choice.
template <typename Scalar>
Scalar infectiousness(const BasicModelParams<Scalar>& p, Scalar z_I) {
  return p.beta_u() * z_I + p.beta_p() * (Scalar(1) - z_I);
}

/// Susceptibility weighted by the susceptible population's protection choice.
template <typename Scalar>
Scalar susceptibility(const BasicModelParams<Scalar>& p, Scalar z_S) {
  return z_S + p.alpha() * (Scalar(1) - z_S);
}

template <typename Scalar, typename Derived>
Scalar beta_eff(const BasicModelParams<Scalar>& p, const Eigen::MatrixBase<Derived>& s) {
  return susceptibility(p, Scalar(s(kZs))) * infectiousness(p, Scalar(s(kZi)));
}

/// Payoff advantage of staying unprotected over adopting protection for a susceptible.
template <typename Scalar, typename Derived>
Scalar delta_F(const BasicModelParams<Scalar>& p, const Eigen::MatrixBase<Derived>& s) {
  return p.c_P() - p.L() * (Scalar(1) - p.alpha()) * infectiousness(p, Scalar(s(kZi))) * s(kY);
}

template <typename Scalar, typename Derived>
State<Scalar> vector_field(const BasicModelParams<Scalar>& p, const Eigen::MatrixBase<Derived>& s) {
  const Scalar y = s(kY);
  const Scalar zs = s(kZs);
  const Scalar zi = s(kZi);
  State<Scalar> f;
  f(kY) = ((Scalar(1) - y) * susceptibility(p, zs) * infectiousness(p, zi) - p.gamma()) * y;
  f(kZs) = zs * (Scalar(1) - zs) * delta_F(p, s);
  f(kZi) = zi * (Scalar(1) - zi) * p.infected_payoff_gap();
  return f;
}

/// Analytic partial derivatives of the vector field, rows (f_y, f_S, f_I), columns (y, z_S, z_I).
template <typename Scalar, typename Derived>
Jacobian<Scalar> jacobian(const BasicModelParams<Scalar>& p, const Eigen::MatrixBase<Derived>& s) {
  const Scalar one(1);
  const Scalar y = s(kY);
  const Scalar zs = s(kZs);
  const Scalar zi = s(kZi);
  const Scalar sus = susceptibility(p, zs);
  const Scalar inf = infectiousness(p, zi);
  const Scalar dbeta = p.beta_u() - p.beta_p();
  const Scalar protect_gain = p.L() * (one - p.alpha());

  Jacobian<Scalar> J;
  J(0, 0) = (one - y) * sus * inf - p.gamma() - y * sus * inf;
  J(0, 1) = y * (one - y) * (one - p.alpha()) * inf;
  J(0, 2) = y * (one - y) * sus * dbeta;

  J(1, 0) = -zs * (one - zs) * protect_gain * inf;
  J(1, 1) = (one - Scalar(2) * zs) * (p.c_P() - protect_gain * inf * y);
  J(1, 2) = -zs * (one - zs) * protect_gain * dbeta * y;

  J(2, 0) = Scalar(0);
  J(2, 1) = Scalar(0);
  J(2, 2) = (one - Scalar(2) * zi) * p.infected_payoff_gap();
  return J;
}

template <typename Derived>
bool in_unit_cube(const Eigen::MatrixBase<Derived>& s, double slack = 0.0) {
  return (s.array() >= -slack).all() && (s.array() <= 1.0 + slack).all();
}

}  // namespace epirep

#endif  // EPIREP_MODEL_HPP
