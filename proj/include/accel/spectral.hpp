#pragma once

#include <cmath>
#include <string>

#include "accel/errors.hpp"
#include "accel/numeric.hpp"

namespace accel {

enum class Regime { StronglyConvex, Boundary, NonStronglyConvex };
enum class AngleKind { Trig, Hyperbolic, Degenerate };

/// Which normalized argument an angle is measured from: mu/rho (Chebyshev,
/// heavy ball) or sqrt(mu/rho) (Nesterov).
enum class AngleVariant { Linear, SquareRoot };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::StronglyConvex:
      return "strongly_convex";
    case Regime::Boundary:
      return "boundary";
    case Regime::NonStronglyConvex:
      return "non_strongly_convex";
  }
  return "?";
}

/// The acceleration parameter rho = 1 - 1/kappa together with every scalar
/// derived from it. Immutable once built.
///
///   cosh(delta)  = 1/rho          gamma_sor      = 2 / (1 + sqrt(1 - rho^2))
///   cosh(lambda) = 1/sqrt(rho)    gamma_nesterov = 2 / (1 + sqrt(1 - rho))
///   delta_tilde  = log((1 + e^{2 lambda}) / 2)
class AccelParams {
 public:
  static AccelParams from_rho(double rho, double beta = 1.0) {
    if (!(rho > 0.0 && rho < 1.0)) {
      throw DomainError("rho must lie in (0,1), got " + numeric::format_double(rho));
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
      throw DomainError("beta must be positive, got " + numeric::format_double(beta));
    }
    return AccelParams(rho, beta);
  }

  static AccelParams from_kappa(double kappa, double beta = 1.0) {
    if (!(kappa > 1.0) || !std::isfinite(kappa)) {
      throw DomainError("kappa must exceed 1, got " + numeric::format_double(kappa));
    }
    return from_rho(1.0 - 1.0 / kappa, beta);
  }

  [[nodiscard]] double rho() const { return rho_; }
  [[nodiscard]] double kappa() const { return 1.0 / (1.0 - rho_); }
  [[nodiscard]] double beta() const { return beta_; }
  [[nodiscard]] double eta() const { return 1.0 / beta_; }
  /// Strong convexity constant beta/kappa.
  [[nodiscard]] double alpha() const { return beta_ * (1.0 - rho_); }

  [[nodiscard]] double delta() const { return delta_; }
  [[nodiscard]] double lambda() const { return lambda_; }
  [[nodiscard]] double delta_tilde() const { return delta_tilde_; }
  [[nodiscard]] double tanh_delta() const { return tanh_delta_; }
  [[nodiscard]] double tanh_lambda() const { return tanh_lambda_; }
  [[nodiscard]] double gamma_sor() const { return gamma_sor_; }
  [[nodiscard]] double gamma_nesterov() const { return gamma_nesterov_; }
  /// Momentum weight (sqrt(kappa)-1)/(sqrt(kappa)+1) of the Nesterov scheme.
  [[nodiscard]] double nesterov_momentum() const { return gamma_nesterov_ - 1.0; }

  /// Half-width of the band around rho treated as the boundary point.
  [[nodiscard]] double boundary_tolerance() const { return 1e-9 * std::max(rho_, 1e-3); }

 private:
  AccelParams(double rho, double beta) : rho_(rho), beta_(beta) {
    const double s2 = std::sqrt((1.0 - rho) * (1.0 + rho));  // sqrt(1 - rho^2)
    const double s1 = std::sqrt(1.0 - rho);
    delta_ = std::log((1.0 + s2) / rho);
    lambda_ = std::log((1.0 + s1) / std::sqrt(rho));
    // (1 + e^{2 lambda}) / 2 with e^{lambda} = (1 + s1)/sqrt(rho)
    delta_tilde_ = std::log1p(0.5 * std::expm1(2.0 * lambda_));
    tanh_delta_ = s2;
    tanh_lambda_ = s1;
    gamma_sor_ = 2.0 / (1.0 + s2);
    gamma_nesterov_ = 2.0 / (1.0 + s1);
  }

  double rho_;
  double beta_;
  double delta_ = 0.0;
  double lambda_ = 0.0;
  double delta_tilde_ = 0.0;
  double tanh_delta_ = 0.0;
  double tanh_lambda_ = 0.0;
  double gamma_sor_ = 0.0;
  double gamma_nesterov_ = 0.0;
};

inline AccelParams accel_params(double rho, double beta = 1.0) {
  return AccelParams::from_rho(rho, beta);
}

/// An eigenvalue mu of B = I - eta X*X placed relative to rho.
struct SpectralPoint {
  double mu = 0.0;
  Regime regime = Regime::StronglyConvex;
  /// theta/psi (Trig), Theta/Psi (Hyperbolic) or 0 (Degenerate).
  double angle = 0.0;
  AngleKind angle_kind = AngleKind::Degenerate;
};

inline SpectralPoint classify(double mu, const AccelParams& params,
                              AngleVariant variant = AngleVariant::Linear) {
  if (!(mu >= 0.0 && mu <= 1.0)) {
    throw DomainError("mu must lie in [0,1], got " + numeric::format_double(mu));
  }
  const double rho = params.rho();
  SpectralPoint p;
  p.mu = mu;
  if (std::abs(mu - rho) <= params.boundary_tolerance()) {
    p.regime = Regime::Boundary;
    p.angle_kind = AngleKind::Degenerate;
    p.angle = 0.0;
    return p;
  }
  // t = |1 - x| with x = mu/rho, or its square-root counterpart.
  double t = std::abs(mu - rho) / rho;
  if (variant == AngleVariant::SquareRoot) t /= 1.0 + std::sqrt(mu / rho);
  if (mu < rho) {
    p.regime = Regime::StronglyConvex;
    p.angle_kind = AngleKind::Trig;
    p.angle = numeric::acos1m(std::min(t, 1.0));
  } else {
    p.regime = Regime::NonStronglyConvex;
    p.angle_kind = AngleKind::Hyperbolic;
    p.angle = numeric::acosh1p(t);
  }
  return p;
}

/// Maps a Hessian eigenvalue to the matching eigenvalue of B.
inline double mu_from_hessian(double mu_h, double beta) {
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  if (!(mu_h >= 0.0 && mu_h <= beta)) {
    throw DomainError("Hessian eigenvalue " + numeric::format_double(mu_h) +
                      " outside [0, beta]");
  }
  return 1.0 - mu_h / beta;
}

inline double hessian_from_mu(double mu, double beta) { return beta * (1.0 - mu); }

}  // namespace accel
