#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "accel/errors.hpp"
#include "accel/numeric.hpp"
#include "accel/spectral.hpp"

namespace accel {

/// Plain gradient descent (the power method) and the three members of the
/// accelerated class.
enum class Method { Power, Chebyshev, SOR, Nesterov };

inline constexpr std::array<Method, 4> kAllMethods = {Method::Power, Method::Chebyshev,
                                                      Method::SOR, Method::Nesterov};
inline constexpr std::array<Method, 3> kAcceleratedMethods = {Method::Chebyshev, Method::SOR,
                                                              Method::Nesterov};

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Power:
      return "power";
    case Method::Chebyshev:
      return "chebyshev";
    case Method::SOR:
      return "sor";
    case Method::Nesterov:
      return "nesterov";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (name == to_string(m)) return m;
  }
  if (name == "gd" || name == "gradient_descent") return Method::Power;
  if (name == "heavy_ball" || name == "richardson") return Method::SOR;
  if (name == "agd") return Method::Nesterov;
  return std::nullopt;
}

/// Residual polynomial of `method` after k iterations, P_k(1) = 1.
struct MethodPolynomial {
  Method method = Method::Power;
  int k = 0;
  AccelParams params = AccelParams::from_rho(0.5);
};

/// sign * exp(log_abs); sign == 0 encodes an exact zero.
struct LogValue {
  double log_abs = 0.0;
  int sign = 1;

  [[nodiscard]] double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
  static LogValue zero() { return {-std::numeric_limits<double>::infinity(), 0}; }
};

enum class ChebyshevMode { ClosedForm, Recurrence };

/// Chebyshev polynomial of the first kind. Total on the reals.
inline double chebyshev_C(int k, double x, ChebyshevMode mode = ChebyshevMode::ClosedForm) {
  if (k < 0) throw DomainError("Chebyshev degree must be non-negative");
  if (mode == ChebyshevMode::Recurrence) {
    if (k == 0) return 1.0;
    double prev = 1.0;
    double curr = x;
    for (int j = 1; j < k; ++j) {
      const double next = 2.0 * x * curr - prev;
      prev = curr;
      curr = next;
    }
    return curr;
  }
  if (std::abs(x) <= 1.0) return std::cos(k * std::acos(x));
  if (x > 1.0) return std::cosh(k * std::acosh(x));
  const double mag = std::cosh(k * std::acosh(-x));
  return (k % 2 == 0) ? mag : -mag;
}

struct GammaSchedule {
  /// values[j - 1] holds gamma_j.
  std::vector<double> values;

  [[nodiscard]] double at(int j) const { return values.at(static_cast<std::size_t>(j - 1)); }
  [[nodiscard]] std::size_t size() const { return values.size(); }
};

/// gamma_{j+1} following gamma_j for the Chebyshev semi-iterative update.
inline double next_chebyshev_gamma(double rho, int j, double gamma_j) {
  if (j == 1) return 2.0 / (2.0 - rho * rho);
  return 1.0 / (1.0 - rho * rho * gamma_j / 4.0);
}

inline GammaSchedule gamma_schedule(double rho, int k) {
  if (k < 1) throw DomainError("gamma schedule needs k >= 1");
  GammaSchedule s;
  s.values.reserve(static_cast<std::size_t>(k));
  double g = 1.0;
  s.values.push_back(g);
  for (int j = 1; j < k; ++j) {
    g = next_chebyshev_gamma(rho, j, g);
    s.values.push_back(g);
  }
  return s;
}

namespace detail {

inline void check_mu(double mu) {
  if (!(mu >= 0.0 && mu <= 1.0)) {
    throw DomainError("mu must lie in [0,1], got " + numeric::format_double(mu));
  }
}

inline LogValue from_bracket(double log_prefix, double bracket) {
  if (bracket == 0.0) return LogValue::zero();
  return {log_prefix + std::log(std::abs(bracket)), bracket > 0 ? 1 : -1};
}

// Shared shape of the heavy-ball and Nesterov closed forms:
//   e^{-k A} (tanh A cot a sin ka + cos ka)        a = trig angle
//   e^{-k A} (k tanh A + 1)                        boundary
//   e^{-k A} (tanh A coth b sinh kb + cosh kb)     b = hyperbolic angle
// `ratio` is cos a (resp. cosh b), known exactly from mu and rho.
inline LogValue momentum_branch(int k, double big_angle, double tanh_big, const SpectralPoint& p,
                                double ratio) {
  const double kd = static_cast<double>(k);
  switch (p.angle_kind) {
    case AngleKind::Degenerate:
      return {-kd * big_angle + std::log(kd * tanh_big + 1.0), 1};
    case AngleKind::Trig: {
      const double a = p.angle;
      const double bracket = tanh_big * (ratio / std::sin(a)) * std::sin(kd * a) + std::cos(kd * a);
      return from_bracket(-kd * big_angle, bracket);
    }
    case AngleKind::Hyperbolic: {
      const double b = p.angle;
      const double decay = std::exp(-2.0 * kd * b);
      // sinh kb = e^{kb}(1 - e^{-2kb})/2, cosh kb = e^{kb}(1 + e^{-2kb})/2
      const double bracket =
          0.5 * (tanh_big * (ratio / std::sinh(b)) * (-std::expm1(-2.0 * kd * b)) + 1.0 + decay);
      return from_bracket(kd * (b - big_angle), bracket);
    }
  }
  return LogValue::zero();
}

}  // namespace detail

/// Closed-form residual polynomial in log-magnitude form. Never overflows.
inline LogValue eval_closed_log(const MethodPolynomial& poly, double mu) {
  detail::check_mu(mu);
  if (poly.k < 0) throw DomainError("degree must be non-negative");
  if (poly.k == 0) return {0.0, 1};
  const double kd = static_cast<double>(poly.k);
  const AccelParams& prm = poly.params;
  const double rho = prm.rho();
  switch (poly.method) {
    case Method::Power:
      if (mu == 0.0) return LogValue::zero();
      return {kd * std::log(mu), 1};
    case Method::Chebyshev: {
      const SpectralPoint p = classify(mu, prm, AngleVariant::Linear);
      const double denom = numeric::log_cosh(kd * prm.delta());
      switch (p.angle_kind) {
        case AngleKind::Degenerate:
          return {-denom, 1};
        case AngleKind::Trig:
          return detail::from_bracket(-denom, std::cos(kd * p.angle));
        case AngleKind::Hyperbolic:
          return {kd * (p.angle - prm.delta()) + std::log1p(std::exp(-2.0 * kd * p.angle)) -
                      std::log1p(std::exp(-2.0 * kd * prm.delta())),
                  1};
      }
      break;
    }
    case Method::SOR: {
      const SpectralPoint p = classify(mu, prm, AngleVariant::Linear);
      return detail::momentum_branch(poly.k, prm.delta(), prm.tanh_delta(), p, mu / rho);
    }
    case Method::Nesterov: {
      if (mu == 0.0) return LogValue::zero();
      const SpectralPoint p = classify(mu, prm, AngleVariant::SquareRoot);
      const double base = (p.angle_kind == AngleKind::Degenerate) ? rho : mu;
      LogValue v =
          detail::momentum_branch(poly.k, prm.lambda(), prm.tanh_lambda(), p, std::sqrt(mu / rho));
      if (v.sign != 0) v.log_abs += 0.5 * kd * std::log(base);
      return v;
    }
  }
  return LogValue::zero();
}

/// Closed-form value of the residual polynomial at mu in [0,1].
inline double eval_closed(const MethodPolynomial& poly, double mu) {
  return eval_closed_log(poly, mu).value();
}

/// Scalar three-term recurrence of each method, run from p_0 = 1, p_1 = mu.
/// Independent of the closed forms; O(k) time, two carries.
inline double eval_recurrence(const MethodPolynomial& poly, double mu) {
  detail::check_mu(mu);
  if (poly.k < 0) throw DomainError("degree must be non-negative");
  if (poly.k == 0) return 1.0;
  const double rho = poly.params.rho();
  const double g_sor = poly.params.gamma_sor();
  const double g_nes = poly.params.gamma_nesterov();
  double prev = 1.0;
  double curr = mu;
  double gamma = 1.0;  // gamma_1
  for (int j = 1; j < poly.k; ++j) {
    double next = 0.0;
    switch (poly.method) {
      case Method::Power:
        next = mu * curr;
        break;
      case Method::Chebyshev:
        gamma = next_chebyshev_gamma(rho, j, gamma);
        next = gamma * mu * curr + (1.0 - gamma) * prev;
        break;
      case Method::SOR:
        next = g_sor * mu * curr + (1.0 - g_sor) * prev;
        break;
      case Method::Nesterov:
        next = g_nes * mu * curr + (1.0 - g_nes) * mu * prev;
        break;
    }
    prev = curr;
    curr = next;
  }
  return curr;
}

enum class AuxVariant { SOR, Nesterov };

/// Auxiliary polynomials Q_k used to solve the heavy-ball and Nesterov
/// recurrences: Q_0 = 1, Q_1 = g x,
///   Q_{k+1} = g x Q_k + (1 - g) Q_{k-1}        (SOR, g = gamma)
///   Q_{k+1} = g x Q_k + (1 - g) x Q_{k-1}      (Nesterov, g = gamma')
inline double aux_Q(int k, double rho, double x, AuxVariant variant) {
  if (k < 0) throw DomainError("degree must be non-negative");
  detail::check_mu(x);
  const AccelParams prm = AccelParams::from_rho(rho);
  if (k == 0) return 1.0;
  const double kd = static_cast<double>(k);
  const bool nes = variant == AuxVariant::Nesterov;
  if (nes && x == 0.0) return 0.0;
  const SpectralPoint p = classify(x, prm, nes ? AngleVariant::SquareRoot : AngleVariant::Linear);
  // (gamma - 1)^{1/2} = e^{-delta}, (gamma' - 1)^{1/2} = e^{-lambda}
  double log_prefix = -kd * (nes ? prm.lambda() : prm.delta());
  if (nes) log_prefix += 0.5 * kd * std::log(x);
  double bracket = 0.0;
  switch (p.angle_kind) {
    case AngleKind::Degenerate:
      bracket = kd + 1.0;
      break;
    case AngleKind::Trig:
      bracket = std::sin((kd + 1.0) * p.angle) / std::sin(p.angle);
      break;
    case AngleKind::Hyperbolic: {
      const double b = p.angle;
      log_prefix += (kd + 1.0) * b;
      bracket = -std::expm1(-2.0 * (kd + 1.0) * b) / (2.0 * std::sinh(b));
      break;
    }
  }
  return detail::from_bracket(log_prefix, bracket).value();
}

/// max over the grid of |sin k theta| - k sin theta. Non-positive when the
/// inequality |sin k theta| <= k sin theta holds everywhere on the grid.
inline double lemma1_check(int k, std::span<const double> theta_grid) {
  if (k < 1) throw DomainError("lemma check needs k >= 1");
  double worst = -std::numeric_limits<double>::infinity();
  for (double t : theta_grid) {
    worst = std::max(worst, std::abs(std::sin(k * t)) - k * std::sin(t));
  }
  return worst;
}

inline double lemma1_check(int k, std::size_t grid_points) {
  const auto grid = numeric::linspace(0.0, numeric::kPi / 2.0, grid_points);
  return lemma1_check(k, grid);
}

}  // namespace accel
