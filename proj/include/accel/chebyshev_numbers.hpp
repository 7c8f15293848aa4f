#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "accel/errors.hpp"
#include "accel/numeric.hpp"
#include "accel/polynomials.hpp"
#include "accel/report.hpp"
#include "accel/spectral.hpp"

namespace accel {

/// Worst-case rate max_{mu in [0,rho]} |P_k(mu)| and where it is attained.
struct ChebyshevNumber {
  Method method = Method::Power;
  int k = 0;
  double rho = 0.0;
  double value = 0.0;
  double argmax_mu = 0.0;
};

/// log of the Chebyshev number from its closed-form expression.
inline double log_cheb_number(Method method, int k, const AccelParams& p) {
  const double kd = static_cast<double>(k);
  switch (method) {
    case Method::Power:
      return kd * std::log(p.rho());
    case Method::Chebyshev:
      return -numeric::log_cosh(kd * p.delta());
    case Method::SOR:
      return -kd * p.delta() + std::log(kd * p.tanh_delta() + 1.0);
    case Method::Nesterov:
      return 0.5 * kd * std::log(p.rho()) - kd * p.lambda() + std::log(kd * p.tanh_lambda() + 1.0);
  }
  return 0.0;
}

inline ChebyshevNumber cheb_number_closed(Method method, int k, const AccelParams& params) {
  if (k < 1) throw DomainError("Chebyshev number needs k >= 1");
  // every degree-one residual polynomial is mu itself; skip the log round trip
  if (k == 1) return {method, 1, params.rho(), params.rho(), params.rho()};
  return {method, k, params.rho(), std::exp(log_cheb_number(method, k, params)), params.rho()};
}

/// Brute-force maximum of |P_k| over n evenly spaced points of [0, rho],
/// endpoints included. The reported argmax is the largest grid point whose
/// value ties the maximum to 1e-12 relative.
inline ChebyshevNumber cheb_number_grid(Method method, int k, const AccelParams& params,
                                        std::size_t n) {
  if (n < 2) throw DomainError("grid needs at least 2 points");
  if (k < 1) throw DomainError("Chebyshev number needs k >= 1");
  const MethodPolynomial poly{method, k, params};
  const double rho = params.rho();
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mu =
        (i + 1 == n) ? rho : rho * static_cast<double>(i) / static_cast<double>(n - 1);
    values[i] = std::abs(eval_closed(poly, mu));
  }
  const double best = *std::max_element(values.begin(), values.end());
  std::size_t arg = 0;
  for (std::size_t i = n; i-- > 0;) {
    if (values[i] >= best * (1.0 - 1e-12)) {
      arg = i;
      break;
    }
  }
  const double arg_mu =
      (arg + 1 == n) ? rho : rho * static_cast<double>(arg) / static_cast<double>(n - 1);
  return {method, k, rho, best, arg_mu};
}

/// First-order expansion of the Chebyshev number at rho = 1 - eps.
inline double asymptotic_cheb(Method method, int k, double eps) {
  if (k < 1) throw DomainError("asymptotic rate needs k >= 1");
  if (!(eps > 0.0 && eps < 0.1)) throw DomainError("asymptotic rate needs 0 < eps < 0.1");
  const double kd = static_cast<double>(k);
  switch (method) {
    case Method::Power:
      return 1.0 - kd * eps;
    case Method::Chebyshev:
    case Method::SOR:
      return 1.0 - kd * kd * eps;
    case Method::Nesterov:
      return 1.0 - 0.5 * (kd * kd + kd) * eps;
  }
  return 0.0;
}

/// Worst-case ordering 0 < Ch(P*) <= Ch(R) <= Ch(N) <= rho^k < 1.
/// Strict for k >= 2. At k = 1 every method reduces to P_1(mu) = mu, so the
/// four numbers must coincide with rho instead.
inline TheoremReport check_ordering(int k, const AccelParams& params) {
  if (k < 1) throw DomainError("ordering needs k >= 1");
  ReportBuilder b("thm4", "k=" + std::to_string(k) + " rho=" + numeric::format_double(params.rho()));
  const double cheb = cheb_number_closed(Method::Chebyshev, k, params).value;
  const double sor = cheb_number_closed(Method::SOR, k, params).value;
  const double nes = cheb_number_closed(Method::Nesterov, k, params).value;
  const double pow = cheb_number_closed(Method::Power, k, params).value;
  std::map<std::string, double> ctx{{"k", k}, {"rho", params.rho()}, {"chebyshev", cheb},
                                    {"sor", sor}, {"nesterov", nes}, {"power", pow}};
  b.strict_less(0.0, cheb, "0 < Ch(chebyshev)", ctx);
  b.strict_less(pow, 1.0, "Ch(power) < 1", ctx);
  if (k >= 2) {
    b.strict_less(cheb, sor, "Ch(chebyshev) < Ch(sor)", ctx);
    b.strict_less(sor, nes, "Ch(sor) < Ch(nesterov)", ctx);
    b.strict_less(nes, pow, "Ch(nesterov) < Ch(power)", ctx);
  } else {
    const double tol = 1e-14 * params.rho();
    b.within(std::abs(cheb - params.rho()), tol, "Ch_1(chebyshev) = rho", ctx);
    b.within(std::abs(sor - params.rho()), tol, "Ch_1(sor) = rho", ctx);
    b.within(std::abs(nes - params.rho()), tol, "Ch_1(nesterov) = rho", ctx);
    b.within(std::abs(pow - params.rho()), tol, "Ch_1(power) = rho", ctx);
  }
  return b.finish();
}

/// Largest delta for which e^{k delta} P_k(mu) -> 0 is claimed.
inline double admissible_delta_bound(Method method, const AccelParams& params, double mu) {
  detail::check_mu(mu);
  if (method == Method::Power) {
    return mu == 0.0 ? std::numeric_limits<double>::infinity() : -std::log(mu);
  }
  const bool nes = method == Method::Nesterov;
  const SpectralPoint p =
      classify(mu, params, nes ? AngleVariant::SquareRoot : AngleVariant::Linear);
  if (p.regime != Regime::NonStronglyConvex) return nes ? params.delta_tilde() : params.delta();
  return nes ? params.lambda() - p.angle : params.delta() - p.angle;
}

enum class Growth { Decays, Diverges, Bounded };

inline const char* to_string(Growth g) {
  switch (g) {
    case Growth::Decays:
      return "decays";
    case Growth::Diverges:
      return "diverges";
    case Growth::Bounded:
      return "bounded";
  }
  return "?";
}

/// Asymptotic behaviour of s_k = e^{k delta} |P_k(mu)| read off k <= k_max.
///
/// Over the upper half of the range the oscillation envelope
/// W_k = max_{k <= j < k + w} s_j (w at least one period of the trig angle)
/// is fitted by log W_k = c0 + a log k - c k. The sequence decays when c > 0
/// (or c ~ 0 with a < 0) and grows without bound when c < 0 (or c ~ 0 with
/// a > 0).
struct GrowthEvidence {
  Growth verdict = Growth::Bounded;
  double fitted_rate = 0.0;   // c
  double fitted_power = 0.0;  // a
  double s_first = 0.0;
  double s_last = 0.0;
  bool tail_increasing = false;  // last 10 values strictly increasing
  int window = 1;
};

inline GrowthEvidence measure_growth(Method method, const AccelParams& params, double mu,
                                     double delta, int k_max) {
  detail::check_mu(mu);
  if (!(delta >= 0.0)) throw DomainError("delta must be non-negative");
  if (k_max < 32) throw DomainError("rate certificate needs k_max >= 32");
  std::vector<double> log_s(static_cast<std::size_t>(k_max) + 1);
  for (int k = 1; k <= k_max; ++k) {
    const LogValue v = eval_closed_log({method, k, params}, mu);
    log_s[static_cast<std::size_t>(k)] =
        v.sign == 0 ? -std::numeric_limits<double>::infinity() : k * delta + v.log_abs;
  }
  GrowthEvidence ev;
  ev.s_first = std::exp(log_s[1]);
  ev.s_last = std::exp(log_s[static_cast<std::size_t>(k_max)]);
  ev.tail_increasing = true;
  for (int k = k_max - 9; k <= k_max; ++k) {
    if (!(log_s[static_cast<std::size_t>(k)] > log_s[static_cast<std::size_t>(k - 1)])) {
      ev.tail_increasing = false;
    }
  }

  int window = 1;
  if (method != Method::Power) {
    const SpectralPoint p = classify(
        mu, params, method == Method::Nesterov ? AngleVariant::SquareRoot : AngleVariant::Linear);
    if (p.angle_kind == AngleKind::Trig) {
      window = static_cast<int>(std::ceil(2.0 * numeric::kPi / p.angle)) + 1;
      window = std::clamp(window, 1, k_max / 8);
    }
  } else if (mu == 0.0) {
    window = 1;
  }
  ev.window = window;

  const int k0 = k_max / 2;
  const int k_end = k_max - window + 1;
  std::vector<double> ks;
  std::vector<double> ys;
  for (int k = k0; k <= k_end; ++k) {
    double w = -std::numeric_limits<double>::infinity();
    for (int j = k; j < k + window; ++j) w = std::max(w, log_s[static_cast<std::size_t>(j)]);
    if (std::isfinite(w)) {
      ks.push_back(k);
      ys.push_back(w);
    }
  }
  if (ks.size() < 8) {
    // Identically zero tail: the iterate has converged exactly.
    ev.verdict = Growth::Decays;
    ev.fitted_rate = std::numeric_limits<double>::infinity();
    return ev;
  }
  const Eigen::Index m = static_cast<Eigen::Index>(ks.size());
  Eigen::MatrixXd design(m, 3);
  Eigen::VectorXd rhs(m);
  const double kref = k0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double k = ks[static_cast<std::size_t>(i)];
    design(i, 0) = 1.0;
    design(i, 1) = std::log(k / kref);
    design(i, 2) = (k - kref) / kref;
    rhs(i) = ys[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
  ev.fitted_power = coef(1);
  ev.fitted_rate = -coef(2) / kref;

  constexpr double kRateTol = 1e-6;
  constexpr double kPowerTol = 0.5;
  if (ev.fitted_rate > kRateTol) {
    ev.verdict = Growth::Decays;
  } else if (ev.fitted_rate < -kRateTol) {
    ev.verdict = Growth::Diverges;
  } else if (ev.fitted_power > kPowerTol) {
    ev.verdict = Growth::Diverges;
  } else if (ev.fitted_power < -kPowerTol) {
    ev.verdict = Growth::Decays;
  } else {
    ev.verdict = Growth::Bounded;
  }
  // Divergence must also be visible at the end of the computed range.
  if (ev.verdict == Growth::Diverges && !ev.tail_increasing && window == 1) {
    ev.verdict = Growth::Bounded;
  }
  return ev;
}

/// Certificate that s_k = e^{k delta}|P_k(mu)| behaves as `expected`.
inline TheoremReport rate_certificate(Method method, const AccelParams& params, double mu,
                                      double delta, int k_max,
                                      Growth expected = Growth::Decays) {
  const GrowthEvidence ev = measure_growth(method, params, mu, delta, k_max);
  ReportBuilder b("rate", std::string("method=") + to_string(method) +
                              " rho=" + numeric::format_double(params.rho()) +
                              " mu=" + numeric::format_double(mu) +
                              " delta=" + numeric::format_double(delta) +
                              " k_max=" + std::to_string(k_max));
  b.require(ev.verdict == expected, std::string("expected ") + to_string(expected),
            {{"rho", params.rho()},
             {"mu", mu},
             {"delta", delta},
             {"admissible_bound", admissible_delta_bound(method, params, mu)},
             {"fitted_rate", ev.fitted_rate},
             {"fitted_power", ev.fitted_power},
             {"s_first", ev.s_first},
             {"s_last", ev.s_last},
             {"verdict", static_cast<double>(ev.verdict)}});
  return b.finish();
}

/// Pointwise ordering on mu in (rho, 1):
///   0 < P*_k < R_k < mu^k < 1   and   0 < N_k < mu^k.
inline TheoremReport compare_nonstrong(int k, const AccelParams& params,
                                       std::span<const double> mu_grid) {
  if (k < 2) throw DomainError("strict comparison needs k >= 2");
  ReportBuilder b("thm9", "k=" + std::to_string(k) + " rho=" + numeric::format_double(params.rho()) +
                              " points=" + std::to_string(mu_grid.size()));
  for (double mu : mu_grid) {
    if (!(mu > params.rho() && mu < 1.0)) {
      throw DomainError("grid point " + numeric::format_double(mu) + " not inside (rho,1)");
    }
    const double cheb = eval_closed({Method::Chebyshev, k, params}, mu);
    const double sor = eval_closed({Method::SOR, k, params}, mu);
    const double nes = eval_closed({Method::Nesterov, k, params}, mu);
    const double pow = eval_closed({Method::Power, k, params}, mu);
    const std::map<std::string, double> ctx{{"k", k}, {"rho", params.rho()}, {"mu", mu}};
    b.strict_less(0.0, cheb, "0 < P*", ctx);
    b.strict_less(cheb, sor, "P* < R", ctx);
    b.strict_less(sor, pow, "R < mu^k", ctx);
    b.strict_less(pow, 1.0, "mu^k < 1", ctx);
    b.strict_less(0.0, nes, "0 < N", ctx);
    b.strict_less(nes, pow, "N < mu^k", ctx);
  }
  return b.finish();
}

/// Effect of the acceleration parameter: for rho1 < rho2 each accelerated
/// method has Ch_{rho1}(P^[1]) < Ch_{rho2}(P^[2]) and P^[1](mu) > P^[2](mu)
/// for every grid mu in (rho2, 1) (other grid points are skipped).
inline TheoremReport param_effect(int k, double rho1, double rho2,
                                  std::span<const double> mu_grid) {
  if (!(rho1 > 0.0 && rho1 < rho2 && rho2 < 1.0)) throw DomainError("need 0 < rho1 < rho2 < 1");
  if (k < 2) throw DomainError("parameter comparison needs k > 1");
  const AccelParams p1 = AccelParams::from_rho(rho1);
  const AccelParams p2 = AccelParams::from_rho(rho2);
  ReportBuilder b("thm10", "k=" + std::to_string(k) + " rho1=" + numeric::format_double(rho1) +
                               " rho2=" + numeric::format_double(rho2));
  for (Method m : kAcceleratedMethods) {
    const std::map<std::string, double> ctx{
        {"k", k}, {"rho1", rho1}, {"rho2", rho2}, {"method", static_cast<double>(m)}};
    b.strict_less(cheb_number_closed(m, k, p1).value, cheb_number_closed(m, k, p2).value,
                  std::string("Ch_rho1 < Ch_rho2 ") + to_string(m), ctx);
    for (double mu : mu_grid) {
      if (!(mu > rho2 && mu < 1.0)) continue;
      auto c = ctx;
      c["mu"] = mu;
      b.strict_less(eval_closed({m, k, p2}, mu), eval_closed({m, k, p1}, mu),
                    std::string("P^[2] < P^[1] above rho2 ") + to_string(m), c);
    }
  }
  return b.finish();
}

/// Ch^2(P_k) / exp(-k/sqrt(kappa)). Bounded by (k+1)^2 for every method of
/// the accelerated class.
inline double corollary_rate(Method method, const AccelParams& params, int k) {
  if (k < 1) throw DomainError("corollary rate needs k >= 1");
  if (method == Method::Power) throw DomainError("corollary rate covers accelerated methods only");
  const double log_ch = log_cheb_number(method, k, params);
  return std::exp(2.0 * log_ch + k / std::sqrt(params.kappa()));
}

}  // namespace accel
