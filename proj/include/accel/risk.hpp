#pragma once

#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "accel/errors.hpp"
#include "accel/numeric.hpp"
#include "accel/polynomials.hpp"
#include "accel/problem.hpp"

namespace accel {

/// Global constant in front of the excess-risk sums. `Half` matches
/// f(w) = 1/2 ||Xw - y||^2 exactly; `Unit` drops the 1/2.
enum class RiskScale { Half, Unit };

inline double risk_constant(RiskScale s) { return s == RiskScale::Half ? 0.5 : 1.0; }

/// f(w) - f(w*) = 1/2 (w - w*)^T H (w - w*).
inline double excess_risk_direct(const QuadraticProblem& problem, const Eigen::VectorXd& w) {
  problem.check_dim(w);
  const Eigen::VectorXd xi = w - problem.w_star;
  if (problem.representation == Representation::DenseMatrix) {
    return 0.5 * xi.dot(problem.hessian_apply(xi));
  }
  numeric::CompensatedSum s;
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    s.add(problem.hessian_eigenvalues(i) * xi(i) * xi(i));
  }
  return 0.5 * s.value();
}

/// Excess risk from eigen-components of w - w*: 1/2 sum lambda_i c_i^2.
inline double excess_risk_components(const QuadraticProblem& problem,
                                     const Eigen::VectorXd& components) {
  problem.check_dim(components);
  numeric::CompensatedSum s;
  for (Eigen::Index i = 0; i < components.size(); ++i) {
    s.add(problem.hessian_eigenvalues(i) * components(i) * components(i));
  }
  return 0.5 * s.value();
}

struct RiskTerm {
  double mu = 0.0;
  double hessian_eigenvalue = 0.0;
  double contribution = 0.0;
};

struct RiskBreakdown {
  std::vector<RiskTerm> terms;
  double total = 0.0;
};

/// Excess risk after k steps rebuilt from spectral data:
///   c * sum_i beta (1 - mu_i) P_k(mu_i)^2 (xi_0^(i))^2.
inline RiskBreakdown reconstruct(const QuadraticProblem& problem,
                                 const Eigen::VectorXd& xi0_components, Method method,
                                 const AccelParams& params, int k,
                                 RiskScale scale = RiskScale::Half) {
  if (xi0_components.size() != problem.dimension()) {
    throw DimensionError("initial components do not match the spectrum");
  }
  const Eigen::VectorXd mus = problem.mu();
  const double c = risk_constant(scale);
  RiskBreakdown out;
  out.terms.reserve(static_cast<std::size_t>(mus.size()));
  numeric::CompensatedSum total;
  for (Eigen::Index i = 0; i < mus.size(); ++i) {
    const double p = eval_closed({method, k, params}, mus(i));
    const double x = xi0_components(i);
    const double contrib = c * problem.beta * (1.0 - mus(i)) * p * p * x * x;
    out.terms.push_back({mus(i), problem.hessian_eigenvalues(i), contrib});
    total.add(contrib);
  }
  out.total = total.value();
  return out;
}

/// Rate of the expected excess risk under isotropic initialization:
///   sum (1 - mu_i) P_k(mu_i)^2 / sum (1 - mu_i).
inline double expected_excess_risk_rate(std::span<const double> mus, Method method,
                                        const AccelParams& params, int k) {
  if (mus.empty()) throw DomainError("spectrum is empty");
  numeric::CompensatedSum num;
  numeric::CompensatedSum den;
  for (double mu : mus) {
    const double p = eval_closed({method, k, params}, mu);
    num.add((1.0 - mu) * p * p);
    den.add(1.0 - mu);
  }
  if (den.value() <= 0.0) throw DegenerateError("every eigenvalue equals 1 (zero Hessian)");
  return num.value() / den.value();
}

inline std::string to_csv(const RiskBreakdown& b) {
  std::ostringstream os;
  os << "mu,hessian_eig,contribution\n";
  for (const auto& t : b.terms) {
    os << numeric::format_double(t.mu) << ',' << numeric::format_double(t.hessian_eigenvalue)
       << ',' << numeric::format_double(t.contribution) << '\n';
  }
  return os.str();
}

}  // namespace accel
