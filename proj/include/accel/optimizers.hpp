#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "accel/chebyshev_numbers.hpp"
#include "accel/errors.hpp"
#include "accel/polynomials.hpp"
#include "accel/problem.hpp"
#include "accel/risk.hpp"
#include "accel/spectral.hpp"

namespace accel {

/// Iterate of one of the four schemes.
struct OptimizerState {
  Method method = Method::Power;
  AccelParams params = AccelParams::from_rho(0.5);
  int k = 0;
  Eigen::VectorXd w_curr;
  /// w_{k-1}; absent at k = 0.
  std::optional<Eigen::VectorXd> w_prev;
  /// Nesterov look-ahead point u_k.
  Eigen::VectorXd u;
  /// Chebyshev gamma_{k+1} used by the next step.
  double gamma_next = 1.0;
};

inline OptimizerState make_optimizer(Method method, const AccelParams& params,
                                     const QuadraticProblem& problem, const Eigen::VectorXd& w0) {
  problem.check_dim(w0);
  if (std::abs(params.beta() - problem.beta) > 1e-12 * problem.beta) {
    throw MismatchError("parameter beta does not match the problem's smoothness constant");
  }
  OptimizerState s;
  s.method = method;
  s.params = params;
  s.k = 0;
  s.w_curr = w0;
  if (method == Method::Nesterov) s.u = w0;
  s.gamma_next = 1.0;
  return s;
}

/// In-place version of step().
inline void advance(OptimizerState& s, const QuadraticProblem& problem) {
  const double eta = s.params.eta();
  Eigen::VectorXd next;
  switch (s.method) {
    case Method::Power:
      next = s.w_curr - eta * problem.gradient(s.w_curr);
      break;
    case Method::Chebyshev: {
      const double g = s.gamma_next;
      next = s.w_curr - g * eta * problem.gradient(s.w_curr);
      // gamma_1 = 1 multiplies the momentum term by zero, w_{-1} is never read
      if (s.k > 0) next += (g - 1.0) * (s.w_curr - *s.w_prev);
      s.gamma_next = next_chebyshev_gamma(s.params.rho(), s.k + 1, g);
      break;
    }
    case Method::SOR: {
      if (s.k == 0) {
        next = s.w_curr - eta * problem.gradient(s.w_curr);
      } else {
        const double g = s.params.gamma_sor();
        next = s.w_curr - g * eta * problem.gradient(s.w_curr) + (g - 1.0) * (s.w_curr - *s.w_prev);
      }
      break;
    }
    case Method::Nesterov: {
      next = s.u - eta * problem.gradient(s.u);
      const double g = s.params.gamma_nesterov();
      // momentum form keeps the optimum an exact fixed point
      s.u = next + (g - 1.0) * (next - s.w_curr);
      break;
    }
  }
  if (!next.allFinite()) throw NonFiniteError("iterate became non-finite at k=" + std::to_string(s.k + 1));
  s.w_prev = std::move(s.w_curr);
  s.w_curr = std::move(next);
  ++s.k;
}

inline OptimizerState step(OptimizerState state, const QuadraticProblem& problem) {
  advance(state, problem);
  return state;
}

struct StepRecord {
  int k = 0;
  /// xi_k^(i) = <w_k - w*, e_i>.
  Eigen::VectorXd components;
  double excess_risk = 0.0;
};

struct Trajectory {
  Method method = Method::Power;
  AccelParams params = AccelParams::from_rho(0.5);
  std::vector<StepRecord> records;
};

inline Trajectory run(OptimizerState state, const QuadraticProblem& problem, int k) {
  if (k < 0) throw DomainError("iteration count must be non-negative");
  Trajectory t;
  t.method = state.method;
  t.params = state.params;
  t.records.reserve(static_cast<std::size_t>(k) + 1);
  auto record = [&] {
    t.records.push_back({state.k, problem.to_components(state.w_curr - problem.w_star),
                         excess_risk_direct(problem, state.w_curr)});
  };
  record();
  for (int i = 0; i < k; ++i) {
    advance(state, problem);
    record();
  }
  return t;
}

/// max over (k, i) of |xi_k^(i) - P_k(mu_i) xi_0^(i)| / max(|xi_0^(i)|, 1e-300).
inline double consistency_check(const Trajectory& traj, const QuadraticProblem& problem,
                                Method method, const AccelParams& params) {
  if (traj.method != method) throw MismatchError("trajectory was produced by another method");
  if (traj.params.rho() != params.rho() || traj.params.beta() != params.beta()) {
    throw MismatchError("trajectory was produced with other parameters");
  }
  if (traj.records.empty()) return 0.0;
  const Eigen::VectorXd& xi0 = traj.records.front().components;
  if (xi0.size() != problem.dimension()) throw MismatchError("trajectory dimension mismatch");
  const Eigen::VectorXd mus = problem.mu();
  double worst = 0.0;
  for (const auto& rec : traj.records) {
    for (Eigen::Index i = 0; i < mus.size(); ++i) {
      const double predicted = eval_closed({method, rec.k, params}, mus(i)) * xi0(i);
      const double dev = std::abs(rec.components(i) - predicted) / std::max(std::abs(xi0(i)), 1e-300);
      worst = std::max(worst, dev);
    }
  }
  return worst;
}

struct WorstCaseProbe {
  double bound = 0.0;     // Ch^2(P_k) * initial excess risk
  double achieved = 0.0;  // excess risk after k steps
  double initial = 0.0;
};

/// Runs k steps on the one-dimensional problem whose only eigenvalue of B
/// is rho, the slowest case for every method. w* = 0 and w0 = 1, so the
/// iterate is the error itself and no cancellation hides tiny risks.
inline WorstCaseProbe worst_case_probe(Method method, const AccelParams& params, int k) {
  if (k < 1) throw DomainError("probe needs k >= 1");
  const QuadraticProblem p = make_spectral_problem(
      Eigen::VectorXd::Constant(1, hessian_from_mu(params.rho(), params.beta())), params.beta(),
      Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1), "worst-case probe");
  OptimizerState s = make_optimizer(method, params, p, p.w0);
  const double initial = excess_risk_direct(p, s.w_curr);
  for (int i = 0; i < k; ++i) advance(s, p);
  const double ch = std::exp(log_cheb_number(method, k, params));
  return {ch * ch * initial, excess_risk_direct(p, s.w_curr), initial};
}

}  // namespace accel
