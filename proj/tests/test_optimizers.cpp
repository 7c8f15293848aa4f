#include <gtest/gtest.h>

#include <cmath>

#include "accel/optimizers.hpp"
#include "accel/problem.hpp"

using namespace accel;

namespace {

QuadraticProblem diag_problem(const std::vector<double>& mus, double beta, std::uint64_t seed) {
  SpectrumSpec s;
  s.kind = SpectrumKind::ExplicitList;
  for (double mu : mus) s.values.push_back(hessian_from_mu(mu, beta));
  s.beta = beta;
  s.seed = seed;
  return gen_spectrum(s);
}

QuadraticProblem random_problem(int d, std::uint64_t seed) {
  SpectrumSpec s;
  s.kind = SpectrumKind::Uniform;
  s.dimension = d;
  s.seed = seed;
  s.beta = 1.0;
  return gen_spectrum(s);
}

// Same spectrum with w* = 0, so the iterate is the error itself; tiny
// components then do not drown in the rounding of w - w*.
QuadraticProblem centered(const QuadraticProblem& p) {
  return make_spectral_problem(p.hessian_eigenvalues, p.beta, Eigen::VectorXd::Zero(p.dimension()),
                               p.w0 - p.w_star, p.provenance + " centered");
}

}  // namespace

TEST(MakeOptimizer, Seeds) {
  const QuadraticProblem p = random_problem(4, 1);
  const AccelParams prm = AccelParams::from_rho(0.8, p.beta);
  const OptimizerState c = make_optimizer(Method::Chebyshev, prm, p, p.w0);
  EXPECT_EQ(c.k, 0);
  EXPECT_EQ(c.gamma_next, 1.0);
  EXPECT_FALSE(c.w_prev.has_value());
  const OptimizerState n = make_optimizer(Method::Nesterov, prm, p, p.w0);
  EXPECT_EQ(n.u, p.w0);
  EXPECT_THROW(make_optimizer(Method::SOR, prm, p, Eigen::VectorXd::Zero(3)), DimensionError);
  EXPECT_THROW(make_optimizer(Method::SOR, AccelParams::from_rho(0.8, 2.0), p, p.w0), MismatchError);
}

TEST(MakeOptimizer, OptimumIsFixedPoint) {
  const QuadraticProblem p = random_problem(6, 2);
  for (Method m : kAllMethods) {
    const AccelParams prm = AccelParams::from_rho(0.9, p.beta);
    const Trajectory t = run(make_optimizer(m, prm, p, p.w_star), p, 30);
    for (const auto& r : t.records) {
      EXPECT_EQ(r.components.norm(), 0.0);
      EXPECT_EQ(r.excess_risk, 0.0);
    }
    EXPECT_EQ(consistency_check(t, p, m, prm), 0.0);
  }
}

TEST(Step, CounterAndPurity) {
  const QuadraticProblem p = random_problem(5, 3);
  const AccelParams prm = AccelParams::from_rho(0.7, p.beta);
  for (Method m : kAllMethods) {
    const OptimizerState s0 = make_optimizer(m, prm, p, p.w0);
    const OptimizerState s1 = step(s0, p);
    EXPECT_EQ(s0.k, 0);
    EXPECT_EQ(s1.k, 1);
    EXPECT_EQ(step(s1, p).k, 2);
    // first step is a plain gradient step for every method
    EXPECT_TRUE(s1.w_curr.isApprox(p.w0 - p.gradient(p.w0) / p.beta, 1e-14));
  }
}

TEST(Step, PowerOneDimensionalConvergesInOneStep) {
  const QuadraticProblem p = make_spectral_problem(Eigen::VectorXd::Constant(1, 3.0), 3.0,
                                                   Eigen::VectorXd::Constant(1, 2.0),
                                                   Eigen::VectorXd::Constant(1, -5.0), "1d");
  const OptimizerState s = step(make_optimizer(Method::Power, AccelParams::from_rho(0.5, 3.0), p, p.w0), p);
  EXPECT_EQ(s.w_curr(0), 2.0);
}

TEST(Step, SorUpdateRule) {
  const QuadraticProblem p = random_problem(4, 4);
  const AccelParams prm = AccelParams::from_rho(0.8, p.beta);
  EXPECT_DOUBLE_EQ(prm.gamma_sor(), 1.25);
  OptimizerState s = make_optimizer(Method::SOR, prm, p, p.w0);
  advance(s, p);
  const Eigen::VectorXd w0 = p.w0;
  const Eigen::VectorXd w1 = s.w_curr;
  advance(s, p);
  const double g = 1.25;
  const Eigen::VectorXd want = w1 - g / p.beta * p.gradient(w1) + (g - 1.0) * (w1 - w0);
  EXPECT_TRUE(s.w_curr.isApprox(want, 1e-14));
  EXPECT_EQ(*s.w_prev, w1);
}

TEST(Step, ChebyshevUsesSchedule) {
  const QuadraticProblem p = random_problem(3, 5);
  const AccelParams prm = AccelParams::from_rho(0.8, p.beta);
  OptimizerState s = make_optimizer(Method::Chebyshev, prm, p, p.w0);
  const GammaSchedule g = gamma_schedule(0.8, 6);
  for (int j = 1; j <= 5; ++j) {
    EXPECT_NEAR(s.gamma_next, g.at(j), 1e-15);
    advance(s, p);
  }
}

TEST(Step, NesterovMomentum) {
  const AccelParams prm = AccelParams::from_kappa(5.0);
  EXPECT_NEAR(prm.nesterov_momentum(), (std::sqrt(5.0) - 1) / (std::sqrt(5.0) + 1), 1e-15);
  EXPECT_NEAR(prm.nesterov_momentum(), 0.381966, 1e-6);
  const QuadraticProblem p = random_problem(3, 6);
  OptimizerState s = make_optimizer(Method::Nesterov, prm, p, p.w0);
  advance(s, p);
  const Eigen::VectorXd w1 = s.w_curr;
  const Eigen::VectorXd u1 = s.u;
  EXPECT_TRUE(u1.isApprox(w1 + prm.nesterov_momentum() * (w1 - p.w0), 1e-14));
  advance(s, p);
  EXPECT_TRUE(s.w_curr.isApprox(u1 - p.gradient(u1) / p.beta, 1e-14));
}

TEST(Step, NonFiniteIsReported) {
  QuadraticProblem p = random_problem(3, 7);
  Eigen::VectorXd w = p.w0;
  w(1) = INFINITY;
  OptimizerState s = make_optimizer(Method::SOR, AccelParams::from_rho(0.5, p.beta), p, w);
  EXPECT_THROW(advance(s, p), NonFiniteError);
}

TEST(Run, Lengths) {
  const QuadraticProblem p = random_problem(3, 8);
  const AccelParams prm = AccelParams::from_rho(0.5, p.beta);
  const Trajectory t0 = run(make_optimizer(Method::SOR, prm, p, p.w0), p, 0);
  ASSERT_EQ(t0.records.size(), 1u);
  EXPECT_EQ(t0.records[0].k, 0);
  EXPECT_EQ(run(make_optimizer(Method::SOR, prm, p, p.w0), p, 17).records.size(), 18u);
  EXPECT_THROW(run(make_optimizer(Method::SOR, prm, p, p.w0), p, -1), DomainError);
}

TEST(Run, PowerDiagonalExact) {
  const QuadraticProblem p = diag_problem({0.25, 0.5, 0.75}, 1.0, 9);
  const AccelParams prm = AccelParams::from_rho(0.5, 1.0);
  const Trajectory t = run(make_optimizer(Method::Power, prm, p, p.w0), p, 20);
  const Eigen::VectorXd xi0 = p.w0 - p.w_star;
  const Eigen::VectorXd mus = p.mu();
  for (const auto& r : t.records) {
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(r.components(i), std::pow(mus(i), r.k) * xi0(i), 1e-15 * std::abs(xi0(i)));
    }
  }
}

TEST(Consistency, DiagonalWithMisspecifiedRho) {
  const QuadraticProblem p = diag_problem({0.0, 0.2, 0.5, 0.8, 0.95}, 1.0, 10);
  const AccelParams prm = AccelParams::from_rho(0.8, 1.0);
  for (Method m : kAllMethods) {
    const Trajectory t = run(make_optimizer(m, prm, p, p.w0), p, 50);
    EXPECT_LE(consistency_check(t, p, m, prm), 1e-9) << to_string(m);
  }
}

TEST(Consistency, RandomDenseAndSpectral) {
  for (int i = 0; i < 20; ++i) {
    QuadraticProblem p = random_problem(2 + (i * 7) % 49, 100 + i);
    if (i % 2) p = rotated(p, 200 + i);
    for (double rho : {0.5, 0.8, 0.95}) {
      const AccelParams prm = AccelParams::from_rho(rho, p.beta);
      for (Method m : kAllMethods) {
        const Trajectory t = run(make_optimizer(m, prm, p, p.w0), p, 100);
        EXPECT_LE(consistency_check(t, p, m, prm), 1e-8) << i << " " << rho << " " << to_string(m);
      }
    }
  }
}

TEST(Consistency, ChebyshevD20) {
  const QuadraticProblem p = random_problem(20, 11);
  const AccelParams prm = AccelParams::from_rho(0.9, p.beta);
  const Trajectory t = run(make_optimizer(Method::Chebyshev, prm, p, p.w0), p, 100);
  EXPECT_LE(consistency_check(t, p, Method::Chebyshev, prm), 1e-8);
}

TEST(Consistency, Mismatch) {
  const QuadraticProblem p = random_problem(4, 12);
  const AccelParams prm = AccelParams::from_rho(0.8, p.beta);
  const Trajectory t = run(make_optimizer(Method::SOR, prm, p, p.w0), p, 5);
  EXPECT_THROW(consistency_check(t, p, Method::Nesterov, prm), MismatchError);
  EXPECT_THROW(consistency_check(t, p, Method::SOR, AccelParams::from_rho(0.7, p.beta)), MismatchError);
  const QuadraticProblem q = random_problem(5, 12);
  EXPECT_THROW(consistency_check(t, q, Method::SOR, AccelParams::from_rho(0.8, q.beta)), MismatchError);
}

TEST(DenseVsSpectral, SameIterates) {
  const QuadraticProblem p = random_problem(8, 13);
  const QuadraticProblem d = to_dense(p);
  const Eigen::VectorXd w = p.w0 * 0.3;
  EXPECT_TRUE(p.gradient(w).isApprox(d.gradient(w), 1e-13));
  for (Method m : kAllMethods) {
    const AccelParams prm = AccelParams::from_rho(0.85, p.beta);
    const Trajectory a = run(make_optimizer(m, prm, p, p.w0), p, 40);
    const Trajectory b = run(make_optimizer(m, prm, d, d.w0), d, 40);
    for (std::size_t k = 0; k < a.records.size(); ++k) {
      EXPECT_LE((a.records[k].components - b.records[k].components).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_NEAR(a.records[k].excess_risk, b.records[k].excess_risk,
                  1e-10 * std::max(1.0, a.records[k].excess_risk));
    }
  }
}

TEST(WorstCase, Examples) {
  const AccelParams p = AccelParams::from_rho(0.8);
  const WorstCaseProbe c = worst_case_probe(Method::Chebyshev, p, 2);
  EXPECT_NEAR(c.achieved / c.initial, 0.22145328719723184, 1e-10 * 0.2214);
  const WorstCaseProbe w = worst_case_probe(Method::Power, p, 3);
  EXPECT_NEAR(w.achieved / w.initial, 0.262144, 1e-10 * 0.262144);
  const WorstCaseProbe s = worst_case_probe(Method::SOR, p, 2);
  EXPECT_NEAR(s.achieved / s.initial, 0.3025, 1e-10 * 0.3025);
  const WorstCaseProbe n = worst_case_probe(Method::Nesterov, p, 2);
  EXPECT_NEAR(n.achieved / n.initial, 0.3351083505599865, 1e-10 * 0.335);
  EXPECT_THROW(worst_case_probe(Method::SOR, p, 0), DomainError);
}

TEST(WorstCase, EqualityAcrossGrid) {
  for (double rho : {0.5, 0.8, 0.95}) {
    for (double beta : {1.0, 4.0}) {
      const AccelParams p = AccelParams::from_rho(rho, beta);
      for (Method m : kAllMethods) {
        for (int k : {1, 2, 5, 20, 60}) {
          const WorstCaseProbe r = worst_case_probe(m, p, k);
          EXPECT_NEAR(r.achieved, r.bound, 1e-10 * r.bound) << to_string(m) << " k=" << k;
        }
      }
    }
  }
}

TEST(WorstCase, BoundHoldsBelowRho) {
  SpectrumSpec s;
  s.kind = SpectrumKind::Uniform;
  s.dimension = 30;
  s.lower = 0.2;  // mu = 1 - lambda in [0, 0.8]
  s.seed = 14;
  s.beta = 1.0;
  const QuadraticProblem p = centered(gen_spectrum(s));
  const AccelParams prm = AccelParams::from_rho(0.8, 1.0);
  for (Method m : kAllMethods) {
    const Trajectory t = run(make_optimizer(m, prm, p, p.w0), p, 60);
    const double initial = t.records[0].excess_risk;
    for (const auto& r : t.records) {
      if (r.k == 0) continue;
      const double ch = cheb_number_closed(m, r.k, prm).value;
      EXPECT_LE(r.excess_risk, ch * ch * initial * (1.0 + 1e-10)) << to_string(m) << " k=" << r.k;
    }
  }
}

TEST(Misspecified, ExponentialDecayAboveRho) {
  const double rho = 0.5;
  const QuadraticProblem p = centered(diag_problem({0.6, 0.75, 0.9, 0.99}, 1.0, 15));
  const AccelParams prm = AccelParams::from_rho(rho, 1.0);
  const Eigen::VectorXd mus = p.mu();
  for (Method m : kAcceleratedMethods) {
    const Trajectory t = run(make_optimizer(m, prm, p, p.w0), p, 500);
    const Eigen::VectorXd xi0 = t.records[0].components;
    for (Eigen::Index i = 0; i < mus.size(); ++i) {
      const double d = 0.5 * admissible_delta_bound(m, prm, mus(i));
      double worst = 0.0;
      for (const auto& r : t.records) {
        worst = std::max(worst, std::abs(r.components(i)) * std::exp(r.k * d) / std::abs(xi0(i)));
      }
      // bounded by a constant, and the tail keeps shrinking
      EXPECT_LT(worst, 10.0) << to_string(m) << " mu=" << mus(i);
      const double tail = std::abs(t.records[500].components(i)) * std::exp(500 * d) / std::abs(xi0(i));
      const double mid = std::abs(t.records[250].components(i)) * std::exp(250 * d) / std::abs(xi0(i));
      EXPECT_LT(tail, mid);
    }
  }
}

TEST(Misspecified, FasterThanGradientDescent) {
  const double rho = 0.8;
  const QuadraticProblem p = centered(diag_problem({0.81, 0.85, 0.9, 0.97, 0.999}, 1.0, 16));
  const AccelParams prm = AccelParams::from_rho(rho, 1.0);
  const Eigen::VectorXd mus = p.mu();
  for (Method m : kAcceleratedMethods) {
    const Trajectory t = run(make_optimizer(m, prm, p, p.w0), p, 50);
    const Eigen::VectorXd xi0 = t.records[0].components;
    for (const auto& r : t.records) {
      if (r.k < 2) continue;
      for (Eigen::Index i = 0; i < mus.size(); ++i) {
        EXPECT_LT(std::abs(r.components(i)), std::pow(mus(i), r.k) * std::abs(xi0(i)))
            << to_string(m) << " k=" << r.k << " mu=" << mus(i);
      }
    }
  }
}
