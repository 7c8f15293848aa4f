#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "accel/chebyshev_numbers.hpp"
#include "accel/numeric.hpp"
#include "accel/optimizers.hpp"
#include "accel/polynomials.hpp"
#include "accel/problem.hpp"
#include "accel/report.hpp"

namespace accel::verify {

/// Grids scanned by the theorem suites.
struct SuiteConfig {
  unsigned threads = 0;  // 0 = hardware concurrency
  std::vector<double> oracle_rhos{0.5, 0.8, 0.85, 0.95, 0.99};
  int oracle_k_max = 100;
  std::size_t oracle_mu_points = 101;

  std::vector<double> cheb_rhos{0.5, 0.8, 0.85, 0.95};
  int thm3_k_max = 50;
  std::size_t thm3_grid = 100000;

  std::vector<double> ordering_rhos{0.5, 0.8, 0.85, 0.95, 0.99};
  int thm4_k_max = 100;

  int thm5_k_max = 10;
  std::vector<double> thm5_eps{1e-2, 1e-3, 1e-4};

  std::vector<double> rate_rhos{0.5, 0.8, 0.85, 0.95};
  std::vector<double> rate_fractions{0.5, 0.9, 0.99};
  int rate_k_max = 500;

  std::vector<double> thm9_rhos{0.5, 0.85, 0.95};
  int thm9_k_max = 50;
  std::size_t thm9_points = 1000;

  std::vector<std::pair<double, double>> thm10_pairs{{0.5, 0.8}, {0.85, 0.92}};
  int thm10_k_max = 20;
  std::size_t thm10_points = 1000;

  int lemma1_k_max = 50;
  std::size_t lemma1_points = 10000;

  int consistency_problems = 20;
  int consistency_k = 100;
  std::vector<double> consistency_rhos{0.5, 0.8, 0.95};
};

namespace detail {

inline std::string join(const std::vector<double>& xs) {
  std::string s = "{";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ",";
    s += numeric::format_double(xs[i]);
  }
  return s + "}";
}

/// Points strictly inside (lo, hi): lo + (hi - lo) j/(n+1), j = 1..n.
inline std::vector<double> open_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t j = 0; j < n; ++j) {
    g[j] = lo + (hi - lo) * static_cast<double>(j + 1) / static_cast<double>(n + 1);
  }
  return g;
}

template <class Cell>
TheoremReport merge_cells(ReportBuilder b, std::size_t cells, unsigned threads, Cell&& cell) {
  std::vector<TheoremReport> parts(cells);
  numeric::parallel_for(cells, threads, [&](std::size_t i) { parts[i] = cell(i); });
  for (const auto& p : parts) b.merge(p);
  return b.finish();
}

}  // namespace detail

/// Closed forms against the scalar recurrences.
inline TheoremReport oracle(const SuiteConfig& c = {}) {
  ReportBuilder b("oracle",
                  "rho=" + detail::join(c.oracle_rhos) + " k=1.." + std::to_string(c.oracle_k_max) +
                      " mu=" + std::to_string(c.oracle_mu_points) + " points on [0,1], all methods");
  const auto mus = numeric::linspace(0.0, 1.0, c.oracle_mu_points);
  const std::size_t cells = c.oracle_rhos.size() * kAllMethods.size();
  return detail::merge_cells(std::move(b), cells, c.threads, [&](std::size_t cell) {
    const AccelParams p = AccelParams::from_rho(c.oracle_rhos[cell / kAllMethods.size()]);
    const Method m = kAllMethods[cell % kAllMethods.size()];
    ReportBuilder part("oracle", "");
    double worst = 0.0;
    std::map<std::string, double> at;
    for (int k = 1; k <= c.oracle_k_max; ++k) {
      for (double mu : mus) {
        const MethodPolynomial poly{m, k, p};
        const double closed = eval_closed(poly, mu);
        const double rec = eval_recurrence(poly, mu);
        const double dev = std::abs(closed - rec) / std::max(1.0, std::abs(rec));
        if (dev > worst || at.empty()) {
          worst = std::max(worst, dev);
          at = {{"rho", p.rho()}, {"k", k}, {"mu", mu}, {"method", static_cast<double>(m)},
                {"closed", closed}, {"recurrence", rec}};
        }
      }
    }
    part.within(worst, 1e-8, std::string("closed vs recurrence ") + to_string(m), at);
    return part.finish();
  });
}

/// Grid Chebyshev number equals the closed form, maximum attained at rho.
inline TheoremReport thm3(const SuiteConfig& c = {}) {
  ReportBuilder b("thm3",
                  "rho=" + detail::join(c.cheb_rhos) + " k=1.." + std::to_string(c.thm3_k_max) +
                      " grid=" + std::to_string(c.thm3_grid) + " points on [0,rho], all methods");
  const std::size_t per_rho = kAllMethods.size() * static_cast<std::size_t>(c.thm3_k_max);
  const std::size_t cells = c.cheb_rhos.size() * per_rho;
  return detail::merge_cells(std::move(b), cells, c.threads, [&](std::size_t cell) {
    const AccelParams p = AccelParams::from_rho(c.cheb_rhos[cell / per_rho]);
    const std::size_t rest = cell % per_rho;
    const Method m = kAllMethods[rest / static_cast<std::size_t>(c.thm3_k_max)];
    const int k = static_cast<int>(rest % static_cast<std::size_t>(c.thm3_k_max)) + 1;
    const ChebyshevNumber closed = cheb_number_closed(m, k, p);
    const ChebyshevNumber grid = cheb_number_grid(m, k, p, c.thm3_grid);
    const std::map<std::string, double> ctx{{"rho", p.rho()},
                                            {"k", k},
                                            {"method", static_cast<double>(m)},
                                            {"closed", closed.value},
                                            {"grid", grid.value},
                                            {"argmax", grid.argmax_mu}};
    ReportBuilder part("thm3", "");
    part.within(std::abs(grid.value - closed.value) / closed.value, 1e-12, "grid == closed", ctx);
    part.require(grid.argmax_mu == p.rho(), "argmax == rho", ctx);
    return part.finish();
  });
}

/// Worst-case ordering for every k, plus the exp(-k/sqrt(kappa)) bound.
inline TheoremReport thm4(const SuiteConfig& c = {}) {
  ReportBuilder b("thm4",
                  "rho=" + detail::join(c.ordering_rhos) + " k=1.." +
                      std::to_string(c.thm4_k_max) +
                      " (strict k>=2, equality to rho at k=1); corollary ratio <= (k+1)^2");
  for (double rho : c.ordering_rhos) {
    const AccelParams p = AccelParams::from_rho(rho);
    for (int k = 1; k <= c.thm4_k_max; ++k) {
      b.merge(check_ordering(k, p));
      for (Method m : kAcceleratedMethods) {
        const double ratio = corollary_rate(m, p, k);
        b.within(ratio, (k + 1.0) * (k + 1.0), std::string("corollary ratio ") + to_string(m),
                 {{"rho", rho}, {"k", k}});
      }
    }
  }
  return b.finish();
}

/// First-order expansions: |closed - asymptotic| / eps shrinks with eps.
inline TheoremReport thm5(const SuiteConfig& c = {}) {
  ReportBuilder b("thm5", "eps=" + detail::join(c.thm5_eps) + " k=1.." +
                              std::to_string(c.thm5_k_max) + ", all methods");
  for (Method m : kAllMethods) {
    for (int k = 1; k <= c.thm5_k_max; ++k) {
      std::vector<double> r;
      for (double eps : c.thm5_eps) {
        const double closed = cheb_number_closed(m, k, AccelParams::from_rho(1.0 - eps)).value;
        r.push_back(std::abs(closed - asymptotic_cheb(m, k, eps)) / eps);
      }
      // A residual at rounding level means the expansion is exact (k = 1).
      const bool exact = std::all_of(r.begin(), r.end(), [](double x) { return x <= 1e-10; });
      for (std::size_t i = 1; i < r.size(); ++i) {
        const std::map<std::string, double> ctx{{"k", k},
                                                {"method", static_cast<double>(m)},
                                                {"eps_prev", c.thm5_eps[i - 1]},
                                                {"eps", c.thm5_eps[i]}};
        if (exact) {
          b.within(r[i], 1e-10, std::string("exact expansion ") + to_string(m), ctx);
        } else {
          b.strict_less(r[i], r[i - 1], std::string("residual/eps decreasing ") + to_string(m), ctx);
        }
      }
    }
  }
  return b.finish();
}

namespace detail {

inline TheoremReport decay_suite(const SuiteConfig& c, const std::string& id, bool strongly) {
  ReportBuilder b(id, std::string("rho=") + join(c.rate_rhos) + " mu=" +
                          (strongly ? "{0, rho/2, rho}" : "{(rho+1)/2, 0.99}") +
                          " delta=" + join(c.rate_fractions) + " x bound, k_max=" +
                          std::to_string(c.rate_k_max) + ", accelerated methods");
  std::vector<std::tuple<Method, double, double, double>> cases;
  for (double rho : c.rate_rhos) {
    std::vector<double> mus = strongly ? std::vector<double>{0.0, rho / 2.0, rho}
                                       : std::vector<double>{(rho + 1.0) / 2.0, 0.99};
    for (double mu : mus) {
      if (!strongly && !(mu > rho)) continue;
      for (Method m : kAcceleratedMethods) {
        for (double f : c.rate_fractions) cases.emplace_back(m, rho, mu, f);
      }
    }
  }
  return merge_cells(std::move(b), cases.size(), c.threads, [&](std::size_t i) {
    const auto [m, rho, mu, f] = cases[i];
    const AccelParams p = AccelParams::from_rho(rho);
    const double delta = f * admissible_delta_bound(m, p, mu);
    return rate_certificate(m, p, mu, delta, c.rate_k_max, Growth::Decays);
  });
}

}  // namespace detail

/// Exponential decay in the strongly convex regime.
inline TheoremReport thm6(const SuiteConfig& c = {}) { return detail::decay_suite(c, "thm6", true); }

/// Nesterov at mu = rho blows up for delta in [delta_tilde, delta).
inline TheoremReport thm7(const SuiteConfig& c = {}) {
  ReportBuilder b("thm7", "rho=" + detail::join(c.rate_rhos) +
                              " mu=rho delta={delta_tilde, (delta_tilde+delta)/2, 0.999 delta} k_max=" +
                              std::to_string(c.rate_k_max) + ", nesterov");
  for (double rho : c.rate_rhos) {
    const AccelParams p = AccelParams::from_rho(rho);
    for (double delta : {p.delta_tilde(), 0.5 * (p.delta_tilde() + p.delta()), 0.999 * p.delta()}) {
      b.merge(rate_certificate(Method::Nesterov, p, rho, delta, c.rate_k_max, Growth::Diverges));
    }
  }
  return b.finish();
}

/// Exponential decay in the non-strongly convex regime.
inline TheoremReport thm8(const SuiteConfig& c = {}) { return detail::decay_suite(c, "thm8", false); }

/// Pointwise ordering against gradient descent above rho.
inline TheoremReport thm9(const SuiteConfig& c = {}) {
  ReportBuilder b("thm9", "rho=" + detail::join(c.thm9_rhos) + " k=2.." +
                              std::to_string(c.thm9_k_max) + " mu=" + std::to_string(c.thm9_points) +
                              " interior points of (rho,1)");
  for (double rho : c.thm9_rhos) {
    const AccelParams p = AccelParams::from_rho(rho);
    const auto grid = detail::open_grid(rho, 1.0, c.thm9_points);
    for (int k = 2; k <= c.thm9_k_max; ++k) b.merge(compare_nonstrong(k, p, grid));
  }
  return b.finish();
}

/// Effect of rho, plus monotonicity of every Chebyshev number in rho.
inline TheoremReport thm10(const SuiteConfig& c = {}) {
  ReportBuilder b("thm10", "pairs={(0.5,0.8),(0.85,0.92)} k=2.." + std::to_string(c.thm10_k_max) +
                               " mu=" + std::to_string(c.thm10_points) +
                               " points in (rho2,1); Ch monotone on 99-point rho grid");
  for (const auto& [r1, r2] : c.thm10_pairs) {
    const auto grid = detail::open_grid(r2, 1.0, c.thm10_points);
    for (int k = 2; k <= c.thm10_k_max; ++k) b.merge(param_effect(k, r1, r2, grid));
  }
  const auto rho_grid = detail::open_grid(0.0, 1.0, 99);
  for (Method m : kAllMethods) {
    for (int k = 2; k <= c.thm10_k_max; ++k) {
      for (std::size_t i = 1; i < rho_grid.size(); ++i) {
        b.strict_less(cheb_number_closed(m, k, AccelParams::from_rho(rho_grid[i - 1])).value,
                      cheb_number_closed(m, k, AccelParams::from_rho(rho_grid[i])).value,
                      std::string("Ch increasing in rho ") + to_string(m),
                      {{"k", k}, {"rho", rho_grid[i]}});
      }
    }
  }
  return b.finish();
}

inline TheoremReport lemma1(const SuiteConfig& c = {}) {
  ReportBuilder b("lemma1", "k=1.." + std::to_string(c.lemma1_k_max) + " theta=" +
                                std::to_string(c.lemma1_points) + " points on [0, pi/2]");
  const auto grid = numeric::linspace(0.0, numeric::kPi / 2.0, c.lemma1_points);
  for (int k = 1; k <= c.lemma1_k_max; ++k) {
    b.within(lemma1_check(k, grid), 1e-12, "|sin k t| <= k sin t", {{"k", k}});
  }
  return b.finish();
}

/// The seeded random problems behind the iterate/polynomial suite.
/// Even seeds stay spectral, odd seeds are rotated into a dense basis.
inline QuadraticProblem consistency_problem(int index) {
  SpectrumSpec spec;
  spec.kind = SpectrumKind::Uniform;
  spec.dimension = 2 + (index * 7) % 49;
  spec.seed = 1000 + static_cast<std::uint64_t>(index);
  spec.beta = 1.0;
  QuadraticProblem p = gen_spectrum(spec);
  if (index % 2 == 1) p = rotated(p, 5000 + static_cast<std::uint64_t>(index));
  return p;
}

/// Weight-space iterates reproduce P_k(mu_i) xi_0^(i) in every eigen-direction.
inline TheoremReport consistency(const SuiteConfig& c = {}) {
  ReportBuilder b("consistency",
                  std::to_string(c.consistency_problems) +
                      " seeded problems (d<=50, mu uniform in [0,1]), rho=" +
                      detail::join(c.consistency_rhos) +
                      " k<=" + std::to_string(c.consistency_k) + ", all methods");
  const std::size_t per_problem = c.consistency_rhos.size() * kAllMethods.size();
  const std::size_t cells = static_cast<std::size_t>(c.consistency_problems) * per_problem;
  return detail::merge_cells(std::move(b), cells, c.threads, [&](std::size_t cell) {
    const int index = static_cast<int>(cell / per_problem);
    const std::size_t rest = cell % per_problem;
    const double rho = c.consistency_rhos[rest / kAllMethods.size()];
    const Method m = kAllMethods[rest % kAllMethods.size()];
    const QuadraticProblem prob = consistency_problem(index);
    const AccelParams p = AccelParams::from_rho(rho, prob.beta);
    const Trajectory t = run(make_optimizer(m, p, prob, prob.w0), prob, c.consistency_k);
    ReportBuilder part("consistency", "");
    part.within(consistency_check(t, prob, m, p), 1e-8,
                std::string("iterates vs polynomial ") + to_string(m),
                {{"problem", index}, {"dimension", static_cast<double>(prob.dimension())},
                 {"rho", rho}});
    return part.finish();
  });
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"thm3", "thm4", "thm5",   "thm6",   "thm7",       "thm8",
                                              "thm9", "thm10", "lemma1", "oracle", "consistency"};
  return names;
}

/// Runs one named suite; "all" is handled by the caller.
inline std::optional<TheoremReport> run_suite(std::string_view name, const SuiteConfig& c = {}) {
  if (name == "thm3") return thm3(c);
  if (name == "thm4") return thm4(c);
  if (name == "thm5") return thm5(c);
  if (name == "thm6") return thm6(c);
  if (name == "thm7") return thm7(c);
  if (name == "thm8") return thm8(c);
  if (name == "thm9") return thm9(c);
  if (name == "thm10") return thm10(c);
  if (name == "lemma1") return lemma1(c);
  if (name == "oracle") return oracle(c);
  if (name == "consistency") return consistency(c);
  return std::nullopt;
}

}  // namespace accel::verify
