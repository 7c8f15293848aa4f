// accel: curves | run | verify | chebnum
#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "accel/accel.hpp"

namespace {

using accel::Method;
using accel::numeric::format_double;

struct UsageError : accel::Error {
  using accel::Error::Error;
};

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  if (names.empty()) return {accel::kAllMethods.begin(), accel::kAllMethods.end()};
  std::vector<bool> seen(accel::kAllMethods.size(), false);
  for (const auto& n : names) {
    if (n == "all") {
      seen.assign(seen.size(), true);
      continue;
    }
    auto m = accel::parse_method(n);
    if (!m) throw UsageError("unknown method: " + n);
    seen[static_cast<std::size_t>(*m)] = true;
  }
  // canonical order regardless of how they were given
  std::vector<Method> out;
  for (Method m : accel::kAllMethods) {
    if (seen[static_cast<std::size_t>(m)]) out.push_back(m);
  }
  return out;
}

std::vector<double> sorted_unique(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

// "a:b" or "a"
std::pair<int, int> parse_range(const std::string& s) {
  auto to_int = [&](const std::string& t) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(t, &used);
    } catch (const std::exception&) {
      throw UsageError("bad k range: " + s);
    }
    if (used != t.size()) throw UsageError("bad k range: " + s);
    return v;
  };
  const auto colon = s.find(':');
  if (colon == std::string::npos) {
    const int v = to_int(s);
    return {v, v};
  }
  const int lo = to_int(s.substr(0, colon));
  const int hi = to_int(s.substr(colon + 1));
  if (hi < lo) throw UsageError("empty k range: " + s);
  return {lo, hi};
}

// Writes to --out when given, stdout otherwise.
void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw accel::IoError("cannot write " + out);
  f << text;
  if (!f) throw accel::IoError("write failed: " + out);
}

struct CurvesArgs {
  std::vector<double> rhos;
  int k = 6;
  std::vector<std::string> methods;
  std::size_t grid = 1001;
  double mu_min = 0.0;
  double mu_max = 1.0;
  std::string out;
};

std::string cmd_curves(const CurvesArgs& a, unsigned threads) {
  if (a.grid < 2) throw UsageError("--grid must be at least 2");
  if (!(a.mu_min >= 0.0 && a.mu_max <= 1.0 && a.mu_min < a.mu_max)) {
    throw UsageError("mu range must satisfy 0 <= mu-min < mu-max <= 1");
  }
  if (a.rhos.empty()) throw UsageError("--rho is required");
  const auto methods = parse_methods(a.methods);
  std::ostringstream os;
  os << "mu,method,k,rho,value\n";
  for (double rho : sorted_unique(a.rhos)) {
    const accel::AccelParams p = accel::AccelParams::from_rho(rho);
    std::vector<double> mus = accel::numeric::linspace(a.mu_min, a.mu_max, a.grid);
    // the boundary point itself is always sampled
    if (rho >= a.mu_min && rho <= a.mu_max) mus.push_back(rho);
    mus = sorted_unique(std::move(mus));
    std::vector<double> values(mus.size() * methods.size());
    accel::numeric::parallel_for(mus.size(), threads, [&](std::size_t i) {
      for (std::size_t j = 0; j < methods.size(); ++j) {
        values[i * methods.size() + j] = accel::eval_closed({methods[j], a.k, p}, mus[i]);
      }
    });
    bool marked = false;
    for (std::size_t i = 0; i < mus.size(); ++i) {
      if (!marked && mus[i] >= rho) {
        os << "# boundary mu=" << format_double(rho) << "\n";
        marked = true;
      }
      for (std::size_t j = 0; j < methods.size(); ++j) {
        os << format_double(mus[i]) << ',' << accel::to_string(methods[j]) << ',' << a.k << ','
           << format_double(rho) << ',' << format_double(values[i * methods.size() + j]) << "\n";
      }
    }
  }
  return os.str();
}

struct RunArgs {
  std::string method = "chebyshev";
  std::string rho = "auto";
  int k = 100;
  std::string matrix;
  std::string vector;
  std::string spectrum = "uniform";
  int dim = 10;
  std::uint64_t seed = 0;
  double ratio = 0.5;
  std::vector<double> values;
  std::optional<double> beta;
  std::string start = "sampled";
  std::string out;
};

accel::QuadraticProblem build_problem(const RunArgs& a) {
  if (!a.matrix.empty()) {
    std::optional<std::string> vec;
    if (!a.vector.empty()) vec = a.vector;
    return accel::load_matrix(a.matrix, vec, a.beta);
  }
  auto kind = accel::parse_spectrum_kind(a.spectrum);
  if (!kind) throw UsageError("unknown spectrum kind: " + a.spectrum);
  accel::SpectrumSpec spec;
  spec.kind = *kind;
  spec.dimension = a.dim;
  spec.seed = a.seed;
  spec.decay_ratio = a.ratio;
  spec.values = a.values;
  spec.beta = a.beta;
  return accel::gen_spectrum(spec);
}

std::string cmd_run(const RunArgs& a) {
  auto method = accel::parse_method(a.method);
  if (!method) throw UsageError("unknown method: " + a.method);
  if (a.k < 0) throw UsageError("--k must be non-negative");
  const accel::QuadraticProblem prob = build_problem(a);

  double rho = 0.0;
  if (a.rho == "auto") {
    rho = prob.auto_rho();
    if (!(rho > 0.0)) throw accel::DegenerateError("auto rho is 0 (kappa = 1); pass --rho");
  } else {
    try {
      std::size_t used = 0;
      rho = std::stod(a.rho, &used);
      if (used != a.rho.size()) throw UsageError("bad --rho: " + a.rho);
    } catch (const std::logic_error&) {
      throw UsageError("bad --rho: " + a.rho);
    }
  }
  const accel::AccelParams params = accel::AccelParams::from_rho(rho, prob.beta);

  Eigen::VectorXd w0;
  if (a.start == "zero") {
    w0 = Eigen::VectorXd::Zero(prob.dimension());
  } else if (a.start == "optimum") {
    w0 = prob.w_star;
  } else if (a.start == "sampled") {
    w0 = prob.w0;
  } else {
    throw UsageError("--start must be zero, optimum or sampled");
  }

  const accel::Trajectory t =
      accel::run(accel::make_optimizer(*method, params, prob, w0), prob, a.k);
  const Eigen::VectorXd mus = prob.mu();
  const Eigen::VectorXd& xi0 = t.records.front().components;
  std::ostringstream os;
  os << "k,excess_risk,worst_component_mu,max_component_error\n";
  for (const auto& rec : t.records) {
    // worst component = largest share of the excess risk at this step
    Eigen::Index worst = 0;
    double worst_share = -1.0;
    double err = 0.0;
    for (Eigen::Index i = 0; i < prob.dimension(); ++i) {
      const double share = prob.hessian_eigenvalues(i) * rec.components(i) * rec.components(i);
      if (share > worst_share) {
        worst_share = share;
        worst = i;
      }
      const double predicted = accel::eval_closed({*method, rec.k, params}, mus(i)) * xi0(i);
      err = std::max(err, std::abs(rec.components(i) - predicted));
    }
    os << rec.k << ',' << format_double(rec.excess_risk) << ',' << format_double(mus(worst)) << ','
       << format_double(err) << "\n";
  }
  return os.str();
}

std::string cmd_verify(const std::string& suite, unsigned threads, bool& all_passed) {
  accel::verify::SuiteConfig cfg;
  cfg.threads = threads;
  std::vector<std::string> names;
  if (suite == "all") {
    names = accel::verify::suite_names();
  } else {
    names.push_back(suite);
  }
  nlohmann::json arr = nlohmann::json::array();
  all_passed = true;
  for (const auto& n : names) {
    auto rep = accel::verify::run_suite(n, cfg);
    if (!rep) throw UsageError("unknown suite: " + n);
    all_passed = all_passed && rep->passed;
    arr.push_back(accel::to_json(*rep));
  }
  return arr.dump(2) + "\n";
}

struct ChebnumArgs {
  std::vector<std::string> methods;
  std::string k = "1:10";
  std::vector<double> rhos;
  std::string out;
};

std::string cmd_chebnum(const ChebnumArgs& a) {
  const auto [k_lo, k_hi] = parse_range(a.k);
  if (k_lo < 0) throw UsageError("k must be non-negative");
  if (a.rhos.empty()) throw UsageError("--rho is required");
  const auto methods = parse_methods(a.methods);
  std::ostringstream os;
  os << "rho,k,method,cheb_number,asymptotic_1st_order\n";
  for (double rho : sorted_unique(a.rhos)) {
    const accel::AccelParams p = accel::AccelParams::from_rho(rho);
    const double eps = 1.0 - rho;
    for (int k = k_lo; k <= k_hi; ++k) {
      for (Method m : methods) {
        const double ch = accel::cheb_number_closed(m, k, p).value;
        // the expansion is only meaningful for small eps
        const double asym = eps < 0.1 ? accel::asymptotic_cheb(m, k, eps) : std::nan("");
        os << format_double(rho) << ',' << k << ',' << accel::to_string(m) << ','
           << format_double(ch) << ',' << format_double(asym) << "\n";
      }
    }
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accelerated methods on quadratics: polynomials, Chebyshev numbers, checks"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Cap on worker threads (0 = all cores)");

  CurvesArgs curves;
  auto* c = app.add_subcommand("curves", "Residual polynomials on a mu grid (CSV)");
  c->add_option("--rho", curves.rhos, "Acceleration parameter, repeatable")->required();
  c->add_option("--k", curves.k, "Iteration count")->check(CLI::NonNegativeNumber);
  c->add_option("--method", curves.methods, "power|chebyshev|sor|nesterov|all, repeatable");
  c->add_option("--grid", curves.grid, "Number of mu points");
  c->add_option("--mu-min", curves.mu_min);
  c->add_option("--mu-max", curves.mu_max);
  c->add_option("--out", curves.out, "Output file (default stdout)");
  c->add_option("--threads", threads);

  RunArgs run;
  auto* r = app.add_subcommand("run", "Run a method on a quadratic problem (CSV trajectory)");
  r->add_option("--method", run.method)->required();
  r->add_option("--rho", run.rho, "Value in (0,1) or 'auto'");
  r->add_option("--k", run.k);
  r->add_option("--matrix", run.matrix, "Matrix Market Hessian");
  r->add_option("--vector", run.vector, "Companion vector b = X*y, one value per line");
  r->add_option("--spectrum", run.spectrum,
                "uniform|geometric|clustered-top|clustered-bottom|explicit");
  r->add_option("--dim", run.dim);
  r->add_option("--seed", run.seed);
  r->add_option("--ratio", run.ratio, "Decay ratio for geometric spectra");
  r->add_option("--values", run.values, "Eigenvalues for explicit spectra")->delimiter(',');
  r->add_option("--beta", run.beta, "Smoothness override (may only raise beta)");
  r->add_option("--start", run.start, "zero|optimum|sampled");
  r->add_option("--out", run.out);
  r->add_option("--threads", threads);

  std::string suite;
  std::string verify_out;
  auto* v = app.add_subcommand("verify", "Run property suites, JSON report");
  auto* suite_opt = v->add_option("--suite", suite, "Suite name or 'all'");
  std::string suite_pos;
  auto* suite_pos_opt = v->add_option("name", suite_pos, "Suite name or 'all'");
  suite_opt->excludes(suite_pos_opt);
  v->add_option("--out", verify_out);
  v->add_option("--threads", threads);

  ChebnumArgs cheb;
  auto* n = app.add_subcommand("chebnum", "Chebyshev numbers table (CSV)");
  n->add_option("--method", cheb.methods);
  n->add_option("--k", cheb.k, "k or lo:hi");
  n->add_option("--rho", cheb.rhos)->required();
  n->add_option("--out", cheb.out);
  n->add_option("--threads", threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (c->parsed()) {
      emit(cmd_curves(curves, threads), curves.out);
    } else if (r->parsed()) {
      emit(cmd_run(run), run.out);
    } else if (v->parsed()) {
      const std::string name = suite.empty() ? suite_pos : suite;
      if (name.empty()) throw UsageError("verify needs a suite name");
      bool ok = false;
      emit(cmd_verify(name, threads, ok), verify_out);
      return ok ? 0 : 1;
    } else if (n->parsed()) {
      const std::string table = cmd_chebnum(cheb);
      std::cout << table;
      if (!cheb.out.empty()) emit(table, cheb.out);
    }
  } catch (const std::exception& e) {
    std::cerr << "accel: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
