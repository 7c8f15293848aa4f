#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "accel/problem.hpp"

using namespace accel;
namespace fs = std::filesystem;

namespace {

class TempFile {
 public:
  explicit TempFile(const std::string& content, const std::string& ext = ".mtx") {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("accel_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ext);
    std::ofstream(path_) << content;
  }
  ~TempFile() { fs::remove(path_); }
  [[nodiscard]] std::string path() const { return path_.string(); }

 private:
  fs::path path_;
};

Eigen::MatrixXd parse(const std::string& text) {
  std::istringstream in(text);
  return parse_matrix_market(in);
}

void expect_same(const QuadraticProblem& a, const QuadraticProblem& b) {
  EXPECT_EQ(a.hessian_eigenvalues, b.hessian_eigenvalues);
  EXPECT_EQ(a.w_star, b.w_star);
  EXPECT_EQ(a.w0, b.w0);
  EXPECT_EQ(a.beta, b.beta);
}

}  // namespace

TEST(GenSpectrum, Geometric) {
  SpectrumSpec s;
  s.kind = SpectrumKind::GeometricDecay;
  s.dimension = 4;
  s.decay_ratio = 0.1;
  const QuadraticProblem p = gen_spectrum(s);
  ASSERT_EQ(p.dimension(), 4);
  const double want[] = {1.0, 0.1, 0.01, 0.001};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(p.hessian_eigenvalues(i), want[i], 1e-17);
  EXPECT_EQ(p.beta, 1.0);
  EXPECT_FALSE(p.basis.has_value());
  EXPECT_EQ(p.representation, Representation::Spectral);
}

TEST(GenSpectrum, Explicit) {
  SpectrumSpec s;
  s.kind = SpectrumKind::ExplicitList;
  s.values = {0.2};
  s.beta = 1.0;
  const QuadraticProblem p = gen_spectrum(s);
  EXPECT_DOUBLE_EQ(p.mu()(0), 0.8);
}

TEST(GenSpectrum, Deterministic) {
  for (SpectrumKind k : {SpectrumKind::Uniform, SpectrumKind::ClusteredTop, SpectrumKind::ClusteredBottom,
                         SpectrumKind::GeometricDecay}) {
    SpectrumSpec s;
    s.kind = k;
    s.dimension = 25;
    s.seed = 77;
    expect_same(gen_spectrum(s), gen_spectrum(s));
    SpectrumSpec t = s;
    t.seed = 78;
    EXPECT_NE(gen_spectrum(s).w_star, gen_spectrum(t).w_star);
  }
}

TEST(GenSpectrum, SpectrumInUnitInterval) {
  for (SpectrumKind k : {SpectrumKind::Uniform, SpectrumKind::ClusteredTop, SpectrumKind::ClusteredBottom,
                         SpectrumKind::GeometricDecay}) {
    SpectrumSpec s;
    s.kind = k;
    s.dimension = 200;
    s.top = 3.0;
    s.seed = 5;
    const QuadraticProblem p = gen_spectrum(s);
    EXPECT_GE(p.beta, p.hessian_eigenvalues.maxCoeff());
    EXPECT_GE(p.mu().minCoeff(), 0.0);
    EXPECT_LE(p.mu().maxCoeff(), 1.0);
  }
  SpectrumSpec c;
  c.kind = SpectrumKind::ClusteredTop;
  c.dimension = 100;
  c.center = 0.9;
  c.width = 0.05;
  const QuadraticProblem p = gen_spectrum(c);
  EXPECT_GE(p.hessian_eigenvalues.minCoeff(), 0.85 - 1e-12);
  EXPECT_LE(p.hessian_eigenvalues.maxCoeff(), 0.95 + 1e-12);
}

TEST(GenSpectrum, Errors) {
  SpectrumSpec s;
  s.kind = SpectrumKind::GeometricDecay;
  s.decay_ratio = 1.0;
  EXPECT_THROW(gen_spectrum(s), SpecError);
  s.decay_ratio = 0.0;
  EXPECT_THROW(gen_spectrum(s), SpecError);
  SpectrumSpec e;
  e.kind = SpectrumKind::ExplicitList;
  EXPECT_THROW(gen_spectrum(e), SpecError);
  e.values = {0.5, -0.1};
  EXPECT_THROW(gen_spectrum(e), SpecError);
  e.values = {0.0, 0.0};
  EXPECT_THROW(gen_spectrum(e), SpecError);
  e.values = {0.5, 2.0};
  e.beta = 1.0;
  EXPECT_THROW(gen_spectrum(e), SpecError);
  SpectrumSpec u;
  u.dimension = 0;
  EXPECT_THROW(gen_spectrum(u), SpecError);
  u.dimension = 3;
  u.lower = 0.7;
  u.upper = 0.2;
  EXPECT_THROW(gen_spectrum(u), SpecError);
  EXPECT_FALSE(parse_spectrum_kind("triangular").has_value());
  EXPECT_EQ(parse_spectrum_kind("geometric"), SpectrumKind::GeometricDecay);
}

TEST(Problem, GradientAndComponents) {
  SpectrumSpec s;
  s.dimension = 6;
  s.seed = 3;
  const QuadraticProblem p = gen_spectrum(s);
  EXPECT_EQ(p.gradient(p.w_star).norm(), 0.0);
  const QuadraticProblem r = rotated(p, 4);
  EXPECT_LE(r.gradient(r.w_star).norm(), 1e-13);
  EXPECT_TRUE(r.to_components(r.w0 - r.w_star).isApprox(p.w0 - p.w_star, 1e-12));
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(6, -1.0, 2.0);
  EXPECT_TRUE(r.from_components(r.to_components(v)).isApprox(v, 1e-13));
  EXPECT_THROW(p.gradient(Eigen::VectorXd::Zero(5)), DimensionError);
  EXPECT_THROW(rotated(r, 5), DomainError);
  const double orth = (r.basis->transpose() * *r.basis - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff();
  EXPECT_LE(orth, 1e-10);
}

TEST(Problem, AutoRho) {
  SpectrumSpec s;
  s.kind = SpectrumKind::ExplicitList;
  s.values = {1.0, 0.5, 0.0, 0.1};
  const QuadraticProblem p = gen_spectrum(s);
  EXPECT_NEAR(p.auto_rho(), 0.9, 1e-15);
  ASSERT_EQ(p.non_convergent_directions().size(), 1u);
  EXPECT_EQ(p.non_convergent_directions()[0], 2);
}

TEST(MatrixMarket, IdentityFile) {
  TempFile f("%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n1 1 1.0\n2 2 1.0\n");
  const QuadraticProblem p = load_matrix(f.path());
  EXPECT_EQ(p.representation, Representation::DenseMatrix);
  EXPECT_NEAR(p.hessian_eigenvalues(0), 1.0, 1e-15);
  EXPECT_NEAR(p.hessian_eigenvalues(1), 1.0, 1e-15);
  EXPECT_NEAR(p.beta, 1.0, 1e-15);
  EXPECT_NEAR(p.mu().cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(MatrixMarket, DiagonalArray) {
  TempFile f("%%MatrixMarket matrix array real general\n2 2\n4\n0\n0\n1\n");
  const QuadraticProblem p = load_matrix(f.path());
  EXPECT_NEAR(p.hessian_eigenvalues(0), 4.0, 1e-14);
  EXPECT_NEAR(p.hessian_eigenvalues(1), 1.0, 1e-14);
  EXPECT_NEAR(p.beta, 4.0, 1e-14);
  EXPECT_NEAR(p.mu()(0), 0.0, 1e-15);
  EXPECT_NEAR(p.mu()(1), 0.75, 1e-15);
  EXPECT_NEAR(p.auto_rho(), 0.75, 1e-15);
  // default linear term H * 1 puts the optimum at the all-ones vector
  EXPECT_LE((p.w_star - Eigen::VectorXd::Ones(2)).norm(), 1e-14);
  const Eigen::MatrixXd x = sqrt_factor(p);
  EXPECT_LE((x - Eigen::Vector2d(2.0, 1.0).asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(MatrixMarket, RankDeficient) {
  // H = v1 v1^T + 2 v2 v2^T with v1 = (1,1,0), v2 = (1,-1,1): rank 2
  const std::string text =
      "%%MatrixMarket matrix coordinate real symmetric\n3 3 6\n"
      "1 1 3\n2 1 -1\n2 2 3\n3 1 2\n3 2 -2\n3 3 2\n";
  {
    const Eigen::MatrixXd h = parse(text);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    EXPECT_NEAR(es.eigenvalues()(0), 0.0, 1e-14);
  }
  TempFile f(text);
  TempFile vec("1\n2\n# comment\n\n3\n", ".txt");
  const QuadraticProblem p = load_matrix(f.path(), vec.path());
  const auto nc = p.non_convergent_directions();
  ASSERT_EQ(nc.size(), 1u);
  EXPECT_EQ(p.mu()(nc[0]), 1.0);
  EXPECT_EQ(p.hessian_eigenvalues(2), 0.0);
  // w* solves the projected normal equations and has no null-space part
  EXPECT_LE((p.dense_hessian->operator*(p.w_star) - *p.linear_term).norm(), 1e-12);
  EXPECT_LE(std::abs(p.basis->col(nc[0]).dot(p.w_star)), 1e-12);
  EXPECT_LE(p.gradient(p.w_star).norm(), 1e-12);
}

TEST(MatrixMarket, EigenpairResidual) {
  std::ostringstream os;
  os << "%%MatrixMarket matrix array real symmetric\n6 6\n";
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(6, 6);
  for (int i = 0; i < 36; ++i) a.data()[i] = g(rng);
  const Eigen::MatrixXd h = a.transpose() * a;
  for (int j = 0; j < 6; ++j) {
    for (int i = j; i < 6; ++i) os << accel::numeric::format_double(h(i, j)) << "\n";
  }
  TempFile f(os.str());
  const QuadraticProblem p = load_matrix(f.path());
  for (int i = 0; i < 6; ++i) {
    const Eigen::VectorXd q = p.basis->col(i);
    EXPECT_LE((h * q - p.hessian_eigenvalues(i) * q).norm(), 1e-8 * p.beta);
  }
  const Eigen::MatrixXd x = sqrt_factor(p);
  EXPECT_LE((x.transpose() * x - h).cwiseAbs().maxCoeff(), 1e-10 * p.beta);
  // identical file, identical problem
  expect_same(p, load_matrix(f.path()));
}

TEST(MatrixMarket, BetaOverride) {
  TempFile f("%%MatrixMarket matrix array real general\n2 2\n4\n0\n0\n1\n");
  const QuadraticProblem p = load_matrix(f.path(), std::nullopt, 8.0);
  EXPECT_EQ(p.beta, 8.0);
  EXPECT_NEAR(p.mu()(0), 0.5, 1e-15);
  EXPECT_THROW(load_matrix(f.path(), std::nullopt, 2.0), DomainError);
}

TEST(MatrixMarket, Formats) {
  const Eigen::MatrixXd a = parse("%%MatrixMarket matrix coordinate integer general\n2 2 4\n1 1 2\n1 2 1\n2 1 1\n2 2 5\n");
  EXPECT_EQ(a(0, 1), 1.0);
  EXPECT_EQ(a(1, 1), 5.0);
  const Eigen::MatrixXd b = parse("%%MatrixMarket matrix array real symmetric\n2 2\n2\n1\n5\n");
  EXPECT_EQ(b, a);
  const Eigen::MatrixXd c = parse("%%MatrixMarket MATRIX Coordinate Real Symmetric\n2 2 2\n1 1 1\n2 2 1\n");
  EXPECT_EQ(c, Eigen::MatrixXd::Identity(2, 2));
}

TEST(MatrixMarket, Errors) {
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("hello\n2 2\n"), ParseError);
  EXPECT_THROW(parse("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n"), ParseError);
  EXPECT_THROW(parse("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n"), ParseError);
  EXPECT_THROW(parse("%%MatrixMarket matrix coordinate real hermitian\n1 1 1\n1 1 1\n"), ParseError);
  EXPECT_THROW(parse("%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1\n2 2 1\n"), ParseError);
  EXPECT_THROW(parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1\n2 2 1\n"), ParseError);
  EXPECT_THROW(parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n"), ParseError);
  EXPECT_THROW(parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 x 1\n"), ParseError);
  EXPECT_THROW(parse("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 1\n"), ParseError);
  EXPECT_THROW(parse("%%MatrixMarket matrix array real general\n2 2\n1\n2\n"), ParseError);
  EXPECT_THROW(parse("%%MatrixMarket matrix array real general\n2 3\n1\n2\n3\n4\n5\n6\n"), NotSymmetricError);
  EXPECT_THROW(parse("%%MatrixMarket matrix array real general\n2001 2001\n"), DomainError);
  EXPECT_THROW(load_matrix("/nonexistent/file.mtx"), IoError);
  EXPECT_THROW(read_vector("/nonexistent/vec.txt"), IoError);
}

TEST(MatrixMarket, NotSymmetric) {
  TempFile f("%%MatrixMarket matrix array real general\n2 2\n1\n0.5\n0.4\n1\n");
  EXPECT_THROW(load_matrix(f.path()), NotSymmetricError);
}

TEST(MatrixMarket, Indefinite) {
  TempFile f("%%MatrixMarket matrix array real general\n2 2\n1\n0\n0\n-0.01\n");
  EXPECT_THROW(load_matrix(f.path()), IndefiniteError);
  // tiny negative eigenvalues are rounding noise and snap to zero
  TempFile g("%%MatrixMarket matrix array real general\n2 2\n1\n0\n0\n-1e-12\n");
  const QuadraticProblem p = load_matrix(g.path());
  EXPECT_EQ(p.hessian_eigenvalues(1), 0.0);
  EXPECT_EQ(p.mu()(1), 1.0);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(*p.dense_hessian).eigenvalues().minCoeff(),
            -1e-10 * p.beta);
}

TEST(MatrixMarket, VectorErrors) {
  TempFile f("%%MatrixMarket matrix array real general\n2 2\n4\n0\n0\n1\n");
  TempFile bad("1\nabc\n", ".txt");
  EXPECT_THROW(load_matrix(f.path(), bad.path()), ParseError);
  TempFile shortv("1\n", ".txt");
  EXPECT_THROW(load_matrix(f.path(), shortv.path()), DimensionError);
}

TEST(SqrtFactor, Spectral) {
  SpectrumSpec s;
  s.kind = SpectrumKind::ExplicitList;
  s.values = {1.0, 1.0, 1.0};
  EXPECT_EQ(sqrt_factor(gen_spectrum(s)), Eigen::MatrixXd::Identity(3, 3));
  s.values = {4.0, 1.0};
  const Eigen::MatrixXd x = sqrt_factor(gen_spectrum(s));
  EXPECT_EQ(x(0, 0), 2.0);
  EXPECT_EQ(x(1, 1), 1.0);
  EXPECT_EQ(x(0, 1), 0.0);
}

TEST(Descriptor, Json) {
  SpectrumSpec s;
  s.kind = SpectrumKind::ExplicitList;
  s.values = {2.0, 1.0};
  const nlohmann::json j = to_json(gen_spectrum(s));
  EXPECT_EQ(j["dimension"], 2);
  EXPECT_EQ(j["beta"], 2.0);
  EXPECT_EQ(j["eigenvalues"][1], 1.0);
  EXPECT_EQ(j["mu"][1], 0.5);
  EXPECT_EQ(j["representation"], "spectral");
  EXPECT_EQ(j["provenance"], "synthetic:explicit seed=0");
}
