#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "accel/errors.hpp"
#include "accel/numeric.hpp"
#include "accel/spectral.hpp"
#include "json.hpp"

namespace accel {

enum class Representation { Spectral, DenseMatrix };

/// Quadratic objective f(w) = 1/2 w^T H w - b^T w with H = X*X.
///
/// Spectral problems are stored in their own eigenbasis (basis is the
/// identity and b = H w*); dense problems keep H and b explicitly together
/// with the orthogonal eigenbasis of H. Eigenvalues are kept in the order
/// of the basis columns.
struct QuadraticProblem {
  Eigen::VectorXd hessian_eigenvalues;
  double beta = 1.0;
  /// Columns are eigenvectors; absent means the identity.
  std::optional<Eigen::MatrixXd> basis;
  Eigen::VectorXd w_star;
  /// Default starting point.
  Eigen::VectorXd w0;
  Representation representation = Representation::Spectral;
  std::optional<Eigen::MatrixXd> dense_hessian;
  /// X*y, the linear term of the normal equations H w = b.
  std::optional<Eigen::VectorXd> linear_term;
  std::string provenance;

  [[nodiscard]] Eigen::Index dimension() const { return hessian_eigenvalues.size(); }

  /// Eigenvalues of B = I - H/beta, aligned with hessian_eigenvalues.
  [[nodiscard]] Eigen::VectorXd mu() const {
    Eigen::VectorXd m(dimension());
    for (Eigen::Index i = 0; i < dimension(); ++i) {
      m(i) = std::clamp(1.0 - hessian_eigenvalues(i) / beta, 0.0, 1.0);
    }
    return m;
  }

  [[nodiscard]] Eigen::VectorXd gradient(const Eigen::VectorXd& w) const {
    check_dim(w);
    if (representation == Representation::Spectral) {
      return hessian_eigenvalues.cwiseProduct(w - w_star);
    }
    return (*dense_hessian) * w - *linear_term;
  }

  [[nodiscard]] Eigen::VectorXd hessian_apply(const Eigen::VectorXd& v) const {
    check_dim(v);
    if (representation == Representation::Spectral) return hessian_eigenvalues.cwiseProduct(v);
    return (*dense_hessian) * v;
  }

  /// <v, e_i> for every eigenvector e_i.
  [[nodiscard]] Eigen::VectorXd to_components(const Eigen::VectorXd& v) const {
    check_dim(v);
    if (!basis) return v;
    return basis->transpose() * v;
  }

  [[nodiscard]] Eigen::VectorXd from_components(const Eigen::VectorXd& c) const {
    check_dim(c);
    if (!basis) return c;
    return (*basis) * c;
  }

  /// Eigen-directions with mu = 1 (zero curvature); no first-order method
  /// moves along them.
  [[nodiscard]] std::vector<Eigen::Index> non_convergent_directions() const {
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < dimension(); ++i) {
      if (hessian_eigenvalues(i) == 0.0) out.push_back(i);
    }
    return out;
  }

  /// rho = 1 - (smallest positive eigenvalue)/beta.
  [[nodiscard]] double auto_rho() const {
    double lo = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < dimension(); ++i) {
      if (hessian_eigenvalues(i) > 0.0) lo = std::min(lo, hessian_eigenvalues(i));
    }
    if (!std::isfinite(lo)) throw DegenerateError("problem has no positive curvature");
    return 1.0 - lo / beta;
  }

  void check_dim(const Eigen::VectorXd& v) const {
    if (v.size() != dimension()) {
      throw DimensionError("vector of size " + std::to_string(v.size()) +
                           " does not match problem dimension " + std::to_string(dimension()));
    }
  }

  /// Throws if any structural invariant is broken.
  void validate() const {
    if (dimension() < 1) throw DimensionError("problem dimension must be at least 1");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
    for (Eigen::Index i = 0; i < dimension(); ++i) {
      const double l = hessian_eigenvalues(i);
      if (!(l >= 0.0) || l > beta) {
        throw DomainError("Hessian eigenvalue " + numeric::format_double(l) +
                          " outside [0, beta]");
      }
    }
    check_dim(w_star);
    check_dim(w0);
    if (basis) {
      if (basis->rows() != dimension() || basis->cols() != dimension()) {
        throw DimensionError("basis shape mismatch");
      }
      const double err =
          (basis->transpose() * (*basis) - Eigen::MatrixXd::Identity(dimension(), dimension()))
              .cwiseAbs()
              .maxCoeff();
      if (err > 1e-10) throw DomainError("basis is not orthogonal");
    }
    if (representation == Representation::DenseMatrix) {
      if (!dense_hessian || !linear_term) throw DomainError("dense problem lacks H or b");
      if (dense_hessian->rows() != dimension() || dense_hessian->cols() != dimension()) {
        throw DimensionError("Hessian shape mismatch");
      }
      check_dim(*linear_term);
    }
  }
};

inline QuadraticProblem make_spectral_problem(Eigen::VectorXd hessian_eigenvalues, double beta,
                                              Eigen::VectorXd w_star, Eigen::VectorXd w0,
                                              std::string provenance = "explicit") {
  QuadraticProblem p;
  p.hessian_eigenvalues = std::move(hessian_eigenvalues);
  p.beta = beta;
  p.w_star = std::move(w_star);
  p.w0 = std::move(w0);
  p.representation = Representation::Spectral;
  p.provenance = std::move(provenance);
  p.validate();
  return p;
}

enum class SpectrumKind { Uniform, GeometricDecay, ClusteredTop, ClusteredBottom, ExplicitList };

inline const char* to_string(SpectrumKind k) {
  switch (k) {
    case SpectrumKind::Uniform:
      return "uniform";
    case SpectrumKind::GeometricDecay:
      return "geometric";
    case SpectrumKind::ClusteredTop:
      return "clustered-top";
    case SpectrumKind::ClusteredBottom:
      return "clustered-bottom";
    case SpectrumKind::ExplicitList:
      return "explicit";
  }
  return "?";
}

inline std::optional<SpectrumKind> parse_spectrum_kind(const std::string& s) {
  for (SpectrumKind k : {SpectrumKind::Uniform, SpectrumKind::GeometricDecay,
                         SpectrumKind::ClusteredTop, SpectrumKind::ClusteredBottom,
                         SpectrumKind::ExplicitList}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

/// Recipe for a synthetic Hessian spectrum. Eigenvalues are expressed in
/// units of `top` before scaling; beta defaults to the largest eigenvalue.
struct SpectrumSpec {
  SpectrumKind kind = SpectrumKind::Uniform;
  int dimension = 10;
  double top = 1.0;
  std::optional<double> beta;
  /// Uniform: eigenvalues uniform in [lower, upper]*top.
  double lower = 0.0;
  double upper = 1.0;
  /// GeometricDecay: top * ratio^i.
  double decay_ratio = 0.5;
  /// Clustered: center +- width (fractions of top), clamped to [0, 1].
  double center = 0.9;
  double width = 0.05;
  std::vector<double> values;
  std::uint64_t seed = 0;
};

inline QuadraticProblem gen_spectrum(const SpectrumSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  if (!(spec.top > 0.0)) throw SpecError("top eigenvalue must be positive");
  std::vector<double> eig;
  switch (spec.kind) {
    case SpectrumKind::ExplicitList:
      if (spec.values.empty()) throw SpecError("explicit spectrum is empty");
      for (double v : spec.values) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw SpecError("eigenvalues must be non-negative");
      }
      eig = spec.values;
      break;
    case SpectrumKind::Uniform:
      if (spec.dimension < 1) throw SpecError("dimension must be at least 1");
      if (!(spec.lower >= 0.0 && spec.lower <= spec.upper && spec.upper <= 1.0)) {
        throw SpecError("uniform bounds must satisfy 0 <= lower <= upper <= 1");
      }
      for (int i = 0; i < spec.dimension; ++i) {
        eig.push_back(spec.top * (spec.lower + (spec.upper - spec.lower) * unit(rng)));
      }
      break;
    case SpectrumKind::GeometricDecay:
      if (spec.dimension < 1) throw SpecError("dimension must be at least 1");
      if (!(spec.decay_ratio > 0.0 && spec.decay_ratio < 1.0)) {
        throw SpecError("decay ratio must lie in (0,1)");
      }
      for (int i = 0; i < spec.dimension; ++i) {
        eig.push_back(spec.top * std::pow(spec.decay_ratio, i));
      }
      break;
    case SpectrumKind::ClusteredTop:
    case SpectrumKind::ClusteredBottom: {
      if (spec.dimension < 1) throw SpecError("dimension must be at least 1");
      if (!(spec.width >= 0.0) || !(spec.center >= 0.0 && spec.center <= 1.0)) {
        throw SpecError("cluster center must lie in [0,1] with non-negative width");
      }
      const double c = spec.kind == SpectrumKind::ClusteredTop ? spec.center : 1.0 - spec.center;
      for (int i = 0; i < spec.dimension; ++i) {
        const double x = c + spec.width * (2.0 * unit(rng) - 1.0);
        eig.push_back(spec.top * std::clamp(x, 0.0, 1.0));
      }
      break;
    }
  }
  const double max_eig = *std::max_element(eig.begin(), eig.end());
  double beta = spec.beta.value_or(max_eig);
  if (!(beta > 0.0)) throw SpecError("spectrum has no positive eigenvalue");
  if (beta < max_eig) throw SpecError("beta below the largest eigenvalue");

  const auto d = static_cast<Eigen::Index>(eig.size());
  Eigen::VectorXd w_star(d);
  Eigen::VectorXd w0(d);
  for (Eigen::Index i = 0; i < d; ++i) w_star(i) = gauss(rng);
  for (Eigen::Index i = 0; i < d; ++i) w0(i) = gauss(rng);

  return make_spectral_problem(Eigen::Map<const Eigen::VectorXd>(eig.data(), d), beta,
                               std::move(w_star), std::move(w0),
                               std::string("synthetic:") + to_string(spec.kind) +
                                   " seed=" + std::to_string(spec.seed));
}

/// Same problem as a dense matrix in the original coordinates.
inline QuadraticProblem to_dense(const QuadraticProblem& p) {
  QuadraticProblem q = p;
  const Eigen::MatrixXd basis =
      p.basis.value_or(Eigen::MatrixXd::Identity(p.dimension(), p.dimension()));
  q.basis = basis;
  q.dense_hessian = basis * p.hessian_eigenvalues.asDiagonal() * basis.transpose();
  q.linear_term = (*q.dense_hessian) * p.w_star;
  q.representation = Representation::DenseMatrix;
  q.provenance = p.provenance + " dense";
  return q;
}

/// Spectral problem rotated by a seeded random orthogonal matrix, stored
/// densely. Eigen-components of w - w* are unchanged.
inline QuadraticProblem rotated(const QuadraticProblem& p, std::uint64_t seed) {
  if (p.basis) throw DomainError("problem is already rotated");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::Index d = p.dimension();
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = gauss(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  QuadraticProblem r = p;
  r.basis = q;
  r.w_star = q * p.w_star;
  r.w0 = q * p.w0;
  r = to_dense(r);
  r.provenance = p.provenance + " rotated seed=" + std::to_string(seed);
  r.validate();
  return r;
}

/// Eigendecomposes a symmetric PSD Hessian and builds the dense problem.
/// Eigenvalues in [-1e-6 beta, 1e-10 beta] are snapped to zero; w* is the
/// pseudo-inverse solution on the positive eigenspace, and the part of b in
/// the null space is dropped so that a minimizer exists.
inline QuadraticProblem from_dense_hessian(const Eigen::MatrixXd& hessian,
                                           std::optional<Eigen::VectorXd> linear_term = {},
                                           std::optional<double> beta_override = {},
                                           std::string provenance = "dense") {
  const Eigen::Index d = hessian.rows();
  if (d < 1 || hessian.cols() != d) throw NotSymmetricError("Hessian must be square");
  if (d > 2000) throw DomainError("dense eigendecomposition is capped at d <= 2000");
  const double scale = hessian.cwiseAbs().maxCoeff();
  const double asym = (hessian - hessian.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) throw NotSymmetricError("matrix is not symmetric");
  Eigen::MatrixXd h = 0.5 * (hessian + hessian.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw Error("eigendecomposition failed");
  // Descending order to match synthetic spectra.
  Eigen::VectorXd evals = es.eigenvalues().reverse();
  Eigen::MatrixXd evecs = es.eigenvectors().rowwise().reverse();

  const double top = evals(0);
  if (!(top > 0.0)) throw IndefiniteError("matrix has no positive eigenvalue");
  const double beta = beta_override.value_or(top);
  if (beta < top) throw DomainError("beta override below the largest eigenvalue");

  bool snapped = false;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (evals(i) < -1e-6 * top) {
      throw IndefiniteError("eigenvalue " + numeric::format_double(evals(i)) +
                            " below -1e-6 beta");
    }
    if (evals(i) <= 1e-10 * top) {
      if (evals(i) != 0.0) snapped = true;
      evals(i) = 0.0;
    }
  }
  if (snapped) h = evecs * evals.asDiagonal() * evecs.transpose();

  Eigen::VectorXd b = linear_term.value_or(h * Eigen::VectorXd::Ones(d));
  if (b.size() != d) throw DimensionError("linear term does not match matrix dimension");
  Eigen::VectorXd coeff = evecs.transpose() * b;
  Eigen::VectorXd wc = Eigen::VectorXd::Zero(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (evals(i) > 0.0) {
      wc(i) = coeff(i) / evals(i);
    } else {
      coeff(i) = 0.0;
    }
  }

  QuadraticProblem p;
  p.hessian_eigenvalues = evals;
  p.beta = beta;
  p.basis = evecs;
  p.w_star = evecs * wc;
  p.w0 = Eigen::VectorXd::Zero(d);
  p.representation = Representation::DenseMatrix;
  p.dense_hessian = h;
  p.linear_term = evecs * coeff;
  p.provenance = std::move(provenance);
  p.validate();
  return p;
}

/// Reads a real square Matrix Market file (coordinate or array,
/// general or symmetric) into a dense matrix.
inline Eigen::MatrixXd parse_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty Matrix Market stream");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
  };
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (banner != "%%MatrixMarket" || object != "matrix") throw ParseError("missing Matrix Market banner");
  if (format != "coordinate" && format != "array") throw ParseError("unsupported format " + format);
  if (field != "real" && field != "double" && field != "integer") {
    throw ParseError("unsupported field " + field);
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    throw ParseError("unsupported symmetry " + symmetry);
  }
  const bool sym = symmetry == "symmetric";

  auto next_data_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      const auto pos = out.find_first_not_of(" \t\r");
      if (pos == std::string::npos || out[pos] == '%') continue;
      return true;
    }
    return false;
  };

  if (!next_data_line(line)) throw ParseError("missing size line");
  std::istringstream size_line(line);
  long rows = 0, cols = 0, nnz = 0;
  if (!(size_line >> rows >> cols)) throw ParseError("malformed size line");
  if (format == "coordinate" && !(size_line >> nnz)) throw ParseError("malformed size line");
  if (rows < 1 || cols < 1 || nnz < 0) throw ParseError("invalid matrix size");
  if (rows != cols) throw NotSymmetricError("matrix is not square");
  if (rows > 2000) throw DomainError("dense eigendecomposition is capped at d <= 2000");

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, cols);
  if (format == "coordinate") {
    for (long e = 0; e < nnz; ++e) {
      if (!next_data_line(line)) throw ParseError("fewer entries than declared");
      std::istringstream ls(line);
      long i = 0, j = 0;
      double v = 0.0;
      if (!(ls >> i >> j >> v)) throw ParseError("malformed entry: " + line);
      if (i < 1 || i > rows || j < 1 || j > cols) throw ParseError("entry index out of range");
      if (sym && i < j) throw ParseError("symmetric file lists an upper-triangle entry");
      a(i - 1, j - 1) += v;
      if (sym && i != j) a(j - 1, i - 1) += v;
    }
  } else {
    for (long j = 0; j < cols; ++j) {
      for (long i = sym ? j : 0; i < rows; ++i) {
        if (!next_data_line(line)) throw ParseError("fewer entries than declared");
        std::istringstream ls(line);
        double v = 0.0;
        if (!(ls >> v)) throw ParseError("malformed entry: " + line);
        a(i, j) = v;
        if (sym) a(j, i) = v;
      }
    }
  }
  if (next_data_line(line)) throw ParseError("more entries than declared");
  if (!a.allFinite()) throw ParseError("non-finite matrix entry");
  return a;
}

/// One value per line; blank lines and '%'/'#' comments are ignored.
inline Eigen::VectorXd read_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '%' || line[pos] == '#') continue;
    std::istringstream ls(line);
    double v = 0.0;
    if (!(ls >> v)) throw ParseError("malformed vector entry: " + line);
    vals.push_back(v);
  }
  return Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

inline QuadraticProblem load_matrix(const std::string& path,
                                    const std::optional<std::string>& vector_path = {},
                                    std::optional<double> beta_override = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  const Eigen::MatrixXd h = parse_matrix_market(in);
  std::optional<Eigen::VectorXd> b;
  if (vector_path) b = read_vector(*vector_path);
  return from_dense_hessian(h, b, beta_override, "matrix-market:" + path);
}

/// Symmetric square root X with X^T X = H.
inline Eigen::MatrixXd sqrt_factor(const QuadraticProblem& p) {
  for (Eigen::Index i = 0; i < p.dimension(); ++i) {
    if (p.hessian_eigenvalues(i) < 0.0) throw IndefiniteError("Hessian is not PSD");
  }
  const Eigen::VectorXd root = p.hessian_eigenvalues.cwiseSqrt();
  if (!p.basis) return root.asDiagonal();
  return (*p.basis) * root.asDiagonal() * p.basis->transpose();
}

/// Reproducibility descriptor.
inline nlohmann::json to_json(const QuadraticProblem& p) {
  std::vector<double> eig(p.hessian_eigenvalues.data(),
                          p.hessian_eigenvalues.data() + p.dimension());
  const Eigen::VectorXd m = p.mu();
  std::vector<double> mus(m.data(), m.data() + m.size());
  return {{"dimension", p.dimension()},
          {"beta", p.beta},
          {"eigenvalues", eig},
          {"mu", mus},
          {"representation",
           p.representation == Representation::Spectral ? "spectral" : "dense"},
          {"provenance", p.provenance}};
}

}  // namespace accel
