#include "projgeo/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace projgeo {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Input: return "input error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Rank: return "rank error";
    case ErrorKind::Branch: return "branch error";
    case ErrorKind::NotIdempotent: return "not idempotent";
    case ErrorKind::Degeneracy: return "degeneracy error";
    case ErrorKind::Tolerance: return "tolerance error";
    case ErrorKind::Geometry: return "geometry error";
    case ErrorKind::Truncation: return "truncation error";
  }
  return "error";
}

void require_finite(const ComplexMatrix& a, const char* what) {
  if (!a.allFinite()) {
    throw Error(ErrorKind::Input, std::string(what) + " has non-finite entries");
  }
}

void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    std::ostringstream os;
    os << what << " must be square, got " << a.rows() << "x" << a.cols();
    throw Error(ErrorKind::Input, os.str());
  }
}

ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

ComplexMatrix adjoint(const ComplexMatrix& a) { return a.adjoint(); }

ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  return (a + a.adjoint()) * 0.5;
}

double operator_norm(const ComplexMatrix& a) {
  require_finite(a);
  if (a.size() == 0) return 0.0;
  // sigma_max^2 is the top eigenvalue of the smaller Gram matrix; the
  // eigenvalue-only tridiagonal solve is much cheaper than an SVD and exact
  // to relative rounding for the largest value.
  const ComplexMatrix gram = a.rows() <= a.cols() ? ComplexMatrix(a * a.adjoint())
                                                  : ComplexMatrix(a.adjoint() * a);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double hermitian_norm(const ComplexMatrix& a) {
  require_finite(a);
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

RealVector singular_values(const ComplexMatrix& a) {
  require_finite(a);
  if (a.size() == 0) return RealVector();
  Eigen::BDCSVD<ComplexMatrix> svd(a);
  return svd.singularValues();
}

bool is_hermitian(const ComplexMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double defect = (a - a.adjoint()).norm();
  return defect <= rel_tol * std::max(a.norm(), 1e-300);
}

ComplexMatrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

namespace {

void require_hermitian(const ComplexMatrix& a) {
  require_square(a);
  require_finite(a);
  if (!is_hermitian(a)) {
    throw Error(ErrorKind::Input, "matrix is not Hermitian within tolerance");
  }
}

}  // namespace

SpectralDecomposition hermitian_eig(const ComplexMatrix& a) {
  require_hermitian(a);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(a));
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::Input, "Hermitian eigensolver did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

RealVector hermitian_eigenvalues(const ComplexMatrix& a) {
  require_hermitian(a);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

ComplexMatrix apply_hermitian_function(const SpectralDecomposition& eig, const RealFunction& f) {
  const Eigen::Index n = eig.eigenvalues.size();
  Eigen::VectorXcd values(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = f(eig.eigenvalues(i));
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "function not finite at eigenvalue " << eig.eigenvalues(i);
      throw Error(ErrorKind::Domain, os.str());
    }
    values(i) = v;
  }
  const ComplexMatrix m = eig.eigenvectors * values.asDiagonal() * eig.eigenvectors.adjoint();
  return hermitian_part(m);
}

ComplexMatrix apply_hermitian_function(const ComplexMatrix& a, const RealFunction& f) {
  return apply_hermitian_function(hermitian_eig(a), f);
}

ComplexMatrix expm_i_hermitian(const ComplexMatrix& h, double t) {
  const SpectralDecomposition eig = hermitian_eig(h);
  const Eigen::Index n = eig.eigenvalues.size();
  Eigen::VectorXcd phases(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    phases(i) = std::polar(1.0, t * eig.eigenvalues(i));
  }
  return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

PolarFactors polar_decompose(const ComplexMatrix& a) {
  require_square(a);
  require_finite(a);
  const Eigen::Index n = a.rows();
  if (n == 0) return {ComplexMatrix(0, 0), ComplexMatrix(0, 0)};
  Eigen::BDCSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  if (s(n - 1) <= kInvTol * s(0) || s(0) == 0.0) {
    std::ostringstream os;
    os << "singular input to polar decomposition (sigma_min=" << s(n - 1)
       << ", sigma_max=" << s(0) << ")";
    throw Error(ErrorKind::Rank, os.str());
  }
  const ComplexMatrix& u = svd.matrixU();
  const ComplexMatrix& v = svd.matrixV();
  PolarFactors out;
  out.unitary = u * v.adjoint();
  out.positive = hermitian_part(v * s.cast<Complex>().asDiagonal() * v.adjoint());
  return out;
}

double unitarity_defect(const ComplexMatrix& u) {
  return operator_norm(u.adjoint() * u - identity(u.cols()));
}

ComplexMatrix principal_log_unitary(const ComplexMatrix& w, double gap_tol) {
  require_square(w);
  require_finite(w);
  const Eigen::Index n = w.rows();
  if (n == 0) return ComplexMatrix(0, 0);
  if (unitarity_defect(w) > 1e-8 * static_cast<double>(n)) {
    throw Error(ErrorKind::Input, "matrix is not unitary within tolerance");
  }
  // Cayley transform: K = i (1 - W)(1 + W)^{-1} is Hermitian with eigenvalues
  // tan(phi/2) for the eigenvalues e^{i phi} of W, so log W = 2i atan(K).
  const ComplexMatrix one = identity(n);
  const Eigen::PartialPivLU<ComplexMatrix> lu(one + w);
  const ComplexMatrix k = Complex(0.0, 1.0) * (one - w) * lu.inverse();
  if (!k.allFinite()) throw Error(ErrorKind::Branch, "eigenvalue at -1, no principal logarithm");
  const SpectralDecomposition eig = hermitian_eig(hermitian_part(k));
  Eigen::VectorXcd logs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double angle = 2.0 * std::atan(eig.eigenvalues(i));
    if (std::numbers::pi - std::abs(angle) < gap_tol) {
      std::ostringstream os;
      os << "eigenvalue e^{i" << angle << "} within " << gap_tol << " of -1";
      throw Error(ErrorKind::Branch, os.str());
    }
    logs(i) = Complex(0.0, angle);
  }
  const ComplexMatrix l = eig.eigenvectors * logs.asDiagonal() * eig.eigenvectors.adjoint();
  return (l - l.adjoint()) * 0.5;
}

}  // namespace projgeo
