#pragma once

// Dense complex linear algebra used by every other module: norms, Hermitian
// eigendecompositions, functional calculus, polar factors and the principal
// logarithm of a unitary.  Everything here is a pure function.

#include <complex>
#include <functional>

#include <Eigen/Dense>

#include "projgeo/errors.hpp"

namespace projgeo {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Relative tolerance for accepting a matrix as Hermitian.
inline constexpr double kHermTol = 1e-10;
/// Relative threshold on the smallest singular value for invertibility.
inline constexpr double kInvTol = 1e-12;
/// Minimum angular distance of a unitary eigenvalue from -1.
inline constexpr double kGapTol = 1e-6;

struct SpectralDecomposition {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors; // orthonormal columns

  ComplexMatrix reconstruct() const;
};

struct PolarFactors {
  ComplexMatrix unitary;
  ComplexMatrix positive;
};

/// Throws ErrorKind::Input when any entry is NaN or infinite.
void require_finite(const ComplexMatrix& a, const char* what = "matrix");
void require_square(const ComplexMatrix& a, const char* what = "matrix");

ComplexMatrix identity(Eigen::Index n);
ComplexMatrix adjoint(const ComplexMatrix& a);
/// (A + A*) / 2
ComplexMatrix hermitian_part(const ComplexMatrix& a);

/// Largest singular value.
double operator_norm(const ComplexMatrix& a);
/// Largest |eigenvalue| of a matrix that is Hermitian up to rounding.  Only
/// the Hermitian part is read.
double hermitian_norm(const ComplexMatrix& a);
/// Singular values, descending.
RealVector singular_values(const ComplexMatrix& a);

/// ||A - A*||_F <= rel_tol ||A||_F
bool is_hermitian(const ComplexMatrix& a, double rel_tol = kHermTol);

SpectralDecomposition hermitian_eig(const ComplexMatrix& a);
RealVector hermitian_eigenvalues(const ComplexMatrix& a);

using RealFunction = std::function<double(double)>;

/// V f(Λ) V*, re-Hermitized.  Throws ErrorKind::Domain if f is not finite at
/// some eigenvalue.
ComplexMatrix apply_hermitian_function(const ComplexMatrix& a, const RealFunction& f);
ComplexMatrix apply_hermitian_function(const SpectralDecomposition& eig, const RealFunction& f);

/// exp(i t H) for Hermitian H, via the eigendecomposition.
ComplexMatrix expm_i_hermitian(const ComplexMatrix& h, double t = 1.0);

/// A = U P with U unitary and P = (A*A)^{1/2}.  Throws ErrorKind::Rank when
/// the smallest singular value is below kInvTol times the largest.
PolarFactors polar_decompose(const ComplexMatrix& a);

/// Skew-Hermitian L with exp(L) = W and spec(L / i) in (-pi, pi).  Throws
/// ErrorKind::Branch when an eigenvalue of W lies within kGapTol of -1.
ComplexMatrix principal_log_unitary(const ComplexMatrix& w, double gap_tol = kGapTol);

/// ||U*U - 1||
double unitarity_defect(const ComplexMatrix& u);

}  // namespace projgeo
