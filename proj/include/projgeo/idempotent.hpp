#pragma once

// Idempotents E (E^2 = E) and the orthogonal projections attached to them:
// the range projections, the block form E = [[1, B], [0, 0]] over
// R(E) + R(E)^perp, the difference P_R(E) - P_R(E*), the canonical form
// 1 + 0 + [[1, R D], [0, 0]] over H1..H4, and Halmos' two-subspace picture.

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "projgeo/matcore.hpp"

namespace projgeo {

inline constexpr double kIdemTol = 1e-10;
inline constexpr double kRankTol = 1e-8;

class Idempotent {
 public:
  /// Accepts A when ||A^2 - A|| <= tol (1 + ||A||^2) and E + E* - 1 is
  /// invertible.  Throws NotIdempotent or Degeneracy otherwise.
  static Idempotent validate(const ComplexMatrix& a, double tol = kIdemTol);

  const ComplexMatrix& matrix() const { return matrix_; }
  double idem_residual() const { return idem_residual_; }
  Eigen::Index dim() const { return matrix_.rows(); }

  /// E*, 1 - E, and U E U* are again idempotents.
  Idempotent adjoint() const;
  Idempotent complement() const;
  Idempotent conjugated(const ComplexMatrix& unitary) const;

  /// E + E* - 1, Hermitian and invertible.
  ComplexMatrix reflection_sum() const;
  /// 2E - 1
  ComplexMatrix reflection() const;

 private:
  Idempotent(ComplexMatrix m, double residual, double tol)
      : matrix_(std::move(m)), idem_residual_(residual), tol_(tol) {}

  ComplexMatrix matrix_;
  double idem_residual_;
  double tol_;
};

class OrthogonalProjection {
 public:
  /// Measures max(||M - M*||, ||M^2 - M||).  Within tol the matrix is kept;
  /// within 10 tol it is snapped to the nearest Hermitian idempotent by
  /// rounding its eigenvalues; beyond that ErrorKind::Input is thrown.
  static OrthogonalProjection validate(const ComplexMatrix& m, double tol);
  /// Projection onto the column span of an orthonormal basis.
  static OrthogonalProjection onto(const ComplexMatrix& orthonormal_columns);

  const ComplexMatrix& matrix() const { return matrix_; }
  Eigen::Index rank() const { return rank_; }
  Eigen::Index dim() const { return matrix_.rows(); }
  /// 2P - 1
  ComplexMatrix symmetry() const;
  OrthogonalProjection complement() const;

 private:
  OrthogonalProjection(ComplexMatrix m, Eigen::Index rank) : matrix_(std::move(m)), rank_(rank) {}

  ComplexMatrix matrix_;
  Eigen::Index rank_;
};

/// Default projection acceptance tolerance at dimension n.
double projection_tol(Eigen::Index n);

struct BlockForm {
  ComplexMatrix range_basis;       // n x r, orthonormal, spans R(E)
  ComplexMatrix complement_basis;  // n x (n - r), orthonormal, spans R(E)^perp
  ComplexMatrix b;                 // r x (n - r)

  /// [range_basis | complement_basis]
  ComplexMatrix basis() const;
  /// basis * [[1, B], [0, 0]] * basis^*
  ComplexMatrix reassemble() const;
  double norm_b() const;
};

struct CprCanonicalForm {
  ComplexMatrix h1_basis;  // R(E) cap N(B*)
  ComplexMatrix h2_basis;  // R(E)^perp cap N(B)
  ComplexMatrix h3_basis;  // R(E) minus H1
  ComplexMatrix h4_basis;  // R(E)^perp minus H2
  ComplexMatrix r;         // Hermitian on H3, negative definite
  ComplexMatrix d;         // unitary H4 -> H3, in basis coordinates

  ComplexMatrix basis() const;
  /// Q = R^2 (1 + R^2)^{-1}, the positive contraction on H3.
  ComplexMatrix q() const;
  /// basis * (1 + 0 + [[1, R D], [0, 0]]) * basis^*
  ComplexMatrix reassemble() const;
  /// Embeds a block on H3 + H4 (order h3, h4) padded with `h1_value` on H1 and
  /// `h2_value` on H2 into the ambient space.
  ComplexMatrix embed(const ComplexMatrix& generic_block, Complex h1_value,
                      Complex h2_value) const;
};

struct HalmosDecomposition {
  Eigen::Index dim_both = 0;     // R(P) cap R(Q)
  Eigen::Index dim_p_only = 0;   // R(P) cap N(Q)
  Eigen::Index dim_q_only = 0;   // N(P) cap R(Q)
  Eigen::Index dim_neither = 0;  // N(P) cap N(Q)
  /// n x 2m isometry.  Its columns f_1..f_m, g_1..g_m form a basis of the
  /// generic part in which P = [[1, 0], [0, 0]] and
  /// Q = [[C^2, CS], [CS, S^2]], C = cos(angles), S = sin(angles).
  ComplexMatrix generic_iso;
  RealVector angles;  // ascending, in (0, pi/2)
};

struct BuckholtzResult {
  bool direct_sum = false;
  double norm_PQm1 = 0.0;   // ||P + Q - 1||
  double min_sv_PmQ = 0.0;  // smallest singular value of P - Q
};

struct ProjectionDistance {
  double norm_diff = 0.0;           // ||P_R(E) - P_R(E*)||
  double predicted = 0.0;           // ||B|| / sqrt(1 + ||B||^2)
  double geodesic_distance = 0.0;   // arcsin(norm_diff)
};

Idempotent from_block(Eigen::Index r, Eigen::Index k, const ComplexMatrix& b);

/// Haar unitary of size n drawn from a seeded generator.
ComplexMatrix haar_unitary(Eigen::Index n, std::uint64_t seed);
/// U from_block(r, k, B) U* with ||B|| = target_norm_b.  Deterministic per seed.
Idempotent random_idempotent(Eigen::Index r, Eigen::Index k, double target_norm_b,
                             std::uint64_t seed);

/// E (E + E* - 1)^{-1}
OrthogonalProjection range_projection(const Idempotent& e);
/// E* (E + E* - 1)^{-1}
OrthogonalProjection corange_projection(const Idempotent& e);

BlockForm block_form(const Idempotent& e);

BuckholtzResult buckholtz_check(const OrthogonalProjection& p, const OrthogonalProjection& q);

/// Ascending eigenvalues of P_R(E) - P_R(E*).  Away from zero they are
/// +-t/sqrt(1+t^2) for the singular values t of B; kernels of B and B* add
/// zeros.
RealVector difference_spectrum(const Idempotent& e);
/// {+-t/sqrt(1+t^2) : t singular value of B} padded with zeros to n, ascending.
RealVector predicted_difference_spectrum(const BlockForm& form);

/// Orthogonal projection of uniformly drawn rank 0..n onto a Haar-random subspace.
OrthogonalProjection random_projection(Eigen::Index n, std::uint64_t seed);

ProjectionDistance projection_distance(const Idempotent& e);

CprCanonicalForm cpr_canonical_form(const Idempotent& e, double rank_tol = kRankTol);

HalmosDecomposition halmos_decomposition(const OrthogonalProjection& p,
                                         const OrthogonalProjection& q,
                                         double rank_tol = kRankTol);

nlohmann::json to_json(const CprCanonicalForm& form);
nlohmann::json to_json(const HalmosDecomposition& h);

}  // namespace projgeo
