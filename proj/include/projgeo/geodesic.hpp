#pragma once

// The minimal Grassmann geodesic from P_R(E) to P_R(E*), the matched
// projection m(E), the Davis symmetry of the pair, and the retraction
// pi(C) = C |C|^{-1} from reflections onto symmetries.  The central fact
// checked here is that the three midpoints coincide:
//
//   m(E) = delta_E(1/2) = (pi(2E - 1) + 1) / 2,   2 m(E) - 1 = V_d.

#include <cstdint>
#include <optional>

#include <json.hpp>

#include "projgeo/idempotent.hpp"

namespace projgeo {

class GeodesicExponent {
 public:
  /// Checks X = X*, ||X|| < pi/2 and that X is off-diagonal with respect to
  /// `base`.  Throws ErrorKind::Geometry otherwise.
  static GeodesicExponent validate(ComplexMatrix x, OrthogonalProjection base);

  const ComplexMatrix& x() const { return x_; }
  const OrthogonalProjection& base() const { return base_; }
  double norm() const { return norm_; }

  /// exp(itX) base exp(-itX)
  OrthogonalProjection point(double t) const;

 private:
  GeodesicExponent(ComplexMatrix x, OrthogonalProjection base, double norm)
      : x_(std::move(x)), base_(std::move(base)), norm_(norm) {}

  ComplexMatrix x_;
  OrthogonalProjection base_;
  double norm_;
};

struct MatchedProjection {
  OrthogonalProjection m;
  Idempotent source;
};

struct AnalysisReport {
  Eigen::Index n = 0;
  double norm_B = 0.0;
  double norm_diff = 0.0;
  /// max of ||m(E) - delta_E(1/2)|| and ||m(E) - closed-form midpoint||
  double residual_m_vs_midpoint = 0.0;
  double residual_m_vs_pi = 0.0;
  double residual_m_vs_davis = 0.0;
  /// ||log |2E - 1|||, the fiber distance from E to m(E)
  double dist_E_to_mE = 0.0;
  double norm_E_minus_mE = 0.0;
  RealVector spectrum;

  std::optional<std::uint64_t> seed;
  std::optional<double> norm_target;

  double max_residual() const;
};

/// The four routes to the midpoint, each measured against m(E).
struct CoincidenceResiduals {
  double geodesic_midpoint = 0.0;    // ||m - delta(1/2)||
  double closed_form_midpoint = 0.0; // ||m - midpoint_closed_form||
  double retraction = 0.0;           // ||(2m - 1) - pi(2E - 1)||
  double davis = 0.0;                // ||(2m - 1) - V_d(P, Q)||

  double max() const;
};

struct MatchedDistances {
  double norm_E_mE = 0.0;   // ||E - m(E)||
  double norm_P_mE = 0.0;   // ||P_R(E) - m(E)||
  double dist_P_mE = 0.0;   // arctan(||B||) / 2
};

struct NaturalityResiduals {
  double adjoint = 0.0;     // ||m(E*) - m(E)||
  double complement = 0.0;  // ||m(1 - E) - (1 - m(E))||
  double unitary = 0.0;     // ||m(U E U*) - U m(E) U*||
  Eigen::Index complement_rank = 0;

  double max() const;
};

/// X = -(i/2) log((2Q - 1)(2P - 1)), P = P_R(E), Q = P_R(E*).
GeodesicExponent exponent(const Idempotent& e);
/// X from the canonical form: 0 + 0 + [[0, i atan(R) D], [-i D* atan(R), 0]].
GeodesicExponent exponent_block_formula(const Idempotent& e, double rank_tol = kRankTol);

OrthogonalProjection geodesic_point(const Idempotent& e, double t);
OrthogonalProjection midpoint_closed_form(const Idempotent& e, double rank_tol = kRankTol);

MatchedProjection matched_projection(const Idempotent& e);

/// V_d = (1 - (P - Q)^2)^{-1/2} (P + Q - 1).  Throws ErrorKind::Geometry when
/// ||P - Q|| >= 1 - 1e-10.
ComplexMatrix davis_symmetry(const OrthogonalProjection& p, const OrthogonalProjection& q);
/// Unitary polar factor of C + C*, C = 2E - 1.
ComplexMatrix davis_via_reflection(const Idempotent& e);

/// Throws ErrorKind::Input unless ||C^2 - 1|| <= tol (1 + ||C||^2).
void require_reflection(const ComplexMatrix& c, double tol = kIdemTol);
/// pi(C) = C |C|^{-1}, the unitary polar factor of a reflection.
ComplexMatrix retraction_pi(const ComplexMatrix& c);
/// || |C|^{1/2} X |C|^{-1/2} ||
double finsler_norm(const ComplexMatrix& c, const ComplexMatrix& x);
/// pi(C) |C|^t
ComplexMatrix fiber_geodesic(const ComplexMatrix& c, double t);
/// || log |2E - 1| ||
double fiber_distance(const Idempotent& e);

MatchedDistances matched_distances(const Idempotent& e);

CoincidenceResiduals coincidence_residuals(const Idempotent& e);
AnalysisReport coincidence_report(const Idempotent& e);

struct CoincidenceAnalysis {
  AnalysisReport report;
  CoincidenceResiduals residuals;
};
/// The report together with all four residuals, computed once.
CoincidenceAnalysis coincidence_analysis(const Idempotent& e);

NaturalityResiduals naturality_check(const Idempotent& e, const ComplexMatrix& u);
/// Same, with a Haar unitary drawn from `seed`.
NaturalityResiduals naturality_check(const Idempotent& e, std::uint64_t seed);

/// 1/2 (||E|| - 1 + sqrt(||E||^2 - 1))
double matched_distance_formula(double norm_e);

nlohmann::json to_json(const AnalysisReport& report);

}  // namespace projgeo
