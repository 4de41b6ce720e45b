#include "projgeo/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "projgeo/matrix_json.hpp"

namespace projgeo {

namespace {

double scaled(Eigen::Index n) { return static_cast<double>(std::max<Eigen::Index>(n, 1)); }

struct RangePair {
  OrthogonalProjection p;
  OrthogonalProjection q;
};

RangePair range_pair(const Idempotent& e) { return {range_projection(e), corange_projection(e)}; }

GeodesicExponent exponent_from(const RangePair& pq) {
  const ComplexMatrix w = pq.q.symmetry() * pq.p.symmetry();
  ComplexMatrix l;
  try {
    l = principal_log_unitary(w);
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::Branch) {
      throw Error(ErrorKind::Branch,
                  std::string("||P - Q|| = 1 geometry, no unique geodesic: ") + err.what());
    }
    throw;
  }
  const ComplexMatrix x = hermitian_part(Complex(0.0, -0.5) * l);
  return GeodesicExponent::validate(x, pq.p);
}

OrthogonalProjection projection_result(const ComplexMatrix& m, double scale = 1.0) {
  return OrthogonalProjection::validate(m, projection_tol(m.rows()) * scale);
}

MatchedProjection matched_from_block(const Idempotent& e, const BlockForm& bf) {
  const Eigen::Index r = bf.range_basis.cols();
  const Eigen::Index k = bf.complement_basis.cols();
  const Eigen::Index n = r + k;
  ComplexMatrix block = ComplexMatrix::Zero(n, n);
  if (r > 0 && k > 0) {
    const ComplexMatrix& b = bf.b;
    const SpectralDecomposition bb = hermitian_eig(hermitian_part(b * b.adjoint()));
    // T = (1 + BB*)^{1/2}
    const ComplexMatrix t_inv =
        apply_hermitian_function(bb, [](double x) { return 1.0 / std::sqrt(1.0 + std::max(x, 0.0)); });
    const ComplexMatrix tt1_inv = apply_hermitian_function(bb, [](double x) {
      const double t = std::sqrt(1.0 + std::max(x, 0.0));
      return 1.0 / (t * (t + 1.0));
    });
    block.topLeftCorner(r, r) = identity(r) + t_inv;
    block.topRightCorner(r, k) = t_inv * b;
    block.bottomLeftCorner(k, r) = b.adjoint() * t_inv;
    block.bottomRightCorner(k, k) = b.adjoint() * tt1_inv * b;
    block *= 0.5;
  } else if (r > 0) {
    block.setIdentity();
  }
  const ComplexMatrix u = bf.basis();
  const double scale = 1.0 + (r > 0 && k > 0 ? operator_norm(bf.b) : 0.0);
  OrthogonalProjection m = projection_result(u * block * u.adjoint(), scale);
  if (m.rank() != r) {
    std::ostringstream os;
    os << "matched projection has rank " << m.rank() << ", source has rank " << r;
    throw Error(ErrorKind::Input, os.str());
  }
  return {std::move(m), e};
}

double projection_gap(const ComplexMatrix& a, const ComplexMatrix& b) {
  return hermitian_norm(a - b);
}

}  // namespace

// --- GeodesicExponent -------------------------------------------------------

GeodesicExponent GeodesicExponent::validate(ComplexMatrix x, OrthogonalProjection base) {
  require_square(x, "exponent");
  require_finite(x, "exponent");
  const Eigen::Index n = x.rows();
  if (base.dim() != n) throw Error(ErrorKind::Input, "exponent and base differ in dimension");
  const double norm = operator_norm(x);
  const double skew = hermitian_norm(Complex(0, 1) * (x - x.adjoint()));
  if (skew > 1e-10 * norm + 1e-14) {
    throw Error(ErrorKind::Geometry, "exponent is not Hermitian");
  }
  if (!(norm < std::numbers::pi / 2)) {
    throw Error(ErrorKind::Geometry, "exponent norm is not below pi/2");
  }
  const ComplexMatrix& p = base.matrix();
  const ComplexMatrix p_perp = identity(n) - p;
  const double diag = operator_norm(p * x * p) + operator_norm(p_perp * x * p_perp);
  if (diag > 1e-9 * scaled(n) * norm + 1e-12 * scaled(n)) {
    std::ostringstream os;
    os << "exponent is not codiagonal (diagonal blocks " << diag << ")";
    throw Error(ErrorKind::Geometry, os.str());
  }
  return GeodesicExponent(hermitian_part(x), std::move(base), norm);
}

OrthogonalProjection GeodesicExponent::point(double t) const {
  if (x_.rows() == 0) return base_;
  const ComplexMatrix u = expm_i_hermitian(x_, t);
  return projection_result(u * base_.matrix() * u.adjoint());
}

// --- Exponent and geodesic --------------------------------------------------

GeodesicExponent exponent(const Idempotent& e) { return exponent_from(range_pair(e)); }

GeodesicExponent exponent_block_formula(const Idempotent& e, double rank_tol) {
  const CprCanonicalForm form = cpr_canonical_form(e, rank_tol);
  const Eigen::Index d = form.r.rows();
  ComplexMatrix generic = ComplexMatrix::Zero(2 * d, 2 * d);
  if (d > 0) {
    const ComplexMatrix atan_r =
        apply_hermitian_function(form.r, [](double x) { return std::atan(x); });
    const Complex i(0.0, 1.0);
    generic.topRightCorner(d, d) = i * atan_r * form.d;
    generic.bottomLeftCorner(d, d) = -i * form.d.adjoint() * atan_r;
  }
  return GeodesicExponent::validate(form.embed(generic, 0.0, 0.0), range_projection(e));
}

OrthogonalProjection geodesic_point(const Idempotent& e, double t) { return exponent(e).point(t); }

OrthogonalProjection midpoint_closed_form(const Idempotent& e, double rank_tol) {
  const CprCanonicalForm form = cpr_canonical_form(e, rank_tol);
  const Eigen::Index d = form.r.rows();
  ComplexMatrix generic = ComplexMatrix::Zero(2 * d, 2 * d);
  if (d > 0) {
    // T = (1 + R^2)^{-1/2}; R and T commute.
    const ComplexMatrix t =
        apply_hermitian_function(form.r, [](double x) { return 1.0 / std::sqrt(1.0 + x * x); });
    const ComplexMatrix rt = form.r * t;
    generic.topLeftCorner(d, d) = t;
    generic.topRightCorner(d, d) = rt * form.d;
    generic.bottomLeftCorner(d, d) = form.d.adjoint() * rt;
    generic.bottomRightCorner(d, d) = -form.d.adjoint() * t * form.d;
  }
  // Both projections are 1 on H1 and 0 on H2, so the symmetry is 1 + (-1) there.
  const ComplexMatrix s = form.embed(generic, 1.0, -1.0);
  return projection_result(0.5 * (s + identity(e.dim())));
}

// --- Matched projection -----------------------------------------------------

MatchedProjection matched_projection(const Idempotent& e) {
  return matched_from_block(e, block_form(e));
}

double matched_distance_formula(double norm_e) {
  return 0.5 * (norm_e - 1.0 + std::sqrt(std::max(norm_e * norm_e - 1.0, 0.0)));
}

// --- Davis symmetry ---------------------------------------------------------

ComplexMatrix davis_symmetry(const OrthogonalProjection& p, const OrthogonalProjection& q) {
  if (p.dim() != q.dim()) throw Error(ErrorKind::Input, "projections differ in dimension");
  const Eigen::Index n = p.dim();
  if (n == 0) return ComplexMatrix(0, 0);
  const ComplexMatrix a = hermitian_part(p.matrix() - q.matrix());
  const double norm_a = hermitian_norm(a);
  if (norm_a >= 1.0 - 1e-10) {
    std::ostringstream os;
    os << "||P - Q|| = " << norm_a << " is not below 1";
    throw Error(ErrorKind::Geometry, os.str());
  }
  const ComplexMatrix d_inv_sqrt = apply_hermitian_function(
      hermitian_part(identity(n) - a * a), [](double x) { return 1.0 / std::sqrt(x); });
  return hermitian_part(d_inv_sqrt * (p.matrix() + q.matrix() - identity(n)));
}

ComplexMatrix davis_via_reflection(const Idempotent& e) {
  const ComplexMatrix c = e.reflection();
  return polar_decompose(c + c.adjoint()).unitary;
}

// --- Reflections and the retraction ----------------------------------------

void require_reflection(const ComplexMatrix& c, double tol) {
  require_square(c, "reflection");
  require_finite(c, "reflection");
  const double norm = operator_norm(c);
  const double defect = operator_norm(c * c - identity(c.rows()));
  if (defect > tol * (1.0 + norm * norm)) {
    std::ostringstream os;
    os << "||C^2 - 1|| = " << defect << ", not a reflection";
    throw Error(ErrorKind::Input, os.str());
  }
}

ComplexMatrix retraction_pi(const ComplexMatrix& c) {
  require_reflection(c);
  return polar_decompose(c).unitary;
}

double finsler_norm(const ComplexMatrix& c, const ComplexMatrix& x) {
  require_reflection(c);
  if (x.rows() != c.rows() || x.cols() != c.cols()) {
    throw Error(ErrorKind::Input, "tangent vector has the wrong shape");
  }
  require_finite(x, "tangent vector");
  const SpectralDecomposition abs_c = hermitian_eig(polar_decompose(c).positive);
  const ComplexMatrix half = apply_hermitian_function(abs_c, [](double s) { return std::sqrt(s); });
  const ComplexMatrix neg_half =
      apply_hermitian_function(abs_c, [](double s) { return 1.0 / std::sqrt(s); });
  return operator_norm(half * x * neg_half);
}

ComplexMatrix fiber_geodesic(const ComplexMatrix& c, double t) {
  require_reflection(c);
  const PolarFactors polar = polar_decompose(c);
  const ComplexMatrix power =
      apply_hermitian_function(polar.positive, [t](double s) { return std::pow(s, t); });
  return polar.unitary * power;
}

double fiber_distance(const Idempotent& e) {
  const RealVector s = singular_values(e.reflection());
  double out = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) out = std::max(out, std::abs(std::log(s(i))));
  return out;
}

// --- Distances and reports --------------------------------------------------

MatchedDistances matched_distances(const Idempotent& e) {
  const BlockForm bf = block_form(e);
  const MatchedProjection m = matched_from_block(e, bf);
  const OrthogonalProjection p = range_projection(e);
  MatchedDistances out;
  out.norm_E_mE = operator_norm(e.matrix() - m.m.matrix());
  out.norm_P_mE = projection_gap(p.matrix(), m.m.matrix());
  out.dist_P_mE = 0.5 * std::atan(bf.norm_b());
  return out;
}

double CoincidenceResiduals::max() const {
  return std::max({geodesic_midpoint, closed_form_midpoint, retraction, davis});
}

double NaturalityResiduals::max() const { return std::max({adjoint, complement, unitary}); }

double AnalysisReport::max_residual() const {
  return std::max({residual_m_vs_midpoint, residual_m_vs_pi, residual_m_vs_davis});
}

namespace {

CoincidenceResiduals residuals_from(const Idempotent& e, const RangePair& pq,
                                    const MatchedProjection& m) {
  const ComplexMatrix& mm = m.m.matrix();
  const ComplexMatrix sym_m = 2.0 * mm - identity(e.dim());
  CoincidenceResiduals out;
  out.geodesic_midpoint = projection_gap(mm, exponent_from(pq).point(0.5).matrix());
  out.closed_form_midpoint = projection_gap(mm, midpoint_closed_form(e).matrix());
  out.retraction = operator_norm(sym_m - retraction_pi(e.reflection()));
  out.davis = operator_norm(sym_m - davis_symmetry(pq.p, pq.q));
  return out;
}

}  // namespace

CoincidenceResiduals coincidence_residuals(const Idempotent& e) {
  return residuals_from(e, range_pair(e), matched_projection(e));
}

CoincidenceAnalysis coincidence_analysis(const Idempotent& e) {
  const RangePair pq = range_pair(e);
  const BlockForm bf = block_form(e);
  const MatchedProjection m = matched_from_block(e, bf);
  CoincidenceAnalysis out;
  out.residuals = residuals_from(e, pq, m);
  AnalysisReport& rep = out.report;
  rep.n = e.dim();
  rep.norm_B = bf.norm_b();
  const ComplexMatrix diff = hermitian_part(pq.p.matrix() - pq.q.matrix());
  rep.spectrum = e.dim() > 0 ? hermitian_eigenvalues(diff) : RealVector();
  rep.norm_diff = rep.spectrum.size() > 0 ? rep.spectrum.cwiseAbs().maxCoeff() : 0.0;
  rep.residual_m_vs_midpoint =
      std::max(out.residuals.geodesic_midpoint, out.residuals.closed_form_midpoint);
  rep.residual_m_vs_pi = out.residuals.retraction;
  rep.residual_m_vs_davis = out.residuals.davis;
  rep.dist_E_to_mE = fiber_distance(e);
  rep.norm_E_minus_mE = operator_norm(e.matrix() - m.m.matrix());
  return out;
}

AnalysisReport coincidence_report(const Idempotent& e) { return coincidence_analysis(e).report; }

NaturalityResiduals naturality_check(const Idempotent& e, const ComplexMatrix& u) {
  const Idempotent conj = e.conjugated(u);
  const ComplexMatrix m = matched_projection(e).m.matrix();
  const MatchedProjection m_comp = matched_projection(e.complement());
  NaturalityResiduals out;
  out.adjoint = projection_gap(matched_projection(e.adjoint()).m.matrix(), m);
  out.complement = projection_gap(m_comp.m.matrix(), identity(e.dim()) - m);
  out.unitary = projection_gap(matched_projection(conj).m.matrix(), u * m * u.adjoint());
  out.complement_rank = m_comp.m.rank();
  return out;
}

NaturalityResiduals naturality_check(const Idempotent& e, std::uint64_t seed) {
  return naturality_check(e, haar_unitary(e.dim(), seed));
}

nlohmann::json to_json(const AnalysisReport& report) {
  nlohmann::json j = {{"n", report.n},
                      {"norm_B", report.norm_B},
                      {"norm_diff", report.norm_diff},
                      {"residual_m_vs_midpoint", report.residual_m_vs_midpoint},
                      {"residual_m_vs_pi", report.residual_m_vs_pi},
                      {"residual_m_vs_davis", report.residual_m_vs_davis},
                      {"dist_E_to_mE", report.dist_E_to_mE},
                      {"norm_E_minus_mE", report.norm_E_minus_mE},
                      {"spectrum", reals_to_json(report.spectrum)}};
  if (report.seed) j["seed"] = *report.seed;
  if (report.norm_target) j["norm_target"] = *report.norm_target;
  return j;
}

}  // namespace projgeo
