#include "projgeo/idempotent.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "projgeo/matrix_json.hpp"

namespace projgeo {

namespace {

// Margin for the strict inequality ||P + Q - 1|| < 1.
constexpr double kStrictTol = 1e-10;
// Rank decisions: below tol -> zero, above kBandFactor * tol -> nonzero,
// in between -> ErrorKind::Tolerance.
constexpr double kBandFactor = 100.0;

enum class Side { Zero, NonZero };

Side classify(double distance, double tol, const char* what) {
  if (distance <= tol) return Side::Zero;
  if (distance < kBandFactor * tol) {
    std::ostringstream os;
    os << what << ": value " << distance << " inside the ambiguity band (" << tol << ", "
       << kBandFactor * tol << ")";
    throw Error(ErrorKind::Tolerance, os.str());
  }
  return Side::NonZero;
}

ComplexMatrix columns(const ComplexMatrix& m, const std::vector<Eigen::Index>& idx) {
  ComplexMatrix out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.col(idx[j]);
  return out;
}

ComplexMatrix hcat(std::initializer_list<const ComplexMatrix*> blocks, Eigen::Index rows) {
  Eigen::Index cols = 0;
  for (const auto* b : blocks) cols += b->cols();
  ComplexMatrix out(rows, cols);
  Eigen::Index at = 0;
  for (const auto* b : blocks) {
    if (b->cols() == 0) continue;
    out.middleCols(at, b->cols()) = *b;
    at += b->cols();
  }
  return out;
}

// First component of non-negligible modulus made real positive.
void fix_phase(Eigen::Ref<Eigen::VectorXcd> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > 1e-8) {
      v *= std::conj(v(i)) / mag;
      return;
    }
  }
}

}  // namespace

// --- Idempotent -------------------------------------------------------------

Idempotent Idempotent::validate(const ComplexMatrix& a, double tol) {
  require_square(a, "idempotent");
  require_finite(a, "idempotent");
  const Eigen::Index n = a.rows();
  const double norm = operator_norm(a);
  const double residual = operator_norm(a * a - a);
  if (residual > tol * (1.0 + norm * norm)) {
    std::ostringstream os;
    os << "||E^2 - E|| = " << residual << " exceeds " << tol * (1.0 + norm * norm);
    throw Error(ErrorKind::NotIdempotent, os.str());
  }
  if (n > 0) {
    const RealVector ev = hermitian_eigenvalues(hermitian_part(a + a.adjoint() - identity(n)));
    const RealVector mags = ev.cwiseAbs();
    if (mags.minCoeff() <= kInvTol * mags.maxCoeff()) {
      throw Error(ErrorKind::Degeneracy, "E + E* - 1 is singular");
    }
  }
  return Idempotent(a, residual, tol);
}

Idempotent Idempotent::adjoint() const { return validate(matrix_.adjoint(), tol_); }

Idempotent Idempotent::complement() const { return validate(identity(dim()) - matrix_, tol_); }

Idempotent Idempotent::conjugated(const ComplexMatrix& unitary) const {
  if (unitary.rows() != dim() || unitary.cols() != dim()) {
    throw Error(ErrorKind::Input, "conjugating unitary has the wrong shape");
  }
  if (unitarity_defect(unitary) > 1e-10 * static_cast<double>(std::max<Eigen::Index>(dim(), 1))) {
    throw Error(ErrorKind::Input, "conjugating matrix is not unitary");
  }
  return validate(unitary * matrix_ * unitary.adjoint(), tol_);
}

ComplexMatrix Idempotent::reflection_sum() const {
  return hermitian_part(matrix_ + matrix_.adjoint() - identity(dim()));
}

ComplexMatrix Idempotent::reflection() const { return 2.0 * matrix_ - identity(dim()); }

// --- OrthogonalProjection ---------------------------------------------------

double projection_tol(Eigen::Index n) { return 1e-10 * static_cast<double>(std::max<Eigen::Index>(n, 1)); }

OrthogonalProjection OrthogonalProjection::validate(const ComplexMatrix& m, double tol) {
  require_square(m, "projection");
  require_finite(m, "projection");
  const Eigen::Index n = m.rows();
  if (n == 0) return OrthogonalProjection(m, 0);
  const double herm_defect = hermitian_norm(Complex(0, 1) * (m - m.adjoint()));
  const double idem_defect = operator_norm(m * m - m);
  const double defect = std::max(herm_defect, idem_defect);
  if (defect > 10.0 * tol) {
    std::ostringstream os;
    os << "not an orthogonal projection: defect " << defect << " exceeds " << 10.0 * tol;
    throw Error(ErrorKind::Input, os.str());
  }
  const ComplexMatrix h = hermitian_part(m);
  const SpectralDecomposition eig = hermitian_eig(h);
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (eig.eigenvalues(i) > 0.5) kept.push_back(i);
  }
  const auto rank = static_cast<Eigen::Index>(kept.size());
  if (defect <= tol) return OrthogonalProjection(h, rank);
  const ComplexMatrix v = columns(eig.eigenvectors, kept);
  return OrthogonalProjection(v * v.adjoint(), rank);
}

OrthogonalProjection OrthogonalProjection::onto(const ComplexMatrix& orthonormal_columns) {
  return validate(orthonormal_columns * orthonormal_columns.adjoint(),
                  projection_tol(orthonormal_columns.rows()));
}

ComplexMatrix OrthogonalProjection::symmetry() const { return 2.0 * matrix_ - identity(dim()); }

OrthogonalProjection OrthogonalProjection::complement() const {
  return OrthogonalProjection(identity(dim()) - matrix_, dim() - rank_);
}

// --- Construction -----------------------------------------------------------

Idempotent from_block(Eigen::Index r, Eigen::Index k, const ComplexMatrix& b) {
  if (r < 0 || k < 0 || b.rows() != r || b.cols() != k) {
    std::ostringstream os;
    os << "block B must be " << r << "x" << k << ", got " << b.rows() << "x" << b.cols();
    throw Error(ErrorKind::Input, os.str());
  }
  require_finite(b, "block B");
  ComplexMatrix e = ComplexMatrix::Zero(r + k, r + k);
  e.topLeftCorner(r, r).setIdentity();
  e.topRightCorner(r, k) = b;
  return Idempotent::validate(e);
}

namespace {

ComplexMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

ComplexMatrix haar_from(Eigen::Index n, std::mt19937_64& rng) {
  const ComplexMatrix g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * identity(n);
  const ComplexMatrix& rmat = qr.matrixQR();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex d = rmat(i, i);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(i) *= d / mag;
  }
  return q;
}

}  // namespace

ComplexMatrix haar_unitary(Eigen::Index n, std::uint64_t seed) {
  if (n < 0) throw Error(ErrorKind::Input, "negative dimension");
  std::mt19937_64 rng(seed);
  return haar_from(n, rng);
}

Idempotent random_idempotent(Eigen::Index r, Eigen::Index k, double target_norm_b,
                             std::uint64_t seed) {
  if (r < 1 || k < 1) throw Error(ErrorKind::Input, "r and k must be at least 1");
  if (!(target_norm_b >= 0.0) || !std::isfinite(target_norm_b)) {
    throw Error(ErrorKind::Input, "target ||B|| must be finite and non-negative");
  }
  std::mt19937_64 rng(seed);
  const ComplexMatrix u = haar_from(r + k, rng);
  ComplexMatrix b = gaussian_matrix(r, k, rng);
  if (target_norm_b == 0.0) {
    b.setZero();
  } else {
    b *= target_norm_b / operator_norm(b);
  }
  ComplexMatrix block = ComplexMatrix::Zero(r + k, r + k);
  block.topLeftCorner(r, r).setIdentity();
  block.topRightCorner(r, k) = b;
  return Idempotent::validate(u * block * u.adjoint());
}

// --- Range projections ------------------------------------------------------

namespace {

double ando_tol(const Idempotent& e) {
  const double scale = 1.0 + operator_norm(e.matrix());
  return projection_tol(e.dim()) * scale;
}

}  // namespace

OrthogonalProjection range_projection(const Idempotent& e) {
  const ComplexMatrix s_inv = e.reflection_sum().partialPivLu().inverse();
  return OrthogonalProjection::validate(e.matrix() * s_inv, ando_tol(e));
}

OrthogonalProjection corange_projection(const Idempotent& e) {
  const ComplexMatrix s_inv = e.reflection_sum().partialPivLu().inverse();
  return OrthogonalProjection::validate(e.matrix().adjoint() * s_inv, ando_tol(e));
}

// --- Block form -------------------------------------------------------------

ComplexMatrix BlockForm::basis() const {
  return hcat({&range_basis, &complement_basis}, range_basis.rows());
}

ComplexMatrix BlockForm::reassemble() const {
  const Eigen::Index r = range_basis.cols();
  const Eigen::Index k = complement_basis.cols();
  ComplexMatrix block = ComplexMatrix::Zero(r + k, r + k);
  block.topLeftCorner(r, r).setIdentity();
  block.topRightCorner(r, k) = b;
  const ComplexMatrix u = basis();
  return u * block * u.adjoint();
}

double BlockForm::norm_b() const { return b.size() == 0 ? 0.0 : operator_norm(b); }

BlockForm block_form(const Idempotent& e) {
  const OrthogonalProjection p = range_projection(e);
  const SpectralDecomposition eig = hermitian_eig(p.matrix());
  const Eigen::Index n = e.dim();
  std::vector<Eigen::Index> range_idx;
  std::vector<Eigen::Index> comp_idx;
  // Descending eigenvalue order.
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    (eig.eigenvalues(i) > 0.5 ? range_idx : comp_idx).push_back(i);
  }
  BlockForm out;
  out.range_basis = columns(eig.eigenvectors, range_idx);
  out.complement_basis = columns(eig.eigenvectors, comp_idx);
  for (Eigen::Index j = 0; j < out.range_basis.cols(); ++j) fix_phase(out.range_basis.col(j));
  for (Eigen::Index j = 0; j < out.complement_basis.cols(); ++j) {
    fix_phase(out.complement_basis.col(j));
  }
  out.b = out.range_basis.adjoint() * e.matrix() * out.complement_basis;
  return out;
}

// --- Difference of projections ---------------------------------------------

BuckholtzResult buckholtz_check(const OrthogonalProjection& p, const OrthogonalProjection& q) {
  if (p.dim() != q.dim()) throw Error(ErrorKind::Input, "projections differ in dimension");
  BuckholtzResult out;
  if (p.dim() == 0) return out;
  const ComplexMatrix sum = p.matrix() + q.matrix() - identity(p.dim());
  out.norm_PQm1 = hermitian_norm(sum);
  out.min_sv_PmQ = hermitian_eigenvalues(hermitian_part(p.matrix() - q.matrix())).cwiseAbs().minCoeff();
  out.direct_sum = out.norm_PQm1 < 1.0 - kStrictTol;
  return out;
}

RealVector difference_spectrum(const Idempotent& e) {
  const OrthogonalProjection p = range_projection(e);
  const OrthogonalProjection q = corange_projection(e);
  return hermitian_eigenvalues(hermitian_part(p.matrix() - q.matrix()));
}

RealVector predicted_difference_spectrum(const BlockForm& form) {
  const Eigen::Index n = form.range_basis.rows();
  RealVector out = RealVector::Zero(n);
  if (form.b.size() > 0) {
    const RealVector s = singular_values(form.b);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      const double v = s(i) / std::sqrt(1.0 + s(i) * s(i));
      out(2 * i) = v;
      out(2 * i + 1) = -v;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

OrthogonalProjection random_projection(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, n);
  const Eigen::Index rank = pick(rng);
  const ComplexMatrix u = haar_from(n, rng);
  return OrthogonalProjection::onto(u.leftCols(rank));
}

ProjectionDistance projection_distance(const Idempotent& e) {
  const OrthogonalProjection p = range_projection(e);
  const OrthogonalProjection q = corange_projection(e);
  ProjectionDistance out;
  out.norm_diff = hermitian_norm(p.matrix() - q.matrix());
  const double nb = block_form(e).norm_b();
  out.predicted = nb / std::sqrt(1.0 + nb * nb);
  out.geodesic_distance = std::asin(std::min(out.norm_diff, 1.0));
  return out;
}

// --- CPR canonical form -----------------------------------------------------

ComplexMatrix CprCanonicalForm::basis() const {
  return hcat({&h1_basis, &h2_basis, &h3_basis, &h4_basis}, h1_basis.rows());
}

ComplexMatrix CprCanonicalForm::q() const {
  const ComplexMatrix r2 = r * r;
  const Eigen::Index d = r.rows();
  return hermitian_part(r2 * (identity(d) + r2).inverse());
}

ComplexMatrix CprCanonicalForm::embed(const ComplexMatrix& generic_block, Complex h1_value,
                                      Complex h2_value) const {
  const Eigen::Index d1 = h1_basis.cols();
  const Eigen::Index d2 = h2_basis.cols();
  const Eigen::Index d34 = h3_basis.cols() + h4_basis.cols();
  if (generic_block.rows() != d34 || generic_block.cols() != d34) {
    throw Error(ErrorKind::Input, "generic block has the wrong shape");
  }
  const Eigen::Index total = d1 + d2 + d34;
  ComplexMatrix block = ComplexMatrix::Zero(total, total);
  block.topLeftCorner(d1, d1).diagonal().setConstant(h1_value);
  block.block(d1, d1, d2, d2).diagonal().setConstant(h2_value);
  block.bottomRightCorner(d34, d34) = generic_block;
  const ComplexMatrix u = basis();
  return u * block * u.adjoint();
}

ComplexMatrix CprCanonicalForm::reassemble() const {
  const Eigen::Index d = r.rows();
  ComplexMatrix generic = ComplexMatrix::Zero(2 * d, 2 * d);
  generic.topLeftCorner(d, d).setIdentity();
  generic.topRightCorner(d, d) = r * this->d;
  return embed(generic, 1.0, 0.0);
}

CprCanonicalForm cpr_canonical_form(const Idempotent& e, double rank_tol) {
  const BlockForm bf = block_form(e);
  const Eigen::Index r = bf.b.rows();
  const Eigen::Index k = bf.b.cols();
  // Left singular vectors split R(E) into N(B*) and its complement; right
  // singular vectors split R(E)^perp into N(B) and its complement.
  ComplexMatrix w = identity(r);
  ComplexMatrix z = identity(k);
  RealVector s;
  if (r > 0 && k > 0) {
    Eigen::BDCSVD<ComplexMatrix> svd(bf.b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    w = svd.matrixU();
    z = svd.matrixV();
    s = svd.singularValues();
  }
  const double scale = std::max(1.0, s.size() > 0 ? s(0) : 0.0);
  Eigen::Index d = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (classify(s(i), rank_tol * scale, "singular value of B") == Side::NonZero) ++d;
  }
  CprCanonicalForm out;
  out.h3_basis = bf.range_basis * w.leftCols(d);
  out.h1_basis = bf.range_basis * w.rightCols(r - d);
  out.h4_basis = bf.complement_basis * z.leftCols(d);
  out.h2_basis = bf.complement_basis * z.rightCols(k - d);
  const ComplexMatrix b0 = out.h3_basis.adjoint() * e.matrix() * out.h4_basis;
  if (d == 0) {
    out.r = ComplexMatrix(0, 0);
    out.d = ComplexMatrix(0, 0);
    return out;
  }
  out.r = -apply_hermitian_function(hermitian_part(b0 * b0.adjoint()),
                                    [](double x) { return std::sqrt(std::max(x, 0.0)); });
  out.d = out.r.partialPivLu().solve(b0);
  return out;
}

// --- Halmos decomposition ---------------------------------------------------

HalmosDecomposition halmos_decomposition(const OrthogonalProjection& p,
                                         const OrthogonalProjection& q, double rank_tol) {
  if (p.dim() != q.dim()) throw Error(ErrorKind::Input, "projections differ in dimension");
  const Eigen::Index n = p.dim();
  HalmosDecomposition out;
  out.generic_iso = ComplexMatrix(n, 0);
  if (n == 0) return out;

  const SpectralDecomposition sum = hermitian_eig(hermitian_part(p.matrix() + q.matrix()));
  const SpectralDecomposition diff = hermitian_eig(hermitian_part(p.matrix() - q.matrix()));
  std::vector<Eigen::Index> both, neither, p_only, q_only;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lam = sum.eigenvalues(i);
    if (classify(std::abs(lam - 2.0), rank_tol, "eigenvalue of P+Q near 2") == Side::Zero) {
      both.push_back(i);
    } else if (classify(std::abs(lam), rank_tol, "eigenvalue of P+Q near 0") == Side::Zero) {
      neither.push_back(i);
    }
    const double mu = diff.eigenvalues(i);
    if (classify(std::abs(mu - 1.0), rank_tol, "eigenvalue of P-Q near 1") == Side::Zero) {
      p_only.push_back(i);
    } else if (classify(std::abs(mu + 1.0), rank_tol, "eigenvalue of P-Q near -1") == Side::Zero) {
      q_only.push_back(i);
    }
  }
  out.dim_both = static_cast<Eigen::Index>(both.size());
  out.dim_neither = static_cast<Eigen::Index>(neither.size());
  out.dim_p_only = static_cast<Eigen::Index>(p_only.size());
  out.dim_q_only = static_cast<Eigen::Index>(q_only.size());

  const ComplexMatrix k_both = columns(sum.eigenvectors, both);
  const ComplexMatrix k_neither = columns(sum.eigenvectors, neither);
  const ComplexMatrix k_p = columns(diff.eigenvectors, p_only);
  const ComplexMatrix k_q = columns(diff.eigenvectors, q_only);
  const ComplexMatrix special = hcat({&k_both, &k_neither, &k_p, &k_q}, n);
  const Eigen::Index generic_dim = n - special.cols();
  if (generic_dim % 2 != 0) {
    throw Error(ErrorKind::Tolerance, "generic part has odd dimension");
  }
  if (generic_dim == 0) return out;

  // Orthonormal basis of the generic part H0.
  const SpectralDecomposition perp =
      hermitian_eig(hermitian_part(identity(n) - special * special.adjoint()));
  const ComplexMatrix h0 = perp.eigenvectors.rightCols(generic_dim);

  // H0 reduces P; R(P) cap H0 has dimension generic_dim / 2.
  const Eigen::Index m = generic_dim / 2;
  const SpectralDecomposition p0 = hermitian_eig(hermitian_part(h0.adjoint() * p.matrix() * h0));
  const ComplexMatrix f_range = h0 * p0.eigenvectors.rightCols(m);

  // P Q P on R(P) cap H0 has eigenvalues cos^2 of the principal angles.
  const SpectralDecomposition compress =
      hermitian_eig(hermitian_part(f_range.adjoint() * q.matrix() * f_range));
  out.angles.resize(m);
  out.generic_iso.resize(n, 2 * m);
  const ComplexMatrix p_perp = identity(n) - p.matrix();
  for (Eigen::Index i = 0; i < m; ++i) {
    // Ascending cos^2 means descending angle; store angles ascending.
    const Eigen::Index src = m - 1 - i;
    const double c2 = std::clamp(compress.eigenvalues(src), 0.0, 1.0);
    const double c = std::sqrt(c2);
    const double s = std::sqrt(1.0 - c2);
    out.angles(i) = std::atan2(s, c);
    const Eigen::VectorXcd f = f_range * compress.eigenvectors.col(src);
    const Eigen::VectorXcd g = p_perp * q.matrix() * f / (c * s);
    out.generic_iso.col(i) = f;
    out.generic_iso.col(m + i) = g;
  }
  return out;
}

// --- Serialization ----------------------------------------------------------

nlohmann::json to_json(const CprCanonicalForm& form) {
  return {{"h1_basis", matrix_to_json(form.h1_basis)},
          {"h2_basis", matrix_to_json(form.h2_basis)},
          {"h3_basis", matrix_to_json(form.h3_basis)},
          {"h4_basis", matrix_to_json(form.h4_basis)},
          {"R", matrix_to_json(form.r)},
          {"D", matrix_to_json(form.d)}};
}

nlohmann::json to_json(const HalmosDecomposition& h) {
  return {{"dim_both", h.dim_both},
          {"dim_p_only", h.dim_p_only},
          {"dim_q_only", h.dim_q_only},
          {"dim_neither", h.dim_neither},
          {"generic_iso", matrix_to_json(h.generic_iso)},
          {"angles", reals_to_json(h.angles)}};
}

}  // namespace projgeo
