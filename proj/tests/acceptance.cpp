// Acceptance suite.  One line per criterion:
//   [PASS|FAIL] <id> <name>: <measured> (limit <pinned>)
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/QR>
#include <unsupported/Eigen/MatrixFunctions>

#include "projgeo/campaign.hpp"
#include "projgeo/geodesic.hpp"
#include "projgeo/szego.hpp"

using namespace projgeo;
using Clock = std::chrono::steady_clock;

namespace {

// Grid shared by criteria 1, 2, 3 and 7.
const std::vector<Eigen::Index> kDims{2, 4, 8, 16, 32, 64};
const std::vector<double> kNormTargets{0.1, 1.0, 5.0, 10.0};
constexpr Eigen::Index kTrials = 200;
constexpr std::uint64_t kMasterSeed = 20240611;

// Criterion 1
constexpr double kCoincidenceTol = 1e-8;  // times n
constexpr double kCoincidenceSeconds = 120.0;
// Criterion 2
constexpr double kNormTheoremTol = 1e-10;  // times n
constexpr double kNormOracle2x2 = 0.7071067811865476;
constexpr double kNormOracle2x2Tol = 1e-14;
// Criterion 3
constexpr double kSpectrumTol = 1e-8;
// Criterion 4
constexpr Eigen::Index kMinimalityDim = 16;
constexpr int kMinimalityInstances = 20;
constexpr int kMinimalityProjections = 1000;
constexpr double kMinimalityTol = 1e-12;
constexpr double kMatchedDistanceTol = 1e-10;
// Criterion 5
constexpr Eigen::Index kExponentTrials = 10;
constexpr double kExponentNormTol = 1e-9;
constexpr double kHermitianTol = 1e-9;     // times ||X||, oracle route
constexpr double kCodiagonalTol = 1e-9;    // times n
constexpr double kBlockRouteTol = 1e-8;    // times n
constexpr double kEndpointTol = 1e-9;      // times n
// Criterion 6
constexpr Eigen::Index kFiberTrials = 10;
constexpr double kFiberAdjointTol = 1e-10;  // times n
constexpr double kFiberDistanceOracle = 0.8813735870195430;
constexpr double kFiberDistanceTol = 1e-12;
constexpr double kFinslerTol = 1e-10;       // relative to |X|_C
// Criterion 7
constexpr double kNaturalityTol = 1e-10;  // times n
// Criterion 8
const std::vector<double> kSzegoA{0.3, 0.5, 0.7};
const std::vector<Eigen::Index> kSzegoN{16, 32, 64, 128};
constexpr double kSzegoSeconds = 60.0;
// N = 128 regression bounds per a: |norm_diff - a|, |normB - ...|, |fiber - ...|.
// Measured values rounded up in the third significant digit.
struct SzegoBound {
  double a, err_a, err_b, err_f;
};
constexpr SzegoBound kSzegoBounds[] = {
    {0.3, 3.02e-5, 3.48e-5, 3.32e-5},
    {0.5, 5.03e-5, 7.74e-5, 6.70e-5},
    {0.7, 7.03e-5, 1.93e-4, 1.38e-4},
};

int failures = 0;
std::map<int, std::string> lines;

void report(int id, const char* name, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  lines[id] = std::string(ok ? "[PASS] " : "[FAIL] ") + std::to_string(id) + " " + name + ": " + detail;
  std::fprintf(stderr, "criterion %d done\n", id);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), f, a, b);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Singular values of B, obtained without the library's block form: any
// orthonormal bases V1 of R(E) and V2 of R(E)^perp give V1* E V2, unitarily
// equivalent to B.
RealVector oracle_b_singular_values(const ComplexMatrix& e, Eigen::Index r) {
  const Eigen::Index n = e.rows();
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(e);
  const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix b = q.leftCols(r).adjoint() * e * q.rightCols(n - r);
  Eigen::JacobiSVD<ComplexMatrix> svd(b);
  return svd.singularValues();
}

std::vector<double> predicted_spectrum(const RealVector& sv, Eigen::Index n) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    const double v = sv(i) / std::sqrt(1.0 + sv(i) * sv(i));
    out.push_back(v);
    out.push_back(-v);
  }
  out.resize(static_cast<std::size_t>(n), 0.0);
  std::sort(out.begin(), out.end());
  return out;
}

struct GridInstance {
  Eigen::Index n;
  Eigen::Index r;
  double target;
  std::uint64_t seed;
};

std::vector<GridInstance> grid(Eigen::Index trials, std::uint64_t salt) {
  CampaignConfig c;
  c.dims = kDims;
  c.norm_targets = kNormTargets;
  c.trials_per_dim = trials;
  c.seed = kMasterSeed ^ salt;
  std::vector<GridInstance> out;
  for (const InstanceSpec& s : campaign_instances(c)) out.push_back({s.n, s.r, s.norm_target, s.seed});
  return out;
}

void criteria_on_grid() {
  double worst_coincidence = 0.0;  // residual / n
  double worst_norm = 0.0;         // residual / n
  double worst_spectrum = 0.0;
  double worst_naturality = 0.0;   // residual / n
  double coincidence_seconds = 0.0;
  std::size_t errors = 0;
  std::size_t count = 0;
  for (const GridInstance& g : grid(kTrials, 0)) {
    ++count;
    const double n = static_cast<double>(g.n);
    try {
      const Idempotent e = random_idempotent(g.r, g.n - g.r, g.target, g.seed);
      const auto t0 = Clock::now();
      const CoincidenceAnalysis a = coincidence_analysis(e);
      coincidence_seconds += seconds_since(t0);
      worst_coincidence = std::max(worst_coincidence, a.residuals.max() / n);

      const RealVector sv = oracle_b_singular_values(e.matrix(), g.r);
      const double nb = sv.size() > 0 ? sv(0) : 0.0;
      worst_norm = std::max(worst_norm, std::abs(a.report.norm_diff - nb / std::sqrt(1.0 + nb * nb)) / n);

      const std::vector<double> expect = predicted_spectrum(sv, g.n);
      for (Eigen::Index i = 0; i < g.n; ++i) {
        worst_spectrum = std::max(worst_spectrum,
                                  std::abs(a.report.spectrum(i) - expect[static_cast<std::size_t>(i)]));
      }

      const NaturalityResiduals nat = naturality_check(e, splitmix64(g.seed + 17));
      worst_naturality = std::max(worst_naturality, nat.max() / n);
      if (nat.complement_rank != g.n - g.r) worst_naturality = INFINITY;
    } catch (const Error& err) {
      ++errors;
      std::fprintf(stderr, "instance n=%lld seed=%llu: %s\n", static_cast<long long>(g.n),
                   static_cast<unsigned long long>(g.seed), err.what());
    }
  }

  const std::string where = " over " + std::to_string(count) + " instances" +
                            (errors ? ", " + std::to_string(errors) + " raised" : "");
  report(1, "coincidence of the four midpoint routes",
         errors == 0 && worst_coincidence <= kCoincidenceTol && coincidence_seconds <= kCoincidenceSeconds,
         fmt("max residual/n %.3e (limit %.0e)", worst_coincidence, kCoincidenceTol) +
             fmt(", %.1f s (limit %.0f s)", coincidence_seconds, kCoincidenceSeconds) + where);

  const Idempotent b1 = Idempotent::validate((ComplexMatrix(2, 2) << 1, 1, 0, 0).finished());
  const double two = projection_distance(b1).norm_diff;
  const double two_err = std::abs(two - kNormOracle2x2);
  report(2, "norm of the difference of range projections",
         errors == 0 && worst_norm <= kNormTheoremTol && two_err <= kNormOracle2x2Tol,
         fmt("max |gap|/n %.3e (limit %.0e)", worst_norm, kNormTheoremTol) +
             fmt(", 2x2 value %.16f err %.1e", two, two_err) + fmt(" (limit %.0e)", kNormOracle2x2Tol) +
             where);

  report(3, "spectrum of the difference of range projections",
         errors == 0 && worst_spectrum <= kSpectrumTol,
         fmt("max multiset distance %.3e (limit %.0e)", worst_spectrum, kSpectrumTol) + where);

  report(7, "naturality of the matched projection",
         errors == 0 && worst_naturality <= kNaturalityTol,
         fmt("max residual/n %.3e (limit %.0e)", worst_naturality, kNaturalityTol) + where);
}

void criterion_minimality() {
  double worst_violation = -INFINITY;
  double worst_formula = 0.0;
  std::size_t samples = 0;
  std::mt19937_64 gen(kMasterSeed);
  std::uniform_real_distribution<double> unif(-6.0, -1.0);
  const Eigen::Index n = kMinimalityDim;
  for (int i = 0; i < kMinimalityInstances; ++i) {
    const std::uint64_t seed = splitmix64(kMasterSeed + 4000 + static_cast<std::uint64_t>(i));
    const Eigen::Index r = 1 + static_cast<Eigen::Index>(seed % static_cast<std::uint64_t>(n - 1));
    const double target = kNormTargets[static_cast<std::size_t>(i) % kNormTargets.size()];
    const Idempotent e = random_idempotent(r, n - r, target, seed);
    const ComplexMatrix m = matched_projection(e).m.matrix();
    const double lower = operator_norm(m - e.matrix());
    const double upper = operator_norm(identity(n) - m - e.matrix());
    worst_formula = std::max(worst_formula,
                             std::abs(lower - matched_distance_formula(operator_norm(e.matrix()))));
    for (int s = 0; s < kMinimalityProjections; ++s) {
      ComplexMatrix p;
      if (s % 2 == 0) {
        p = random_projection(n, splitmix64(seed ^ static_cast<std::uint64_t>(s + 1))).matrix();
      } else {
        // Projections close to m(E): conjugate by exp(i eps H), H Hermitian.
        const ComplexMatrix h = hermitian_part(haar_unitary(n, splitmix64(seed + static_cast<std::uint64_t>(s))));
        const ComplexMatrix u = expm_i_hermitian(h, std::pow(10.0, unif(gen)));
        p = u * m * u.adjoint();
      }
      const double d = operator_norm(p - e.matrix());
      worst_violation = std::max({worst_violation, lower - d, d - upper});
      ++samples;
    }
  }
  report(4, "minimality of the matched projection",
         worst_violation <= kMinimalityTol && worst_formula <= kMatchedDistanceTol,
         fmt("max violation %.3e (limit %.0e)", worst_violation, kMinimalityTol) +
             fmt(", distance formula err %.3e (limit %.0e)", worst_formula, kMatchedDistanceTol) +
             " over " + std::to_string(samples) + " projections");
}

void criterion_exponent() {
  double worst_norm = 0.0;
  double worst_herm = 0.0;
  double worst_codiag = 0.0;
  double worst_route = 0.0;
  double worst_oracle = 0.0;
  double worst_endpoint = 0.0;
  std::size_t count = 0;
  std::size_t errors = 0;
  for (const GridInstance& g : grid(kExponentTrials, 5)) {
    ++count;
    const double n = static_cast<double>(g.n);
    try {
      const Idempotent e = random_idempotent(g.r, g.n - g.r, g.target, g.seed);
      const GeodesicExponent x = exponent(e);
      const ComplexMatrix p = range_projection(e).matrix();
      const ComplexMatrix q = corange_projection(e).matrix();
      const RealVector sv = oracle_b_singular_values(e.matrix(), g.r);
      worst_norm = std::max(worst_norm, std::abs(x.norm() - std::atan(sv.size() ? sv(0) : 0.0)));

      // Oracle log route: Schur-Parlett logarithm of (2Q - 1)(2P - 1).
      const ComplexMatrix one = identity(g.n);
      const ComplexMatrix w = (2.0 * q - one) * (2.0 * p - one);
      const ComplexMatrix xo = Complex(0.0, -0.5) * w.log();
      worst_herm = std::max(worst_herm, operator_norm(xo - xo.adjoint()) / std::max(x.norm(), 1e-300));
      worst_oracle = std::max(worst_oracle, operator_norm(xo - x.x()) / n);

      const ComplexMatrix pp = one - p;
      worst_codiag = std::max(worst_codiag,
                              (operator_norm(p * x.x() * p) + operator_norm(pp * x.x() * pp)) / n);
      worst_route = std::max(worst_route, operator_norm(exponent_block_formula(e).x() - x.x()) / n);

      const ComplexMatrix u = (Complex(0.0, 1.0) * x.x()).exp();
      const double end0 = operator_norm(x.point(0.0).matrix() - p);
      const double end1 = std::max(operator_norm(x.point(1.0).matrix() - q),
                                   operator_norm(u * p * u.adjoint() - q));
      worst_endpoint = std::max({worst_endpoint, end0 / n, end1 / n});
    } catch (const Error& err) {
      ++errors;
      std::fprintf(stderr, "exponent instance n=%lld: %s\n", static_cast<long long>(g.n), err.what());
    }
  }
  const bool ok = errors == 0 && worst_norm <= kExponentNormTol && worst_herm <= kHermitianTol &&
                  worst_codiag <= kCodiagonalTol && worst_route <= kBlockRouteTol &&
                  worst_oracle <= kBlockRouteTol && worst_endpoint <= kEndpointTol;
  report(5, "geodesic exponent", ok,
         fmt("| ||X|| - atan||B|| | %.3e (limit %.0e)", worst_norm, kExponentNormTol) +
             fmt(", hermitian %.3e (limit %.0e)", worst_herm, kHermitianTol) +
             fmt(", codiagonal/n %.3e (limit %.0e)", worst_codiag, kCodiagonalTol) +
             fmt(", block vs log/n %.3e (limit %.0e)", worst_route, kBlockRouteTol) +
             fmt(", oracle log/n %.3e (limit %.0e)", worst_oracle, kBlockRouteTol) +
             fmt(", endpoints/n %.3e (limit %.0e)", worst_endpoint, kEndpointTol) + " over " +
             std::to_string(count) + " instances");
}

void criterion_fiber() {
  double worst_adjoint = 0.0;
  double worst_finsler = 0.0;
  std::size_t count = 0;
  std::size_t errors = 0;
  for (const GridInstance& g : grid(kFiberTrials, 6)) {
    ++count;
    try {
      const Idempotent e = random_idempotent(g.r, g.n - g.r, g.target, g.seed);
      const ComplexMatrix c = e.reflection();
      worst_adjoint = std::max(worst_adjoint,
                               operator_norm(fiber_geodesic(c, -1.0) - c.adjoint()) / static_cast<double>(g.n));
      // Tangent vector at C: X = YC - CY.
      const ComplexMatrix y = haar_unitary(g.n, splitmix64(g.seed + 3));
      const ComplexMatrix x = y * c - c * y;
      const double lhs = finsler_norm(c.adjoint(), x.adjoint());
      const double rhs = finsler_norm(c, x);
      worst_finsler = std::max(worst_finsler, std::abs(lhs - rhs) / std::max(rhs, 1e-300));
    } catch (const Error& err) {
      ++errors;
      std::fprintf(stderr, "fiber instance n=%lld: %s\n", static_cast<long long>(g.n), err.what());
    }
  }
  const Idempotent b1 = Idempotent::validate((ComplexMatrix(2, 2) << 1, 1, 0, 0).finished());
  const double dist_err = std::abs(fiber_distance(b1) - kFiberDistanceOracle);
  const bool ok = errors == 0 && worst_adjoint <= kFiberAdjointTol && dist_err <= kFiberDistanceTol &&
                  worst_finsler <= kFinslerTol;
  report(6, "fiber geometry of reflections", ok,
         fmt("||C(-1) - C*||/n %.3e (limit %.0e)", worst_adjoint, kFiberAdjointTol) +
             fmt(", log(1+sqrt 2) err %.1e (limit %.0e)", dist_err, kFiberDistanceTol) +
             fmt(", adjoint isometry rel err %.3e (limit %.0e)", worst_finsler, kFinslerTol) +
             " over " + std::to_string(count) + " instances");
}

void criterion_szego(const char* csv_path) {
  const auto t0 = Clock::now();
  std::vector<szego::SweepRow> rows;
  std::string detail;
  bool ok = true;
  try {
    rows = szego::run_sweep(kSzegoA, kSzegoN);
  } catch (const Error& err) {
    report(8, "Szego example convergence", false, err.what());
    return;
  }
  const double secs = seconds_since(t0);
  const bool trends = szego::sweep_trends_ok(rows);
  ok = trends && secs <= kSzegoSeconds;
  for (const SzegoBound& b : kSzegoBounds) {
    for (const auto& row : rows) {
      if (row.a != b.a || row.N != kSzegoN.back()) continue;
      const auto& c = row.check;
      const bool within = c.abs_err_vs_a <= b.err_a && c.abs_err_normB <= b.err_b && c.abs_err_fiber <= b.err_f;
      ok = ok && within;
      char buf[200];
      std::snprintf(buf, sizeof(buf), "; a=%.1f N=%lld errors %.3e %.3e %.3e%s", b.a,
                    static_cast<long long>(row.N), c.abs_err_vs_a, c.abs_err_normB, c.abs_err_fiber,
                    within ? "" : " ABOVE BOUND");
      detail += buf;
    }
  }
  if (csv_path != nullptr) {
    std::ofstream out(csv_path);
    out << szego::csv_header() << "\n";
    for (const auto& row : rows) out << szego::csv_row(row) << "\n";
  }
  report(8, "Szego example convergence", ok,
         std::string(trends ? "trends decreasing" : "trend violated") +
             fmt(", %.1f s (limit %.0f s)", secs, kSzegoSeconds) + detail);
}

}  // namespace

int main(int argc, char** argv) {
  const char* csv_path = argc > 1 ? argv[1] : nullptr;
  criteria_on_grid();
  criterion_minimality();
  criterion_exponent();
  criterion_fiber();
  criterion_szego(csv_path);
  for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
