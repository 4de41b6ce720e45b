#include "projgeo/szego.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>

#include "projgeo/geodesic.hpp"
#include "projgeo/idempotent.hpp"

namespace projgeo::szego {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_disk(Complex a) {
  if (!(std::abs(a) < 1.0)) {
    std::ostringstream os;
    os << "|a| = " << std::abs(a) << " must be below 1";
    throw Error(ErrorKind::Input, os.str());
  }
}

Complex unit(double theta) { return std::polar(1.0, theta); }

// Jacobian |phi_w'(z)| of the circle map at z.
double jacobian(Complex w, Complex z) { return psi_squared(w, z); }

}  // namespace

Complex mobius_eval(Complex a, Complex z) {
  require_disk(a);
  const Complex den = 1.0 - std::conj(a) * z;
  if (std::abs(den) < 1e-300) throw Error(ErrorKind::Input, "z is the pole of phi_a");
  return (a - z) / den;
}

Complex fixed_point(Complex a) {
  require_disk(a);
  const double r = std::abs(a);
  if (r == 0.0) return 0.0;
  // (1 - sqrt(1 - r^2)) / conj(a), written to avoid cancellation at small r.
  return (r * r / (1.0 + std::sqrt(1.0 - r * r))) / std::conj(a);
}

double psi_squared(Complex a, Complex z) {
  return (1.0 - std::norm(a)) / std::norm(1.0 - std::conj(a) * z);
}

SzegoData szego_data(Complex a, Eigen::Index M) {
  require_disk(a);
  if (M < 1) throw Error(ErrorKind::Input, "grid size must be positive");
  SzegoData out;
  out.omega = fixed_point(a);
  out.psi_samples.resize(M);
  out.kappa_samples.resize(M);
  for (Eigen::Index m = 0; m < M; ++m) {
    const double p2 = psi_squared(a, unit(kTwoPi * static_cast<double>(m) / static_cast<double>(M)));
    out.psi_samples(m) = p2;
    out.kappa_samples(m) = (1.0 - p2) / (1.0 + p2);
  }
  return out;
}

Eigen::Index default_quadrature(Eigen::Index N) { return 8 * (2 * N + 1); }

Eigen::Index CompositionModel::nodes_per_arc() const { return M / (2 * N); }

CompositionModel build_model(Complex a, Eigen::Index N, Eigen::Index M) {
  require_disk(a);
  if (N < 1) throw Error(ErrorKind::Input, "truncation N must be at least 1");
  if (M < default_quadrature(N)) {
    std::ostringstream os;
    os << "quadrature undersized: M = " << M << " < 8(2N+1) = " << default_quadrature(N);
    throw Error(ErrorKind::Input, os.str());
  }
  CompositionModel model;
  model.a = a;
  model.N = N;
  model.M = M;
  model.omega = fixed_point(a);
  const Eigen::Index arcs = 2 * N;
  const Eigen::Index q = model.nodes_per_arc();
  model.knots.resize(arcs + 1);
  for (Eigen::Index j = 0; j <= arcs; ++j) {
    model.knots(j) = kTwoPi * static_cast<double>(j) / static_cast<double>(arcs);
  }
  // |I_j| is the angle swept by phi_omega over the j-th uniform arc.  The
  // sweep is accumulated over q sub-steps so no single step wraps.
  model.arc_lengths.resize(arcs);
  for (Eigen::Index j = 0; j < arcs; ++j) {
    double swept = 0.0;
    Complex prev = mobius_eval(model.omega, unit(model.knots(j)));
    for (Eigen::Index s = 1; s <= q; ++s) {
      const double theta = model.knots(j) + (model.knots(j + 1) - model.knots(j)) *
                                                static_cast<double>(s) / static_cast<double>(q);
      const Complex next = mobius_eval(model.omega, unit(theta));
      swept += std::arg(next / prev);
      prev = next;
    }
    model.arc_lengths(j) = std::abs(swept) / kTwoPi;
  }
  const double total = model.arc_lengths.sum();
  if (std::abs(total - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "arc partition does not cover the circle (total " << total << "); increase M";
    throw Error(ErrorKind::Truncation, os.str());
  }
  model.partner.resize(arcs);
  model.gamma = ComplexMatrix::Zero(arcs, arcs);
  for (Eigen::Index j = 0; j < arcs; ++j) {
    const Eigen::Index k = (j + N) % arcs;
    model.partner[j] = k;
    model.gamma(k, j) = std::sqrt(model.arc_lengths(k) / model.arc_lengths(j));
  }
  model.reflection_residual = operator_norm(model.gamma * model.gamma - identity(arcs));
  return model;
}

ComplexMatrix multiplication_section(const CompositionModel& model, const Symbol& f) {
  const Eigen::Index arcs = model.dim();
  const Eigen::Index q = model.nodes_per_arc();
  Eigen::VectorXcd means(arcs);
  for (Eigen::Index j = 0; j < arcs; ++j) {
    const double lo = model.knots(j);
    const double width = model.knots(j + 1) - lo;
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index s = 0; s < q; ++s) {
      const Complex z = unit(lo + width * (static_cast<double>(s) + 0.5) / static_cast<double>(q));
      const double w = jacobian(model.omega, z);
      num += f(mobius_eval(model.omega, z)) * w;
      den += w;
    }
    means(j) = num / den;
  }
  return means.asDiagonal();
}

Eigen::VectorXcd constant_function(const CompositionModel& model) {
  return model.arc_lengths.cwiseSqrt().cast<Complex>();
}

ExampleCheck verify_example(const CompositionModel& model) {
  const Eigen::Index n = model.dim();
  const double tol = std::max(kIdemTol, 10.0 * model.reflection_residual);
  Idempotent e = [&] {
    try {
      return Idempotent::validate(0.5 * (model.gamma + identity(n)), tol);
    } catch (const Error& err) {
      throw Error(ErrorKind::Truncation,
                  std::string("section is not idempotent; enlarge N or M: ") + err.what());
    }
  }();
  const double r = std::abs(model.a);
  ExampleCheck out;
  out.reflection_residual = model.reflection_residual;
  const ProjectionDistance pd = projection_distance(e);
  out.norm_diff = pd.norm_diff;
  out.abs_err_vs_a = std::abs(pd.norm_diff - r);
  out.normB = block_form(e).norm_b();
  out.abs_err_normB = std::abs(out.normB - r / std::sqrt(1.0 - r * r));
  const Complex a = model.a;
  const ComplexMatrix mult_psi =
      multiplication_section(model, [a](Complex z) { return std::sqrt(psi_squared(a, z)); });
  out.davis_residual = operator_norm(davis_via_reflection(e) - mult_psi * model.gamma);
  out.fiber_dist = fiber_distance(e);
  out.abs_err_fiber = std::abs(out.fiber_dist - 0.5 * std::log((1.0 + r) / (1.0 - r)));
  return out;
}

ExampleCheck verify_example(Complex a, Eigen::Index N, Eigen::Index M) {
  return verify_example(build_model(a, N, M));
}

ProjectionFormulaResiduals projection_formulas_check(const CompositionModel& model) {
  const Eigen::Index n = model.dim();
  const double tol = std::max(kIdemTol, 10.0 * model.reflection_residual);
  const Idempotent e = Idempotent::validate(0.5 * (model.gamma + identity(n)), tol);
  const Complex a = model.a;
  const ComplexMatrix weight =
      multiplication_section(model, [a](Complex z) { return 1.0 / (1.0 + psi_squared(a, z)); });
  ProjectionFormulaResiduals out;
  out.range = operator_norm(range_projection(e).matrix() -
                            (identity(n) + model.gamma) * weight);
  out.kernel = operator_norm(range_projection(e.complement()).matrix() -
                             (identity(n) - model.gamma) * weight);
  return out;
}

bool decreasing_trend(const std::vector<double>& values, double floor) {
  int growth_steps = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double prev = values[i - 1];
    const double cur = values[i];
    if (cur <= floor || cur < prev) continue;
    if (cur >= 1.1 * prev) return false;
    if (++growth_steps > 1) return false;
  }
  return true;
}

std::vector<SweepRow> run_sweep(const std::vector<double>& a_values,
                                const std::vector<Eigen::Index>& n_values) {
  std::vector<SweepRow> rows;
  for (double a : a_values) {
    for (Eigen::Index n : n_values) {
      SweepRow row;
      row.a = a;
      row.N = n;
      row.M = default_quadrature(n);
      row.check = verify_example(Complex(a, 0.0), row.N, row.M);
      rows.push_back(row);
    }
  }
  return rows;
}

bool sweep_trends_ok(const std::vector<SweepRow>& rows) {
  std::map<double, std::vector<const SweepRow*>> by_a;
  for (const auto& row : rows) by_a[row.a].push_back(&row);
  for (auto& [a, group] : by_a) {
    std::sort(group.begin(), group.end(),
              [](const SweepRow* x, const SweepRow* y) { return x->N < y->N; });
    std::vector<double> e_a, e_b, e_f;
    for (const auto* row : group) {
      e_a.push_back(row->check.abs_err_vs_a);
      e_b.push_back(row->check.abs_err_normB);
      e_f.push_back(row->check.abs_err_fiber);
    }
    if (!decreasing_trend(e_a) || !decreasing_trend(e_b) || !decreasing_trend(e_f)) return false;
  }
  return true;
}

std::string csv_header() {
  return "a,N,M,reflection_residual,norm_diff,abs_err_vs_a,normB,abs_err_normB,davis_residual,"
         "fiber_dist,abs_err_fiber";
}

std::string csv_row(const SweepRow& row) {
  char buf[512];
  const ExampleCheck& c = row.check;
  std::snprintf(buf, sizeof(buf), "%.17g,%lld,%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                row.a, static_cast<long long>(row.N), static_cast<long long>(row.M),
                c.reflection_residual, c.norm_diff, c.abs_err_vs_a, c.normB, c.abs_err_normB,
                c.davis_residual, c.fiber_dist, c.abs_err_fiber);
  return buf;
}

}  // namespace projgeo::szego
