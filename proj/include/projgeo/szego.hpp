#pragma once

// Finite model of the composition reflection  Gamma_a f = f o phi_a  on
// L^2 of the unit circle, phi_a(z) = (a - z) / (1 - conj(a) z).
//
// phi_a is conjugate to z -> -z through phi_omega, omega the fixed point of
// phi_a in the disk.  Pulling the uniform partition of the circle into 2N
// arcs back through phi_omega yields arcs I_0..I_{2N-1} with
// phi_a(I_j) = I_{j+N mod 2N}.  Piecewise constants on these arcs form a
// Gamma_a-invariant subspace; in the orthonormal basis of normalized
// indicators, Gamma_a acts as
//
//   e_j  ->  sqrt(|I_{j+N}| / |I_j|) e_{j+N},
//
// an exact reflection.  Multiplication operators are compressed to the
// subspace (diagonal of arc means).  Everything the closed forms predict
// (||P - Q|| = |a|, ||B_a||, V_d = M_|psi_a| Gamma_a, the fiber distance)
// is then approached as N grows.

#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "projgeo/matcore.hpp"

namespace projgeo::szego {

struct CompositionModel {
  Complex a;
  Eigen::Index N = 0;   // 2N arcs, model dimension 2N
  Eigen::Index M = 0;   // total quadrature nodes, M / (2N) per arc
  Complex omega;        // fixed point of phi_a in the disk
  RealVector knots;     // 2N + 1 uniform angles in the pulled-back coordinate
  RealVector arc_lengths;           // normalized measure of I_j, sums to 1
  std::vector<Eigen::Index> partner; // j -> j + N mod 2N
  ComplexMatrix gamma;
  double reflection_residual = 0.0;  // ||gamma^2 - 1||

  Eigen::Index dim() const { return gamma.rows(); }
  Eigen::Index nodes_per_arc() const;
};

struct SzegoData {
  Complex omega;
  RealVector psi_samples;    // |psi_a(z_m)|^2 on the uniform M-grid
  RealVector kappa_samples;  // (1 - |psi_a|^2) / (1 + |psi_a|^2) on the grid
};

struct ExampleCheck {
  double norm_diff = 0.0;
  double abs_err_vs_a = 0.0;
  double normB = 0.0;
  double abs_err_normB = 0.0;
  double davis_residual = 0.0;
  double fiber_dist = 0.0;
  double abs_err_fiber = 0.0;
  double reflection_residual = 0.0;
};

struct ProjectionFormulaResiduals {
  double range = 0.0;   // ||P_N(Gamma-1) - (1 + Gamma) M[(1+|psi|^2)^{-1}]||
  double kernel = 0.0;  // ||P_N(Gamma+1) - (1 - Gamma) M[(1+|psi|^2)^{-1}]||
};

struct SweepRow {
  double a = 0.0;
  Eigen::Index N = 0;
  Eigen::Index M = 0;
  ExampleCheck check;
};

/// phi_a(z).  Throws ErrorKind::Input for |a| >= 1 or at the pole z = 1/conj(a).
Complex mobius_eval(Complex a, Complex z);
/// omega_a = (1 - sqrt(1 - |a|^2)) / conj(a), and 0 for a = 0.
Complex fixed_point(Complex a);
/// |psi_a(z)|^2 = (1 - |a|^2) / |1 - conj(a) z|^2
double psi_squared(Complex a, Complex z);

SzegoData szego_data(Complex a, Eigen::Index M);

/// Throws ErrorKind::Input when |a| >= 1, N < 1 or M < 8 (2N + 1).
CompositionModel build_model(Complex a, Eigen::Index N, Eigen::Index M);
/// Default quadrature size 8 (2N + 1).
Eigen::Index default_quadrature(Eigen::Index N);

using Symbol = std::function<double(Complex)>;

/// Compression of the multiplication operator M_f: diag of arc means of f.
ComplexMatrix multiplication_section(const CompositionModel& model, const Symbol& f);
/// Coefficients of the constant function 1 in the arc basis.
Eigen::VectorXcd constant_function(const CompositionModel& model);

ExampleCheck verify_example(Complex a, Eigen::Index N, Eigen::Index M);
ExampleCheck verify_example(const CompositionModel& model);

ProjectionFormulaResiduals projection_formulas_check(const CompositionModel& model);

/// True when the sequence is decreasing, allowing at most one step that
/// grows by less than 10%.  Values at or below `floor` count as converged.
bool decreasing_trend(const std::vector<double>& values, double floor = 1e-12);

std::vector<SweepRow> run_sweep(const std::vector<double>& a_values,
                                const std::vector<Eigen::Index>& n_values);
/// Per a, the three error columns must follow decreasing_trend along N.
bool sweep_trends_ok(const std::vector<SweepRow>& rows);

std::string csv_header();
std::string csv_row(const SweepRow& row);

}  // namespace projgeo::szego
