#pragma once

#include "collapse/snr.hpp"

namespace collapse {

/// Constants of the implicit singular-value solution
///   c1 log w + c2 w^2 + c3 w^4 = a + t,
/// with c1 = C^2 N, c2 = C N, c3 = N/4.
struct OdeConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
};

OdeConstants ode_constants(int num_classes, int examples_per_class);

/// Growth rate of one singular value: dw/dt = (1/N) w / (C + w^2)^2.
/// Requires w > 0.
double omega_rate(double omega, int num_classes, int examples_per_class);

/// One singular value's implicit solution, pinned by its t = 0 value.
struct ImplicitSolution {
  int num_classes = 0;
  int examples_per_class = 0;
  OdeConstants constants;
  double omega0 = 0.0;
  double a = 0.0;   // c1 log w0 + c2 w0^2 + c3 w0^4

  /// Left-hand side c1 log w + c2 w^2 + c3 w^4.
  double lhs(double omega) const;
};

ImplicitSolution integration_constant(double omega0, int num_classes, int examples_per_class);

/// The unique w > 0 with lhs(w) = a + t, found by bracketed bisection.
/// The left side is strictly increasing from -inf to +inf on (0, inf), so
/// the bracket always exists. Residual <= 1e-12 * max(1, |a| + t).
double omega_at(const ImplicitSolution& sol, double t);

/// Large-t growth scale (t/c3)^{1/4} = (4t/N)^{1/4}.
double asymptote(double t, int num_classes, int examples_per_class);

/// Limiting normalized SNR matrix Uhat0 Vhat0^T built from the C-1
/// leading singular vectors. All nonzero singular values equal one and
/// columns sum to zero: a Simplex ETF up to scale.
Eigen::MatrixXd limit_snr(const SnrSpectrum& spectrum0);

/// The limit of the renormalized features, (Uhat0 Vhat0^T) (x) 1_N^T:
/// column (c*N + i) equals column c of limit_snr for every i.
Eigen::MatrixXd limit_features(const SnrSpectrum& spectrum0, int examples_per_class);

}  // namespace collapse
