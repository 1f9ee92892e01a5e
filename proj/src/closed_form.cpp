#include "collapse/closed_form.hpp"

#include <cmath>
#include <string>

#include "collapse/errors.hpp"

namespace collapse {

OdeConstants ode_constants(int num_classes, int examples_per_class) {
  if (num_classes < 2 || examples_per_class < 1) {
    throw PreconditionError("ode_constants: need C >= 2 and N >= 1");
  }
  const double c = num_classes, n = examples_per_class;
  return OdeConstants{c * c * n, c * n, n / 4.0};
}

double omega_rate(double omega, int num_classes, int examples_per_class) {
  if (omega <= 0.0) throw PreconditionError("omega_rate: omega must be positive");
  const double c = num_classes;
  const double denom = (c + omega * omega);
  return omega / (examples_per_class * denom * denom);
}

double ImplicitSolution::lhs(double omega) const {
  return constants.c1 * std::log(omega) + constants.c2 * omega * omega +
         constants.c3 * omega * omega * omega * omega;
}

ImplicitSolution integration_constant(double omega0, int num_classes, int examples_per_class) {
  if (omega0 <= 0.0) throw PreconditionError("integration_constant: omega0 must be positive");
  ImplicitSolution sol;
  sol.num_classes = num_classes;
  sol.examples_per_class = examples_per_class;
  sol.constants = ode_constants(num_classes, examples_per_class);
  sol.omega0 = omega0;
  sol.a = sol.lhs(omega0);
  return sol;
}

double omega_at(const ImplicitSolution& sol, double t) {
  if (t < 0.0) throw PreconditionError("omega_at: t must be >= 0");
  const double target = sol.a + t;
  const double tolerance = 1e-12 * std::max(1.0, std::abs(sol.a) + t);

  // The left side is strictly increasing on (0, inf) with range all of R,
  // so a bracket always exists. Seed the upper end with the large-t growth
  // scale, the lower end with omega0, and widen geometrically.
  double lo = sol.omega0;
  double hi = std::max(sol.omega0,
                       asymptote(std::max(t, 1.0), sol.num_classes, sol.examples_per_class));
  int guard = 0;
  while (sol.lhs(lo) > target) {
    lo *= 0.5;
    if (++guard > 4000) throw NumericalError("omega_at: lower bracket search failed");
  }
  guard = 0;
  while (sol.lhs(hi) < target) {
    hi *= 2.0;
    if (++guard > 4000) throw NumericalError("omega_at: upper bracket search failed");
  }

  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double value = sol.lhs(mid);
    if (std::abs(value - target) <= tolerance) return mid;
    if (value < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-16 * mid) break;
  }
  const double residual = std::abs(sol.lhs(mid) - target);
  if (residual > tolerance) {
    throw NumericalError("omega_at: bisection stalled with residual " + std::to_string(residual));
  }
  return mid;
}

double asymptote(double t, int num_classes, int examples_per_class) {
  const OdeConstants k = ode_constants(num_classes, examples_per_class);
  return std::pow(t / k.c3, 0.25);
}

Eigen::MatrixXd limit_snr(const SnrSpectrum& spectrum0) {
  const int c = spectrum0.num_classes();
  if (spectrum0.rank() < c - 1) {
    throw SingularSystemError("limit_snr: spectrum has rank " + std::to_string(spectrum0.rank()) +
                              ", need C-1 = " + std::to_string(c - 1));
  }
  return spectrum0.left_vectors.leftCols(c - 1) *
         spectrum0.right_vectors.leftCols(c - 1).transpose();
}

Eigen::MatrixXd limit_features(const SnrSpectrum& spectrum0, int examples_per_class) {
  if (examples_per_class < 1) throw PreconditionError("limit_features: need N >= 1");
  Eigen::MatrixXd snr_limit = limit_snr(spectrum0);
  const int c = static_cast<int>(snr_limit.cols());
  Eigen::MatrixXd features(snr_limit.rows(), c * examples_per_class);
  for (int cls = 0; cls < c; ++cls) {
    for (int i = 0; i < examples_per_class; ++i) {
      features.col(cls * examples_per_class + i) = snr_limit.col(cls);
    }
  }
  return features;
}

}  // namespace collapse
