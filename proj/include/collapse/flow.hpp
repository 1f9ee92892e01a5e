#pragma once

#include <iosfwd>
#include <vector>

#include "collapse/decomposition.hpp"
#include "collapse/snr.hpp"

namespace collapse {

enum class FlowMethod {
  discrete_renorm,  // explicit Euler step, then renormalize to the manifold
  analytic_rows,    // exact per-row update driven by the implicit solution
};

struct FlowConfig {
  double step_size = 1e-3;   // eta
  double horizon = 10.0;     // T, flow time
  int record_every = 100;    // snapshot cadence in steps
  int realign_every = 100;   // re-diagonalize Omega every k steps; 0 = never
  FlowMethod method = FlowMethod::discrete_renorm;
};

/// Central-path loss of an aligned-chart state: the spectral loss of the
/// leading C-1 singular values of Omega = (1/N) X Y^T. Well-defined also
/// slightly off the aligned submanifold, which makes it the reference
/// function for finite-difference gradient checks.
double aligned_loss(const AlignedState& state);

/// Gradient of the central-path loss in aligned coordinates,
///   grad = -(1/N) sum_{j<C} [w_j / (C + w_j^2)^2] e_j y_j^T,
/// with w_j read off the diagonal of Omega. Row C is zero (w_C = 0 stays
/// frozen). Requires the state to be aligned: off-diagonal mass of Omega
/// below 1e-6 of its norm.
Eigen::MatrixXd ambient_gradient(const AlignedState& state);

/// Renormalization map F -> SigmaW(F)^{-1/2} F (the retraction).
Eigen::MatrixXd renormalize(const Eigen::MatrixXd& features, const ProblemDims& dims);

/// Gradient step then renormalize: X' = renormalize(X - eta * grad).
AlignedState discrete_step(const AlignedState& state, double eta);

/// Tangent-projected step: X' = renormalize(X - eta * Pi(grad)).
AlignedState projected_step(const AlignedState& state, double eta);

/// Recorded trajectory. All vectors share one length; entry k describes
/// snapshot time times[k].
struct FlowTrajectory {
  std::vector<double> times;
  std::vector<AlignedState> states;
  std::vector<std::vector<double>> omegas;     // C-1 values per snapshot
  std::vector<LossBreakdown> losses;           // spectral, lambda = 0
  std::vector<double> drifts;                  // max principal angle vs t=0
  std::vector<double> manifold_residuals;

  int snapshots() const { return static_cast<int>(times.size()); }
};

/// Runs ceil(T/eta) steps from an aligned state, recording every
/// record_every steps plus the final state. Deterministic. Guards the
/// step size: a step that would grow any w_j by more than 10% raises
/// NumericalError with the failing time stamp.
FlowTrajectory simulate(const AlignedState& initial, const FlowConfig& config);

/// Max over snapshots of the largest principal angle between the spans of
/// the leading C-1 left (and right) singular vectors of Omega_t and those
/// at t = 0; returns the larger of the two.
double singular_vector_drift(const FlowTrajectory& trajectory);

/// CSV columns: t, omega_1..omega_{C-1}, L_total, L_nc1, L_nc23, L_perp,
/// drift, manifold_residual.
void write_trajectory_csv(const FlowTrajectory& trajectory, std::ostream& out);

}  // namespace collapse
