#include "collapse/flow.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "collapse/closed_form.hpp"
#include "collapse/csv.hpp"
#include "collapse/errors.hpp"

namespace collapse {

namespace {

// Largest principal angle between the column spans of two orthonormal
// blocks: acos of the smallest singular value of A^T B.
double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.transpose() * b);
  const double cosine = std::clamp(svd.singularValues().minCoeff(), -1.0, 1.0);
  return std::acos(cosine);
}

std::vector<double> read_omegas(const AlignedState& state) {
  std::vector<double> omegas = state.omega_diag();
  for (double w : omegas) {
    if (!(w > 0.0)) {
      throw PreconditionError("flow: nonpositive singular value " + std::to_string(w) +
                              " on the Omega diagonal");
    }
  }
  return omegas;
}

void require_aligned(const AlignedState& state) {
  const double off = alignment_residual(state);
  if (off > 1e-6 * std::max(1.0, state.omega.norm())) {
    throw PreconditionError("flow: state is not aligned (off-diagonal mass " +
                            std::to_string(off) + "); realign first");
  }
}

// Tracks the singular-vector frames of Omega_t in the chart of t = 0,
// folding in any realignment rotations applied along the way.
struct FrameTracker {
  Eigen::MatrixXd rot_u;  // accumulated chart rotations, C x C
  Eigen::MatrixXd rot_v;
  Eigen::MatrixXd u0;     // leading C-1 left/right frames at t = 0
  Eigen::MatrixXd v0;

  explicit FrameTracker(const AlignedState& initial) {
    const int c = initial.dims.num_classes;
    rot_u = Eigen::MatrixXd::Identity(c, c);
    rot_v = Eigen::MatrixXd::Identity(c, c);
    auto [u, v] = frames(initial);
    u0 = u;
    v0 = v;
  }

  std::pair<Eigen::MatrixXd, Eigen::MatrixXd> frames(const AlignedState& state) const {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(state.omega,
                                          Eigen::ComputeFullU | Eigen::ComputeFullV);
    const int c = state.dims.num_classes;
    return {rot_u * svd.matrixU().leftCols(c - 1), rot_v * svd.matrixV().leftCols(c - 1)};
  }

  void absorb_realignment(const RealignRotation& rotation) {
    rot_u = rot_u * rotation.u;
    rot_v = rot_v * rotation.v;
  }

  double drift(const AlignedState& state) const {
    auto [u, v] = frames(state);
    return std::max(max_principal_angle(u0, u), max_principal_angle(v0, v));
  }
};

}  // namespace

double aligned_loss(const AlignedState& state) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(state.omega);
  const int c = state.dims.num_classes;
  std::vector<double> omegas(c - 1);
  for (int j = 0; j < c - 1; ++j) omegas[j] = svd.singularValues()[j];
  return spectral_loss(omegas, c).total;
}

Eigen::MatrixXd ambient_gradient(const AlignedState& state) {
  require_aligned(state);
  const int c = state.dims.num_classes;
  const int n = state.dims.examples_per_class;
  std::vector<double> omegas = read_omegas(state);
  Eigen::MatrixXd gradient = Eigen::MatrixXd::Zero(c, state.dims.total_examples());
  for (int j = 0; j < c - 1; ++j) {
    const double w = omegas[j];
    const double coeff = -w / (n * (c + w * w) * (c + w * w));
    gradient.row(j).segment(j * n, n).setConstant(coeff);
  }
  // Row C stays zero: omega_C = 0 is frozen.
  return gradient;
}

Eigen::MatrixXd renormalize(const Eigen::MatrixXd& features, const ProblemDims& dims) {
  return inv_sqrt_spd(within_cov(features, dims)) * features;
}

AlignedState discrete_step(const AlignedState& state, double eta) {
  if (eta < 0.0) throw PreconditionError("discrete_step: eta must be >= 0");
  Eigen::MatrixXd stepped = state.X - eta * ambient_gradient(state);
  return aligned_state_from(state.dims, renormalize(stepped, state.dims));
}

AlignedState projected_step(const AlignedState& state, double eta) {
  if (eta < 0.0) throw PreconditionError("projected_step: eta must be >= 0");
  Eigen::MatrixXd direction = tangent_project(state, ambient_gradient(state));
  Eigen::MatrixXd stepped = state.X - eta * direction;
  return aligned_state_from(state.dims, renormalize(stepped, state.dims));
}

FlowTrajectory simulate(const AlignedState& initial, const FlowConfig& config) {
  if (config.step_size <= 0.0) throw PreconditionError("simulate: step_size must be positive");
  if (config.horizon < 0.0) throw PreconditionError("simulate: horizon must be >= 0");
  if (config.record_every < 1) throw PreconditionError("simulate: record_every must be >= 1");
  if (config.realign_every < 0) throw PreconditionError("simulate: realign_every must be >= 0");
  require_aligned(initial);
  if (manifold_residual(initial) > 1e-8) {
    throw PreconditionError("simulate: initial state violates the manifold constraint");
  }

  const int c = initial.dims.num_classes;
  const int n = initial.dims.examples_per_class;
  const double eta = config.step_size;
  const long steps = static_cast<long>(std::ceil(config.horizon / eta - 1e-12));

  FlowTrajectory trajectory;
  FrameTracker frames(initial);
  AlignedState state = initial;

  auto record = [&](double t) {
    trajectory.times.push_back(t);
    trajectory.omegas.push_back(state.omega_diag());
    trajectory.losses.push_back(spectral_loss(trajectory.omegas.back(), c));
    trajectory.drifts.push_back(frames.drift(state));
    trajectory.manifold_residuals.push_back(manifold_residual(state));
    trajectory.states.push_back(state);
  };
  record(0.0);

  if (config.method == FlowMethod::discrete_renorm) {
    for (long k = 1; k <= steps; ++k) {
      const double t = static_cast<double>(k) * eta;
      try {
        // Sanity guard: relative omega increment eta/(N (C+w^2)^2) <= 0.1.
        const std::vector<double> omegas = read_omegas(state);
        const double w_min = *std::min_element(omegas.begin(), omegas.end());
        if (eta * omega_rate(w_min, c, n) > 0.1 * w_min) {
          throw NumericalError("step size grows omega by more than 10% per step");
        }
        state = discrete_step(state, eta);
        if (config.realign_every > 0 && k % config.realign_every == 0) {
          frames.absorb_realignment(realign_rotation(state));
          state = realign(state);
        }
      } catch (const Error& e) {
        throw NumericalError("simulate: step failed at t = " + std::to_string(t) + ": " +
                             e.what());
      }
      if (k % config.record_every == 0 || k == steps) record(t);
    }
    return trajectory;
  }

  // analytic_rows: row j gains (w_j(t) - w_j(0)) on its class block, the
  // integrated gradient field. States only materialize at record times.
  std::vector<ImplicitSolution> solutions;
  for (double w : read_omegas(initial)) solutions.push_back(integration_constant(w, c, n));
  for (long k = 1; k <= steps; ++k) {
    if (k % config.record_every != 0 && k != steps) continue;
    const double t = static_cast<double>(k) * eta;
    try {
      Eigen::MatrixXd x = initial.X;
      for (int j = 0; j < c - 1; ++j) {
        const double delta = omega_at(solutions[j], t) - solutions[j].omega0;
        x.row(j).segment(j * n, n).array() += delta;
      }
      state = aligned_state_from(initial.dims, std::move(x));
    } catch (const Error& e) {
      throw NumericalError("simulate: step failed at t = " + std::to_string(t) + ": " + e.what());
    }
    record(t);
  }
  return trajectory;
}

double singular_vector_drift(const FlowTrajectory& trajectory) {
  if (trajectory.snapshots() < 2) return 0.0;
  return *std::max_element(trajectory.drifts.begin(), trajectory.drifts.end());
}

void write_trajectory_csv(const FlowTrajectory& trajectory, std::ostream& out) {
  if (trajectory.snapshots() == 0) return;
  const int num_omegas = static_cast<int>(trajectory.omegas.front().size());
  out << 't';
  for (int j = 1; j <= num_omegas; ++j) out << ",omega_" << j;
  out << ",L_total,L_nc1,L_nc23,L_perp,drift,manifold_residual\n";
  for (int k = 0; k < trajectory.snapshots(); ++k) {
    out << csv::format(trajectory.times[k]);
    for (double w : trajectory.omegas[k]) out << ',' << csv::format(w);
    const LossBreakdown& loss = trajectory.losses[k];
    out << ',' << csv::format(loss.total) << ',' << csv::format(loss.nc1_part) << ','
        << csv::format(loss.nc23_part) << ',' << csv::format(loss.perp_part) << ','
        << csv::format(trajectory.drifts[k]) << ','
        << csv::format(trajectory.manifold_residuals[k]) << '\n';
  }
}

}  // namespace collapse
