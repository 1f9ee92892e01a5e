#include "collapse/snr.hpp"

#include <algorithm>
#include <ostream>
#include <string>
#include <vector>

#include "collapse/csv.hpp"
#include "collapse/errors.hpp"

namespace collapse {

Eigen::MatrixXd inv_sqrt_spd(const Eigen::MatrixXd& a, double floor) {
  if (a.rows() != a.cols()) throw ShapeError("inv_sqrt_spd: matrix must be square");
  const double scale = std::max(1.0, a.norm());
  if ((a - a.transpose()).norm() > 1e-10 * scale) {
    throw PreconditionError("inv_sqrt_spd: matrix is not symmetric (residual " +
                            std::to_string((a - a.transpose()).norm() / scale) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  if (eig.info() != Eigen::Success) throw NumericalError("inv_sqrt_spd: eigensolver failed");
  const double hi = eig.eigenvalues().maxCoeff();
  const double lo = eig.eigenvalues().minCoeff();
  if (hi <= 0.0 || lo <= floor * hi) {
    throw SingularSystemError("inv_sqrt_spd: near-singular matrix, eigenvalue " +
                              std::to_string(lo) + " below floor " + std::to_string(floor) +
                              " * " + std::to_string(hi));
  }
  return eig.eigenvectors() *
         eig.eigenvalues().array().rsqrt().matrix().asDiagonal() *
         eig.eigenvectors().transpose();
}

Eigen::MatrixXd snr_matrix(const FeatureMatrix& centered, double floor) {
  FeatureStats stats = compute_stats(centered);
  const double scale = std::max(1.0, centered.data.cwiseAbs().maxCoeff());
  if (stats.global_mean.cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw PreconditionError("snr_matrix: features are not globally centered");
  }
  return inv_sqrt_spd(stats.sigma_w, floor) * stats.centered_means;
}

namespace {

// Flips u_j (and v_j) so the first nonvanishing entry of u_j is positive.
void fix_signs(Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
  for (int j = 0; j < u.cols(); ++j) {
    double pivot = 0.0;
    for (int i = 0; i < u.rows(); ++i) {
      if (std::abs(u(i, j)) > 1e-12) {
        pivot = u(i, j);
        break;
      }
    }
    if (pivot < 0.0) {
      u.col(j) = -u.col(j);
      v.col(j) = -v.col(j);
    }
  }
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace

int SnrSpectrum::rank() const {
  const double top = singular_values.size() > 0 ? singular_values[0] : 0.0;
  if (top <= 0.0) return 0;
  int count = 0;
  for (int j = 0; j < singular_values.size(); ++j) {
    if (singular_values[j] > kRankTol * top) ++count;
  }
  return count;
}

std::vector<double> SnrSpectrum::nonzero_values() const {
  std::vector<double> values(num_classes() - 1);
  for (int j = 0; j < num_classes() - 1; ++j) values[j] = singular_values[j];
  return values;
}

SnrSpectrum snr_svd(const Eigen::MatrixXd& snr) {
  if (!snr.allFinite()) throw PreconditionError("snr_svd: non-finite entries");
  const int c = static_cast<int>(snr.cols());
  if (snr.rows() < c) {
    throw ShapeError("snr_svd: need P >= C for a C-column orthonormal U, got P=" +
                     std::to_string(snr.rows()));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(snr, Eigen::ComputeThinU | Eigen::ComputeFullV);
  SnrSpectrum spectrum;
  spectrum.left_vectors = svd.matrixU();       // P x C, values sorted nonincreasing
  spectrum.singular_values = svd.singularValues();
  spectrum.right_vectors = svd.matrixV();      // C x C

  // Ties (equal values to 1e-12 relative) ordered by lexicographic
  // comparison of the left vectors so repeated runs agree. Adjacent swaps
  // repeated to a fixed point; values are already sorted nonincreasing.
  const double top = spectrum.singular_values.size() ? spectrum.singular_values[0] : 0.0;
  for (bool swapped = true; swapped;) {
    swapped = false;
    for (int j = 0; j + 1 < c; ++j) {
      const double a = spectrum.singular_values[j], b = spectrum.singular_values[j + 1];
      if (std::abs(a - b) <= 1e-12 * std::max(top, 1.0) &&
          lex_less(spectrum.left_vectors.col(j), spectrum.left_vectors.col(j + 1))) {
        spectrum.left_vectors.col(j).swap(spectrum.left_vectors.col(j + 1));
        spectrum.right_vectors.col(j).swap(spectrum.right_vectors.col(j + 1));
        std::swap(spectrum.singular_values[j], spectrum.singular_values[j + 1]);
        swapped = true;
      }
    }
  }
  fix_signs(spectrum.left_vectors, spectrum.right_vectors);
  return spectrum;
}

std::vector<double> AlignedState::omega_diag() const {
  std::vector<double> values(dims.num_classes - 1);
  for (int j = 0; j < dims.num_classes - 1; ++j) values[j] = omega(j, j);
  return values;
}

double manifold_residual(const AlignedState& state) {
  const int c = state.dims.num_classes;
  return (within_cov(state.X, state.dims) - Eigen::MatrixXd::Identity(c, c)).norm();
}

double alignment_residual(const AlignedState& state) {
  Eigen::MatrixXd off = state.omega;
  off.diagonal().setZero();
  return off.norm();
}

AlignedState aligned_state_from(const ProblemDims& dims, Eigen::MatrixXd x) {
  const int c = dims.num_classes;
  ProblemDims chart{c, dims.examples_per_class, c};
  if (x.rows() != c || x.cols() != chart.total_examples()) {
    throw ShapeError("aligned_state_from: expected " + std::to_string(c) + "x" +
                     std::to_string(chart.total_examples()) + " state");
  }
  AlignedState state;
  state.dims = chart;
  state.omega = class_means(x, chart);
  state.X = std::move(x);
  return state;
}

namespace {

// Right-multiplies by (V (x) I_N): output class block c' is the V-weighted
// combination of input class blocks.
Eigen::MatrixXd mix_class_blocks(const Eigen::MatrixXd& m, const Eigen::MatrixXd& v, int n) {
  const int c = static_cast<int>(v.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (int dst = 0; dst < c; ++dst) {
    for (int src = 0; src < c; ++src) {
      if (v(src, dst) != 0.0) out.middleCols(dst * n, n) += v(src, dst) * m.middleCols(src * n, n);
    }
  }
  return out;
}

}  // namespace

Alignment align_features_full(const FeatureMatrix& centered, double floor) {
  const ProblemDims& dims = centered.dims;
  if (dims.num_classes < 2) throw PreconditionError("align_features: need C >= 2");
  FeatureStats stats = compute_stats(centered);
  const double scale = std::max(1.0, centered.data.cwiseAbs().maxCoeff());
  if (stats.global_mean.cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw PreconditionError("align_features: features are not globally centered");
  }
  Eigen::MatrixXd whitener = inv_sqrt_spd(stats.sigma_w, floor);
  SnrSpectrum spectrum = snr_svd(whitener * stats.centered_means);
  if (spectrum.rank() != dims.num_classes - 1) {
    throw SingularSystemError("align_features: SNR matrix has rank " +
                              std::to_string(spectrum.rank()) + ", expected C-1 = " +
                              std::to_string(dims.num_classes - 1));
  }
  Eigen::MatrixXd x = spectrum.left_vectors.transpose() * (whitener * centered.data);
  x = mix_class_blocks(x, spectrum.right_vectors, dims.examples_per_class);
  return Alignment{aligned_state_from(dims, std::move(x)), std::move(spectrum)};
}

AlignedState align_features(const FeatureMatrix& centered, double floor) {
  return align_features_full(centered, floor).state;
}

RealignRotation realign_rotation(const AlignedState& state) {
  // Omega is the (uncentered) class-means matrix in this chart; its SVD
  // supplies the rotation pair. Diagonal Omega with nonincreasing entries
  // maps to the identity rotation.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(state.omega,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  RealignRotation rotation{svd.matrixU(), svd.matrixV()};
  fix_signs(rotation.u, rotation.v);
  return rotation;
}

AlignedState realign(const AlignedState& state) {
  RealignRotation rotation = realign_rotation(state);
  Eigen::MatrixXd x = rotation.u.transpose() * state.X;
  x = mix_class_blocks(x, rotation.v, state.dims.examples_per_class);
  return aligned_state_from(state.dims, std::move(x));
}

Eigen::MatrixXd tangent_project(const AlignedState& state, const Eigen::MatrixXd& z) {
  if (z.rows() != state.X.rows() || z.cols() != state.X.cols()) {
    throw ShapeError("tangent_project: direction has wrong shape");
  }
  if (manifold_residual(state) > 1e-8) {
    throw PreconditionError("tangent_project: state violates the manifold constraint (residual " +
                            std::to_string(manifold_residual(state)) + ")");
  }
  // Pi(Z) = Z - 0.5 (X Cmat Z^T + Z Cmat X^T) X
  Eigen::MatrixXd xc = apply_centering(state.X, state.dims);   // X Cmat
  Eigen::MatrixXd sym = xc * z.transpose();
  sym += sym.transpose().eval();
  return z - 0.5 * sym * state.X;
}

void write_spectrum_csv(const SnrSpectrum& spectrum, std::ostream& out) {
  csv::write_row(out, spectrum.singular_values.transpose());
  csv::write_matrix(out, spectrum.left_vectors);
  csv::write_matrix(out, spectrum.right_vectors);
}

}  // namespace collapse
