#pragma once

#include <iosfwd>
#include <vector>

#include "collapse/features.hpp"

namespace collapse {

/// Default relative eigenvalue floor for matrix inverse square roots.
inline constexpr double kSpdFloor = 1e-12;

/// Relative threshold under which a singular value counts as zero.
inline constexpr double kRankTol = 1e-10;

/// Symmetric inverse square root of an SPD matrix: returns B with
/// B A B = I. Throws PreconditionError if A is not symmetric (to 1e-10,
/// scaled) and SingularSystemError if any eigenvalue is at or below
/// floor * lambda_max, reporting the eigenvalue.
Eigen::MatrixXd inv_sqrt_spd(const Eigen::MatrixXd& a, double floor = kSpdFloor);

/// Signal-to-noise matrix SigmaW^{-1/2} Mbar of globally centered
/// features. Columns sum to zero. Requires zero global mean and SigmaW
/// above the eigenvalue floor.
Eigen::MatrixXd snr_matrix(const FeatureMatrix& centered, double floor = kSpdFloor);

/// SVD of the SNR matrix with a deterministic convention: singular values
/// nonincreasing, ties broken by lexicographic comparison of left-vector
/// entries, and the first nonvanishing entry of each left vector positive.
/// For a genuine SNR input the last value is zero and the last right
/// vector is parallel to 1/sqrt(C).
struct SnrSpectrum {
  Eigen::MatrixXd left_vectors;   // U, P x C, orthonormal columns
  Eigen::VectorXd singular_values; // length C, nonincreasing, last ~ 0
  Eigen::MatrixXd right_vectors;  // V, C x C orthogonal

  int num_classes() const { return static_cast<int>(right_vectors.rows()); }
  /// Count of singular values above kRankTol * max.
  int rank() const;
  /// The C-1 leading values as a plain vector.
  std::vector<double> nonzero_values() const;
};

SnrSpectrum snr_svd(const Eigen::MatrixXd& snr);

/// Features expressed in aligned SNR coordinates. On the normalized
/// features manifold X Cmat X^T = I, with cached class-means matrix
/// Omega = (1/N) X Y^T, diagonal when freshly aligned.
struct AlignedState {
  ProblemDims dims;        // feature_dim == num_classes in this chart
  Eigen::MatrixXd X;       // C x CN
  Eigen::MatrixXd omega;   // C x C cached (1/N) X Y^T

  /// Leading C-1 diagonal entries of omega.
  std::vector<double> omega_diag() const;
};

/// Wraps a C x CN matrix as an aligned-chart state, caching Omega.
/// `dims` are the dims of the underlying problem; the chart's feature
/// dimension is C regardless of the original P.
AlignedState aligned_state_from(const ProblemDims& dims, Eigen::MatrixXd x);

/// || X Cmat X^T - I ||_F.
double manifold_residual(const AlignedState& state);

/// || Omega - diag(Omega) ||_F (off-diagonal mass).
double alignment_residual(const AlignedState& state);

struct Alignment {
  AlignedState state;
  SnrSpectrum spectrum;    // spectrum of the input's SNR matrix
};

/// X = U^T SigmaW^{-1/2} Hbar (V (x) I_N), applied blockwise so the
/// CN x CN Kronecker factor is never materialized. The diagonal of the
/// resulting Omega equals the SNR singular values.
Alignment align_features_full(const FeatureMatrix& centered, double floor = kSpdFloor);
AlignedState align_features(const FeatureMatrix& centered, double floor = kSpdFloor);

/// The rotation pair realign() applies: the sign-fixed SVD frames of the
/// state's Omega. Exposed so callers tracking the chart can fold it in.
struct RealignRotation {
  Eigen::MatrixXd u;  // C x C
  Eigen::MatrixXd v;  // C x C
};

RealignRotation realign_rotation(const AlignedState& state);

/// Re-diagonalizes Omega of an existing state by the SVD of Omega itself
/// (class means in the current chart). Identity on an already aligned
/// state up to roundoff.
AlignedState realign(const AlignedState& state);

/// Projection onto the tangent space of {X : X Cmat X^T = I} at state.X:
///   Pi(Z) = Z - 0.5 (X Cmat Z^T + Z Cmat X^T) X.
/// Requires manifold_residual(state) <= 1e-8. Idempotent; the output T
/// satisfies X Cmat T^T + T Cmat X^T = 0.
Eigen::MatrixXd tangent_project(const AlignedState& state, const Eigen::MatrixXd& z);

/// CSV form: one row of singular values, then the U block, then V.
void write_spectrum_csv(const SnrSpectrum& spectrum, std::ostream& out);

}  // namespace collapse
