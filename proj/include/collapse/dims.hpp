#pragma once

#include <Eigen/Dense>

namespace collapse {

/// Problem sizes: C classes, N examples per class, P feature dimensions.
/// Every matrix shape in the library derives from these three numbers.
/// Columns of data matrices are ordered i-then-c: column (c*N + i) holds
/// example i of class c (0-based).
struct ProblemDims {
  int num_classes = 0;        // C
  int examples_per_class = 0; // N
  int feature_dim = 0;        // P

  int total_examples() const { return num_classes * examples_per_class; }

  friend bool operator==(const ProblemDims&, const ProblemDims&) = default;
};

/// Validates and constructs dims. C = 1 is tolerated so the centering
/// matrix is well-defined for it; operations that need class geometry
/// (classifiers, SNR, metrics) require C >= 2 at their own entry points.
ProblemDims make_dims(int num_classes, int examples_per_class, int feature_dim);

/// One-hot label matrix Y of shape C x CN with block structure
/// Y = I_C (x) 1_N^T under i-then-c column order. Satisfies Y Y^T = N I.
Eigen::MatrixXd label_matrix(const ProblemDims& dims);

/// Class-centering matrix (1/CN) (I_CN - Y^T Y / N), CN x CN, symmetric.
/// For any features F: F * centering * F^T equals the within-class
/// covariance of F, and centering * Y^T = 0.
Eigen::MatrixXd centering_matrix(const ProblemDims& dims);

// Structured equivalents, used throughout so the CN x CN matrix never has
// to be materialized on hot paths.

/// Class means (1/N) F Y^T, shape rows(F) x C.
Eigen::MatrixXd class_means(const Eigen::MatrixXd& features, const ProblemDims& dims);

/// F with each column's class mean subtracted.
Eigen::MatrixXd subtract_class_means(const Eigen::MatrixXd& features, const ProblemDims& dims);

/// F * centering_matrix(dims) without forming the CN x CN matrix.
Eigen::MatrixXd apply_centering(const Eigen::MatrixXd& features, const ProblemDims& dims);

/// Within-class covariance F * centering * F^T (square, symmetric PSD).
Eigen::MatrixXd within_cov(const Eigen::MatrixXd& features, const ProblemDims& dims);

}  // namespace collapse
