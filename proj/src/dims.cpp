#include "collapse/dims.hpp"

#include <string>

#include "collapse/errors.hpp"

namespace collapse {

ProblemDims make_dims(int num_classes, int examples_per_class, int feature_dim) {
  if (num_classes < 1 || examples_per_class < 1 || feature_dim < 1) {
    throw PreconditionError("make_dims: C, N, P must all be positive, got C=" +
                            std::to_string(num_classes) + " N=" + std::to_string(examples_per_class) +
                            " P=" + std::to_string(feature_dim));
  }
  return ProblemDims{num_classes, examples_per_class, feature_dim};
}

Eigen::MatrixXd label_matrix(const ProblemDims& dims) {
  const int c = dims.num_classes, n = dims.examples_per_class;
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(c, c * n);
  for (int cls = 0; cls < c; ++cls) y.block(cls, cls * n, 1, n).setOnes();
  return y;
}

Eigen::MatrixXd centering_matrix(const ProblemDims& dims) {
  const int cn = dims.total_examples();
  const int n = dims.examples_per_class;
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(cn, cn);
  // Y^T Y is block diagonal with all-ones N x N blocks.
  for (int cls = 0; cls < dims.num_classes; ++cls) {
    m.block(cls * n, cls * n, n, n).array() -= 1.0 / n;
  }
  return m / cn;
}

Eigen::MatrixXd class_means(const Eigen::MatrixXd& features, const ProblemDims& dims) {
  const int n = dims.examples_per_class;
  Eigen::MatrixXd means(features.rows(), dims.num_classes);
  for (int cls = 0; cls < dims.num_classes; ++cls) {
    means.col(cls) = features.middleCols(cls * n, n).rowwise().mean();
  }
  return means;
}

Eigen::MatrixXd subtract_class_means(const Eigen::MatrixXd& features, const ProblemDims& dims) {
  const int n = dims.examples_per_class;
  Eigen::MatrixXd out = features;
  for (int cls = 0; cls < dims.num_classes; ++cls) {
    out.middleCols(cls * n, n).colwise() -= features.middleCols(cls * n, n).rowwise().mean().eval();
  }
  return out;
}

Eigen::MatrixXd apply_centering(const Eigen::MatrixXd& features, const ProblemDims& dims) {
  return subtract_class_means(features, dims) / dims.total_examples();
}

Eigen::MatrixXd within_cov(const Eigen::MatrixXd& features, const ProblemDims& dims) {
  // (Fc Fc^T)/CN rather than (Fc F^T)/CN: identical in exact arithmetic,
  // bitwise symmetric in floating point.
  Eigen::MatrixXd centered = subtract_class_means(features, dims);
  return centered * centered.transpose() / dims.total_examples();
}

}  // namespace collapse
