#include "collapse/synthesis.hpp"

#include "collapse/errors.hpp"
#include "collapse/rng.hpp"

namespace collapse {

Eigen::MatrixXd simplex_etf(int feature_dim, int num_classes, std::mt19937_64& gen,
                            double scale) {
  if (feature_dim < num_classes) throw PreconditionError("simplex_etf: need P >= C");
  Eigen::MatrixXd g = rng::gaussian(feature_dim, num_classes, gen);
  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ() *
                      Eigen::MatrixXd::Identity(feature_dim, num_classes);
  Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(num_classes, num_classes) -
                        Eigen::MatrixXd::Constant(num_classes, num_classes, 1.0 / num_classes);
  return scale * q * phi;
}

Eigen::MatrixXd whitened_deviations(const ProblemDims& dims, std::mt19937_64& gen) {
  if (dims.num_classes * (dims.examples_per_class - 1) < dims.feature_dim) {
    throw PreconditionError("whitened_deviations: need C(N-1) >= P for full-rank deviations");
  }
  Eigen::MatrixXd e = rng::gaussian(dims.feature_dim, dims.total_examples(), gen);
  e = subtract_class_means(e, dims);
  return inv_sqrt_spd(within_cov(e, dims)) * e;
}

FeatureMatrix features_with_spectrum(const ProblemDims& dims, const std::vector<double>& omegas,
                                     std::mt19937_64& gen) {
  const int c = dims.num_classes, n = dims.examples_per_class, p = dims.feature_dim;
  if (static_cast<int>(omegas.size()) != c - 1) {
    throw ShapeError("features_with_spectrum: expected C-1 singular values");
  }
  if (p < c) throw PreconditionError("features_with_spectrum: need P >= C");

  Eigen::MatrixXd u = Eigen::HouseholderQR<Eigen::MatrixXd>(rng::gaussian(p, c, gen))
                          .householderQ() *
                      Eigen::MatrixXd::Identity(p, c);
  // Orthogonal V whose last column spans the ones vector: QR a basis whose
  // first column is 1, then rotate that column to the back.
  Eigen::MatrixXd seed(c, c);
  seed.col(0) = Eigen::VectorXd::Ones(c);
  seed.rightCols(c - 1) = rng::gaussian(c, c - 1, gen);
  Eigen::MatrixXd qv = Eigen::HouseholderQR<Eigen::MatrixXd>(seed).householderQ();
  Eigen::MatrixXd v(c, c);
  v.leftCols(c - 1) = qv.rightCols(c - 1);
  v.col(c - 1) = qv.col(0);

  Eigen::VectorXd w = Eigen::VectorXd::Zero(c);
  for (int j = 0; j < c - 1; ++j) w[j] = omegas[j];
  Eigen::MatrixXd means = u * w.asDiagonal() * v.transpose();  // zero column sums

  Eigen::MatrixXd data(p, dims.total_examples());
  for (int cls = 0; cls < c; ++cls)
    for (int i = 0; i < n; ++i) data.col(cls * n + i) = means.col(cls);
  data += whitened_deviations(dims, gen);
  return make_features(dims, std::move(data));
}

AlignedState state_with_omegas(int num_classes, int examples_per_class,
                               const std::vector<double>& omegas, std::mt19937_64& gen) {
  ProblemDims chart = make_dims(num_classes, examples_per_class, num_classes);
  if (static_cast<int>(omegas.size()) != num_classes - 1) {
    throw ShapeError("state_with_omegas: expected C-1 singular values");
  }
  Eigen::MatrixXd x = whitened_deviations(chart, gen);
  for (int j = 0; j < num_classes - 1; ++j) {
    x.row(j).segment(j * examples_per_class, examples_per_class).array() += omegas[j];
  }
  return aligned_state_from(chart, std::move(x));
}

}  // namespace collapse
