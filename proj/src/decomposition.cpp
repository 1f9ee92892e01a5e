#include "collapse/decomposition.hpp"

#include <string>

#include "collapse/errors.hpp"

namespace collapse {

double mse_loss(const ExtendedClassifier& clf, const ExtendedFeatures& ext, double lambda) {
  const ProblemDims& dims = ext.dims;
  Eigen::MatrixXd w = clf.stacked();
  if (w.cols() != ext.data.rows() || w.rows() != dims.num_classes) {
    throw ShapeError("mse_loss: classifier " + std::to_string(w.rows()) + "x" +
                     std::to_string(w.cols()) + " does not match extended features " +
                     std::to_string(ext.data.rows()) + "x" + std::to_string(ext.data.cols()));
  }
  Eigen::MatrixXd residual = w * ext.data - label_matrix(dims);
  return 0.5 * residual.squaredNorm() / dims.total_examples() + 0.5 * lambda * w.squaredNorm();
}

LossBreakdown decompose(const ExtendedClassifier& clf, const ExtendedFeatures& ext,
                        double lambda) {
  const ProblemDims& dims = ext.dims;
  const int c = dims.num_classes;
  ExtendedClassifier ls = ls_classifier_extended(ext, lambda);
  Eigen::MatrixXd wls = ls.stacked();

  // L_NC1 = 0.5 tr(Wls [SigmaW_tilde + lambda I] Wls^T). The within part is
  // a sum of squares of Wls applied to class-centered extended features.
  Eigen::MatrixXd centered = subtract_class_means(ext.data, dims);
  const double nc1 = 0.5 * ((wls * centered).squaredNorm() / dims.total_examples() +
                            lambda * wls.squaredNorm());

  Eigen::MatrixXd ext_means = class_means(ext.data, dims);
  const double nc23 =
      0.5 / c * (wls * ext_means - Eigen::MatrixXd::Identity(c, c)).squaredNorm();

  LossBreakdown breakdown;
  breakdown.nc1_part = nc1;
  breakdown.nc23_part = nc23;
  breakdown.ls_part = nc1 + nc23;
  breakdown.perp_part = central_path_residual(clf, ext, lambda);
  breakdown.total = breakdown.ls_part + breakdown.perp_part;
  return breakdown;
}

LossBreakdown decompose_centered(const FeatureMatrix& centered) {
  const ProblemDims& dims = centered.dims;
  const int c = dims.num_classes;
  ExtendedClassifier clf = ls_classifier_centered(centered);
  FeatureStats stats = compute_stats(centered);

  LossBreakdown breakdown;
  Eigen::MatrixXd deviations = subtract_class_means(centered.data, dims);
  breakdown.nc1_part = 0.5 * (clf.weights * deviations).squaredNorm() / dims.total_examples();
  Eigen::MatrixXd phi =
      Eigen::MatrixXd::Identity(c, c) - Eigen::MatrixXd::Constant(c, c, 1.0 / c);
  breakdown.nc23_part = 0.5 / c * (clf.weights * stats.centered_means - phi).squaredNorm();
  breakdown.ls_part = breakdown.nc1_part + breakdown.nc23_part;
  breakdown.perp_part = 0.0;
  breakdown.total = breakdown.ls_part;
  return breakdown;
}

LossBreakdown spectral_loss(const std::vector<double>& omegas, int num_classes) {
  if (num_classes < 2) throw PreconditionError("spectral_loss: need C >= 2");
  if (static_cast<int>(omegas.size()) != num_classes - 1) {
    throw ShapeError("spectral_loss: expected " + std::to_string(num_classes - 1) +
                     " singular values, got " + std::to_string(omegas.size()));
  }
  const double c = num_classes;
  LossBreakdown breakdown;
  for (double w : omegas) {
    if (w < 0.0) throw PreconditionError("spectral_loss: negative singular value");
    const double w2 = w * w;
    breakdown.total += 0.5 / (w2 + c);
    breakdown.nc1_part += 0.5 * w2 / ((c + w2) * (c + w2));
    const double gap = w2 / (w2 + c) - 1.0;
    breakdown.nc23_part += 0.5 / c * gap * gap;
  }
  breakdown.ls_part = breakdown.nc1_part + breakdown.nc23_part;
  breakdown.perp_part = 0.0;
  return breakdown;
}

}  // namespace collapse
