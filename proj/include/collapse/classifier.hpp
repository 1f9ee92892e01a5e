#pragma once

#include <iosfwd>

#include "collapse/features.hpp"

namespace collapse {

/// Extended feature matrix Htilde = [H; 1^T], shape (P+1) x CN.
struct ExtendedFeatures {
  ProblemDims dims;           // dims of the unextended features
  Eigen::MatrixXd data;       // (P+1) x CN, last row all ones
};

ExtendedFeatures extend(const FeatureMatrix& features);

/// Linear classifier with bias; stacked() gives Wtilde = [W, b], C x (P+1).
struct ExtendedClassifier {
  Eigen::MatrixXd weights;    // C x P
  Eigen::VectorXd bias;       // length C

  Eigen::MatrixXd stacked() const;
};

ExtendedClassifier classifier_from_stacked(const Eigen::MatrixXd& stacked);

/// The ridge-optimal classifier for fixed extended features:
///   Wtilde_LS = (1/C) Mtilde^T (Ave htilde htilde^T + lambda I)^{-1}.
/// The system matrix equals SigmaT_tilde + mu_tilde mu_tilde^T + lambda I.
/// Solved through a symmetric eigendecomposition; throws
/// SingularSystemError when the smallest eigenvalue falls below
/// 1e-10 times the largest (only possible at lambda = 0).
ExtendedClassifier ls_classifier_extended(const ExtendedFeatures& ext, double lambda);

/// The lambda = 0 classifier in unextended coordinates,
///   W_LS = C^{-1} Mbar^T SigmaT^{-1},  b_LS = C^{-1} 1 - W_LS mu_G.
/// Requires the input's global mean to vanish (to 1e-12, scaled) and
/// SigmaT to be full rank.
ExtendedClassifier ls_classifier_centered(const FeatureMatrix& centered);

/// Score matrix W H + b 1^T, shape C x CN.
Eigen::MatrixXd predictions(const ExtendedClassifier& clf, const FeatureMatrix& features);

/// Distance-from-central-path term of the loss decomposition:
///   0.5 tr[(Wt - Wt_LS)(SigmaT_t + mu_t mu_t^T + lambda I)(Wt - Wt_LS)^T].
/// Zero exactly when Wt = Wt_LS.
double central_path_residual(const ExtendedClassifier& clf,
                             const ExtendedFeatures& ext,
                             double lambda);

/// Residual of the first-order optimality condition
/// Ave (Wt htilde - y) htilde^T + lambda Wt, returned in Frobenius norm.
double stationarity_residual(const ExtendedClassifier& clf,
                             const ExtendedFeatures& ext,
                             double lambda);

/// CSV form: C rows, P+1 columns, bias last.
void write_classifier_csv(const ExtendedClassifier& clf, std::ostream& out);
ExtendedClassifier read_classifier_csv(std::istream& in);

}  // namespace collapse
