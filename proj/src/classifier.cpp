#include "collapse/classifier.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "collapse/csv.hpp"
#include "collapse/errors.hpp"
#include "collapse/snr.hpp"

namespace collapse {

namespace {

// Solves S Z = B for symmetric S via eigendecomposition, rejecting the
// system when lambda_min <= kRankTol * lambda_max.
Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& s, const Eigen::MatrixXd& b,
                          const std::string& name) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("solve_spd: eigendecomposition of " + name + " failed");
  }
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (hi <= 0.0 || lo <= kRankTol * hi) {
    throw SingularSystemError("rank-deficient system: " + name + " has eigenvalue ratio " +
                              std::to_string(hi > 0.0 ? lo / hi : 0.0) + " (min " +
                              std::to_string(lo) + ", max " + std::to_string(hi) + ")");
  }
  return eig.eigenvectors() *
         eig.eigenvalues().cwiseInverse().asDiagonal() *
         (eig.eigenvectors().transpose() * b);
}

}  // namespace

ExtendedFeatures extend(const FeatureMatrix& features) {
  Eigen::MatrixXd ext(features.dims.feature_dim + 1, features.dims.total_examples());
  ext.topRows(features.dims.feature_dim) = features.data;
  ext.row(features.dims.feature_dim).setOnes();
  return ExtendedFeatures{features.dims, std::move(ext)};
}

Eigen::MatrixXd ExtendedClassifier::stacked() const {
  Eigen::MatrixXd w(weights.rows(), weights.cols() + 1);
  w.leftCols(weights.cols()) = weights;
  w.rightCols(1) = bias;
  return w;
}

ExtendedClassifier classifier_from_stacked(const Eigen::MatrixXd& stacked) {
  if (stacked.cols() < 2) throw ShapeError("classifier_from_stacked: need at least 2 columns");
  ExtendedClassifier clf;
  clf.weights = stacked.leftCols(stacked.cols() - 1);
  clf.bias = stacked.rightCols(1);
  return clf;
}

ExtendedClassifier ls_classifier_extended(const ExtendedFeatures& ext, double lambda) {
  if (lambda < 0.0) throw PreconditionError("ls_classifier_extended: lambda must be >= 0");
  const ProblemDims& dims = ext.dims;
  const int pe = dims.feature_dim + 1;
  if (ext.data.rows() != pe || ext.data.cols() != dims.total_examples()) {
    throw ShapeError("ls_classifier_extended: extended features have wrong shape");
  }
  // Ave htilde htilde^T = SigmaT_tilde + mu_tilde mu_tilde^T.
  Eigen::MatrixXd s = ext.data * ext.data.transpose() / dims.total_examples();
  s += lambda * Eigen::MatrixXd::Identity(pe, pe);
  Eigen::MatrixXd ext_means = class_means(ext.data, dims);  // Mtilde, (P+1) x C
  Eigen::MatrixXd solved = solve_spd(s, ext_means, "SigmaT_tilde + mu mu^T + lambda I");
  return classifier_from_stacked(solved.transpose() / dims.num_classes);
}

ExtendedClassifier ls_classifier_centered(const FeatureMatrix& centered) {
  const ProblemDims& dims = centered.dims;
  Eigen::VectorXd mu_g = centered.data.rowwise().mean();
  const double scale = std::max(1.0, centered.data.cwiseAbs().maxCoeff());
  if (mu_g.cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw PreconditionError("ls_classifier_centered: global mean is not zero (max entry " +
                            std::to_string(mu_g.cwiseAbs().maxCoeff()) + ")");
  }
  Eigen::MatrixXd hbar = centered.data.colwise() - mu_g;
  Eigen::MatrixXd sigma_t = hbar * hbar.transpose() / dims.total_examples();
  Eigen::MatrixXd mbar = class_means(hbar, dims);
  // W = C^{-1} Mbar^T SigmaT^{-1}  ==  (SigmaT^{-1} Mbar)^T / C.
  Eigen::MatrixXd w = solve_spd(sigma_t, mbar, "SigmaT").transpose() / dims.num_classes;
  ExtendedClassifier clf;
  clf.weights = w;
  clf.bias = Eigen::VectorXd::Constant(dims.num_classes, 1.0 / dims.num_classes) - w * mu_g;
  return clf;
}

Eigen::MatrixXd predictions(const ExtendedClassifier& clf, const FeatureMatrix& features) {
  if (clf.weights.cols() != features.dims.feature_dim) {
    throw ShapeError("predictions: classifier has " + std::to_string(clf.weights.cols()) +
                     " feature columns, data has " + std::to_string(features.dims.feature_dim));
  }
  return (clf.weights * features.data).colwise() + clf.bias;
}

double central_path_residual(const ExtendedClassifier& clf, const ExtendedFeatures& ext,
                             double lambda) {
  const ProblemDims& dims = ext.dims;
  Eigen::MatrixXd delta = clf.stacked() - ls_classifier_extended(ext, lambda).stacked();
  // 0.5 tr(D S D^T) with S = Ave htilde htilde^T + lambda I, evaluated as
  // 0.5 (||D Htilde||^2/CN + lambda ||D||^2): each piece is a sum of
  // squares, so the value cannot go negative by cancellation.
  const double data_term = (delta * ext.data).squaredNorm() / dims.total_examples();
  const double ridge_term = lambda * delta.squaredNorm();
  return 0.5 * (data_term + ridge_term);
}

double stationarity_residual(const ExtendedClassifier& clf, const ExtendedFeatures& ext,
                             double lambda) {
  Eigen::MatrixXd w = clf.stacked();
  Eigen::MatrixXd residual = w * ext.data - label_matrix(ext.dims);
  Eigen::MatrixXd gradient = residual * ext.data.transpose() / ext.dims.total_examples() + lambda * w;
  return gradient.norm();
}

void write_classifier_csv(const ExtendedClassifier& clf, std::ostream& out) {
  csv::write_matrix(out, clf.stacked());
}

ExtendedClassifier read_classifier_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw PreconditionError("read_classifier_csv: empty stream");
  Eigen::MatrixXd stacked(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) {
      throw PreconditionError("read_classifier_csv: ragged rows");
    }
    for (size_t j = 0; j < rows[i].size(); ++j) stacked(i, j) = rows[i][j];
  }
  return classifier_from_stacked(stacked);
}

}  // namespace collapse
