#include "collapse/metrics.hpp"

#include <cmath>
#include <string>

#include "collapse/errors.hpp"
#include "collapse/snr.hpp"

namespace collapse {

double nc1_trace(const FeatureMatrix& features) {
  FeatureStats stats = compute_stats(features);
  // Between-class scatter Mbar Mbar^T (class-sum convention, rank C-1);
  // equals C * sigma_b. Pseudo-inverted with a 1e-10 relative cutoff.
  Eigen::MatrixXd scatter = stats.centered_means * stats.centered_means.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scatter);
  if (eig.info() != Eigen::Success) throw NumericalError("nc1_trace: eigensolver failed");
  const double top = eig.eigenvalues().maxCoeff();
  if (top <= 0.0) return 0.0;
  double trace = 0.0;
  for (int i = 0; i < eig.eigenvalues().size(); ++i) {
    const double lambda = eig.eigenvalues()[i];
    if (lambda > kRankTol * top) {
      const Eigen::VectorXd q = eig.eigenvectors().col(i);
      trace += q.dot(stats.sigma_w * q) / lambda;
    }
  }
  return trace;
}

std::pair<double, double> nc2_from_centered_means(const Eigen::MatrixXd& centered_means) {
  const int c = static_cast<int>(centered_means.cols());
  if (c < 2) throw PreconditionError("nc2: need C >= 2");
  const double scale = std::max(1.0, centered_means.cwiseAbs().maxCoeff());

  Eigen::VectorXd norms(c);
  for (int cls = 0; cls < c; ++cls) {
    norms[cls] = centered_means.col(cls).norm();
    if (norms[cls] <= 1e-12 * scale) {
      throw DegenerateGeometryError("nc2: centered mean of class " + std::to_string(cls) +
                                    " is numerically zero");
    }
  }
  const double mean_norm = norms.mean();
  const double var = (norms.array() - mean_norm).square().mean();
  const double equinorm_cv = std::sqrt(var) / mean_norm;

  const double target = -1.0 / (c - 1);
  double deviation = 0.0;
  int pairs = 0;
  for (int a = 0; a < c; ++a) {
    for (int b = a + 1; b < c; ++b) {
      const double cosine =
          centered_means.col(a).dot(centered_means.col(b)) / (norms[a] * norms[b]);
      deviation += std::abs(cosine - target);
      ++pairs;
    }
  }
  return {equinorm_cv, deviation / pairs};
}

std::pair<double, double> nc2_measures(const FeatureMatrix& features) {
  if (features.dims.num_classes < 2) throw PreconditionError("nc2_measures: need C >= 2");
  return nc2_from_centered_means(compute_stats(features).centered_means);
}

double nc3_self_duality(const Eigen::MatrixXd& weights, const Eigen::MatrixXd& centered_means) {
  if (weights.rows() != centered_means.cols() || weights.cols() != centered_means.rows()) {
    throw ShapeError("nc3_self_duality: W must be C x P and Mbar P x C");
  }
  const double wn = weights.norm();
  const double mn = centered_means.norm();
  if (wn == 0.0 || mn == 0.0) {
    throw DegenerateGeometryError("nc3_self_duality: zero-norm input");
  }
  return (weights / wn - centered_means.transpose() / mn).norm();
}

double nc4_mismatch(const ExtendedClassifier& clf, const Eigen::MatrixXd& means,
                    const FeatureMatrix& features) {
  const int c = features.dims.num_classes;
  if (means.rows() != features.dims.feature_dim || means.cols() != c) {
    throw ShapeError("nc4_mismatch: means must be P x C");
  }
  Eigen::MatrixXd scores = predictions(clf, features);
  int mismatches = 0;
  for (int col = 0; col < features.data.cols(); ++col) {
    int best_score = 0;
    int best_mean = 0;
    double top = scores(0, col);
    double dist = (features.data.col(col) - means.col(0)).squaredNorm();
    for (int cls = 1; cls < c; ++cls) {
      if (scores(cls, col) > top) {  // ties keep the lowest class index
        top = scores(cls, col);
        best_score = cls;
      }
      const double d = (features.data.col(col) - means.col(cls)).squaredNorm();
      if (d < dist) {
        dist = d;
        best_mean = cls;
      }
    }
    if (best_score != best_mean) ++mismatches;
  }
  return static_cast<double>(mismatches) / features.data.cols();
}

EtfCertificate etf_certificate(const Eigen::MatrixXd& e, double tol) {
  const int c = static_cast<int>(e.cols());
  if (c < 2) throw PreconditionError("etf_certificate: need C >= 2 columns");
  if (tol <= 0.0) throw PreconditionError("etf_certificate: tol must be positive");

  Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(e).singularValues();
  EtfCertificate cert;
  const double top = sv.size() ? sv[0] : 0.0;
  if (top <= 0.0 || e.norm() == 0.0) {
    cert.pass = false;
    cert.equal_sv_residual = 1.0;
    cert.null_sv_residual = 1.0;
    cert.ones_residual = 1.0;
    return cert;
  }
  // Fewer than C singular values (P < C) leaves the trailing ones at zero.
  const double low = sv.size() >= c - 1 ? sv[c - 2] : 0.0;
  cert.equal_sv_residual = (top - low) / top;
  cert.null_sv_residual = sv.size() >= c ? sv[c - 1] / top : 0.0;
  cert.ones_residual = (e * Eigen::VectorXd::Ones(c)).norm() / e.norm();
  cert.pass = cert.equal_sv_residual <= tol && cert.null_sv_residual <= tol &&
              cert.ones_residual <= tol;
  return cert;
}

}  // namespace collapse
