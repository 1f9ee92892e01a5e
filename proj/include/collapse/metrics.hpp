#pragma once

#include <utility>

#include "collapse/classifier.hpp"

namespace collapse {

/// The four collapse measurements of one feature/classifier snapshot.
struct NcReport {
  double nc1_trace = 0.0;     // within/between variability ratio
  double equinorm_cv = 0.0;   // std/mean of centered class-mean norms
  double angle_dev = 0.0;     // mean |cos + 1/(C-1)| over class pairs
  double self_duality = 0.0;  // ||W/||W|| - Mbar^T/||Mbar|| ||_F
  double ncc_mismatch = 0.0;  // fraction where argmax score != nearest mean
};

/// Within-class variability relative to the between-class scatter:
/// tr((Mbar Mbar^T)^+ SigmaW), the per-class average of tr(SigmaB^+ SigmaW).
/// Pseudo-inverse rank cutoff 1e-10 relative. On whitened features this
/// equals sum_j 1/w_j^2 over the SNR singular values.
double nc1_trace(const FeatureMatrix& features);

/// (coefficient of variation of ||mu_c - mu_G||, mean absolute deviation
/// of pairwise cosines from -1/(C-1)). Throws DegenerateGeometryError when
/// some centered mean is numerically zero.
std::pair<double, double> nc2_measures(const FeatureMatrix& features);

/// Same measurements taken directly on a centered class-means matrix
/// (columns mu_c - mu_G).
std::pair<double, double> nc2_from_centered_means(const Eigen::MatrixXd& centered_means);

/// Distance between the matrix-normalized classifier and centered means.
double nc3_self_duality(const Eigen::MatrixXd& weights, const Eigen::MatrixXd& centered_means);

/// Fraction of examples where the linear rule argmax(<w_c,h> + b_c) and
/// the nearest-class-mean rule argmin ||h - mu_c|| disagree. Ties resolve
/// to the lowest class index in both rules.
double nc4_mismatch(const ExtendedClassifier& clf,
                    const Eigen::MatrixXd& means,
                    const FeatureMatrix& features);

/// Simplex-ETF certificate: C-1 equal nonzero singular values, a vanishing
/// C-th value, and zero column sums, each within tol (relative).
struct EtfCertificate {
  bool pass = false;
  double equal_sv_residual = 0.0;  // (max - min)/max over leading C-1
  double null_sv_residual = 0.0;   // s_C / s_max
  double ones_residual = 0.0;      // ||E 1|| / ||E||_F
};

EtfCertificate etf_certificate(const Eigen::MatrixXd& e, double tol);

}  // namespace collapse
