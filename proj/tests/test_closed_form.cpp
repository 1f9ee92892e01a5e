#include <cmath>

#include "doctest.h"

#include "collapse/closed_form.hpp"
#include "collapse/errors.hpp"
#include "collapse/metrics.hpp"
#include "support.hpp"

using namespace collapse;
namespace ct = collapse::testing;

TEST_CASE("ode constants") {
  for (auto [c, n] : {std::pair{2, 1}, {5, 8}, {10, 5}}) {
    OdeConstants k = ode_constants(c, n);
    CHECK(k.c1 / k.c2 == doctest::Approx(c).epsilon(1e-15));
    CHECK(k.c2 / k.c3 == doctest::Approx(4.0 * c).epsilon(1e-15));
  }
}

TEST_CASE("omega_rate") {
  SUBCASE("fixed point at the origin") {
    CHECK(omega_rate(1e-12, 4, 2) <= 1e-12);
  }

  SUBCASE("frozen value 1/605 at C=10, N=5, omega=1") {
    CHECK(omega_rate(1.0, 10, 5) == doctest::Approx(1.0 / 605.0).epsilon(1e-15));
  }

  SUBCASE("maximized at omega = sqrt(C/3), by grid search") {
    const int c = 7, n = 3;
    double best_w = 0.0, best_rate = 0.0;
    for (double w = 0.01; w <= 10.0; w += 0.001) {
      const double r = omega_rate(w, c, n);
      if (r > best_rate) {
        best_rate = r;
        best_w = w;
      }
    }
    CHECK(best_w == doctest::Approx(std::sqrt(c / 3.0)).epsilon(1e-3));
  }

  SUBCASE("rejects nonpositive omega") {
    CHECK_THROWS_AS(omega_rate(0.0, 4, 2), PreconditionError);
  }
}

TEST_CASE("integration_constant") {
  SUBCASE("frozen value at omega0=1, C=10, N=5") {
    CHECK(integration_constant(1.0, 10, 5).a == doctest::Approx(51.25).epsilon(1e-15));
  }

  SUBCASE("log term vanishes at omega0=1") {
    for (auto [c, n] : {std::pair{3, 2}, {6, 9}}) {
      ImplicitSolution sol = integration_constant(1.0, c, n);
      CHECK(sol.a == doctest::Approx(sol.constants.c2 + sol.constants.c3).epsilon(1e-15));
    }
  }

  SUBCASE("strictly increasing in omega0") {
    double previous = integration_constant(0.05, 4, 3).a;
    for (double w = 0.1; w < 4.0; w += 0.1) {
      const double a = integration_constant(w, 4, 3).a;
      CHECK(a > previous);
      previous = a;
    }
  }

  SUBCASE("rejects nonpositive omega0") {
    CHECK_THROWS_AS(integration_constant(0.0, 4, 3), PreconditionError);
  }
}

TEST_CASE("omega_at") {
  SUBCASE("returns omega0 at t=0") {
    for (double w0 : {0.3, 1.0, 2.5}) {
      ImplicitSolution sol = integration_constant(w0, 5, 8);
      CHECK(ct::rel_diff(omega_at(sol, 0.0), w0) <= 1e-12);
    }
  }

  SUBCASE("approaches the quartic asymptote") {
    ImplicitSolution sol = integration_constant(1.0, 10, 5);
    const double w = omega_at(sol, 1e7);
    CHECK(std::abs(w / asymptote(1e7, 10, 5) - 1.0) <= 0.02);
  }

  SUBCASE("time derivative matches omega_rate via central differences") {
    ImplicitSolution sol = integration_constant(0.8, 6, 4);
    for (int k = 0; k < 20; ++k) {
      const double t = 0.5 + 37.0 * k;
      const double h = 1e-4 * std::max(1.0, t);
      const double fd = (omega_at(sol, t + h) - omega_at(sol, t - h)) / (2 * h);
      CHECK(ct::rel_diff(fd, omega_rate(omega_at(sol, t), 6, 4)) <= 1e-6);
    }
  }

  SUBCASE("implicit-equation residual over random tuples") {
    auto gen = rng::make_stream(61);
    std::uniform_int_distribution<int> classes(2, 12);
    std::uniform_int_distribution<int> examples(1, 32);
    std::uniform_real_distribution<double> logw(std::log(0.05), std::log(5.0));
    std::uniform_real_distribution<double> logt(std::log(1e-3), std::log(1e8));
    for (int trial = 0; trial < 1000; ++trial) {
      const int c = classes(gen), n = examples(gen);
      ImplicitSolution sol = integration_constant(std::exp(logw(gen)), c, n);
      const double t = std::exp(logt(gen));
      const double w = omega_at(sol, t);
      CHECK(std::abs(sol.lhs(w) - (sol.a + t)) <= 1e-12 * std::max(1.0, std::abs(sol.a) + t));
    }
  }

  SUBCASE("strictly increasing in t and omega0") {
    ImplicitSolution sol = integration_constant(0.5, 5, 8);
    double previous = omega_at(sol, 0.0);
    for (double t = 1.0; t <= 1e5; t *= 4.0) {
      const double w = omega_at(sol, t);
      CHECK(w > previous);
      previous = w;
    }
    double previous_w = 0.0;
    for (double w0 : {0.25, 0.5, 1.0, 2.0}) {
      const double w = omega_at(integration_constant(w0, 5, 8), 100.0);
      CHECK(w > previous_w);
      previous_w = w;
    }
  }

  SUBCASE("handles negative a (omega0 < 1)") {
    ImplicitSolution sol = integration_constant(0.1, 8, 2);
    CHECK(sol.a < 0.0);
    const double w = omega_at(sol, 0.5 * std::abs(sol.a));
    CHECK(std::abs(sol.lhs(w) - (sol.a + 0.5 * std::abs(sol.a))) <=
          1e-12 * std::max(1.0, std::abs(sol.a) * 1.5));
  }
}

TEST_CASE("asymptote") {
  CHECK(asymptote(ode_constants(5, 8).c3, 5, 8) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(asymptote(16.0, 10, 4) == doctest::Approx(2.0).epsilon(1e-15));  // (4*16/4)^(1/4)

  SUBCASE("ratio omega/asymptote tends to one monotonically") {
    ImplicitSolution sol = integration_constant(2.0, 10, 5);
    double previous_gap = 1e300;
    for (double t = 1e4; t <= 1e8; t *= 10.0) {
      const double gap = std::abs(omega_at(sol, t) / asymptote(t, 10, 5) - 1.0);
      CHECK(gap < previous_gap);
      previous_gap = gap;
    }
    CHECK(previous_gap <= 0.02);
  }
}

TEST_CASE("ratio of extreme solutions contracts to one") {
  ImplicitSolution lo = integration_constant(0.5, 10, 5);
  ImplicitSolution hi = integration_constant(2.0, 10, 5);
  double previous = 1e300;
  for (double t : {1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6, 1e7}) {
    const double ratio = omega_at(hi, t) / omega_at(lo, t);
    CHECK(ratio >= 1.0);
    CHECK(ratio < previous);
    previous = ratio;
  }
  CHECK(previous <= 1.001);
}

TEST_CASE("limit_snr") {
  auto gen = rng::make_stream(62);

  SUBCASE("already-ETF spectra reproduce the normalized input") {
    Eigen::MatrixXd etf = ct::simplex_etf(6, 4, gen, 3.0);
    SnrSpectrum spectrum = snr_svd(etf);
    Eigen::MatrixXd limit = limit_snr(spectrum);
    CHECK((limit - etf / spectrum.singular_values[0]).norm() <= 1e-9);
  }

  SUBCASE("zero column sums and unit singular values for seeded spectra") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      FeatureMatrix h = init_features(make_dims(4, 6, 6), seed, 1.0);
      SnrSpectrum spectrum = snr_svd(snr_matrix(h));
      Eigen::MatrixXd limit = limit_snr(spectrum);
      CHECK((limit * Eigen::VectorXd::Ones(4)).norm() <= 1e-10);
      Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(limit).singularValues();
      for (int j = 0; j < 3; ++j) CHECK(std::abs(sv[j] - 1.0) <= 1e-10);
      CHECK(sv[3] <= 1e-10);
      CHECK(etf_certificate(limit, 1e-9).pass);
    }
  }

  SUBCASE("rank deficiency is rejected") {
    SnrSpectrum degenerate = snr_svd(Eigen::MatrixXd::Zero(5, 3));
    CHECK_THROWS_AS(limit_snr(degenerate), SingularSystemError);
  }
}

TEST_CASE("limit_features") {
  FeatureMatrix h = init_features(make_dims(3, 5, 4), 64, 1.0);
  SnrSpectrum spectrum = snr_svd(snr_matrix(h));

  SUBCASE("N=1 equals limit_snr") {
    CHECK(limit_features(spectrum, 1) == limit_snr(spectrum));
  }

  SUBCASE("columns repeat within each class and within-class covariance vanishes") {
    const int n = 4;
    Eigen::MatrixXd features = limit_features(spectrum, n);
    Eigen::MatrixXd snr_limit = limit_snr(spectrum);
    for (int cls = 0; cls < 3; ++cls)
      for (int i = 0; i < n; ++i)
        CHECK(features.col(cls * n + i) == snr_limit.col(cls));
    CHECK(within_cov(features, make_dims(3, n, 4)).norm() == 0.0);
  }
}
