/*
 * Copyright 2026 The memorability authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "memorability/bayesian_ridge.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "memorability/rank_metrics.hpp"
#include "oracles.hpp"

namespace memorability {
namespace {

BRRConfig frozen(double alpha, double lambda) {
  BRRConfig c;
  c.alpha_init = alpha;
  c.lambda_init = lambda;
  c.update_hyperparameters = false;
  c.fit_intercept = false;
  c.standardize_inputs = false;
  return c;
}

struct Instance {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::VectorXd w;
};

Instance random_instance(std::mt19937_64& gen, int n, int d, double noise) {
  std::normal_distribution<double> nd;
  Instance in{Eigen::MatrixXd(n, d), Eigen::VectorXd(n), Eigen::VectorXd(d)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) in.X(i, j) = nd(gen);
  for (int j = 0; j < d; ++j) in.w(j) = nd(gen);
  in.y = in.X * in.w;
  for (int i = 0; i < n; ++i) in.y(i) += noise * nd(gen);
  return in;
}

TEST(BayesianRidgeFit, FrozenIdentityExample) {
  const Eigen::MatrixXd X = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::VectorXd y = (Eigen::VectorXd(2) << 1, 0).finished();
  const auto m = fit(X, y, frozen(1.0, 1.0));
  EXPECT_DOUBLE_EQ(m.w_mean(0), 0.5);
  EXPECT_DOUBLE_EQ(m.w_mean(1), 0.0);
  EXPECT_DOUBLE_EQ(predict(m, Eigen::Vector2d(1, 0)).mean, 0.5);
}

TEST(BayesianRidgeFit, VanishingPriorGivesLeastSquares) {
  std::mt19937_64 gen(42);
  for (int trial = 0; trial < 20; ++trial) {
    const auto in = random_instance(gen, 60, 8, 0.3);
    const auto m = fit(in.X, in.y, frozen(1.0, 1e-12));
    const Eigen::VectorXd ols = in.X.householderQr().solve(in.y);
    EXPECT_LE((m.w_mean - ols).norm() / ols.norm(), 1e-6);
  }
}

TEST(BayesianRidgeFit, RecoversSyntheticGenerator) {
  // N = 200, D = 5, sigma = 0.1; the noise precision should be near 100.
  std::mt19937_64 gen(2021);
  const auto in = random_instance(gen, 200, 5, 0.1);
  const auto m = fit(in.X, in.y);
  std::vector<double> pred, truth;
  const Eigen::VectorXd clean = in.X * in.w;
  for (int i = 0; i < 200; ++i) {
    pred.push_back(predict(m, Eigen::VectorXd(in.X.row(i).transpose())).mean);
    truth.push_back(clean(i));
  }
  EXPECT_GE(spearman(pred, truth), 0.95);
  EXPECT_GE(m.alpha, 0.5 * 100.0);
  EXPECT_LE(m.alpha, 2.0 * 100.0);
  EXPECT_TRUE(m.converged);
}

TEST(BayesianRidgeFit, DefaultsMatchReferenceParameterization) {
  const BRRConfig c;
  EXPECT_EQ(c.max_iter, 300u);
  EXPECT_EQ(c.tol, 1e-3);
  EXPECT_EQ(c.alpha_1, 1e-6);
  EXPECT_EQ(c.alpha_2, 1e-6);
  EXPECT_EQ(c.lambda_1, 1e-6);
  EXPECT_EQ(c.lambda_2, 1e-6);
  EXPECT_FALSE(c.alpha_init);
  EXPECT_FALSE(c.lambda_init);
  EXPECT_TRUE(c.standardize_inputs);
}

TEST(BayesianRidgeFit, FirstIterationUsesInverseTargetVariance) {
  std::mt19937_64 gen(8);
  const auto in = random_instance(gen, 40, 3, 1.0);
  double first_alpha = 0, first_lambda = 0;
  fit(in.X, in.y, {}, [&](const BRRIterate& it) {
    if (it.iteration == 0) {
      first_alpha = it.alpha;
      first_lambda = it.lambda;
    }
  });
  const double var = (in.y.array() - in.y.mean()).square().mean();
  EXPECT_DOUBLE_EQ(first_alpha, 1.0 / var);
  EXPECT_EQ(first_lambda, 1.0);
  const Eigen::MatrixXd X = Eigen::MatrixXd::Random(5, 2);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(5, 0.3);
  fit(X, y, {}, [&](const BRRIterate& it) {
    if (it.iteration == 0) first_alpha = it.alpha;
  });
  EXPECT_EQ(first_alpha, 1.0);
}

TEST(BayesianRidgeFit, InputErrors) {
  const Eigen::MatrixXd X1 = Eigen::MatrixXd::Ones(1, 2);
  EXPECT_THROW(fit(X1, Eigen::VectorXd::Ones(1)), InvalidArgument);
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(4, 2);
  EXPECT_THROW(fit(X, Eigen::VectorXd::Ones(3)), InvalidArgument);
  X(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(fit(X, Eigen::VectorXd::Ones(4)), InvalidArgument);
  Eigen::VectorXd y = Eigen::VectorXd::Ones(4);
  y(2) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(fit(Eigen::MatrixXd::Random(4, 2), y), InvalidArgument);
  BRRConfig bad;
  bad.max_iter = 0;
  EXPECT_THROW(fit(Eigen::MatrixXd::Random(4, 2), Eigen::VectorXd::Random(4), bad), InvalidArgument);
}

TEST(BayesianRidgeFit, ZeroVarianceColumnGetsZeroWeight) {
  std::mt19937_64 gen(3);
  auto in = random_instance(gen, 50, 4, 0.2);
  in.X.col(2).setConstant(7.0);
  const auto m = fit(in.X, in.y);
  EXPECT_EQ(m.x_scales(2), 1.0);
  EXPECT_EQ(m.w_mean(2), 0.0);
  EXPECT_TRUE(m.w_mean.allFinite());
}

TEST(BayesianRidgeFit, NoFeaturesFitsInterceptOnly) {
  const Eigen::MatrixXd X(6, 0);
  const Eigen::VectorXd y = (Eigen::VectorXd(6) << 1, 2, 3, 4, 5, 6).finished();
  const auto m = fit(X, y);
  EXPECT_DOUBLE_EQ(m.intercept, 3.5);
  const auto p = predict(m, Eigen::VectorXd(0));
  EXPECT_DOUBLE_EQ(p.mean, 3.5);
  EXPECT_DOUBLE_EQ(p.stddev, std::sqrt(1.0 / m.alpha));
}

TEST(BayesianRidgePredict, ZeroStandardizedInputGivesNoiseFloor) {
  std::mt19937_64 gen(5);
  const auto in = random_instance(gen, 80, 6, 0.5);
  const auto m = fit(in.X, in.y);
  const auto p = predict(m, Eigen::VectorXd(m.x_means));
  EXPECT_DOUBLE_EQ(p.mean, m.intercept);
  EXPECT_DOUBLE_EQ(p.stddev, std::sqrt(1.0 / m.alpha));
  EXPECT_THROW(predict(m, Eigen::VectorXd::Zero(5)), InvalidArgument);
}

TEST(BayesianRidgePredict, VarianceGrowsAlongCovarianceEigenvectors) {
  std::mt19937_64 gen(6);
  const auto in = random_instance(gen, 30, 4, 0.5);
  const auto m = fit(in.X, in.y);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.w_cov);
  for (Eigen::Index k = 0; k < 4; ++k) {
    double previous = 0.0;
    for (double step : {0.0, 0.5, 1.0, 2.0, 4.0}) {
      const Eigen::VectorXd xs = step * es.eigenvectors().col(k);
      const Eigen::VectorXd x = (xs.array() * m.x_scales.array()).matrix() + m.x_means;
      const double sd = predict(m, x).stddev;
      EXPECT_GE(sd, previous - 1e-12);
      EXPECT_GE(sd, std::sqrt(1.0 / m.alpha) - 1e-12);
      previous = sd;
    }
  }
}

TEST(LogMarginalLikelihood, RowPermutationInvariant) {
  std::mt19937_64 gen(10);
  const auto in = random_instance(gen, 40, 5, 0.4);
  std::vector<int> order(40);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), gen);
  Eigen::MatrixXd Xp(40, 5);
  Eigen::VectorXd yp(40);
  for (int i = 0; i < 40; ++i) {
    Xp.row(i) = in.X.row(order[i]);
    yp(i) = in.y(order[i]);
  }
  for (auto [a, l] : {std::pair{1.0, 1.0}, {3.5, 0.2}, {100.0, 10.0}})
    EXPECT_NEAR(log_marginal_likelihood(in.X, in.y, a, l), log_marginal_likelihood(Xp, yp, a, l), 1e-9);
}

TEST(LogMarginalLikelihood, NoFeaturesReducesToGaussianLikelihood) {
  const Eigen::MatrixXd X(4, 0);
  const Eigen::VectorXd y = (Eigen::VectorXd(4) << 0.5, -1.0, 2.0, 0.3).finished();
  const double alpha = 2.5;
  const Eigen::VectorXd yc = y.array() - y.mean();
  const double expected =
      0.5 * (4 * std::log(alpha) - alpha * yc.squaredNorm() - 4 * std::log(2 * std::numbers::pi));
  EXPECT_NEAR(log_marginal_likelihood(X, y, alpha, 1.0), expected, 1e-12);
}

TEST(LogMarginalLikelihood, MatchesDirectGaussianDensity) {
  // y_c ~ N(0, I/alpha + X X^T / lambda): evaluate the density directly.
  std::mt19937_64 gen(13);
  BRRConfig raw;
  raw.fit_intercept = false;
  raw.standardize_inputs = false;
  for (int trial = 0; trial < 10; ++trial) {
    const auto in = random_instance(gen, 12, 3 + trial % 3, 0.5);
    const double alpha = 0.5 + trial, lambda = 0.1 + 0.3 * trial;
    const Eigen::MatrixXd C = Eigen::MatrixXd::Identity(12, 12) / alpha + in.X * in.X.transpose() / lambda;
    const Eigen::LLT<Eigen::MatrixXd> llt(C);
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double quad = in.y.dot(llt.solve(in.y));
    const double direct = -0.5 * (quad + logdet + 12 * std::log(2 * std::numbers::pi));
    EXPECT_NEAR(log_marginal_likelihood(in.X, in.y, alpha, lambda, raw), direct, 1e-8);
  }
}

TEST(LogMarginalLikelihood, ConvergedHyperparametersBeatInitialOnes) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 gen(seed);
    const int d = 1 + static_cast<int>(seed % 20);
    const auto in = random_instance(gen, d + 10 + static_cast<int>(seed % 50), d, 0.5);
    const BRRConfig cfg;
    const auto m = fit(in.X, in.y, cfg);
    const double var = (in.y.array() - in.y.mean()).square().mean();
    EXPECT_GE(log_marginal_likelihood(in.X, in.y, m.alpha, m.lambda, cfg),
              log_marginal_likelihood(in.X, in.y, 1.0 / var, 1.0, cfg))
        << "seed " << seed;
    EXPECT_NEAR(m.log_evidence, log_marginal_likelihood(in.X, in.y, m.alpha, m.lambda, cfg), 1e-9);
    ++checked;
  }
  EXPECT_EQ(checked, 100);
}

TEST(RidgeClosedForm, ExactInterpolationAtZeroPenalty) {
  const Eigen::MatrixXd X = (Eigen::MatrixXd(3, 3) << 2, 1, 0, 1, 3, 1, 0, 1, 4).finished();
  const Eigen::VectorXd y = (Eigen::VectorXd(3) << 1, -2, 0.5).finished();
  EXPECT_LE((ridge_fit_closed_form(X, y, 0.0) - X.inverse() * y).norm(), 1e-12);
}

TEST(RidgeClosedForm, ShrinksMonotonically) {
  std::mt19937_64 gen(14);
  const auto in = random_instance(gen, 30, 6, 0.5);
  double previous = std::numeric_limits<double>::infinity();
  for (double k : {1.0, 10.0, 100.0, 1e6}) {
    const double norm = ridge_fit_closed_form(in.X, in.y, k).norm();
    EXPECT_LT(norm, previous);
    previous = norm;
  }
  EXPECT_LT(previous, 1e-3);
}

TEST(RidgeClosedForm, SingularSystemIsAnError) {
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(5, 3);
  X.col(2) = X.col(0);
  EXPECT_THROW(ridge_fit_closed_form(X, Eigen::VectorXd::Random(5), 0.0), InvalidArgument);
  EXPECT_NO_THROW(ridge_fit_closed_form(X, Eigen::VectorXd::Random(5), 0.1));
}

TEST(RidgeClosedForm, EqualsFrozenBayesianPosteriorMean) {
  std::mt19937_64 gen(15);
  for (int trial = 0; trial < 20; ++trial) {
    const auto in = random_instance(gen, 10 + trial * 5, 1 + trial, 0.5);
    const double k = 0.1 * (trial + 1);
    const Eigen::VectorXd ridge = ridge_fit_closed_form(in.X, in.y, k);
    const Eigen::VectorXd mu = fit(in.X, in.y, frozen(1.0, k)).w_mean;
    EXPECT_LE((mu - ridge).norm() / ridge.norm(), 1e-8);
    EXPECT_LE((oracle::normal_equations(in.X, in.y, k) - ridge).norm() / ridge.norm(), 1e-8);
  }
}

TEST(BayesianRidgeInvariants, GammaBoundedEveryIteration) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    std::mt19937_64 gen(seed);
    const int n = 5 + static_cast<int>(seed % 40), d = 1 + static_cast<int>(seed % 25);
    const auto in = random_instance(gen, n, d, 0.7);
    fit(in.X, in.y, {}, [&](const BRRIterate& it) {
      EXPECT_GE(it.gamma, 0.0);
      EXPECT_LE(it.gamma, std::min(n, d) + 1e-9);
    });
  }
}

TEST(BayesianRidgeInvariants, CovarianceSymmetricPsd) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    std::mt19937_64 gen(seed);
    const auto in = random_instance(gen, 8 + static_cast<int>(seed), 1 + static_cast<int>(seed % 12), 0.3);
    const auto m = fit(in.X, in.y);
    EXPECT_LE((m.w_cov - m.w_cov.transpose()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m.w_cov).eigenvalues().minCoeff(), -1e-9);
    EXPECT_GT(m.alpha, 0.0);
    EXPECT_GT(m.lambda, 0.0);
  }
}

TEST(BayesianRidgeInvariants, FixedPointAtTightTolerance) {
  // With a tight stopping rule the returned (alpha, lambda) reproduce
  // themselves under one more update.
  BRRConfig cfg;
  cfg.tol = 1e-12;
  cfg.max_iter = 10000;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 gen(seed);
    const int d = 1 + static_cast<int>(seed % 30);
    const auto in = random_instance(gen, d + 5 + static_cast<int>(seed % 100), d, 0.5);
    const auto m = fit(in.X, in.y, cfg);
    ASSERT_TRUE(m.converged);
    BRRConfig again = cfg;
    again.alpha_init = m.alpha;
    again.lambda_init = m.lambda;
    again.max_iter = 1;
    BRRIterate step{};
    fit(in.X, in.y, again, [&](const BRRIterate& it) { step = it; });
    EXPECT_LT(std::abs(step.next_alpha - m.alpha) / m.alpha, 1e-6);
    EXPECT_LT(std::abs(step.next_lambda - m.lambda) / m.lambda, 1e-6);
  }
}

TEST(BayesianRidgeInvariants, BitwiseDeterministic) {
  std::mt19937_64 gen(16);
  const auto in = random_instance(gen, 100, 12, 0.5);
  const auto a = fit(in.X, in.y), b = fit(in.X, in.y);
  EXPECT_EQ(serialize_model(a), serialize_model(b));
}

TEST(BayesianRidgeInvariants, ScalingTargetsScalesPredictions) {
  std::mt19937_64 gen(17);
  const auto in = random_instance(gen, 120, 6, 0.5);
  const auto base = fit(in.X, in.y);
  // The 1e-6 hyperpriors make the fit only approximately scale-equivariant.
  for (double c : {0.01, 3.0, 250.0}) {
    const auto scaled = fit(in.X, Eigen::VectorXd(c * in.y));
    std::vector<double> pa, pb;
    for (int i = 0; i < in.X.rows(); ++i) {
      const Eigen::VectorXd x = in.X.row(i).transpose();
      pa.push_back(predict(base, x).mean);
      pb.push_back(predict(scaled, x).mean);
      EXPECT_NEAR(pb.back(), c * pa.back(), 1e-4 * c * (1.0 + std::abs(pa.back())));
    }
    EXPECT_EQ(spearman(pa, pb), 1.0);
  }
}

TEST(ModelFile, ReloadReproducesPredictionsBitwise) {
  std::mt19937_64 gen(18);
  const auto in = random_instance(gen, 50, 7, 0.5);
  const auto m = fit(in.X, in.y);
  const auto back = deserialize_model(serialize_model(m));
  EXPECT_EQ(serialize_model(back), serialize_model(m));
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd x = in.X.row(i).transpose();
    const auto p = predict(m, x), q = predict(back, x);
    EXPECT_EQ(p.mean, q.mean);
    EXPECT_EQ(p.stddev, q.stddev);
  }
  EXPECT_THROW(deserialize_model("garbage"), DataError);
  EXPECT_THROW(deserialize_model("memorability-brr 1\nn_features 2\nalpha 1\n"), DataError);
}

}  // namespace
}  // namespace memorability
