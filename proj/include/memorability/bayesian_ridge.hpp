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

#pragma once

// Bayesian ridge regression with evidence maximization.
//
// Model:  y = X w + b + e,  e ~ N(0, 1/alpha),  w ~ N(0, I/lambda),
// with Gamma(a1, a2) and Gamma(l1, l2) hyperpriors on alpha and lambda.
// Hyperparameters follow the MacKay fixed-point updates
//
//   gamma  = sum_i alpha s_i / (lambda + alpha s_i)       (s_i: eig(X^T X))
//   lambda = (gamma + 2 l1) / (mu^T mu + 2 l2)
//   alpha  = (N - gamma + 2 a1) / (|y - X mu|^2 + 2 a2)
//
// iterated until the L1 change in the posterior mean mu drops below tol.
// X^T X is eigendecomposed once per fit; every iteration reuses it.

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "memorability/csv.hpp"
#include "memorability/error.hpp"

namespace memorability {

struct BRRConfig {
  std::size_t max_iter = 300;
  double tol = 1e-3;
  // Gamma hyperprior shape/rate parameters.
  double alpha_1 = 1e-6;
  double alpha_2 = 1e-6;
  double lambda_1 = 1e-6;
  double lambda_2 = 1e-6;
  /// Initial noise precision; 1/Var(y) when unset (1.0 if Var(y) == 0).
  std::optional<double> alpha_init;
  /// Initial weight precision; 1.0 when unset.
  std::optional<double> lambda_init;
  /// When false, alpha and lambda stay at their initial values.
  bool update_hyperparameters = true;
  bool fit_intercept = true;
  /// Scale each input column to unit (population) standard deviation.
  bool standardize_inputs = true;

  void validate() const {
    if (max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
    if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
    for (double v : {alpha_1, alpha_2, lambda_1, lambda_2})
      if (!(v > 0.0)) throw InvalidArgument("hyperprior parameters must be positive");
    if (alpha_init && !(*alpha_init > 0.0)) throw InvalidArgument("alpha_init must be positive");
    if (lambda_init && !(*lambda_init > 0.0)) throw InvalidArgument("lambda_init must be positive");
  }
};

struct BRRModel {
  Eigen::VectorXd w_mean;
  Eigen::MatrixXd w_cov;
  double alpha = 1.0;
  double lambda = 1.0;
  double intercept = 0.0;
  Eigen::VectorXd x_means;
  Eigen::VectorXd x_scales;
  double log_evidence = 0.0;
  std::size_t iterations = 0;
  bool converged = false;  // true when stopped by tol rather than max_iter

  Eigen::Index n_features() const { return w_mean.size(); }
};

struct Prediction {
  double mean = 0.0;
  double stddev = 0.0;
};

/// State after each evidence iteration, before the hyperparameter update
/// is applied to the next one.
struct BRRIterate {
  std::size_t iteration;
  double alpha;         // used to compute mu
  double lambda;        // used to compute mu
  double gamma;         // effective number of parameters
  double next_alpha;
  double next_lambda;
  double coef_change;   // L1 change in mu vs. previous iteration (inf on the first)
};

namespace brr_detail {

inline void check_inputs(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size())
    throw InvalidArgument("X has " + std::to_string(X.rows()) + " rows but y has " + std::to_string(y.size()));
  if (X.rows() < 2) throw InvalidArgument("Bayesian ridge needs at least two samples");
  if (!X.allFinite()) throw InvalidArgument("X contains non-finite values");
  if (!y.allFinite()) throw InvalidArgument("y contains non-finite values");
}

/// Centered/scaled design plus the statistics used to produce it.
struct Prepared {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::VectorXd x_means;
  Eigen::VectorXd x_scales;
  double y_mean = 0.0;
};

inline Prepared prepare(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const BRRConfig& cfg) {
  const Eigen::Index n = X.rows(), d = X.cols();
  Prepared p;
  Eigen::VectorXd col_means = Eigen::VectorXd::Zero(d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) col_means(j) += X(i, j);
  col_means /= static_cast<double>(n);
  p.x_means = cfg.fit_intercept ? col_means : Eigen::VectorXd::Zero(d);
  p.x_scales = Eigen::VectorXd::Ones(d);
  if (cfg.standardize_inputs) {
    Eigen::VectorXd ss = Eigen::VectorXd::Zero(d);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < d; ++j) ss(j) += (X(i, j) - col_means(j)) * (X(i, j) - col_means(j));
    for (Eigen::Index j = 0; j < d; ++j) {
      const double sd = std::sqrt(ss(j) / static_cast<double>(n));
      p.x_scales(j) = sd > 0.0 ? sd : 1.0;  // constant column: becomes all zeros
    }
  }
  p.X.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) p.X(i, j) = (X(i, j) - p.x_means(j)) / p.x_scales(j);
  if (cfg.fit_intercept) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += y(i);
    p.y_mean = s / static_cast<double>(n);
  }
  p.y = y.array() - p.y_mean;
  return p;
}

/// Eigendecomposition of X^T X and the projected X^T y.
struct Spectrum {
  Eigen::VectorXd eigenvalues;   // clamped to >= 0
  Eigen::MatrixXd eigenvectors;  // columns
  Eigen::VectorXd projected_xty;

  Spectrum(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const Eigen::Index d = X.cols();
    if (d == 0) {
      eigenvalues.resize(0);
      eigenvectors.resize(0, 0);
      projected_xty.resize(0);
      return;
    }
    const Eigen::MatrixXd gram = X.transpose() * X;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    if (es.info() != Eigen::Success) throw InvalidArgument("eigendecomposition of X^T X failed");
    eigenvalues = es.eigenvalues().cwiseMax(0.0);
    eigenvectors = es.eigenvectors();
    projected_xty = eigenvectors.transpose() * (X.transpose() * y);
  }

  Eigen::VectorXd coef(double alpha, double lambda) const {
    const Eigen::VectorXd scaled =
        (alpha * projected_xty.array() / (lambda + alpha * eigenvalues.array())).matrix();
    if (scaled.size() == 0) return scaled;
    return eigenvectors * scaled;
  }

  double gamma(double alpha, double lambda) const {
    double g = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
      const double as = alpha * eigenvalues(i);
      g += as / (lambda + as);
    }
    return g;
  }

  double log_det(double alpha, double lambda) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) s += std::log(lambda + alpha * eigenvalues(i));
    return s;
  }

  Eigen::MatrixXd covariance(double alpha, double lambda) const {
    if (eigenvalues.size() == 0) return Eigen::MatrixXd(0, 0);
    const Eigen::VectorXd inv = (lambda + alpha * eigenvalues.array()).inverse().matrix();
    Eigen::MatrixXd cov = eigenvectors * inv.asDiagonal() * eigenvectors.transpose();
    return 0.5 * (cov + cov.transpose());
  }
};

inline double squared_residual(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
  if (w.size() == 0) return y.squaredNorm();
  return (y - X * w).squaredNorm();
}

inline double evidence(const Spectrum& sp, const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double alpha,
                       double lambda) {
  const Eigen::VectorXd mu = sp.coef(alpha, lambda);
  const auto n = static_cast<double>(X.rows());
  const auto d = static_cast<double>(X.cols());
  const double rss = squared_residual(X, y, mu);
  return 0.5 * (d * std::log(lambda) + n * std::log(alpha) - alpha * rss - lambda * mu.squaredNorm() -
                sp.log_det(alpha, lambda) - n * std::log(2.0 * std::numbers::pi));
}

inline double initial_alpha(const Eigen::VectorXd& y, const BRRConfig& cfg) {
  if (cfg.alpha_init) return *cfg.alpha_init;
  const double m = y.mean();
  const double var = (y.array() - m).square().mean();
  return var > 0.0 ? 1.0 / var : 1.0;
}

}  // namespace brr_detail

/// Fits the model. `observer`, when set, sees every evidence iteration.
inline BRRModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const BRRConfig& cfg = {},
                    const std::function<void(const BRRIterate&)>& observer = {}) {
  cfg.validate();
  brr_detail::check_inputs(X, y);
  const auto prep = brr_detail::prepare(X, y, cfg);
  const brr_detail::Spectrum sp(prep.X, prep.y);
  const auto n = static_cast<double>(X.rows());

  double alpha = brr_detail::initial_alpha(y, cfg);
  double lambda = cfg.lambda_init.value_or(1.0);

  BRRModel model;
  if (cfg.update_hyperparameters) {
    Eigen::VectorXd previous;
    std::size_t iter = 0;
    for (; iter < cfg.max_iter; ++iter) {
      const Eigen::VectorXd mu = sp.coef(alpha, lambda);
      const double rss = brr_detail::squared_residual(prep.X, prep.y, mu);
      const double gamma = sp.gamma(alpha, lambda);
      const double next_lambda = (gamma + 2.0 * cfg.lambda_1) / (mu.squaredNorm() + 2.0 * cfg.lambda_2);
      const double next_alpha = (n - gamma + 2.0 * cfg.alpha_1) / (rss + 2.0 * cfg.alpha_2);
      const double change =
          iter == 0 ? std::numeric_limits<double>::infinity() : (previous - mu).lpNorm<1>();
      if (observer) observer({iter, alpha, lambda, gamma, next_alpha, next_lambda, change});
      alpha = next_alpha;
      lambda = next_lambda;
      if (iter != 0 && change < cfg.tol) {
        model.converged = true;
        break;
      }
      previous = mu;
    }
    model.iterations = model.converged ? iter + 1 : cfg.max_iter;
  }

  model.alpha = alpha;
  model.lambda = lambda;
  model.w_mean = sp.coef(alpha, lambda);
  model.w_cov = sp.covariance(alpha, lambda);
  model.x_means = prep.x_means;
  model.x_scales = prep.x_scales;
  model.intercept = prep.y_mean;
  model.log_evidence = brr_detail::evidence(sp, prep.X, prep.y, alpha, lambda);
  return model;
}

/// Log evidence of (X, y) at fixed (alpha, lambda), with the same input
/// preprocessing `fit` applies under `cfg`:
///   1/2 [D ln lambda + N ln alpha - alpha |y_c - X mu|^2 - lambda mu^T mu
///        - ln det(lambda I + alpha X^T X) - N ln 2 pi]
inline double log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double alpha, double lambda,
                                      const BRRConfig& cfg = {}) {
  brr_detail::check_inputs(X, y);
  if (!(alpha > 0.0) || !(lambda > 0.0)) throw InvalidArgument("alpha and lambda must be positive");
  const auto prep = brr_detail::prepare(X, y, cfg);
  const brr_detail::Spectrum sp(prep.X, prep.y);
  return brr_detail::evidence(sp, prep.X, prep.y, alpha, lambda);
}

inline Eigen::VectorXd standardize_row(const BRRModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.n_features())
    throw InvalidArgument("feature vector has length " + std::to_string(x.size()) + ", model expects " +
                          std::to_string(model.n_features()));
  return ((x - model.x_means).array() / model.x_scales.array()).matrix();
}

/// Predictive mean and standard deviation; variance = 1/alpha + x~^T Sigma x~.
inline Prediction predict(const BRRModel& model, const Eigen::VectorXd& x) {
  const Eigen::VectorXd xs = standardize_row(model, x);
  Prediction p;
  p.mean = model.intercept + (xs.size() ? model.w_mean.dot(xs) : 0.0);
  const double quad = xs.size() ? std::max(0.0, xs.dot(model.w_cov * xs)) : 0.0;
  p.stddev = std::sqrt(1.0 / model.alpha + quad);
  return p;
}

inline std::vector<Prediction> predict_batch(const BRRModel& model, const Eigen::MatrixXd& X) {
  std::vector<Prediction> out;
  out.reserve(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) out.push_back(predict(model, Eigen::VectorXd(X.row(i).transpose())));
  return out;
}

/// (X^T X + k I)^{-1} X^T y via LU with full pivoting. Throws when the
/// system is singular.
inline Eigen::VectorXd ridge_fit_closed_form(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double k) {
  if (X.rows() != y.size()) throw InvalidArgument("X and y disagree on the number of samples");
  if (!(k >= 0.0)) throw InvalidArgument("ridge penalty must be nonnegative");
  const Eigen::Index d = X.cols();
  if (d == 0) return Eigen::VectorXd(0);
  Eigen::MatrixXd a = X.transpose() * X;
  a.diagonal().array() += k;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw InvalidArgument("ridge system X^T X + kI is singular");
  return lu.solve(X.transpose() * y);
}

// Plain-text model file. Floats use 17 significant digits so a reload
// reproduces predictions bit for bit.
//
//   memorability-brr 1
//   n_features <D>
//   alpha / lambda / intercept / log_evidence <value>
//   iterations <n>
//   converged <0|1>
//   x_means <D values>
//   x_scales <D values>
//   w_mean <D values>
//   w_cov <D*D values, row-major>

inline std::string serialize_model(const BRRModel& m) {
  std::string out = "memorability-brr 1\n";
  auto scalar = [&](const char* key, double v) { out += std::string(key) + " " + csv::significant(v, 17) + "\n"; };
  auto vec = [&](const char* key, const auto& v) {
    out += key;
    for (Eigen::Index i = 0; i < v.size(); ++i) out += " " + csv::significant(v(i), 17);
    out += "\n";
  };
  out += "n_features " + std::to_string(m.n_features()) + "\n";
  scalar("alpha", m.alpha);
  scalar("lambda", m.lambda);
  scalar("intercept", m.intercept);
  scalar("log_evidence", m.log_evidence);
  out += "iterations " + std::to_string(m.iterations) + "\n";
  out += std::string("converged ") + (m.converged ? "1" : "0") + "\n";
  vec("x_means", m.x_means);
  vec("x_scales", m.x_scales);
  vec("w_mean", m.w_mean);
  out += "w_cov";
  for (Eigen::Index i = 0; i < m.w_cov.rows(); ++i)
    for (Eigen::Index j = 0; j < m.w_cov.cols(); ++j) out += " " + csv::significant(m.w_cov(i, j), 17);
  out += "\n";
  return out;
}

inline BRRModel deserialize_model(const std::string& text) {
  std::istringstream in(text);
  std::string magic, key;
  int version = 0;
  if (!(in >> magic >> version) || magic != "memorability-brr" || version != 1)
    throw DataError("not a memorability-brr version 1 model file");
  auto number = [&](const std::string& want) {
    std::string tok;
    if (!(in >> key) || key != want || !(in >> tok)) throw DataError("model file: expected '" + want + "'");
    auto v = csv::parse_double(tok);
    if (!v) throw DataError("model file: bad value for '" + want + "'");
    return *v;
  };
  auto values = [&](const std::string& want, Eigen::Index count) {
    if (!(in >> key) || key != want) throw DataError("model file: expected '" + want + "'");
    Eigen::VectorXd v(count);
    for (Eigen::Index i = 0; i < count; ++i) {
      std::string tok;
      if (!(in >> tok)) throw DataError("model file: '" + want + "' is truncated");
      auto d = csv::parse_double(tok);
      if (!d) throw DataError("model file: bad value in '" + want + "'");
      v(i) = *d;
    }
    return v;
  };
  BRRModel m;
  const double d_raw = number("n_features");
  if (d_raw < 0 || d_raw != std::floor(d_raw)) throw DataError("model file: bad n_features");
  const auto d = static_cast<Eigen::Index>(d_raw);
  m.alpha = number("alpha");
  m.lambda = number("lambda");
  m.intercept = number("intercept");
  m.log_evidence = number("log_evidence");
  m.iterations = static_cast<std::size_t>(number("iterations"));
  m.converged = number("converged") != 0.0;
  m.x_means = values("x_means", d);
  m.x_scales = values("x_scales", d);
  m.w_mean = values("w_mean", d);
  const Eigen::VectorXd flat = values("w_cov", d * d);
  m.w_cov.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m.w_cov(i, j) = flat(i * d + j);
  if (!(m.alpha > 0.0) || !(m.lambda > 0.0)) throw DataError("model file: alpha and lambda must be positive");
  return m;
}

inline void save_model(const BRRModel& m, const std::string& path) { csv::write_file(path, serialize_model(m)); }
inline BRRModel load_model(const std::string& path) { return deserialize_model(csv::read_file(path)); }

}  // namespace memorability
