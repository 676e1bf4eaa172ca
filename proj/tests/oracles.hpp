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

// Test-only reference implementations. None of these share code with the
// library; they are deliberately naive.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace memorability::oracle {

/// Rank of v[i] = (#values below) + (#equal values + 1) / 2, by counting.
inline std::vector<double> brute_force_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double below = 0, equal = 0;
    for (double x : v) {
      if (x < v[i]) below += 1;
      else if (x == v[i]) equal += 1;
    }
    r[i] = below + (equal + 1) / 2;
  }
  return r;
}

inline double pearson_long_double(const std::vector<double>& a, const std::vector<double>& b) {
  long double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  long double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return static_cast<double>(sab / std::sqrt(saa * sbb));
}

/// 1 - 6 sum d^2 / (n (n^2 - 1)) for tie-free inputs, evaluated as one
/// correctly rounded division of two exact integers.
inline double classic_spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = brute_force_ranks(a), rb = brute_force_ranks(b);
  std::int64_t d2 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto d = static_cast<std::int64_t>(ra[i] - rb[i]);
    d2 += d * d;
  }
  const auto n = static_cast<std::int64_t>(a.size());
  const std::int64_t denom = n * (n * n - 1);
  return static_cast<double>(denom - 6 * d2) / static_cast<double>(denom);
}

/// Straightforward MFCC: direct O(N^2) DFT in long double, Hz-to-mel per
/// bin, triangle weights, floor-log, DCT-II by the defining sum. Parameters
/// mirror the library defaults but are restated here.
struct ReferenceMfccParams {
  int sample_rate = 16000;
  int win = 400;
  int hop = 160;
  int nfft = 512;
  int n_mels = 64;
  double fmin = 125.0;
  double fmax = 7500.0;
  int n_ceps = 13;
  double floor = 1e-10;
};

inline std::vector<std::vector<double>> reference_log_mel(const std::vector<double>& x, const ReferenceMfccParams& p) {
  auto mel = [](long double f) { return 2595.0L * std::log10(1.0L + f / 700.0L); };
  const long double lo = mel(p.fmin), hi = mel(p.fmax);
  std::vector<long double> pts(p.n_mels + 2);
  for (int i = 0; i < p.n_mels + 2; ++i) pts[i] = lo + (hi - lo) * i / (p.n_mels + 1);
  const long double pi = std::numbers::pi_v<long double>;
  const int frames = (static_cast<int>(x.size()) - p.win) / p.hop + 1;
  // Direct DFT; twiddles indexed by (k * n) mod nfft.
  std::vector<long double> cos_table(p.nfft), sin_table(p.nfft), window(p.win);
  for (int i = 0; i < p.nfft; ++i) {
    cos_table[i] = std::cos(2 * pi * i / p.nfft);
    sin_table[i] = std::sin(2 * pi * i / p.nfft);
  }
  for (int n = 0; n < p.win; ++n) window[n] = 0.5L - 0.5L * std::cos(2 * pi * n / p.win);
  std::vector<std::vector<double>> out;
  for (int t = 0; t < frames; ++t) {
    std::vector<long double> power(p.nfft / 2 + 1);
    for (int k = 0; k <= p.nfft / 2; ++k) {
      long double re = 0, im = 0;
      for (int n = 0; n < p.win; ++n) {
        const long double s = x[t * p.hop + n] * window[n];
        re += s * cos_table[(k * n) % p.nfft];
        im -= s * sin_table[(k * n) % p.nfft];
      }
      power[k] = re * re + im * im;
    }
    std::vector<double> row(p.n_mels);
    for (int m = 0; m < p.n_mels; ++m) {
      long double e = 0;
      for (int k = 0; k <= p.nfft / 2; ++k) {
        const long double f = mel(static_cast<long double>(k) * p.sample_rate / p.nfft);
        long double w = 0;
        if (f > pts[m] && f <= pts[m + 1]) w = (f - pts[m]) / (pts[m + 1] - pts[m]);
        else if (f > pts[m + 1] && f < pts[m + 2]) w = (pts[m + 2] - f) / (pts[m + 2] - pts[m + 1]);
        e += w * power[k];
      }
      row[m] = static_cast<double>(std::log(std::max<long double>(e, p.floor)));
    }
    out.push_back(row);
  }
  return out;
}

inline std::vector<std::vector<double>> reference_mfcc(const std::vector<double>& x, const ReferenceMfccParams& p = {}) {
  const auto logmel = reference_log_mel(x, p);
  const long double pi = std::numbers::pi_v<long double>;
  std::vector<std::vector<double>> out;
  for (const auto& row : logmel) {
    std::vector<double> c(p.n_ceps);
    for (int k = 0; k < p.n_ceps; ++k) {
      long double s = 0;
      for (int n = 0; n < p.n_mels; ++n) s += row[n] * std::cos(pi * k * (2 * n + 1) / (2.0L * p.n_mels));
      c[k] = static_cast<double>(s * std::sqrt((k == 0 ? 1.0L : 2.0L) / p.n_mels));
    }
    out.push_back(c);
  }
  return out;
}

/// Posterior mean by solving the normal equations with Cholesky (LLT),
/// independent of the eigendecomposition route.
inline Eigen::VectorXd normal_equations(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double k) {
  Eigen::MatrixXd a = X.transpose() * X;
  a.diagonal().array() += k;
  return a.llt().solve(X.transpose() * y);
}

}  // namespace memorability::oracle
