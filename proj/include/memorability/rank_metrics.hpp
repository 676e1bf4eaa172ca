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

// Correlation scores used to grade memorability predictions: Pearson's r and
// Spearman's r_s computed as Pearson over fractional (average) ranks.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "memorability/error.hpp"

namespace memorability {

/// 1-based fractional ranks; ties share the mean of the positions they span.
inline std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // positions i+1 .. j share their mean
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

namespace detail {

inline void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw InvalidArgument("correlation inputs differ in length (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  if (a.size() < 2) throw InvalidArgument("correlation needs at least two paired values");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!std::isfinite(a[i]) || !std::isfinite(b[i]))
      throw InvalidArgument("correlation input contains a non-finite value at index " + std::to_string(i));
}

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace detail

/// Sample Pearson correlation. Throws InvalidArgument ("undefined
/// correlation") when either side is constant.
inline double pearson(std::span<const double> predicted, std::span<const double> actual) {
  detail::check_pair(predicted, actual);
  const double mp = detail::mean(predicted);
  const double ma = detail::mean(actual);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double dx = predicted[i] - mp;
    const double dy = actual[i] - ma;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw InvalidArgument("undefined correlation: constant input vector");
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

inline double spearman(std::span<const double> predicted, std::span<const double> actual) {
  detail::check_pair(predicted, actual);
  const auto rp = average_ranks(predicted);
  const auto ra = average_ranks(actual);
  try {
    return pearson(rp, ra);
  } catch (const InvalidArgument&) {
    throw InvalidArgument("undefined correlation: constant rank vector");
  }
}

/// Paired prediction/ground-truth vectors for one evaluation.
struct ScorePair {
  std::vector<double> predicted;
  std::vector<double> actual;
};

inline double pearson(const ScorePair& pair) { return pearson(pair.predicted, pair.actual); }
inline double spearman(const ScorePair& pair) { return spearman(pair.predicted, pair.actual); }

}  // namespace memorability
