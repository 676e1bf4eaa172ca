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

// MFCC extraction, delta regression and the three-channel (static, delta,
// delta-delta) coefficient stack, plus PCM-16 WAV decoding.
//
// Per frame: Hann window -> |FFT|^2 -> triangular mel filterbank (HTK mel
// scale) -> natural log with floor -> orthonormal DCT-II -> first n_coeffs.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "memorability/csv.hpp"
#include "memorability/error.hpp"

namespace memorability::audio {

struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 16000;
};

struct MfccParams {
  int sample_rate = 16000;
  std::size_t win_len = 400;  // 25 ms
  std::size_t hop_len = 160;  // 10 ms
  std::size_t n_fft = 512;
  std::size_t n_mels = 64;
  double f_min = 125.0;
  double f_max = 7500.0;
  std::size_t n_coeffs = 13;
  double log_floor = 1e-10;
  std::size_t delta_window = 2;
};

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Periodic Hann window of length n.
inline std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  return w;
}

/// In-place iterative radix-2 FFT; size must be a power of two.
inline void fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw InvalidArgument("FFT size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> w(std::cos(ang * static_cast<double>(k)), std::sin(ang * static_cast<double>(k)));
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

/// Triangular filters with edges equally spaced on the mel scale between
/// f_min and f_max; weights are evaluated in the mel domain at each FFT
/// bin's centre frequency. Shape n_mels x (n_fft/2 + 1).
inline Eigen::MatrixXd mel_filterbank(const MfccParams& p) {
  const std::size_t n_bins = p.n_fft / 2 + 1;
  const double mel_lo = hz_to_mel(p.f_min);
  const double mel_hi = hz_to_mel(p.f_max);
  std::vector<double> edges(p.n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / static_cast<double>(p.n_mels + 1);
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p.n_mels), static_cast<Eigen::Index>(n_bins));
  for (std::size_t k = 0; k < n_bins; ++k) {
    const double mel = hz_to_mel(static_cast<double>(k) * p.sample_rate / static_cast<double>(p.n_fft));
    for (std::size_t m = 0; m < p.n_mels; ++m) {
      const double left = edges[m], centre = edges[m + 1], right = edges[m + 2];
      double w = 0.0;
      if (mel > left && mel <= centre) w = (mel - left) / (centre - left);
      else if (mel > centre && mel < right) w = (right - mel) / (right - centre);
      fb(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) = w;
    }
  }
  return fb;
}

/// Centre frequency (Hz) of each mel filter.
inline std::vector<double> mel_centre_frequencies(const MfccParams& p) {
  const double mel_lo = hz_to_mel(p.f_min);
  const double mel_hi = hz_to_mel(p.f_max);
  std::vector<double> out(p.n_mels);
  for (std::size_t m = 0; m < p.n_mels; ++m)
    out[m] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(m + 1) / static_cast<double>(p.n_mels + 1));
  return out;
}

/// Orthonormal DCT-II basis, n_out x n_in (rows are basis vectors).
inline Eigen::MatrixXd dct_matrix(std::size_t n_out, std::size_t n_in) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n_out), static_cast<Eigen::Index>(n_in));
  const double n = static_cast<double>(n_in);
  for (std::size_t k = 0; k < n_out; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (std::size_t i = 0; i < n_in; ++i)
      m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
          scale * std::cos(std::numbers::pi * static_cast<double>(k) * (2.0 * static_cast<double>(i) + 1.0) / (2.0 * n));
  }
  return m;
}

inline std::size_t frame_count(std::size_t n_samples, const MfccParams& p) {
  if (n_samples < p.win_len) return 0;
  return (n_samples - p.win_len) / p.hop_len + 1;
}

namespace detail {

inline void check_clip(const AudioClip& clip, const MfccParams& p) {
  if (p.win_len == 0 || p.hop_len == 0 || p.n_fft < p.win_len || p.n_mels == 0 || p.n_coeffs == 0 ||
      p.n_coeffs > p.n_mels)
    throw InvalidArgument("inconsistent MFCC parameters");
  if (clip.sample_rate != p.sample_rate)
    throw InvalidArgument("clip sample rate " + std::to_string(clip.sample_rate) + " Hz does not match " +
                          std::to_string(p.sample_rate) + " Hz");
  if (clip.samples.size() < p.win_len)
    throw InvalidArgument("clip has " + std::to_string(clip.samples.size()) +
                          " samples, shorter than one analysis window (" + std::to_string(p.win_len) + ")");
  for (double s : clip.samples)
    if (!std::isfinite(s)) throw InvalidArgument("clip contains a non-finite sample");
}

}  // namespace detail

/// Pre-log mel filterbank energies, T x n_mels.
inline Eigen::MatrixXd mel_energies(const AudioClip& clip, const MfccParams& p = {}) {
  detail::check_clip(clip, p);
  const std::size_t frames = frame_count(clip.samples.size(), p);
  const auto window = hann_window(p.win_len);
  const Eigen::MatrixXd fb = mel_filterbank(p);
  const std::size_t n_bins = p.n_fft / 2 + 1;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(frames), static_cast<Eigen::Index>(p.n_mels));
  std::vector<std::complex<double>> buf(p.n_fft);
  Eigen::VectorXd power(static_cast<Eigen::Index>(n_bins));
  for (std::size_t t = 0; t < frames; ++t) {
    std::fill(buf.begin(), buf.end(), std::complex<double>{});
    const double* frame = clip.samples.data() + t * p.hop_len;
    for (std::size_t i = 0; i < p.win_len; ++i) buf[i] = frame[i] * window[i];
    fft(buf);
    for (std::size_t k = 0; k < n_bins; ++k) power(static_cast<Eigen::Index>(k)) = std::norm(buf[k]);
    out.row(static_cast<Eigen::Index>(t)) = (fb * power).transpose();
  }
  return out;
}

/// MFCC matrix, T x n_coeffs, with T = floor((N - win_len) / hop_len) + 1.
inline Eigen::MatrixXd compute_mfcc(const AudioClip& clip, const MfccParams& p = {}) {
  Eigen::MatrixXd log_mel = mel_energies(clip, p);
  log_mel = log_mel.unaryExpr([&](double e) { return std::log(std::max(e, p.log_floor)); });
  const Eigen::MatrixXd dct = dct_matrix(p.n_coeffs, p.n_mels);
  return log_mel * dct.transpose();
}

/// Delta regression over time (rows) with window N and edge-clamped
/// neighbours:  d_t = sum_k k (c_{t+k} - c_{t-k}) / (2 sum_k k^2).
inline Eigen::MatrixXd delta(const Eigen::MatrixXd& m, std::size_t window) {
  if (window == 0) throw InvalidArgument("delta window must be positive");
  const Eigen::Index rows = m.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, m.cols());
  if (rows == 0) return out;
  double denom = 0.0;
  for (std::size_t k = 1; k <= window; ++k) denom += static_cast<double>(k * k);
  denom *= 2.0;
  for (Eigen::Index t = 0; t < rows; ++t) {
    for (std::size_t k = 1; k <= window; ++k) {
      const auto ki = static_cast<Eigen::Index>(k);
      const Eigen::Index fwd = std::min(t + ki, rows - 1);
      const Eigen::Index back = std::max(t - ki, Eigen::Index{0});
      out.row(t) += static_cast<double>(k) * (m.row(fwd) - m.row(back));
    }
    out.row(t) /= denom;
  }
  return out;
}

/// Static, delta and delta-delta channels, each T x n_coeffs.
struct MfccStack {
  std::array<Eigen::MatrixXd, 3> channels;

  Eigen::Index frames() const { return channels[0].rows(); }
  Eigen::Index n_coeffs() const { return channels[0].cols(); }
};

inline MfccStack stack_mfcc_channels(const Eigen::MatrixXd& mfcc, std::size_t window = 2) {
  MfccStack s;
  s.channels[0] = mfcc;
  s.channels[1] = delta(mfcc, window);
  s.channels[2] = delta(s.channels[1], window);
  return s;
}

/// Per-channel min-max scaling to [0,1] for image export; a constant
/// channel maps to all zeros.
inline MfccStack scale_channels_unit(const MfccStack& in) {
  MfccStack out = in;
  for (auto& ch : out.channels) {
    if (ch.size() == 0) continue;
    const double lo = ch.minCoeff(), hi = ch.maxCoeff();
    if (hi > lo) ch = (ch.array() - lo) / (hi - lo);
    else ch.setZero();
  }
  return out;
}

/// Flattens in (frame, coefficient, channel) order, channel fastest; the
/// same order as the .tns dump. Length 3 * T * n_coeffs.
inline std::vector<double> flatten(const MfccStack& s) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(3 * s.frames() * s.n_coeffs()));
  for (Eigen::Index t = 0; t < s.frames(); ++t)
    for (Eigen::Index c = 0; c < s.n_coeffs(); ++c)
      for (const auto& ch : s.channels) out.push_back(ch(t, c));
  return out;
}

/// Text tensor dump: a header line "T n_coeffs 3", then one line per frame
/// holding n_coeffs*3 values in flatten() order, each as %.17g.
inline std::string render_tns(const MfccStack& s) {
  std::string out = std::to_string(s.frames()) + " " + std::to_string(s.n_coeffs()) + " 3\n";
  for (Eigen::Index t = 0; t < s.frames(); ++t) {
    bool first = true;
    for (Eigen::Index c = 0; c < s.n_coeffs(); ++c)
      for (const auto& ch : s.channels) {
        if (!first) out.push_back(' ');
        first = false;
        out += csv::significant(ch(t, c), 17);
      }
    out.push_back('\n');
  }
  return out;
}

inline MfccStack parse_tns(const std::string& text) {
  std::istringstream in(text);
  long long frames = 0, coeffs = 0, channels = 0;
  if (!(in >> frames >> coeffs >> channels) || frames < 0 || coeffs < 0 || channels != 3)
    throw DataError("malformed .tns header (expected 'T n_coeffs 3')");
  MfccStack s;
  for (auto& ch : s.channels) ch.resize(frames, coeffs);
  for (long long t = 0; t < frames; ++t)
    for (long long c = 0; c < coeffs; ++c)
      for (auto& ch : s.channels) {
        std::string tok;
        if (!(in >> tok)) throw DataError(".tns body is truncated");
        auto v = csv::parse_double(tok);
        if (!v) throw DataError(".tns value '" + tok + "' is not a number");
        ch(t, c) = *v;
      }
  return s;
}

/// Linear-interpolation resampling.
inline AudioClip resample_linear(const AudioClip& in, int target_rate) {
  if (in.sample_rate == target_rate || in.samples.empty()) {
    AudioClip out = in;
    out.sample_rate = target_rate;
    return out;
  }
  const double ratio = static_cast<double>(target_rate) / in.sample_rate;
  const std::size_t n_in = in.samples.size();
  const auto n_out = static_cast<std::size_t>(std::floor(static_cast<double>(n_in - 1) * ratio)) + 1;
  AudioClip out;
  out.sample_rate = target_rate;
  out.samples.resize(n_out);
  for (std::size_t i = 0; i < n_out; ++i) {
    const double pos = static_cast<double>(i) / ratio;
    const auto j = std::min(static_cast<std::size_t>(pos), n_in - 1);
    const double frac = pos - static_cast<double>(j);
    const double next = j + 1 < n_in ? in.samples[j + 1] : in.samples[j];
    out.samples[i] = in.samples[j] + frac * (next - in.samples[j]);
  }
  return out;
}

namespace detail {

inline std::uint32_t le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}
inline std::uint16_t le16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

}  // namespace detail

/// Decodes RIFF/WAVE PCM-16 (mono or stereo). Stereo is averaged to mono,
/// samples are scaled by 1/32768, and other rates are resampled to
/// `target_rate` by linear interpolation.
inline AudioClip decode_wav(std::span<const std::uint8_t> bytes, int target_rate = 16000) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw DataError("not a RIFF/WAVE file");
  std::size_t pos = 12;
  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0;
  std::uint32_t rate = 0;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = detail::le32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) throw DataError("WAV chunk runs past end of file");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw DataError("WAV fmt chunk too short");
      const std::uint8_t* f = bytes.data() + body;
      std::uint16_t format = detail::le16(f);
      channels = detail::le16(f + 2);
      rate = detail::le32(f + 4);
      bits = detail::le16(f + 14);
      if (format == 0xFFFE && size >= 40) format = detail::le16(f + 24);  // extensible: sub-format GUID
      if (format != 1) throw DataError("unsupported WAV audio_format " + std::to_string(format) + " (PCM required)");
      if (bits != 16) throw DataError("unsupported WAV bits_per_sample " + std::to_string(bits) + " (16 required)");
      if (channels != 1 && channels != 2)
        throw DataError("unsupported WAV num_channels " + std::to_string(channels) + " (mono or stereo)");
      if (rate == 0) throw DataError("WAV sample_rate is zero");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw DataError("WAV data chunk precedes fmt chunk");
      const std::size_t frame_bytes = 2u * channels;
      const std::size_t n = size / frame_bytes;
      AudioClip clip;
      clip.sample_rate = static_cast<int>(rate);
      clip.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t* s = bytes.data() + body + i * frame_bytes;
        double acc = 0.0;
        for (std::uint16_t c = 0; c < channels; ++c)
          acc += static_cast<std::int16_t>(detail::le16(s + 2 * c)) / 32768.0;
        clip.samples[i] = acc / channels;
      }
      return resample_linear(clip, target_rate);
    }
    pos = body + size + (size & 1u);
  }
  throw DataError(have_fmt ? "WAV file has no data chunk" : "WAV file has no fmt chunk");
}

inline AudioClip decode_wav(const std::string& path, int target_rate = 16000) {
  const std::string raw = csv::read_file(path);
  try {
    return decode_wav(std::span(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()), target_rate);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

/// Encodes interleaved PCM-16 (values are clamped to [-1, 1] and scaled by
/// 32768, saturating at 32767).
inline std::vector<std::uint8_t> encode_wav_pcm16(std::span<const double> interleaved, int sample_rate,
                                                  std::uint16_t channels = 1) {
  std::vector<std::uint8_t> out;
  auto put16 = [&](std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  };
  auto put32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  auto tag = [&](const char* t) { out.insert(out.end(), t, t + 4); };
  const auto data_bytes = static_cast<std::uint32_t>(interleaved.size() * 2);
  tag("RIFF");
  put32(36 + data_bytes);
  tag("WAVE");
  tag("fmt ");
  put32(16);
  put16(1);
  put16(channels);
  put32(static_cast<std::uint32_t>(sample_rate));
  put32(static_cast<std::uint32_t>(sample_rate) * channels * 2);
  put16(static_cast<std::uint16_t>(channels * 2));
  put16(16);
  tag("data");
  put32(data_bytes);
  for (double x : interleaved) {
    const double scaled = std::round(std::clamp(x, -1.0, 1.0) * 32768.0);
    put16(static_cast<std::uint16_t>(static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0))));
  }
  return out;
}

}  // namespace memorability::audio
