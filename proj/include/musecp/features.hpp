#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "musecp/audio.hpp"
#include "musecp/config.hpp"
#include "musecp/error.hpp"
#include "musecp/fft.hpp"

namespace musecp {

/// Hann-windowed magnitude STFT. Frames are laid end to end with no padding:
/// frame i covers samples [i*hop, i*hop + window), so
/// frame_count = floor((n - window) / hop) + 1.
/// Magnitudes are scaled by 2 / sum(window): a full-scale sine peaks near 1.
struct Spectrogram {
  std::vector<std::vector<double>> magnitudes;  // frames x (window/2 + 1)
  std::vector<double> frame_rms;                // time-domain RMS per frame
  double frame_hop = 0.0;                       // seconds
  int window_size = 0;                          // samples
  double sample_rate = 0.0;

  std::size_t frames() const { return magnitudes.size(); }
  std::size_t bins() const { return magnitudes.empty() ? 0 : magnitudes.front().size(); }
  double bin_hz(std::size_t bin) const {
    return static_cast<double>(bin) * sample_rate / window_size;
  }
};

struct OnsetEnvelope {
  std::vector<double> strengths;  // length = spectrogram frames - 1
  double frame_hop = 0.0;         // seconds
};

struct Chromagram {
  std::vector<std::array<double, 12>> frames;  // rows max-normalized or all-zero
  double frame_hop = 0.0;                      // seconds
};

inline Spectrogram stft(const AudioClip& clip, int window, int hop) {
  if (!is_power_of_two(static_cast<std::size_t>(window))) {
    throw McpError(ErrorCode::invalid_argument, "stft window must be a power of two");
  }
  if (hop <= 0 || hop > window) {
    throw McpError(ErrorCode::invalid_argument, "stft hop must be in (0, window]");
  }
  const std::size_t n = clip.samples.size();
  if (n < static_cast<std::size_t>(window)) {
    throw McpError(ErrorCode::empty_audio, "clip shorter than one analysis window");
  }

  const std::size_t frames = (n - static_cast<std::size_t>(window)) / hop + 1;
  const std::size_t bins = static_cast<std::size_t>(window) / 2 + 1;

  std::vector<double> hann(static_cast<std::size_t>(window));
  double wsum = 0.0;
  for (int i = 0; i < window; ++i) {
    hann[static_cast<std::size_t>(i)] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / window);
    wsum += hann[static_cast<std::size_t>(i)];
  }
  const double scale = 2.0 / wsum;

  Spectrogram spec;
  spec.frame_hop = hop / clip.sample_rate;
  spec.window_size = window;
  spec.sample_rate = clip.sample_rate;
  spec.magnitudes.assign(frames, std::vector<double>(bins, 0.0));
  spec.frame_rms.assign(frames, 0.0);

  Fft fft(static_cast<std::size_t>(window));
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(window));
  for (std::size_t f = 0; f < frames; ++f) {
    const double* x = clip.samples.data() + f * static_cast<std::size_t>(hop);
    double energy = 0.0;
    for (int i = 0; i < window; ++i) {
      buf[static_cast<std::size_t>(i)] = {x[i] * hann[static_cast<std::size_t>(i)], 0.0};
      energy += x[i] * x[i];
    }
    spec.frame_rms[f] = std::sqrt(energy / window);
    fft.forward(buf);
    for (std::size_t k = 0; k < bins; ++k) {
      spec.magnitudes[f][k] = std::abs(buf[k]) * scale;
    }
  }
  return spec;
}

inline Spectrogram stft(const AudioClip& clip, const EvalConfig& cfg = {}) {
  return stft(clip, cfg.stft_window, cfg.stft_hop);
}

/// Spectral flux: half-wave-rectified first difference of the log-magnitude
/// spectrum, summed over bins.
inline OnsetEnvelope onset_envelope(const Spectrogram& spec,
                                    const EvalConfig& cfg = {}) {
  if (spec.frames() < 2) {
    throw McpError(ErrorCode::degenerate_input, "onset envelope needs >= 2 frames");
  }
  OnsetEnvelope env;
  env.frame_hop = spec.frame_hop;
  env.strengths.resize(spec.frames() - 1);
  const double floor = cfg.energy_floor;
  for (std::size_t f = 0; f + 1 < spec.frames(); ++f) {
    double acc = 0.0;
    const auto& a = spec.magnitudes[f];
    const auto& b = spec.magnitudes[f + 1];
    for (std::size_t k = 0; k < a.size(); ++k) {
      double d = std::log(b[k] + floor) - std::log(a[k] + floor);
      if (d > 0) acc += d;
    }
    env.strengths[f] = acc;
  }
  return env;
}

/// Fold STFT bins to the 12 pitch classes by nearest-semitone assignment of
/// each bin's center frequency (energy-weighted), then max-normalize each
/// frame. Frames whose RMS is below the silence threshold stay all-zero.
inline Chromagram chromagram(const AudioClip& clip, const EvalConfig& cfg = {}) {
  if (clip.duration_seconds() < cfg.min_clip_seconds) {
    throw McpError(ErrorCode::empty_audio, "chromagram needs at least 1 s of audio");
  }
  Spectrogram spec = stft(clip, cfg);

  const std::size_t bins = spec.bins();
  std::vector<int> bin_class(bins, -1);
  for (std::size_t k = 1; k < bins; ++k) {
    double f = spec.bin_hz(k);
    if (f < cfg.chroma_fmin_hz || f > cfg.chroma_fmax_hz) continue;
    int midi = static_cast<int>(std::lround(69.0 + 12.0 * std::log2(f / 440.0)));
    bin_class[k] = ((midi % 12) + 12) % 12;
  }

  Chromagram ch;
  ch.frame_hop = spec.frame_hop;
  ch.frames.assign(spec.frames(), {});
  for (std::size_t f = 0; f < spec.frames(); ++f) {
    if (spec.frame_rms[f] < cfg.silence_rms) continue;  // stays all-zero
    auto& row = ch.frames[f];
    for (std::size_t k = 0; k < bins; ++k) {
      if (bin_class[k] >= 0) {
        double m = spec.magnitudes[f][k];
        row[static_cast<std::size_t>(bin_class[k])] += m * m;
      }
    }
    double peak = *std::max_element(row.begin(), row.end());
    if (peak > 0) {
      for (auto& v : row) v /= peak;
    }
  }
  return ch;
}

namespace detail {

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace detail

/// Log-energies in mel-spaced triangular bands; the timbre half of the
/// structure features.
inline std::vector<std::vector<double>> timbre_features(const Spectrogram& spec,
                                                        int n_bands,
                                                        const EvalConfig& cfg = {}) {
  if (n_bands < 4) {
    throw McpError(ErrorCode::invalid_argument, "timbre_features needs n_bands >= 4");
  }
  const double fmax = spec.sample_rate / 2.0;
  const double mel_max = detail::hz_to_mel(fmax);
  std::vector<double> edges(static_cast<std::size_t>(n_bands) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = detail::mel_to_hz(mel_max * static_cast<double>(i) / (edges.size() - 1));
  }

  std::vector<std::vector<double>> out(spec.frames(),
                                       std::vector<double>(static_cast<std::size_t>(n_bands)));
  for (std::size_t f = 0; f < spec.frames(); ++f) {
    for (int b = 0; b < n_bands; ++b) {
      double lo = edges[static_cast<std::size_t>(b)];
      double mid = edges[static_cast<std::size_t>(b) + 1];
      double hi = edges[static_cast<std::size_t>(b) + 2];
      double energy = 0.0;
      for (std::size_t k = 0; k < spec.bins(); ++k) {
        double fr = spec.bin_hz(k);
        double w = 0.0;
        if (fr > lo && fr < mid) w = (fr - lo) / (mid - lo);
        else if (fr >= mid && fr < hi) w = (hi - fr) / (hi - mid);
        double m = spec.magnitudes[f][k];
        energy += w * m * m;
      }
      out[f][static_cast<std::size_t>(b)] = std::log(energy + cfg.energy_floor);
    }
  }
  return out;
}

}  // namespace musecp
