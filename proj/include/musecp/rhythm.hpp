#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <tuple>
#include <vector>

#include "musecp/audio.hpp"
#include "musecp/config.hpp"
#include "musecp/error.hpp"
#include "musecp/features.hpp"
#include "musecp/metric_value.hpp"

namespace musecp {

struct BeatGrid {
  std::vector<double> beat_times;  // strictly increasing, seconds
  double tempo_bpm = 0.0;
};

namespace detail {

/// Onset times carry a fixed offset: envelope index i measures the flux into
/// STFT frame i+1, and a transient first appears at that frame's right edge,
/// so the event sits near i*hop + window (+ half a hop of quantization).
inline double onset_time_offset_s(const EvalConfig& cfg) {
  return (cfg.stft_window + 0.5 * cfg.stft_hop) / cfg.analysis_rate_hz;
}

inline std::vector<std::size_t> envelope_peaks(const std::vector<double>& env,
                                               double threshold) {
  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < env.size(); ++i) {
    if (env[i] > threshold && env[i] >= env[i - 1] && env[i] > env[i + 1]) {
      peaks.push_back(i);
    }
  }
  return peaks;
}

}  // namespace detail

/// Tempo from the autocorrelation of the onset envelope, weighted by a
/// log-normal prior centered at the configured BPM. The integer-lag argmax is
/// refined twice: parabolic interpolation of the autocorrelation peak, then a
/// least-squares fit of detected onset peaks to a uniform beat grid, which
/// averages out frame quantization.
inline double estimate_tempo(const OnsetEnvelope& env, const EvalConfig& cfg = {}) {
  const auto& e = env.strengths;
  const double hop = env.frame_hop;
  if (static_cast<double>(e.size()) * hop < 4.0) {
    throw McpError(ErrorCode::no_tempo, "onset envelope shorter than 4 s");
  }
  double peak = *std::max_element(e.begin(), e.end());
  if (peak <= 0.0) {
    throw McpError(ErrorCode::no_tempo, "all-zero onset envelope");
  }

  const auto lag_min = static_cast<std::size_t>(
      std::max(1.0, std::floor(60.0 / (cfg.tempo_max_bpm * hop))));
  const auto lag_max = static_cast<std::size_t>(std::ceil(60.0 / (cfg.tempo_min_bpm * hop)));
  if (e.size() <= lag_max + 1) {
    throw McpError(ErrorCode::no_tempo, "envelope too short for the tempo range");
  }

  auto acf = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < e.size(); ++t) acc += e[t] * e[t + lag];
    return acc / static_cast<double>(e.size() - lag);
  };

  std::vector<double> score(lag_max + 2, 0.0);
  for (std::size_t lag = lag_min; lag <= lag_max + 1; ++lag) {
    double bpm = 60.0 / (static_cast<double>(lag) * hop);
    double z = std::log2(bpm / cfg.tempo_prior_bpm) / cfg.tempo_prior_octave_sigma;
    score[lag] = acf(lag) * std::exp(-0.5 * z * z);
  }

  // Descending lag order so an exact tie lands on the lower BPM.
  std::size_t best_lag = lag_max;
  double best_score = -1.0;
  for (std::size_t lag = lag_max; lag >= lag_min; --lag) {
    if (score[lag] > best_score) {
      best_score = score[lag];
      best_lag = lag;
    }
    if (lag == lag_min) break;
  }

  // Sub-harmonic guard: a click comb correlates as strongly at twice its
  // period, and the prior can then pick the half tempo. When the half lag is
  // also a strong autocorrelation peak and the doubled tempo stays in range,
  // take it.
  for (int pass = 0; pass < 2; ++pass) {
    std::size_t half = best_lag / 2;
    if (half < lag_min) break;
    std::size_t strongest = half;
    for (std::size_t lag : {half - 1, half, half + 1, half + 2}) {
      if (lag >= lag_min && lag <= lag_max && acf(lag) > acf(strongest)) strongest = lag;
    }
    if (acf(strongest) >= 0.7 * acf(best_lag)) {
      best_lag = strongest;
    } else {
      break;
    }
  }

  double period_frames = static_cast<double>(best_lag);
  if (best_lag > lag_min && best_lag < lag_max + 1) {
    double a = score[best_lag - 1], b = score[best_lag], c = score[best_lag + 1];
    double denom = a - 2.0 * b + c;
    if (denom < 0.0) {
      double delta = 0.5 * (a - c) / denom;
      period_frames += std::clamp(delta, -0.5, 0.5);
    }
  }

  // Grid-fit refinement on strong envelope peaks.
  double mean = 0.0;
  for (double v : e) mean += v;
  mean /= static_cast<double>(e.size());
  double var = 0.0;
  for (double v : e) var += (v - mean) * (v - mean);
  double sd = std::sqrt(var / static_cast<double>(e.size()));
  auto peaks = detail::envelope_peaks(e, mean + 0.5 * sd);
  if (peaks.size() >= 4) {
    std::vector<std::pair<double, double>> points;  // (beat index, time in frames)
    double t0 = static_cast<double>(peaks.front());
    double last_k = -1.0;
    for (std::size_t p : peaks) {
      double k = std::round((static_cast<double>(p) - t0) / period_frames);
      if (k == last_k) continue;  // keep the first peak claiming a slot
      last_k = k;
      points.emplace_back(k, static_cast<double>(p));
    }
    if (points.size() >= 4) {
      double sk = 0, st = 0, skk = 0, skt = 0;
      for (auto [k, t] : points) {
        sk += k;
        st += t;
        skk += k * k;
        skt += k * t;
      }
      double nn = static_cast<double>(points.size());
      double denom = nn * skk - sk * sk;
      if (denom > 0) {
        double slope = (nn * skt - sk * st) / denom;
        if (std::abs(slope / period_frames - 1.0) < 0.08) period_frames = slope;
      }
    }
  }

  double bpm = 60.0 / (period_frames * hop);
  return std::clamp(bpm, cfg.tempo_min_bpm, cfg.tempo_max_bpm);
}

/// Dynamic-programming beat tracker: maximizes the sum of onset strengths at
/// the chosen frames plus `beat_tightness` times a squared-log penalty of
/// each inter-beat interval against the tempo period, then backtracks the
/// globally best sequence.
inline BeatGrid track_beats(const OnsetEnvelope& env, double tempo_bpm,
                            const EvalConfig& cfg = {}) {
  if (tempo_bpm <= 0.0 || !std::isfinite(tempo_bpm)) {
    throw McpError(ErrorCode::no_tempo, "track_beats: invalid tempo");
  }
  const auto& raw = env.strengths;
  const double hop = env.frame_hop;
  const double period = 60.0 / tempo_bpm / hop;  // frames, fractional
  const auto n = static_cast<std::ptrdiff_t>(raw.size());
  if (n < 2) {
    throw McpError(ErrorCode::no_tempo, "track_beats: envelope too short");
  }

  double peak = *std::max_element(raw.begin(), raw.end());
  std::vector<double> e(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) e[i] = peak > 0 ? raw[i] / peak : 0.0;

  const double lambda = cfg.beat_tightness;
  const auto win_lo = static_cast<std::ptrdiff_t>(std::max(1.0, std::floor(period * 0.5)));
  const auto win_hi = static_cast<std::ptrdiff_t>(std::ceil(period * 2.0));

  std::vector<double> best(raw.size(), 0.0);
  std::vector<std::ptrdiff_t> pred(raw.size(), -1);
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    double inner = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t arg = -1;
    for (std::ptrdiff_t p = std::max<std::ptrdiff_t>(0, t - win_hi); p <= t - win_lo; ++p) {
      double gap = std::log(static_cast<double>(t - p) / period);
      double cand = best[static_cast<std::size_t>(p)] - lambda * gap * gap;
      if (cand > inner) {
        inner = cand;
        arg = p;
      }
    }
    double base = e[static_cast<std::size_t>(t)];
    if (arg >= 0 && inner > 0.0) {
      best[static_cast<std::size_t>(t)] = base + inner;
      pred[static_cast<std::size_t>(t)] = arg;
    } else {
      best[static_cast<std::size_t>(t)] = base;
    }
  }

  // End anywhere in the final period window.
  std::ptrdiff_t end = n - 1;
  auto tail_start = std::max<std::ptrdiff_t>(0, n - win_hi);
  for (std::ptrdiff_t t = tail_start; t < n; ++t) {
    if (best[static_cast<std::size_t>(t)] > best[static_cast<std::size_t>(end)]) end = t;
  }

  std::vector<double> times;
  const double offset = detail::onset_time_offset_s(cfg);
  for (std::ptrdiff_t t = end; t >= 0; t = pred[static_cast<std::size_t>(t)]) {
    // Sub-frame refinement when the beat sits on an envelope peak; beats
    // interpolated through flat stretches stay on the frame grid.
    double frac = 0.0;
    if (t > 0 && t + 1 < n) {
      double a = e[static_cast<std::size_t>(t - 1)];
      double b = e[static_cast<std::size_t>(t)];
      double c = e[static_cast<std::size_t>(t + 1)];
      double denom = a - 2.0 * b + c;
      if (b >= a && b >= c && denom < 0.0) {
        frac = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
      }
    }
    times.push_back((static_cast<double>(t) + frac) * hop + offset);
    if (pred[static_cast<std::size_t>(t)] < 0) break;
  }
  std::reverse(times.begin(), times.end());

  BeatGrid grid;
  grid.beat_times = std::move(times);
  grid.tempo_bpm = tempo_bpm;
  return grid;
}

/// |reference tempo - estimated tempo| in BPM.
inline double delta_bpm(const BeatGrid& ref, const BeatGrid& est) {
  return std::abs(ref.tempo_bpm - est.tempo_bpm);
}

namespace detail {

/// Greedy one-to-one matching of two event lists within +-window: candidate
/// pairs ordered by distance (ties by indices), each event used at most once.
inline std::size_t match_events(const std::vector<double>& ref,
                                const std::vector<double>& est, double window) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> cands;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    for (std::size_t j = 0; j < est.size(); ++j) {
      double d = std::abs(ref[i] - est[j]);
      if (d <= window) cands.emplace_back(d, i, j);
    }
  }
  std::sort(cands.begin(), cands.end());
  std::vector<char> ref_used(ref.size(), 0), est_used(est.size(), 0);
  std::size_t matches = 0;
  for (const auto& [d, i, j] : cands) {
    if (!ref_used[i] && !est_used[j]) {
      ref_used[i] = est_used[j] = 1;
      ++matches;
    }
  }
  return matches;
}

}  // namespace detail

/// F-measure of estimated beats against reference beats within +-window.
inline double beat_f_measure(const BeatGrid& ref, const BeatGrid& est,
                             double window = 0.07) {
  if (ref.beat_times.empty()) {
    throw McpError(ErrorCode::degenerate_input, "beat_f_measure: empty reference grid");
  }
  if (est.beat_times.empty()) return 0.0;
  std::size_t m = detail::match_events(ref.beat_times, est.beat_times, window);
  double precision = static_cast<double>(m) / static_cast<double>(est.beat_times.size());
  double recall = static_cast<double>(m) / static_cast<double>(ref.beat_times.size());
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

struct InformationGain {
  double normalized = 0.0;  // raw / log2(bins), clamped to [0, 1]
  double raw_bits = 0.0;    // log2(bins) - entropy of the error histogram
};

/// Entropy reduction of the beat-error histogram against a uniform baseline.
/// Each estimated beat's signed offset to its nearest reference beat is
/// normalized by the local reference interval into [-0.5, 0.5).
inline InformationGain information_gain(const BeatGrid& ref, const BeatGrid& est,
                                        int bins = 41) {
  const auto& r = ref.beat_times;
  const auto& e = est.beat_times;
  if (r.size() < 2 || e.size() < 2) {
    throw McpError(ErrorCode::degenerate_input, "information_gain: need >= 2 beats per grid");
  }

  std::vector<std::size_t> hist(static_cast<std::size_t>(bins), 0);
  for (double t : e) {
    auto it = std::lower_bound(r.begin(), r.end(), t);
    std::size_t k;
    if (it == r.begin()) {
      k = 0;
    } else if (it == r.end()) {
      k = r.size() - 1;
    } else {
      std::size_t hi = static_cast<std::size_t>(it - r.begin());
      k = (t - r[hi - 1] <= r[hi] - t) ? hi - 1 : hi;
    }
    double ibi;
    if (t >= r[k]) {
      ibi = k + 1 < r.size() ? r[k + 1] - r[k] : r[k] - r[k - 1];
    } else {
      ibi = k > 0 ? r[k] - r[k - 1] : r[k + 1] - r[k];
    }
    double err = (t - r[k]) / ibi;
    err -= std::floor(err + 0.5);  // wrap into [-0.5, 0.5)
    auto bin = static_cast<std::ptrdiff_t>(std::floor((err + 0.5) * bins));
    bin = std::clamp<std::ptrdiff_t>(bin, 0, bins - 1);
    ++hist[static_cast<std::size_t>(bin)];
  }

  double total = static_cast<double>(e.size());
  double entropy = 0.0;
  for (std::size_t c : hist) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / total;
    entropy -= p * std::log2(p);
  }
  InformationGain ig;
  ig.raw_bits = std::log2(static_cast<double>(bins)) - entropy;
  ig.normalized = std::clamp(ig.raw_bits / std::log2(static_cast<double>(bins)), 0.0, 1.0);
  return ig;
}

struct RhythmScores {
  MetricValue delta_bpm;
  MetricValue beat_f_measure;
  MetricValue information_gain;       // normalized, the headline value
  MetricValue information_gain_raw;   // bits, reported alongside
};

/// Rhythm facet: tempo and beats estimated independently per clip, reference
/// grid taken from the first argument. A clip with no usable tempo yields
/// missing rhythm metrics rather than zeros.
inline RhythmScores eval_rhythm(const AudioClip& ref, const AudioClip& est,
                                const EvalConfig& cfg = {}) {
  RhythmScores scores;
  OnsetEnvelope renv = onset_envelope(stft(ref, cfg), cfg);
  OnsetEnvelope eenv = onset_envelope(stft(est, cfg), cfg);
  BeatGrid rgrid, egrid;
  try {
    rgrid = track_beats(renv, estimate_tempo(renv, cfg), cfg);
    egrid = track_beats(eenv, estimate_tempo(eenv, cfg), cfg);
  } catch (const McpError& err) {
    if (err.code() != ErrorCode::no_tempo) throw;
    std::string reason = std::string("no-tempo");
    scores.delta_bpm = MetricValue::missing(reason);
    scores.beat_f_measure = MetricValue::missing(reason);
    scores.information_gain = MetricValue::missing(reason);
    scores.information_gain_raw = MetricValue::missing(reason);
    return scores;
  }

  scores.delta_bpm = MetricValue::of(delta_bpm(rgrid, egrid));
  scores.beat_f_measure = MetricValue::of(beat_f_measure(rgrid, egrid, cfg.beat_window_s));
  try {
    InformationGain ig = information_gain(rgrid, egrid, cfg.info_gain_bins);
    scores.information_gain = MetricValue::of(ig.normalized);
    scores.information_gain_raw = MetricValue::of(ig.raw_bits);
  } catch (const McpError& err) {
    if (err.code() != ErrorCode::degenerate_input) throw;
    scores.information_gain = MetricValue::missing("too-few-beats");
    scores.information_gain_raw = MetricValue::missing("too-few-beats");
  }
  return scores;
}

}  // namespace musecp
