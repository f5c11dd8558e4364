#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <vector>

#include "musecp/audio.hpp"
#include "musecp/config.hpp"
#include "musecp/error.hpp"
#include "musecp/metric_value.hpp"

namespace musecp {

struct PitchFrame {
  double time = 0.0;        // seconds, mid-window
  double f0 = 0.0;          // Hz, valid only when voiced
  bool voiced = false;
  double confidence = 0.0;  // 1 - min of the normalized difference function
};

struct PitchTrack {
  std::vector<PitchFrame> frames;
  double frame_hop = 0.0;  // seconds
};

struct Note {
  double onset = 0.0;     // seconds
  double duration = 0.0;  // seconds
  int midi = 0;           // 0-127
};

struct NoteSequence {
  std::vector<Note> notes;  // onsets non-decreasing
};

using MotifSet = std::set<std::array<int, 3>>;

/// Per-frame YIN: cumulative-mean-normalized difference function, absolute
/// threshold, parabolic refinement of the selected dip. Frames that fail the
/// threshold, the RMS silence floor, or the pitch range come out unvoiced.
inline PitchTrack track_pitch(const AudioClip& clip, const EvalConfig& cfg = {}) {
  const double sr = clip.sample_rate;
  const int window = cfg.yin_window;
  const int hop = cfg.stft_hop;
  const auto tau_min = std::max<std::size_t>(2, static_cast<std::size_t>(sr / cfg.pitch_fmax_hz));
  const auto tau_max = static_cast<std::size_t>(std::ceil(sr / cfg.pitch_fmin_hz));

  PitchTrack track;
  track.frame_hop = hop / sr;
  const std::size_t span = static_cast<std::size_t>(window) + tau_max;
  if (clip.samples.size() < span) return track;  // fully unvoiced is valid
  const std::size_t frames = (clip.samples.size() - span) / static_cast<std::size_t>(hop) + 1;
  track.frames.resize(frames);

  std::vector<double> diff(tau_max + 1);
  std::vector<double> cmnd(tau_max + 1);
  for (std::size_t f = 0; f < frames; ++f) {
    const double* x = clip.samples.data() + f * static_cast<std::size_t>(hop);
    PitchFrame& out = track.frames[f];
    out.time = (static_cast<double>(f * static_cast<std::size_t>(hop)) + window / 2.0) / sr;

    double energy = 0.0;
    for (int j = 0; j < window; ++j) energy += x[j] * x[j];
    double rms = std::sqrt(energy / window);
    if (rms < cfg.silence_rms) continue;

    diff[0] = 0.0;
    for (std::size_t tau = 1; tau <= tau_max; ++tau) {
      double acc = 0.0;
      for (int j = 0; j < window; ++j) {
        double d = x[j] - x[j + static_cast<std::ptrdiff_t>(tau)];
        acc += d * d;
      }
      diff[tau] = acc;
    }
    cmnd[0] = 1.0;
    double running = 0.0;
    for (std::size_t tau = 1; tau <= tau_max; ++tau) {
      running += diff[tau];
      cmnd[tau] = running > 0.0 ? diff[tau] * static_cast<double>(tau) / running : 1.0;
    }

    double global_min = 1.0;
    for (std::size_t tau = tau_min; tau <= tau_max; ++tau) {
      global_min = std::min(global_min, cmnd[tau]);
    }
    out.confidence = std::clamp(1.0 - global_min, 0.0, 1.0);

    std::size_t pick = 0;
    for (std::size_t tau = tau_min; tau <= tau_max; ++tau) {
      if (cmnd[tau] < cfg.yin_threshold) {
        while (tau + 1 <= tau_max && cmnd[tau + 1] < cmnd[tau]) ++tau;
        pick = tau;
        break;
      }
    }
    if (pick == 0) continue;

    double tau_star = static_cast<double>(pick);
    if (pick > tau_min && pick < tau_max) {
      double a = cmnd[pick - 1], b = cmnd[pick], c = cmnd[pick + 1];
      double denom = a - 2.0 * b + c;
      if (denom > 0.0) tau_star += std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
    }
    double f0 = sr / tau_star;
    if (f0 < cfg.pitch_fmin_hz || f0 > cfg.pitch_fmax_hz) continue;
    out.f0 = f0;
    out.voiced = true;
  }
  return track;
}

struct VoicingRecall {
  double plain = 0.0;    // voiced-in-ref frames also voiced in est
  double pitched = 0.0;  // additionally within the cents gate
};

/// Fraction of reference-voiced frames that the estimate also voices,
/// counted over the common frame span. The pitched variant additionally
/// requires the estimate's f0 to be within the configured cents gate.
inline VoicingRecall voicing_recall(const PitchTrack& ref, const PitchTrack& est,
                                    const EvalConfig& cfg = {}) {
  const std::size_t n = std::min(ref.frames.size(), est.frames.size());
  std::size_t ref_voiced = 0, both = 0, both_pitched = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!ref.frames[i].voiced) continue;
    ++ref_voiced;
    if (!est.frames[i].voiced) continue;
    ++both;
    double cents = 1200.0 * std::log2(est.frames[i].f0 / ref.frames[i].f0);
    if (std::abs(cents) <= cfg.pitch_gate_cents) ++both_pitched;
  }
  if (ref_voiced == 0) {
    throw McpError(ErrorCode::degenerate_input, "voicing_recall: reference has no voiced frames");
  }
  return {static_cast<double>(both) / static_cast<double>(ref_voiced),
          static_cast<double>(both_pitched) / static_cast<double>(ref_voiced)};
}

/// Voiced runs quantized to the nearest MIDI pitch. Unvoiced gaps up to
/// note_gap_s between frames of the same pitch are bridged; a pitch change or
/// a longer gap starts a new note; notes shorter than note_min_s are dropped.
inline NoteSequence segment_notes(const PitchTrack& track, const EvalConfig& cfg = {}) {
  const double hop = track.frame_hop;
  const auto n = track.frames.size();
  std::vector<int> midi(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!track.frames[i].voiced) continue;
    int m = static_cast<int>(std::lround(69.0 + 12.0 * std::log2(track.frames[i].f0 / 440.0)));
    midi[i] = std::clamp(m, 0, 127);
  }

  // Bridge short unvoiced gaps flanked by the same pitch.
  const auto gap_frames = static_cast<std::size_t>(cfg.note_gap_s / hop);
  std::size_t i = 0;
  while (i < n) {
    if (midi[i] != -1) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && midi[j] == -1) ++j;
    if (i > 0 && j < n && midi[i - 1] == midi[j] && j - i <= gap_frames) {
      for (std::size_t k = i; k < j; ++k) midi[k] = midi[j];
    }
    i = j;
  }

  NoteSequence seq;
  std::size_t run_start = 0;
  for (std::size_t f = 1; f <= n; ++f) {
    if (f == n || midi[f] != midi[run_start]) {
      if (midi[run_start] != -1) {
        double duration = static_cast<double>(f - run_start) * hop;
        if (duration >= cfg.note_min_s) {
          seq.notes.push_back({track.frames[run_start].time, duration, midi[run_start]});
        }
      }
      run_start = f;
    }
  }
  return seq;
}

/// All contiguous 3-grams of the consecutive-pitch interval sequence, each
/// interval clamped to [-24, 24] semitones. Fewer than 4 notes yield nothing.
inline MotifSet motif_3grams(const NoteSequence& seq) {
  MotifSet grams;
  const auto& notes = seq.notes;
  if (notes.size() < 4) return grams;
  std::vector<int> intervals(notes.size() - 1);
  for (std::size_t i = 0; i + 1 < notes.size(); ++i) {
    intervals[i] = std::clamp(notes[i + 1].midi - notes[i].midi, -24, 24);
  }
  for (std::size_t i = 0; i + 2 < intervals.size(); ++i) {
    grams.insert({intervals[i], intervals[i + 1], intervals[i + 2]});
  }
  return grams;
}

struct MotifOverlap {
  double jaccard = 0.0;          // 1.0 when both sets are empty
  std::optional<double> recall;  // absent when the reference set is empty
};

inline MotifOverlap motif_overlap(const MotifSet& ref, const MotifSet& est) {
  std::size_t inter = 0;
  for (const auto& g : ref) {
    if (est.count(g)) ++inter;
  }
  std::size_t uni = ref.size() + est.size() - inter;

  MotifOverlap out;
  out.jaccard = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
  if (!ref.empty()) {
    out.recall = static_cast<double>(inter) / static_cast<double>(ref.size());
  }
  return out;
}

struct MelodyScores {
  MetricValue voicing_recall;
  MetricValue voicing_recall_pitched;
  MetricValue motif_jaccard;
  MetricValue motif_recall;
};

/// Melodic facet: voicing recall on the frame tracks, motif overlap on the
/// interval 3-grams of the segmented notes.
inline MelodyScores eval_melody(const AudioClip& ref, const AudioClip& est,
                                const EvalConfig& cfg = {}) {
  PitchTrack rt = track_pitch(ref, cfg);
  PitchTrack et = track_pitch(est, cfg);

  MelodyScores scores;
  try {
    VoicingRecall vr = voicing_recall(rt, et, cfg);
    scores.voicing_recall = MetricValue::of(vr.plain);
    scores.voicing_recall_pitched = MetricValue::of(vr.pitched);
  } catch (const McpError& e) {
    if (e.code() != ErrorCode::degenerate_input) throw;
    scores.voicing_recall = MetricValue::missing("no-voicing");
    scores.voicing_recall_pitched = MetricValue::missing("no-voicing");
  }

  MotifSet rg = motif_3grams(segment_notes(rt, cfg));
  MotifSet eg = motif_3grams(segment_notes(et, cfg));
  MotifOverlap mo = motif_overlap(rg, eg);
  scores.motif_jaccard = MetricValue::of(mo.jaccard);
  scores.motif_recall = mo.recall ? MetricValue::of(*mo.recall)
                                  : MetricValue::missing("no-motifs");
  return scores;
}

}  // namespace musecp
