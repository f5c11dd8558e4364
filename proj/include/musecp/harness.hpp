#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "musecp/audio.hpp"
#include "musecp/config.hpp"
#include "musecp/error.hpp"
#include "musecp/harmony.hpp"
#include "musecp/manifest.hpp"
#include "musecp/melody.hpp"
#include "musecp/metric_value.hpp"
#include "musecp/report.hpp"
#include "musecp/rhythm.hpp"
#include "musecp/structure.hpp"

namespace musecp {

namespace detail {

inline bool clip_is_silent(const AudioClip& clip, double silence_rms) {
  double energy = 0.0;
  for (double s : clip.samples) energy += s * s;
  return std::sqrt(energy / std::max<std::size_t>(clip.samples.size(), 1)) < silence_rms;
}

}  // namespace detail

/// Prepare a decoded clip for evaluation: resample to the analysis rate and
/// enforce the minimum-duration admission rule.
inline AudioClip admit_clip(const AudioClip& clip, const EvalConfig& cfg = {}) {
  if (clip.samples.empty()) {
    throw McpError(ErrorCode::empty_audio, "empty clip: " + clip.source_id);
  }
  AudioClip out = resample(clip, cfg.analysis_rate_hz);
  if (out.duration_seconds() < cfg.min_clip_seconds) {
    throw McpError(ErrorCode::empty_audio,
                   "clip shorter than the 1 s evaluation minimum: " + clip.source_id);
  }
  return out;
}

/// Evaluate all four facets on a pair of admitted clips. Mixed durations are
/// compared over their overlap. A silent side makes the time-dependent
/// facets (rhythm, melody) unmeasurable rather than zero.
inline std::map<std::string, MetricValue> evaluate_clip_pair(const AudioClip& ref_in,
                                                             const AudioClip& est_in,
                                                             const EvalConfig& cfg = {}) {
  AudioClip ref = admit_clip(ref_in, cfg);
  AudioClip est = admit_clip(est_in, cfg);
  std::size_t common = std::min(ref.samples.size(), est.samples.size());
  ref.samples.resize(common);
  est.samples.resize(common);

  std::map<std::string, MetricValue> metrics;
  const bool silent =
      detail::clip_is_silent(ref, cfg.silence_rms) || detail::clip_is_silent(est, cfg.silence_rms);

  HarmonyScores harmony = eval_harmony(ref, est, cfg);
  metrics["cof_distance"] = harmony.cof_distance;
  metrics["chroma_dtw_similarity"] = harmony.chroma_dtw_similarity;
  metrics["majmin_score"] = harmony.majmin_score;

  if (silent) {
    for (const char* id : {"delta_bpm", "beat_f_measure", "information_gain",
                           "information_gain_raw", "voicing_recall",
                           "voicing_recall_pitched", "motif_jaccard", "motif_recall"}) {
      metrics[id] = MetricValue::missing("no-signal");
    }
  } else {
    RhythmScores rhythm = eval_rhythm(ref, est, cfg);
    metrics["delta_bpm"] = rhythm.delta_bpm;
    metrics["beat_f_measure"] = rhythm.beat_f_measure;
    metrics["information_gain"] = rhythm.information_gain;
    metrics["information_gain_raw"] = rhythm.information_gain_raw;

    MelodyScores melody = eval_melody(ref, est, cfg);
    metrics["voicing_recall"] = melody.voicing_recall;
    metrics["voicing_recall_pitched"] = melody.voicing_recall_pitched;
    metrics["motif_jaccard"] = melody.motif_jaccard;
    metrics["motif_recall"] = melody.motif_recall;
  }

  StructureScores structure = eval_structure(ref, est, cfg);
  metrics["adjusted_rand_index"] = structure.adjusted_rand_index;
  metrics["adjusted_rand_index_raw"] = structure.adjusted_rand_index_raw;
  metrics["boundary_f_measure"] = structure.boundary_f_measure;
  metrics["boundary_f_measure_strict"] = structure.boundary_f_measure_strict;
  return metrics;
}

/// Evaluate one manifest pair. Unloadable or inadmissible audio produces a
/// failure record instead of aborting the corpus run.
inline PairRecord evaluate_pair(const EvalPair& pair, const EvalConfig& cfg = {}) {
  PairRecord rec;
  rec.pair_id = pair.pair_id;
  rec.system_id = pair.system_id;
  auto started = std::chrono::steady_clock::now();
  try {
    AudioClip ref = load_wav(pair.original_path);
    AudioClip est = load_wav(pair.edited_path);
    rec.metrics = evaluate_clip_pair(ref, est, cfg);
  } catch (const McpError& e) {
    rec.failed = true;
    rec.failure = std::string(to_string(e.code())) + ": " + e.what();
  }
  rec.analysis_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rec;
}

using ProgressFn = std::function<void(const PairRecord&, std::size_t done, std::size_t total)>;

/// Evaluate a whole manifest with up to `jobs` pairs in flight. Records come
/// back in manifest order regardless of scheduling, so downstream output is
/// identical for any job count.
inline std::vector<PairRecord> evaluate_corpus(const std::vector<EvalPair>& pairs,
                                               const EvalConfig& cfg = {}, int jobs = 1,
                                               const ProgressFn& progress = {}) {
  if (jobs < 1) {
    throw McpError(ErrorCode::invalid_argument, "jobs must be >= 1");
  }
  std::vector<PairRecord> records(pairs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= pairs.size()) break;
      records[i] = evaluate_pair(pairs[i], cfg);
      std::size_t finished = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(records[i], finished, pairs.size());
      }
    }
  };

  const int n_threads = std::min<int>(jobs, static_cast<int>(std::max<std::size_t>(pairs.size(), 1)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  return records;
}

}  // namespace musecp
