#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "musecp/audio.hpp"
#include "musecp/config.hpp"
#include "musecp/error.hpp"
#include "musecp/features.hpp"
#include "musecp/metric_value.hpp"

namespace musecp {

enum class Mode { major, minor };

struct KeyEstimate {
  int tonic = 0;  // pitch class, 0 = C
  Mode mode = Mode::major;
  double confidence = 0.0;  // Pearson correlation of the winning profile
};

/// Chord label: root pitch class + major/minor quality, or no-chord.
struct Chord {
  int root = -1;  // -1 = no-chord
  bool minor = false;

  bool operator==(const Chord&) const = default;
  bool is_chord() const { return root >= 0; }

  std::string name() const {
    static const char* names[12] = {"C",  "C#", "D",  "D#", "E",  "F",
                                    "F#", "G",  "G#", "A",  "A#", "B"};
    if (!is_chord()) return "N";
    return std::string(names[root]) + (minor ? ":min" : ":maj");
  }
};

struct ChordSpan {
  double start = 0.0;
  double end = 0.0;
  Chord chord;
};

struct ChordSequence {
  std::vector<ChordSpan> spans;  // sorted, non-overlapping, contiguous
  double duration() const { return spans.empty() ? 0.0 : spans.back().end; }
};

namespace detail {

// Krumhansl-Kessler probe-tone profiles, index 0 = tonic.
inline constexpr std::array<double, 12> kk_major = {
    6.35, 2.23, 3.48, 2.33, 4.38, 4.09, 2.52, 5.19, 2.39, 3.66, 2.29, 2.88};
inline constexpr std::array<double, 12> kk_minor = {
    6.33, 2.68, 3.52, 5.38, 2.60, 3.53, 2.54, 4.75, 3.98, 2.69, 3.34, 3.17};

inline double pearson12(const std::array<double, 12>& a, const std::array<double, 12>& b) {
  double ma = 0.0, mb = 0.0;
  for (int i = 0; i < 12; ++i) {
    ma += a[static_cast<std::size_t>(i)];
    mb += b[static_cast<std::size_t>(i)];
  }
  ma /= 12.0;
  mb /= 12.0;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (int i = 0; i < 12; ++i) {
    double da = a[static_cast<std::size_t>(i)] - ma;
    double db = b[static_cast<std::size_t>(i)] - mb;
    cov += da * db;
    va += da * da;
    vb += db * db;
  }
  if (va <= 0.0 || vb <= 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

}  // namespace detail

/// Correlate the time-averaged chroma against all 24 rotated
/// Krumhansl-Kessler profiles. Ties break toward the lower tonic index, major
/// before minor.
inline KeyEstimate estimate_key(const Chromagram& ch) {
  std::array<double, 12> mean{};
  std::size_t active = 0;
  for (const auto& row : ch.frames) {
    double peak = *std::max_element(row.begin(), row.end());
    if (peak <= 0.0) continue;
    ++active;
    for (int i = 0; i < 12; ++i) mean[static_cast<std::size_t>(i)] += row[static_cast<std::size_t>(i)];
  }
  if (active == 0) {
    throw McpError(ErrorCode::no_key, "key estimation on all-silent chromagram");
  }
  for (auto& v : mean) v /= static_cast<double>(active);

  KeyEstimate best;
  double best_r = -2.0;
  for (int tonic = 0; tonic < 12; ++tonic) {
    for (Mode mode : {Mode::major, Mode::minor}) {
      const auto& profile = mode == Mode::major ? detail::kk_major : detail::kk_minor;
      std::array<double, 12> rotated{};
      for (int pc = 0; pc < 12; ++pc) {
        rotated[static_cast<std::size_t>(pc)] =
            profile[static_cast<std::size_t>(((pc - tonic) % 12 + 12) % 12)];
      }
      double r = detail::pearson12(mean, rotated);
      if (r > best_r) {
        best_r = r;
        best = {tonic, mode, r};
      }
    }
  }
  return best;
}

/// Normalized circle-of-fifths distance between two keys: minor keys are
/// first mapped to major (relative by default, parallel as the configured
/// alternative), then the minimal number of perfect-fifth steps between the
/// tonics is divided by 6. 0 = same circle position, 1 = tritone apart.
inline double cof_distance(const KeyEstimate& k1, const KeyEstimate& k2,
                           const EvalConfig& cfg = {}) {
  auto to_major_tonic = [&](const KeyEstimate& k) {
    if (k.mode == Mode::major) return k.tonic;
    return cfg.cof_minor_mapping == "parallel" ? k.tonic : (k.tonic + 3) % 12;
  };
  int t1 = to_major_tonic(k1);
  int t2 = to_major_tonic(k2);
  // 7 is its own inverse mod 12, so this counts fifth-steps from t1 to t2.
  int steps = (7 * (((t2 - t1) % 12 + 12) % 12)) % 12;
  return std::min(steps, 12 - steps) / 6.0;
}

/// Frame-wise best match against 24 L2-normalized binary triad templates,
/// median-smoothed, then merged into labeled spans. Silent frames become
/// no-chord. The sequence covers [0, frames * hop).
inline ChordSequence estimate_chords(const Chromagram& ch, const EvalConfig& cfg = {}) {
  const int n = static_cast<int>(ch.frames.size());
  std::vector<int> labels(static_cast<std::size_t>(n), -1);  // 0-11 maj, 12-23 min, -1 N

  const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
  for (int f = 0; f < n; ++f) {
    const auto& row = ch.frames[static_cast<std::size_t>(f)];
    double peak = *std::max_element(row.begin(), row.end());
    if (peak <= 0.0) continue;
    int best = -1;
    double best_score = 0.0;
    for (int label = 0; label < 24; ++label) {
      int root = label % 12;
      int third = label < 12 ? 4 : 3;
      double score = inv_sqrt3 * (row[static_cast<std::size_t>(root)] +
                                  row[static_cast<std::size_t>((root + third) % 12)] +
                                  row[static_cast<std::size_t>((root + 7) % 12)]);
      if (score > best_score) {
        best_score = score;
        best = label;
      }
    }
    labels[static_cast<std::size_t>(f)] = best;
  }

  // Median over the label window; shrinks at the edges.
  std::vector<int> smoothed(labels);
  const int half = cfg.chord_median_frames / 2;
  std::vector<int> window;
  for (int f = 0; f < n; ++f) {
    window.clear();
    for (int j = std::max(0, f - half); j <= std::min(n - 1, f + half); ++j) {
      window.push_back(labels[static_cast<std::size_t>(j)]);
    }
    std::nth_element(window.begin(), window.begin() + window.size() / 2, window.end());
    smoothed[static_cast<std::size_t>(f)] = window[window.size() / 2];
  }

  auto to_chord = [](int label) {
    if (label < 0) return Chord{};
    return Chord{label % 12, label >= 12};
  };

  ChordSequence seq;
  if (n == 0) return seq;
  int run_start = 0;
  for (int f = 1; f <= n; ++f) {
    if (f == n || smoothed[static_cast<std::size_t>(f)] != smoothed[static_cast<std::size_t>(run_start)]) {
      seq.spans.push_back({run_start * ch.frame_hop, f * ch.frame_hop,
                           to_chord(smoothed[static_cast<std::size_t>(run_start)])});
      run_start = f;
    }
  }
  return seq;
}

/// Duration-weighted chord agreement over the common span. An instant scores
/// 1 when root and quality match (or both sides are no-chord), else 0; the
/// configurable partial-credit variant gives 0.5 for a root-only match.
inline double majmin_score(const ChordSequence& ref, const ChordSequence& est,
                           const EvalConfig& cfg = {}) {
  const double span = std::min(ref.duration(), est.duration());
  if (span <= 0.0) {
    throw McpError(ErrorCode::degenerate_input, "majmin_score: zero common duration");
  }

  std::vector<double> cuts;
  for (const auto& s : ref.spans) {
    if (s.start < span) cuts.push_back(s.start);
  }
  for (const auto& s : est.spans) {
    if (s.start < span) cuts.push_back(s.start);
  }
  cuts.push_back(0.0);
  cuts.push_back(span);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto chord_at = [](const ChordSequence& seq, double t) {
    for (const auto& s : seq.spans) {
      if (t >= s.start && t < s.end) return s.chord;
    }
    return Chord{};
  };

  double score = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    double len = cuts[i + 1] - cuts[i];
    Chord a = chord_at(ref, mid);
    Chord b = chord_at(est, mid);
    if (a == b) {
      score += len;
    } else if (cfg.majmin_partial_credit && a.is_chord() && b.is_chord() &&
               a.root == b.root) {
      score += 0.5 * len;
    }
  }
  return score / span;
}

namespace detail {

/// Cosine distance in [0, 1] between non-negative chroma rows; an all-zero
/// row is at distance 0 from another all-zero row and 1 from anything else.
inline double chroma_cosine_distance(const std::array<double, 12>& a,
                                     const std::array<double, 12>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (int i = 0; i < 12; ++i) {
    dot += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
    na += a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(i)];
    nb += b[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
  }
  bool za = na <= 0.0, zb = nb <= 0.0;
  if (za && zb) return 0.0;
  if (za || zb) return 1.0;
  double d = 1.0 - dot / std::sqrt(na * nb);
  return std::clamp(d, 0.0, 1.0);
}

}  // namespace detail

/// DTW similarity between two chromagrams: unweighted steps
/// {(1,0),(0,1),(1,1)}, cosine frame distance, total path cost normalized by
/// path length (cells on the path). Among equal-cost paths the shorter one is
/// taken, which makes the normalization well defined.
inline double chroma_dtw_similarity(const Chromagram& ref, const Chromagram& est) {
  const std::size_t n = ref.frames.size();
  const std::size_t m = est.frames.size();
  if (n == 0 || m == 0) {
    throw McpError(ErrorCode::degenerate_input, "chroma_dtw_similarity: empty chromagram");
  }

  struct Cell {
    double cost;
    int len;
  };
  auto better = [](const Cell& a, const Cell& b) {
    return a.cost < b.cost || (a.cost == b.cost && a.len < b.len);
  };

  std::vector<Cell> prev(m), cur(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double c = detail::chroma_cosine_distance(ref.frames[i], est.frames[j]);
      Cell base;
      if (i == 0 && j == 0) {
        base = {0.0, 0};
      } else if (i == 0) {
        base = cur[j - 1];
      } else if (j == 0) {
        base = prev[j];
      } else {
        base = prev[j - 1];
        if (better(prev[j], base)) base = prev[j];
        if (better(cur[j - 1], base)) base = cur[j - 1];
      }
      cur[j] = {base.cost + c, base.len + 1};
    }
    std::swap(prev, cur);
  }
  const Cell& end = prev[m - 1];
  return std::clamp(1.0 - end.cost / end.len, 0.0, 1.0);
}

struct HarmonyScores {
  MetricValue cof_distance;
  MetricValue chroma_dtw_similarity;
  MetricValue majmin_score;
};

/// Harmony facet over a (reference, estimate) clip pair.
inline HarmonyScores eval_harmony(const AudioClip& ref, const AudioClip& est,
                                  const EvalConfig& cfg = {}) {
  Chromagram ref_ch = chromagram(ref, cfg);
  Chromagram est_ch = chromagram(est, cfg);

  HarmonyScores scores;
  try {
    KeyEstimate k1 = estimate_key(ref_ch);
    KeyEstimate k2 = estimate_key(est_ch);
    scores.cof_distance = MetricValue::of(cof_distance(k1, k2, cfg));
  } catch (const McpError& e) {
    if (e.code() != ErrorCode::no_key) throw;
    scores.cof_distance = MetricValue::missing("no-key");
  }
  scores.chroma_dtw_similarity = MetricValue::of(chroma_dtw_similarity(ref_ch, est_ch));
  scores.majmin_score =
      MetricValue::of(majmin_score(estimate_chords(ref_ch, cfg), estimate_chords(est_ch, cfg), cfg));
  return scores;
}

}  // namespace musecp
