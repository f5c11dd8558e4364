#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace musecp {

/// Static description of one metric: identity, facet grouping, direction,
/// and a plain-language definition (served by the CLI's --explain).
struct MetricInfo {
  std::string_view id;
  std::string_view display;
  std::string_view facet;
  bool higher_better;
  bool headline;  // one of the 11 headline metrics (vs a diagnostic extra)
  std::string_view definition;
};

/// Headline metrics in report order: the two facet blocks of the summary
/// table, then diagnostics.
inline constexpr std::array<MetricInfo, 15> kMetrics = {{
    {"cof_distance", "Circle of Fifths Distance", "Harmony & Tonality", false, true,
     "Normalized circle-of-fifths distance between the estimated keys of the two clips. "
     "Minor keys map to their relative major; the minimal number of perfect-fifth steps "
     "between tonics is divided by 6. 0 = harmonically identical, 1 = maximally distant."},
    {"chroma_dtw_similarity", "Chroma DTW Similarity", "Harmony & Tonality", true, true,
     "Dynamic-time-warping similarity between the two chroma sequences: cosine frame "
     "distance, unweighted steps (1,0),(0,1),(1,1), total path cost divided by path "
     "length, subtracted from 1. 1 = identical sequences, 0 = completely different."},
    {"majmin_score", "Major-Minor Score", "Harmony & Tonality", true, true,
     "Duration-weighted agreement of the estimated chord sequences: an instant counts "
     "when root and major/minor quality match (or both sides are no-chord). "
     "1 = complete agreement, 0 = maximal difference."},
    {"delta_bpm", "Delta BPM", "Rhythm & Meter", false, true,
     "Absolute difference of the two estimated global tempi in BPM. 0 = no difference."},
    {"beat_f_measure", "Beat F-measure", "Rhythm & Meter", true, true,
     "F-measure of estimated beats matched one-to-one to reference beats within a 70 ms "
     "window. 1 = perfect alignment, 0 = no correct hits."},
    {"information_gain", "Information Gain", "Rhythm & Meter", true, true,
     "Entropy reduction of the normalized beat-error histogram relative to a uniform "
     "baseline, divided by its ceiling log2(bins). 1 = all errors in one bin, "
     "0 = no improvement over random. The raw value in bits is reported alongside."},
    {"adjusted_rand_index", "Adjusted Rand Index", "Structural Form", true, true,
     "Chance-corrected pair-counting agreement between the two section labelings on a "
     "common frame grid, clamped to [0, 1]. 1 = identical segment groupings; the raw "
     "(possibly negative) value is reported alongside."},
    {"boundary_f_measure", "Boundary F-measure", "Structural Form", true, true,
     "F-measure of detected internal section boundaries within a 3 s window. Two clips "
     "with no internal boundaries agree perfectly (1.0). A 0.5 s variant is reported "
     "alongside."},
    {"voicing_recall", "Voicing Recall", "Melodic Content & Motifs", true, true,
     "Fraction of melody-voiced reference frames that the estimate also voices. "
     "1 = all detected, 0 = none. A pitch-gated variant (within 50 cents) is reported "
     "alongside."},
    {"motif_jaccard", "Motif Overlap Jaccard", "Melodic Content & Motifs", true, true,
     "Jaccard overlap of the melodic interval 3-gram sets of the two clips. "
     "1 = all patterns match (or both clips have none), 0 = none shared."},
    {"motif_recall", "Motif Overlap Recall", "Melodic Content & Motifs", true, true,
     "Fraction of the reference clip's interval 3-grams also present in the estimate. "
     "1 = all reproduced, 0 = none."},
    {"information_gain_raw", "Information Gain (bits)", "Rhythm & Meter", true, false,
     "Unnormalized information gain of the beat-error histogram in bits."},
    {"adjusted_rand_index_raw", "Adjusted Rand Index (raw)", "Structural Form", true, false,
     "Adjusted Rand Index before clamping; may be negative for sub-random agreement."},
    {"boundary_f_measure_strict", "Boundary F-measure (0.5 s)", "Structural Form", true, false,
     "Boundary F-measure with the stricter 0.5 s hit window."},
    {"voicing_recall_pitched", "Voicing Recall (pitch-gated)", "Melodic Content & Motifs",
     true, false,
     "Voicing recall that additionally requires the estimated pitch to lie within "
     "50 cents of the reference pitch."},
}};

inline const MetricInfo* find_metric(std::string_view id) {
  for (const auto& m : kMetrics) {
    if (m.id == id) return &m;
  }
  return nullptr;
}

inline constexpr std::size_t kHeadlineCount = 11;

}  // namespace musecp
