#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <tuple>
#include <vector>

#include "musecp/audio.hpp"
#include "musecp/config.hpp"
#include "musecp/error.hpp"
#include "musecp/features.hpp"
#include "musecp/metric_value.hpp"

namespace musecp {

struct Segmentation {
  std::vector<double> boundaries;   // sorted, first = 0, last = duration
  std::vector<int> frame_labels;    // section id per label_hop frame
  double label_hop = 0.5;           // seconds

  std::vector<double> internal_boundaries() const {
    if (boundaries.size() <= 2) return {};
    return {boundaries.begin() + 1, boundaries.end() - 1};
  }
};

namespace detail {

inline double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

}  // namespace detail

/// Segment a clip into labeled sections. Pipeline: chroma + z-scored mel
/// timbre per frame, mean-pooled to ~0.23 s structure frames; cosine
/// self-similarity; Gaussian-tapered checkerboard novelty; peaks above an
/// adaptive (mean + sigma) threshold and an absolute floor, separated by the
/// minimum gap, become boundaries; segments cluster agglomeratively
/// (average-linkage cosine) under the merge threshold tau.
inline Segmentation segment_structure(const Chromagram& ch,
                                      const std::vector<std::vector<double>>& timbre,
                                      double duration_s, const EvalConfig& cfg = {}) {
  Segmentation seg;
  seg.label_hop = cfg.label_hop_s;

  const std::size_t n = std::min(ch.frames.size(), timbre.size());
  const std::size_t pool = static_cast<std::size_t>(cfg.structure_pool_frames);
  const double pool_hop = ch.frame_hop * static_cast<double>(pool);
  const std::size_t n_struct = n / pool;

  // Per-band z-score of the timbre features, so band usage (not absolute
  // level) drives the similarity.
  std::vector<std::vector<double>> tz(n);
  const std::size_t bands = timbre.empty() ? 0 : timbre.front().size();
  std::vector<double> mu(bands, 0.0), sd(bands, 0.0);
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t b = 0; b < bands; ++b) mu[b] += timbre[f][b];
  }
  for (auto& v : mu) v /= std::max<std::size_t>(n, 1);
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t b = 0; b < bands; ++b) {
      double d = timbre[f][b] - mu[b];
      sd[b] += d * d;
    }
  }
  for (auto& v : sd) v = std::sqrt(v / std::max<std::size_t>(n, 1));
  for (std::size_t f = 0; f < n; ++f) {
    tz[f].resize(bands);
    for (std::size_t b = 0; b < bands; ++b) {
      tz[f][b] = sd[b] > 1e-12 ? (timbre[f][b] - mu[b]) / sd[b] : 0.0;
    }
  }

  // Pooled embeddings: unit-normalized chroma ++ unit-normalized timbre, so
  // the cosine of the concatenation averages the two facet cosines.
  auto unit = [](std::vector<double> v) {
    double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (norm > 1e-12) {
      for (auto& x : v) x /= norm;
    }
    return v;
  };
  std::vector<std::vector<double>> embed(n_struct);
  for (std::size_t s = 0; s < n_struct; ++s) {
    std::vector<double> cmean(12, 0.0), tmean(bands, 0.0);
    for (std::size_t f = s * pool; f < (s + 1) * pool; ++f) {
      for (std::size_t i = 0; i < 12; ++i) cmean[i] += ch.frames[f][i];
      for (std::size_t b = 0; b < bands; ++b) tmean[b] += tz[f][b];
    }
    cmean = unit(std::move(cmean));
    tmean = unit(std::move(tmean));
    auto& e = embed[s];
    e.reserve(12 + bands);
    // scale both halves by 1/sqrt(2) so the concatenation stays unit length
    for (double v : cmean) e.push_back(v / std::numbers::sqrt2);
    for (double v : tmean) e.push_back(v / std::numbers::sqrt2);
  }

  const auto radius =
      static_cast<std::size_t>(std::llround(cfg.novelty_kernel_s / (2.0 * pool_hop)));
  std::vector<double> boundaries_s;

  if (duration_s >= 4.0 && n_struct >= 2 * radius + 1 && radius >= 2) {
    std::vector<std::vector<double>> ssm(n_struct, std::vector<double>(n_struct, 0.0));
    for (std::size_t i = 0; i < n_struct; ++i) {
      for (std::size_t j = i; j < n_struct; ++j) {
        double s = detail::cosine_similarity(embed[i], embed[j]);
        ssm[i][j] = s;
        ssm[j][i] = s;
      }
    }

    // Gaussian-tapered checkerboard kernel, normalized by its L1 mass.
    const double sigma = static_cast<double>(radius) / 2.0;
    std::vector<double> taper(2 * radius + 1);
    for (std::size_t i = 0; i < taper.size(); ++i) {
      double u = static_cast<double>(i) - static_cast<double>(radius);
      taper[i] = std::exp(-0.5 * (u / sigma) * (u / sigma));
    }
    std::vector<double> novelty(n_struct, 0.0);
    for (std::size_t t = radius; t + radius < n_struct; ++t) {
      double acc = 0.0, mass = 0.0;
      for (std::size_t a = 0; a < taper.size(); ++a) {
        auto u = static_cast<std::ptrdiff_t>(a) - static_cast<std::ptrdiff_t>(radius);
        if (u == 0) continue;
        for (std::size_t b = 0; b < taper.size(); ++b) {
          auto v = static_cast<std::ptrdiff_t>(b) - static_cast<std::ptrdiff_t>(radius);
          if (v == 0) continue;
          double w = taper[a] * taper[b];
          double sign = (u > 0) == (v > 0) ? 1.0 : -1.0;
          acc += sign * w * ssm[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(t) + u)]
                            [static_cast<std::size_t>(static_cast<std::ptrdiff_t>(t) + v)];
          mass += w;
        }
      }
      novelty[t] = mass > 0 ? acc / mass : 0.0;
    }

    double mean = 0.0;
    std::size_t valid = 0;
    for (std::size_t t = radius; t + radius < n_struct; ++t) {
      mean += novelty[t];
      ++valid;
    }
    mean /= std::max<std::size_t>(valid, 1);
    double var = 0.0;
    for (std::size_t t = radius; t + radius < n_struct; ++t) {
      var += (novelty[t] - mean) * (novelty[t] - mean);
    }
    double threshold = mean + std::sqrt(var / std::max<std::size_t>(valid, 1));
    threshold = std::max(threshold, cfg.novelty_floor);

    struct Peak {
      double value;
      std::size_t frame;
    };
    std::vector<Peak> peaks;
    for (std::size_t t = radius; t + radius < n_struct; ++t) {
      if (novelty[t] >= threshold && (t == 0 || novelty[t] >= novelty[t - 1]) &&
          (t + 1 == n_struct || novelty[t] > novelty[t + 1])) {
        peaks.push_back({novelty[t], t});
      }
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const Peak& a, const Peak& b) { return a.value > b.value; });
    const double min_gap = cfg.boundary_min_gap_s;
    const double frame_offset =
        0.5 * pool_hop + 0.5 * cfg.stft_window / cfg.analysis_rate_hz;
    std::vector<double> accepted;
    for (const auto& p : peaks) {
      double t_s = static_cast<double>(p.frame) * pool_hop + frame_offset;
      bool clash = false;
      for (double a : accepted) {
        if (std::abs(a - t_s) < min_gap) {
          clash = true;
          break;
        }
      }
      if (!clash && t_s > 0.0 && t_s < duration_s) accepted.push_back(t_s);
    }
    std::sort(accepted.begin(), accepted.end());
    boundaries_s = std::move(accepted);
  }

  seg.boundaries.push_back(0.0);
  for (double b : boundaries_s) seg.boundaries.push_back(b);
  seg.boundaries.push_back(duration_s);

  // Label segments by agglomerative clustering of their mean embeddings.
  const std::size_t n_seg = seg.boundaries.size() - 1;
  std::vector<std::vector<double>> seg_vec(n_seg);
  for (std::size_t s = 0; s < n_seg; ++s) {
    double lo = seg.boundaries[s], hi = seg.boundaries[s + 1];
    std::vector<double> acc;
    std::size_t count = 0;
    for (std::size_t t = 0; t < n_struct; ++t) {
      double center = static_cast<double>(t) * pool_hop + 0.5 * pool_hop;
      if (center >= lo && center < hi) {
        if (acc.empty()) acc.assign(embed[t].size(), 0.0);
        for (std::size_t i = 0; i < embed[t].size(); ++i) acc[i] += embed[t][i];
        ++count;
      }
    }
    if (count == 0) acc.assign(12 + bands, 0.0);
    seg_vec[s] = std::move(acc);
  }

  std::vector<std::vector<std::size_t>> clusters(n_seg);
  for (std::size_t s = 0; s < n_seg; ++s) clusters[s] = {s};
  auto cluster_distance = [&](const std::vector<std::size_t>& a,
                              const std::vector<std::size_t>& b) {
    double acc = 0.0;
    for (std::size_t i : a) {
      for (std::size_t j : b) {
        acc += 1.0 - detail::cosine_similarity(seg_vec[i], seg_vec[j]);
      }
    }
    return acc / static_cast<double>(a.size() * b.size());
  };
  while (clusters.size() > 1) {
    double best = cfg.cluster_tau;
    std::size_t bi = 0, bj = 0;
    bool found = false;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        double d = cluster_distance(clusters[i], clusters[j]);
        if (d <= best) {
          best = d;
          bi = i;
          bj = j;
          found = true;
        }
      }
    }
    if (!found) break;
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
  }

  std::vector<int> seg_label(n_seg, -1);
  for (auto& members : clusters) std::sort(members.begin(), members.end());
  std::sort(clusters.begin(), clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (std::size_t s : clusters[c]) seg_label[s] = static_cast<int>(c);
  }

  const auto n_labels = static_cast<std::size_t>(std::ceil(duration_s / cfg.label_hop_s));
  seg.frame_labels.resize(std::max<std::size_t>(n_labels, 1));
  for (std::size_t i = 0; i < seg.frame_labels.size(); ++i) {
    double t = (static_cast<double>(i) + 0.5) * cfg.label_hop_s;
    std::size_t s = 0;
    while (s + 1 < n_seg && t >= seg.boundaries[s + 1]) ++s;
    seg.frame_labels[i] = seg_label[s];
  }
  return seg;
}

/// F-measure over internal boundaries within +-window seconds. Two
/// segmentations with no internal boundaries agree perfectly (1.0); if
/// exactly one side has none, the score is 0.
inline double boundary_f_measure(const Segmentation& ref, const Segmentation& est,
                                 double window = 3.0) {
  auto rb = ref.internal_boundaries();
  auto eb = est.internal_boundaries();
  if (rb.empty() && eb.empty()) return 1.0;
  if (rb.empty() || eb.empty()) return 0.0;

  std::vector<std::tuple<double, std::size_t, std::size_t>> cands;
  for (std::size_t i = 0; i < rb.size(); ++i) {
    for (std::size_t j = 0; j < eb.size(); ++j) {
      double d = std::abs(rb[i] - eb[j]);
      if (d <= window) cands.emplace_back(d, i, j);
    }
  }
  std::sort(cands.begin(), cands.end());
  std::vector<char> ru(rb.size(), 0), eu(eb.size(), 0);
  std::size_t matches = 0;
  for (const auto& [d, i, j] : cands) {
    if (!ru[i] && !eu[j]) {
      ru[i] = eu[j] = 1;
      ++matches;
    }
  }
  double precision = static_cast<double>(matches) / static_cast<double>(eb.size());
  double recall = static_cast<double>(matches) / static_cast<double>(rb.size());
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

struct AriResult {
  double value = 0.0;  // clamped to [0, 1]
  double raw = 0.0;    // may be negative
};

/// Adjusted Rand Index over the two frame labelings, truncated to the common
/// length. Computed from the contingency table; the headline value clamps
/// negative raw scores to 0.
inline AriResult adjusted_rand_index(const Segmentation& ref, const Segmentation& est) {
  const std::size_t n = std::min(ref.frame_labels.size(), est.frame_labels.size());
  if (n < 2) {
    throw McpError(ErrorCode::degenerate_input, "adjusted_rand_index: need >= 2 frames");
  }

  auto relabel = [n](const std::vector<int>& labels) {
    std::vector<int> out(n);
    std::vector<int> seen;
    for (std::size_t i = 0; i < n; ++i) {
      auto it = std::find(seen.begin(), seen.end(), labels[i]);
      if (it == seen.end()) {
        seen.push_back(labels[i]);
        out[i] = static_cast<int>(seen.size()) - 1;
      } else {
        out[i] = static_cast<int>(it - seen.begin());
      }
    }
    return out;
  };
  std::vector<int> a = relabel(ref.frame_labels);
  std::vector<int> b = relabel(est.frame_labels);
  const int ka = *std::max_element(a.begin(), a.end()) + 1;
  const int kb = *std::max_element(b.begin(), b.end()) + 1;

  std::vector<std::vector<long long>> table(static_cast<std::size_t>(ka),
                                            std::vector<long long>(static_cast<std::size_t>(kb), 0));
  for (std::size_t i = 0; i < n; ++i) {
    ++table[static_cast<std::size_t>(a[i])][static_cast<std::size_t>(b[i])];
  }

  auto choose2 = [](long long x) { return x * (x - 1) / 2; };
  long long same_both = 0, same_ref = 0, same_est = 0;
  std::vector<long long> row_sum(static_cast<std::size_t>(ka), 0);
  std::vector<long long> col_sum(static_cast<std::size_t>(kb), 0);
  for (int i = 0; i < ka; ++i) {
    for (int j = 0; j < kb; ++j) {
      long long c = table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      same_both += choose2(c);
      row_sum[static_cast<std::size_t>(i)] += c;
      col_sum[static_cast<std::size_t>(j)] += c;
    }
  }
  for (long long r : row_sum) same_ref += choose2(r);
  for (long long c : col_sum) same_est += choose2(c);

  long long mismatches = (same_ref - same_both) + (same_est - same_both);
  AriResult out;
  if (mismatches == 0) {
    out.raw = 1.0;
    out.value = 1.0;
    return out;
  }
  const double total = static_cast<double>(choose2(static_cast<long long>(n)));
  const double expected = static_cast<double>(same_ref) * static_cast<double>(same_est) / total;
  const double max_index = 0.5 * static_cast<double>(same_ref + same_est);
  out.raw = (static_cast<double>(same_both) - expected) / (max_index - expected);
  out.value = std::clamp(out.raw, 0.0, 1.0);
  return out;
}

struct StructureScores {
  MetricValue adjusted_rand_index;
  MetricValue adjusted_rand_index_raw;
  MetricValue boundary_f_measure;
  MetricValue boundary_f_measure_strict;  // the tighter alt window
};

/// Structural-form facet over a clip pair.
inline StructureScores eval_structure(const AudioClip& ref, const AudioClip& est,
                                      const EvalConfig& cfg = {}) {
  auto segment = [&](const AudioClip& clip) {
    Chromagram ch = chromagram(clip, cfg);
    Spectrogram spec = stft(clip, cfg);
    auto timbre = timbre_features(spec, cfg.timbre_bands, cfg);
    return segment_structure(ch, timbre, clip.duration_seconds(), cfg);
  };
  Segmentation rseg = segment(ref);
  Segmentation eseg = segment(est);

  StructureScores scores;
  AriResult ari = adjusted_rand_index(rseg, eseg);
  scores.adjusted_rand_index = MetricValue::of(ari.value);
  scores.adjusted_rand_index_raw = MetricValue::of(ari.raw);
  scores.boundary_f_measure =
      MetricValue::of(boundary_f_measure(rseg, eseg, cfg.boundary_window_s));
  scores.boundary_f_measure_strict =
      MetricValue::of(boundary_f_measure(rseg, eseg, cfg.boundary_window_alt_s));
  return scores;
}

}  // namespace musecp
