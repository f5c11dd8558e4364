#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "musecp/error.hpp"

namespace musecp {

/// Every tunable constant in the evaluation protocol, with its default.
/// Reports embed a fingerprint of the full set so protocol drift between two
/// runs is always detectable.
struct EvalConfig {
  // audio-io
  double analysis_rate_hz = 22050.0;  // all analysis runs at this rate, mono
  double min_clip_seconds = 1.0;      // shorter clips are rejected

  // dsp-features
  int stft_window = 2048;          // samples, power of two
  int stft_hop = 512;              // samples
  double silence_rms = 1e-4;       // frame RMS below this = silent
  double energy_floor = 1e-10;     // added inside every log
  double chroma_fmin_hz = 65.0;    // C2
  double chroma_fmax_hz = 2093.0;  // C7
  int timbre_bands = 8;            // mel bands for the structure features

  // harmony
  int chord_median_frames = 9;          // label smoothing width (~0.2 s)
  bool majmin_partial_credit = false;   // 0.5 credit for root-only match
  std::string cof_minor_mapping = "relative";  // or "parallel"
  std::string dtw_steps = "basic";             // {(1,0),(0,1),(1,1)}, unweighted

  // rhythm
  double tempo_min_bpm = 60.0;
  double tempo_max_bpm = 200.0;
  double tempo_prior_bpm = 120.0;
  double tempo_prior_octave_sigma = 1.0;  // log2-domain width of the prior
  double beat_tightness = 200.0;          // DP transition weight (lambda)
  double beat_window_s = 0.07;            // F-measure hit window
  int info_gain_bins = 41;

  // structure
  double novelty_kernel_s = 8.0;   // checkerboard kernel full width
  double novelty_floor = 0.1;      // absolute peak floor on the unit-scaled curve
  double boundary_min_gap_s = 4.0; // peak separation
  double boundary_window_s = 3.0;  // F-measure hit window (headline)
  double boundary_window_alt_s = 0.5;  // stricter window, reported alongside
  double cluster_tau = 0.15;       // agglomerative merge threshold (cosine)
  double label_hop_s = 0.5;        // frame-label grid for ARI
  int structure_pool_frames = 10;  // STFT frames pooled per structure frame

  // melody
  double yin_threshold = 0.15;
  double pitch_fmin_hz = 55.0;
  double pitch_fmax_hz = 1760.0;
  int yin_window = 1024;
  double note_gap_s = 0.10;       // unvoiced gap that splits notes
  double note_min_s = 0.08;       // shorter notes are dropped
  double pitch_gate_cents = 50.0; // tolerance of the pitch-gated recall variant

  void validate() const {
    auto fail = [](const std::string& what) {
      throw McpError(ErrorCode::invalid_argument, "config: " + what);
    };
    if (analysis_rate_hz <= 0) fail("analysis_rate_hz must be positive");
    if (min_clip_seconds <= 0) fail("min_clip_seconds must be positive");
    if (stft_window < 64 || (stft_window & (stft_window - 1)) != 0) {
      fail("stft_window must be a power of two >= 64");
    }
    if (stft_hop <= 0 || stft_hop > stft_window) fail("stft_hop must be in (0, window]");
    if (silence_rms <= 0) fail("silence_rms must be positive");
    if (energy_floor <= 0) fail("energy_floor must be positive");
    if (chroma_fmin_hz <= 0 || chroma_fmax_hz <= chroma_fmin_hz) {
      fail("chroma band must satisfy 0 < fmin < fmax");
    }
    if (timbre_bands < 4) fail("timbre_bands must be >= 4");
    if (chord_median_frames < 1 || chord_median_frames % 2 == 0) {
      fail("chord_median_frames must be odd and >= 1");
    }
    if (cof_minor_mapping != "relative" && cof_minor_mapping != "parallel") {
      fail("cof_minor_mapping must be 'relative' or 'parallel'");
    }
    if (dtw_steps != "basic") fail("dtw_steps: only 'basic' is implemented");
    if (tempo_min_bpm < 40 || tempo_max_bpm > 240 || tempo_min_bpm >= tempo_max_bpm) {
      fail("tempo range must satisfy 40 <= min < max <= 240");
    }
    if (tempo_prior_bpm < tempo_min_bpm || tempo_prior_bpm > tempo_max_bpm) {
      fail("tempo_prior_bpm must lie inside the tempo range");
    }
    if (tempo_prior_octave_sigma <= 0) fail("tempo_prior_octave_sigma must be positive");
    if (beat_tightness <= 0) fail("beat_tightness must be positive");
    if (beat_window_s <= 0 || beat_window_s > 1.0) fail("beat_window_s must be in (0, 1]");
    if (info_gain_bins < 2) fail("info_gain_bins must be >= 2");
    if (novelty_kernel_s <= 0) fail("novelty_kernel_s must be positive");
    if (novelty_floor < 0 || novelty_floor > 1) fail("novelty_floor must be in [0, 1]");
    if (boundary_min_gap_s <= 0) fail("boundary_min_gap_s must be positive");
    if (boundary_window_s <= 0) fail("boundary_window_s must be positive");
    if (boundary_window_alt_s <= 0) fail("boundary_window_alt_s must be positive");
    if (cluster_tau <= 0 || cluster_tau >= 2) fail("cluster_tau must be in (0, 2)");
    if (label_hop_s <= 0) fail("label_hop_s must be positive");
    if (structure_pool_frames < 1) fail("structure_pool_frames must be >= 1");
    if (yin_threshold <= 0 || yin_threshold >= 1) fail("yin_threshold must be in (0, 1)");
    if (pitch_fmin_hz < 27.5 || pitch_fmax_hz > 4186.0 || pitch_fmin_hz >= pitch_fmax_hz) {
      fail("pitch range must satisfy 27.5 <= fmin < fmax <= 4186");
    }
    if (yin_window < 256 || (yin_window & (yin_window - 1)) != 0) {
      fail("yin_window must be a power of two >= 256");
    }
    if (note_gap_s <= 0) fail("note_gap_s must be positive");
    if (note_min_s <= 0) fail("note_min_s must be positive");
    if (pitch_gate_cents <= 0) fail("pitch_gate_cents must be positive");
  }

  /// Canonical key=value rendering; the fingerprint hashes this string, so
  /// key order here is part of the report contract.
  std::string canonical_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "analysis_rate_hz=" << analysis_rate_hz << '\n'
       << "min_clip_seconds=" << min_clip_seconds << '\n'
       << "stft_window=" << stft_window << '\n'
       << "stft_hop=" << stft_hop << '\n'
       << "silence_rms=" << silence_rms << '\n'
       << "energy_floor=" << energy_floor << '\n'
       << "chroma_fmin_hz=" << chroma_fmin_hz << '\n'
       << "chroma_fmax_hz=" << chroma_fmax_hz << '\n'
       << "timbre_bands=" << timbre_bands << '\n'
       << "chord_median_frames=" << chord_median_frames << '\n'
       << "majmin_partial_credit=" << (majmin_partial_credit ? 1 : 0) << '\n'
       << "cof_minor_mapping=" << cof_minor_mapping << '\n'
       << "dtw_steps=" << dtw_steps << '\n'
       << "tempo_min_bpm=" << tempo_min_bpm << '\n'
       << "tempo_max_bpm=" << tempo_max_bpm << '\n'
       << "tempo_prior_bpm=" << tempo_prior_bpm << '\n'
       << "tempo_prior_octave_sigma=" << tempo_prior_octave_sigma << '\n'
       << "beat_tightness=" << beat_tightness << '\n'
       << "beat_window_s=" << beat_window_s << '\n'
       << "info_gain_bins=" << info_gain_bins << '\n'
       << "novelty_kernel_s=" << novelty_kernel_s << '\n'
       << "novelty_floor=" << novelty_floor << '\n'
       << "boundary_min_gap_s=" << boundary_min_gap_s << '\n'
       << "boundary_window_s=" << boundary_window_s << '\n'
       << "boundary_window_alt_s=" << boundary_window_alt_s << '\n'
       << "cluster_tau=" << cluster_tau << '\n'
       << "label_hop_s=" << label_hop_s << '\n'
       << "structure_pool_frames=" << structure_pool_frames << '\n'
       << "yin_threshold=" << yin_threshold << '\n'
       << "pitch_fmin_hz=" << pitch_fmin_hz << '\n'
       << "pitch_fmax_hz=" << pitch_fmax_hz << '\n'
       << "yin_window=" << yin_window << '\n'
       << "note_gap_s=" << note_gap_s << '\n'
       << "note_min_s=" << note_min_s << '\n'
       << "pitch_gate_cents=" << pitch_gate_cents << '\n';
    return os.str();
  }

  /// FNV-1a over the canonical text, rendered as 16 hex digits.
  std::string fingerprint() const {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical_text()) {
      h ^= c;
      h *= 1099511628211ull;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = digits[h & 0xf];
      h >>= 4;
    }
    return out;
  }
};

/// Parse a key=value config file ('#' starts a comment). Unknown keys and
/// out-of-range values are hard errors; an absent file means all defaults.
inline EvalConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw McpError(ErrorCode::io_error, "cannot open config: " + path.string());
  }
  EvalConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    std::string trimmed;
    for (char c : line) {
      if (!is_space(c)) trimmed += c;
    }
    if (trimmed.empty()) continue;
    auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw McpError(ErrorCode::parse_error, "config line " + std::to_string(line_no) +
                                                 ": expected key=value");
    }
    std::string key = trimmed.substr(0, eq);
    std::string value = trimmed.substr(eq + 1);
    auto as_double = [&]() {
      try {
        return std::stod(value);
      } catch (...) {
        throw McpError(ErrorCode::parse_error, "config line " + std::to_string(line_no) +
                                                   ": bad number '" + value + "'");
      }
    };
    auto as_int = [&]() {
      try {
        return std::stoi(value);
      } catch (...) {
        throw McpError(ErrorCode::parse_error, "config line " + std::to_string(line_no) +
                                                   ": bad integer '" + value + "'");
      }
    };
    auto as_bool = [&]() {
      if (value == "true" || value == "1") return true;
      if (value == "false" || value == "0") return false;
      throw McpError(ErrorCode::parse_error,
                     "config line " + std::to_string(line_no) + ": bad bool '" + value + "'");
    };

    if (key == "analysis_rate_hz") cfg.analysis_rate_hz = as_double();
    else if (key == "min_clip_seconds") cfg.min_clip_seconds = as_double();
    else if (key == "stft_window") cfg.stft_window = as_int();
    else if (key == "stft_hop") cfg.stft_hop = as_int();
    else if (key == "silence_rms") cfg.silence_rms = as_double();
    else if (key == "energy_floor") cfg.energy_floor = as_double();
    else if (key == "chroma_fmin_hz") cfg.chroma_fmin_hz = as_double();
    else if (key == "chroma_fmax_hz") cfg.chroma_fmax_hz = as_double();
    else if (key == "timbre_bands") cfg.timbre_bands = as_int();
    else if (key == "chord_median_frames") cfg.chord_median_frames = as_int();
    else if (key == "majmin_partial_credit") cfg.majmin_partial_credit = as_bool();
    else if (key == "cof_minor_mapping") cfg.cof_minor_mapping = value;
    else if (key == "dtw_steps") cfg.dtw_steps = value;
    else if (key == "tempo_min_bpm") cfg.tempo_min_bpm = as_double();
    else if (key == "tempo_max_bpm") cfg.tempo_max_bpm = as_double();
    else if (key == "tempo_prior_bpm") cfg.tempo_prior_bpm = as_double();
    else if (key == "tempo_prior_octave_sigma") cfg.tempo_prior_octave_sigma = as_double();
    else if (key == "beat_tightness") cfg.beat_tightness = as_double();
    else if (key == "beat_window_s") cfg.beat_window_s = as_double();
    else if (key == "info_gain_bins") cfg.info_gain_bins = as_int();
    else if (key == "novelty_kernel_s") cfg.novelty_kernel_s = as_double();
    else if (key == "novelty_floor") cfg.novelty_floor = as_double();
    else if (key == "boundary_min_gap_s") cfg.boundary_min_gap_s = as_double();
    else if (key == "boundary_window_s") cfg.boundary_window_s = as_double();
    else if (key == "boundary_window_alt_s") cfg.boundary_window_alt_s = as_double();
    else if (key == "cluster_tau") cfg.cluster_tau = as_double();
    else if (key == "label_hop_s") cfg.label_hop_s = as_double();
    else if (key == "structure_pool_frames") cfg.structure_pool_frames = as_int();
    else if (key == "yin_threshold") cfg.yin_threshold = as_double();
    else if (key == "pitch_fmin_hz") cfg.pitch_fmin_hz = as_double();
    else if (key == "pitch_fmax_hz") cfg.pitch_fmax_hz = as_double();
    else if (key == "yin_window") cfg.yin_window = as_int();
    else if (key == "note_gap_s") cfg.note_gap_s = as_double();
    else if (key == "note_min_s") cfg.note_min_s = as_double();
    else if (key == "pitch_gate_cents") cfg.pitch_gate_cents = as_double();
    else {
      throw McpError(ErrorCode::parse_error,
                     "config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace musecp
