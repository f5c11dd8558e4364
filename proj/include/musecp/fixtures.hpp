#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "musecp/audio.hpp"
#include "musecp/error.hpp"

namespace musecp {

/// Deterministic test-signal generator. Every spec renders to the same
/// sample sequence on every run (noise uses a fixed-seed generator mapped to
/// doubles without distribution objects, which keeps it portable).
struct FixtureSpec {
  enum class Kind {
    silence,
    click_track,   // bpm, duration, first_click_s, optional dropped beat
    sine,          // frequency_hz, duration (optional vibrato)
    melody,        // notes looped to duration
    triad_loop,    // block triad re-articulated at bpm
    scale,         // one-octave ascending scale looped (8 notes incl. octave)
    noise,         // seeded white noise, or random-phase sine bank in a band
    concat,        // parts back to back
    mix,           // parts summed with per-part gain
  };

  struct Note {
    int midi = 69;
    double duration_s = 0.25;
  };

  Kind kind = Kind::silence;
  double sample_rate = 22050.0;
  double duration_s = 1.0;
  double bpm = 120.0;
  double first_click_s = 0.25;
  int dropped_beat = -1;           // click index to silence, -1 = none
  double click_carrier_hz = 2500;  // above the chroma band, below Nyquist/2
  double frequency_hz = 440.0;
  double vibrato_cents = 0.0;
  double vibrato_rate_hz = 5.0;
  std::vector<Note> notes;
  int root_midi = 60;
  bool minor = false;
  double note_duration_s = 0.25;
  std::uint32_t seed = 1;
  double band_lo_hz = 0.0;  // both zero = per-sample white noise
  double band_hi_hz = 0.0;
  double gain = 0.7;
  std::vector<FixtureSpec> parts;
  std::vector<double> part_gains;  // mix only; defaults to 1.0 each

  static FixtureSpec silence(double seconds, double rate = 22050.0) {
    FixtureSpec s;
    s.kind = Kind::silence;
    s.duration_s = seconds;
    s.sample_rate = rate;
    return s;
  }

  static FixtureSpec click_track(double bpm, double seconds,
                                 double first_click_s = 0.25) {
    FixtureSpec s;
    s.kind = Kind::click_track;
    s.bpm = bpm;
    s.duration_s = seconds;
    s.first_click_s = first_click_s;
    return s;
  }

  static FixtureSpec sine(double freq_hz, double seconds) {
    FixtureSpec s;
    s.kind = Kind::sine;
    s.frequency_hz = freq_hz;
    s.duration_s = seconds;
    return s;
  }

  static FixtureSpec melody(std::vector<Note> notes, double seconds) {
    FixtureSpec s;
    s.kind = Kind::melody;
    s.notes = std::move(notes);
    s.duration_s = seconds;
    return s;
  }

  static FixtureSpec triad_loop(int root_midi, bool minor, double bpm,
                                double seconds) {
    FixtureSpec s;
    s.kind = Kind::triad_loop;
    s.root_midi = root_midi;
    s.minor = minor;
    s.bpm = bpm;
    s.duration_s = seconds;
    return s;
  }

  static FixtureSpec scale(int tonic_midi, bool minor, double seconds,
                           double note_duration_s = 0.25) {
    FixtureSpec s;
    s.kind = Kind::scale;
    s.root_midi = tonic_midi;
    s.minor = minor;
    s.duration_s = seconds;
    s.note_duration_s = note_duration_s;
    return s;
  }

  static FixtureSpec white_noise(std::uint32_t seed, double seconds) {
    FixtureSpec s;
    s.kind = Kind::noise;
    s.seed = seed;
    s.duration_s = seconds;
    return s;
  }

  static FixtureSpec band_noise(std::uint32_t seed, double seconds,
                                double lo_hz, double hi_hz) {
    FixtureSpec s;
    s.kind = Kind::noise;
    s.seed = seed;
    s.duration_s = seconds;
    s.band_lo_hz = lo_hz;
    s.band_hi_hz = hi_hz;
    return s;
  }

  static FixtureSpec concat(std::vector<FixtureSpec> parts) {
    FixtureSpec s;
    s.kind = Kind::concat;
    s.parts = std::move(parts);
    return s;
  }

  static FixtureSpec mix(std::vector<FixtureSpec> parts,
                         std::vector<double> gains = {}) {
    FixtureSpec s;
    s.kind = Kind::mix;
    s.parts = std::move(parts);
    s.part_gains = std::move(gains);
    return s;
  }

  FixtureSpec transposed(int semitones) const {
    FixtureSpec s = *this;
    s.root_midi += semitones;
    s.frequency_hz *= std::pow(2.0, semitones / 12.0);
    for (auto& n : s.notes) n.midi += semitones;
    for (auto& p : s.parts) p = p.transposed(semitones);
    return s;
  }

  /// Uniform time stretch: every musical duration scales by `factor`
  /// (pitches untouched). Used to model a tempo-altering editing system.
  FixtureSpec stretched(double factor) const {
    FixtureSpec s = *this;
    s.bpm /= factor;
    s.duration_s *= factor;
    s.first_click_s *= factor;
    s.note_duration_s *= factor;
    for (auto& n : s.notes) n.duration_s *= factor;
    for (auto& p : s.parts) p = p.stretched(factor);
    return s;
  }
};

namespace detail {

inline double midi_to_hz(int midi) {
  return 440.0 * std::pow(2.0, (midi - 69) / 12.0);
}

// xorshift32 mapped to [-1, 1); avoids std distributions whose output is
// implementation-defined.
struct NoiseRng {
  std::uint32_t state;
  explicit NoiseRng(std::uint32_t seed) : state(seed ? seed : 0x9e3779b9u) {}
  double next() {
    state ^= state << 13;
    state ^= state >> 17;
    state ^= state << 5;
    return static_cast<double>(state) / 2147483648.0 - 1.0;
  }
};

inline void check_bpm(double bpm) {
  if (bpm < 40.0 || bpm > 240.0) {
    throw McpError(ErrorCode::invalid_argument,
                   "fixture BPM outside [40, 240]: " + std::to_string(bpm));
  }
}

inline void check_freq(double hz) {
  if (hz < 27.5 || hz > 4186.0) {
    throw McpError(ErrorCode::invalid_argument,
                   "fixture frequency outside [27.5, 4186] Hz: " + std::to_string(hz));
  }
}

/// Render one tone into buf[start, start+len): sine with 5 ms raised-cosine
/// attack/release. A non-zero decay_tau adds an exponential decay so that
/// re-articulations of the same pitch still produce spectral flux.
inline void render_tone(std::vector<double>& buf, std::size_t start, std::size_t len,
                        double freq, double rate, double amp, double decay_tau = 0.0,
                        double vibrato_cents = 0.0, double vibrato_rate = 5.0) {
  const std::size_t ramp = std::min<std::size_t>(len / 4, static_cast<std::size_t>(0.005 * rate));
  double phase = 0.0;
  for (std::size_t i = 0; i < len && start + i < buf.size(); ++i) {
    double t = static_cast<double>(i) / rate;
    double f = freq;
    if (vibrato_cents != 0.0) {
      double dev = vibrato_cents / 1200.0 *
                   std::sin(2.0 * std::numbers::pi * vibrato_rate * t);
      f = freq * std::pow(2.0, dev);
    }
    double env = decay_tau > 0.0 ? std::exp(-t / decay_tau) : 1.0;
    if (i < ramp) env *= 0.5 - 0.5 * std::cos(std::numbers::pi * i / ramp);
    if (len - i <= ramp) {
      env *= 0.5 - 0.5 * std::cos(std::numbers::pi * (len - i) / ramp);
    }
    buf[start + i] += amp * env * std::sin(phase);
    phase += 2.0 * std::numbers::pi * f / rate;
  }
}

}  // namespace detail

inline AudioClip synth_fixture(const FixtureSpec& spec);

namespace detail {

inline std::vector<double> render(const FixtureSpec& spec) {
  const double rate = spec.sample_rate;
  auto seconds_to_len = [&](double s) {
    return static_cast<std::size_t>(std::llround(s * rate));
  };

  switch (spec.kind) {
    case FixtureSpec::Kind::silence:
      return std::vector<double>(seconds_to_len(spec.duration_s), 0.0);

    case FixtureSpec::Kind::click_track: {
      check_bpm(spec.bpm);
      std::vector<double> buf(seconds_to_len(spec.duration_s), 0.0);
      const double period = 60.0 / spec.bpm;
      const auto click_len = static_cast<std::size_t>(0.006 * rate);
      int index = 0;
      for (double t = spec.first_click_s; t < spec.duration_s; t += period, ++index) {
        if (index == spec.dropped_beat) continue;
        auto start = static_cast<std::size_t>(std::llround(t * rate));
        for (std::size_t i = 0; i < click_len && start + i < buf.size(); ++i) {
          double ts = static_cast<double>(i) / rate;
          buf[start + i] += spec.gain * std::exp(-ts / 0.002) *
                            std::sin(2.0 * std::numbers::pi * spec.click_carrier_hz * ts);
        }
      }
      return buf;
    }

    case FixtureSpec::Kind::sine: {
      check_freq(spec.frequency_hz);
      std::vector<double> buf(seconds_to_len(spec.duration_s), 0.0);
      render_tone(buf, 0, buf.size(), spec.frequency_hz, rate, spec.gain, 0.0,
                  spec.vibrato_cents, spec.vibrato_rate_hz);
      return buf;
    }

    case FixtureSpec::Kind::melody: {
      if (spec.notes.empty()) {
        throw McpError(ErrorCode::invalid_argument, "melody fixture needs notes");
      }
      std::vector<double> buf(seconds_to_len(spec.duration_s), 0.0);
      std::size_t pos = 0;
      std::size_t k = 0;
      while (pos < buf.size()) {
        const auto& note = spec.notes[k % spec.notes.size()];
        double freq = midi_to_hz(note.midi);
        check_freq(freq);
        std::size_t len = seconds_to_len(note.duration_s);
        if (len == 0) break;
        render_tone(buf, pos, std::min(len, buf.size() - pos), freq, rate, spec.gain,
                    1.5, spec.vibrato_cents, spec.vibrato_rate_hz);
        pos += len;
        ++k;
      }
      return buf;
    }

    case FixtureSpec::Kind::triad_loop: {
      check_bpm(spec.bpm);
      const int third = spec.minor ? 3 : 4;
      const int offsets[3] = {0, third, 7};
      std::vector<double> buf(seconds_to_len(spec.duration_s), 0.0);
      const double period = 60.0 / spec.bpm;
      std::size_t hit_len = seconds_to_len(period);
      for (double t = 0.0; t < spec.duration_s; t += period) {
        auto start = static_cast<std::size_t>(std::llround(t * rate));
        for (int off : offsets) {
          double freq = midi_to_hz(spec.root_midi + off);
          check_freq(freq);
          render_tone(buf, start, std::min(hit_len, buf.size() - start), freq, rate,
                      spec.gain / 3.0, 1.5);
        }
      }
      return buf;
    }

    case FixtureSpec::Kind::scale: {
      // Ascending one-octave scale, tonic repeated at the top, looped.
      static const int major_steps[8] = {0, 2, 4, 5, 7, 9, 11, 12};
      static const int minor_steps[8] = {0, 2, 3, 5, 7, 8, 10, 12};
      const int* steps = spec.minor ? minor_steps : major_steps;
      std::vector<FixtureSpec::Note> notes;
      for (int i = 0; i < 8; ++i) {
        notes.push_back({spec.root_midi + steps[i], spec.note_duration_s});
      }
      FixtureSpec as_melody = spec;
      as_melody.kind = FixtureSpec::Kind::melody;
      as_melody.notes = std::move(notes);
      return render(as_melody);
    }

    case FixtureSpec::Kind::noise: {
      std::vector<double> buf(seconds_to_len(spec.duration_s), 0.0);
      NoiseRng rng(spec.seed);
      if (spec.band_hi_hz <= 0.0) {
        for (auto& s : buf) s = spec.gain * 0.5 * rng.next();
        return buf;
      }
      // Random-phase sine bank: exact passband control, fully deterministic.
      const int partials = 60;
      const double amp = spec.gain / std::sqrt(static_cast<double>(partials));
      for (int p = 0; p < partials; ++p) {
        double frac = partials == 1 ? 0.5 : static_cast<double>(p) / (partials - 1);
        double freq = spec.band_lo_hz + frac * (spec.band_hi_hz - spec.band_lo_hz);
        double phase = std::numbers::pi * (rng.next() + 1.0);
        double step = 2.0 * std::numbers::pi * freq / rate;
        for (std::size_t i = 0; i < buf.size(); ++i) {
          buf[i] += amp * std::sin(phase + step * static_cast<double>(i));
        }
      }
      return buf;
    }

    case FixtureSpec::Kind::concat: {
      std::vector<double> buf;
      for (const auto& part : spec.parts) {
        auto rendered = render(part);
        buf.insert(buf.end(), rendered.begin(), rendered.end());
      }
      return buf;
    }

    case FixtureSpec::Kind::mix: {
      std::vector<double> buf;
      for (std::size_t i = 0; i < spec.parts.size(); ++i) {
        auto rendered = render(spec.parts[i]);
        double g = i < spec.part_gains.size() ? spec.part_gains[i] : 1.0;
        if (rendered.size() > buf.size()) buf.resize(rendered.size(), 0.0);
        for (std::size_t j = 0; j < rendered.size(); ++j) buf[j] += g * rendered[j];
      }
      return buf;
    }
  }
  throw McpError(ErrorCode::invalid_argument, "unknown fixture kind");
}

}  // namespace detail

inline AudioClip synth_fixture(const FixtureSpec& spec) {
  AudioClip clip;
  clip.sample_rate = spec.sample_rate;
  clip.samples = detail::render(spec);
  for (auto& s : clip.samples) s = std::clamp(s, -1.0, 1.0);
  clip.source_id = "fixture";
  return clip;
}

}  // namespace musecp
