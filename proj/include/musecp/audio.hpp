#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "musecp/error.hpp"

namespace musecp {

/// Decoded mono audio. Immutable by convention once built; every analysis
/// stage takes it by const reference.
struct AudioClip {
  std::vector<double> samples;  // amplitudes in [-1, 1]
  double sample_rate = 0.0;     // Hz
  std::string source_id;

  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void write_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

inline void write_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

}  // namespace detail

/// Decode a RIFF WAV file: PCM 16-bit or IEEE float 32-bit, 1 or 2 channels.
/// Stereo is averaged to mono. Anything else is an unsupported-encoding error.
inline AudioClip load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw McpError(ErrorCode::io_error, "cannot open file: " + path.string());
  }
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw McpError(ErrorCode::unsupported_encoding,
                   "not a RIFF/WAVE file: " + path.string());
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;
  bool have_fmt = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    std::uint32_t chunk_len = detail::read_u32(bytes.data() + pos + 4);
    const unsigned char* chunk = bytes.data() + pos + 8;
    std::size_t avail = std::min<std::size_t>(chunk_len, bytes.size() - pos - 8);
    if (std::memcmp(bytes.data() + pos, "fmt ", 4) == 0 && avail >= 16) {
      format = detail::read_u16(chunk);
      channels = detail::read_u16(chunk + 2);
      rate = detail::read_u32(chunk + 4);
      bits = detail::read_u16(chunk + 14);
      // WAVE_FORMAT_EXTENSIBLE carries the real format in the SubFormat GUID.
      if (format == 0xFFFE && avail >= 26) {
        format = detail::read_u16(chunk + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(bytes.data() + pos, "data", 4) == 0) {
      data = chunk;
      data_len = avail;
    }
    pos += 8 + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || rate == 0) {
    throw McpError(ErrorCode::unsupported_encoding,
                   "missing or bad fmt chunk: " + path.string());
  }
  if (channels < 1 || channels > 2) {
    throw McpError(ErrorCode::unsupported_encoding,
                   "unsupported channel count " + std::to_string(channels));
  }
  bool pcm16 = format == 1 && bits == 16;
  bool float32 = format == 3 && bits == 32;
  if (!pcm16 && !float32) {
    throw McpError(ErrorCode::unsupported_encoding,
                   "unsupported WAV encoding (format=" + std::to_string(format) +
                       ", bits=" + std::to_string(bits) + "): " + path.string());
  }

  std::size_t bytes_per_sample = bits / 8;
  std::size_t frame_bytes = bytes_per_sample * channels;
  std::size_t frames = data ? data_len / frame_bytes : 0;
  if (frames == 0) {
    throw McpError(ErrorCode::empty_audio, "zero-length audio: " + path.string());
  }

  AudioClip clip;
  clip.sample_rate = static_cast<double>(rate);
  clip.source_id = path.filename().string();
  clip.samples.resize(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (std::uint16_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + f * frame_bytes + c * bytes_per_sample;
      double v;
      if (pcm16) {
        std::int16_t s = static_cast<std::int16_t>(p[0] | (p[1] << 8));
        v = static_cast<double>(s) / 32768.0;
      } else {
        float fv;
        std::memcpy(&fv, p, sizeof fv);
        v = static_cast<double>(fv);
      }
      acc += v;
    }
    double sample = acc / channels;
    if (!std::isfinite(sample)) {
      throw McpError(ErrorCode::unsupported_encoding,
                     "non-finite sample in " + path.string());
    }
    clip.samples[f] = std::clamp(sample, -1.0, 1.0);
  }
  return clip;
}

/// Write a clip as 16-bit PCM mono WAV. Used by the fixture generator; output
/// is bit-deterministic for identical input.
inline void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
  std::vector<unsigned char> out;
  out.reserve(44 + clip.samples.size() * 2);
  std::uint32_t data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  std::uint32_t rate = static_cast<std::uint32_t>(std::llround(clip.sample_rate));

  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  detail::write_u32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  detail::write_u32(out, 16);
  detail::write_u16(out, 1);  // PCM
  detail::write_u16(out, 1);  // mono
  detail::write_u32(out, rate);
  detail::write_u32(out, rate * 2);
  detail::write_u16(out, 2);
  detail::write_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  detail::write_u32(out, data_bytes);
  for (double s : clip.samples) {
    double clamped = std::clamp(s, -1.0, 1.0);
    auto q = static_cast<std::int16_t>(std::lround(clamped * 32767.0));
    detail::write_u16(out, static_cast<std::uint16_t>(q));
  }

  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw McpError(ErrorCode::io_error, "cannot write file: " + path.string());
  }
  os.write(reinterpret_cast<const char*>(out.data()),
           static_cast<std::streamsize>(out.size()));
  if (!os) {
    throw McpError(ErrorCode::io_error, "short write: " + path.string());
  }
}

/// Band-limited resampling with a Hann-windowed sinc kernel (16 zero
/// crossings per side, cutoff at 0.97 of the narrower Nyquist). Returning the
/// input unchanged when rates already match keeps decode→evaluate exact.
inline AudioClip resample(const AudioClip& clip, double target_rate) {
  if (target_rate <= 0) {
    throw McpError(ErrorCode::invalid_argument, "target_rate must be positive");
  }
  if (clip.sample_rate == target_rate) return clip;

  const double ratio = target_rate / clip.sample_rate;
  const double cutoff = std::min(1.0, ratio) * 0.97;
  const int zero_crossings = 16;
  const double half_width = zero_crossings / cutoff;

  const std::size_t n = clip.samples.size();
  const auto out_len =
      static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratio));

  AudioClip out;
  out.sample_rate = target_rate;
  out.source_id = clip.source_id;
  out.samples.resize(out_len);

  for (std::size_t m = 0; m < out_len; ++m) {
    double center = static_cast<double>(m) / ratio;
    auto lo = static_cast<std::int64_t>(std::ceil(center - half_width));
    auto hi = static_cast<std::int64_t>(std::floor(center + half_width));
    lo = std::max<std::int64_t>(lo, 0);
    hi = std::min<std::int64_t>(hi, static_cast<std::int64_t>(n) - 1);
    double acc = 0.0;
    for (std::int64_t j = lo; j <= hi; ++j) {
      double u = static_cast<double>(j) - center;
      double x = std::numbers::pi * cutoff * u;
      double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
      double w = 0.5 + 0.5 * std::cos(std::numbers::pi * u / half_width);
      acc += clip.samples[static_cast<std::size_t>(j)] * cutoff * sinc * w;
    }
    out.samples[m] = acc;
  }
  return out;
}

}  // namespace musecp
