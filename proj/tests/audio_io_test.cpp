// Tests for WAV decode, resampling, and the fixture synthesizer.

#include <gtest/gtest.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "musecp/audio.hpp"
#include "musecp/fixtures.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace musecp;

namespace {

fs::path test_dir() {
  auto dir = fs::temp_directory_path() / "musecp_audio_io_test";
  fs::create_directories(dir);
  return dir;
}

void push_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) v.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}

void push_u16(std::vector<std::uint8_t>& v, std::uint16_t x) {
  v.push_back(static_cast<std::uint8_t>(x & 0xff));
  v.push_back(static_cast<std::uint8_t>(x >> 8));
}

// Hand-rolled WAV writer so decode tests do not depend on write_wav.
fs::path craft_wav(const std::string& name, std::uint16_t format, std::uint16_t channels,
                   std::uint16_t bits, std::uint32_t rate,
                   const std::vector<std::uint8_t>& data) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  push_u32(out, 36 + static_cast<std::uint32_t>(data.size()));
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  push_u32(out, 16);
  push_u16(out, format);
  push_u16(out, channels);
  push_u32(out, rate);
  push_u32(out, rate * channels * bits / 8);
  push_u16(out, static_cast<std::uint16_t>(channels * bits / 8));
  push_u16(out, bits);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  push_u32(out, static_cast<std::uint32_t>(data.size()));
  out.insert(out.end(), data.begin(), data.end());

  fs::path path = test_dir() / name;
  std::ofstream os(path, std::ios::binary);
  os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  return path;
}

std::vector<std::uint8_t> pcm16_bytes(const std::vector<std::int16_t>& samples) {
  std::vector<std::uint8_t> data;
  for (std::int16_t s : samples) push_u16(data, static_cast<std::uint16_t>(s));
  return data;
}

}  // namespace

TEST(LoadWav, SilentMono16BitRoundTrip) {
  auto path = craft_wav("zeros.wav", 1, 1, 16, 44100,
                        pcm16_bytes(std::vector<std::int16_t>(44100, 0)));
  AudioClip clip = load_wav(path);
  EXPECT_EQ(clip.samples.size(), 44100u);
  EXPECT_DOUBLE_EQ(clip.sample_rate, 44100.0);
  for (double s : clip.samples) ASSERT_EQ(s, 0.0);
}

TEST(LoadWav, StereoChannelAverageCancels) {
  std::vector<std::int16_t> interleaved;
  for (int i = 0; i < 1000; ++i) {
    interleaved.push_back(16384);   // +0.5
    interleaved.push_back(-16384);  // -0.5
  }
  auto path = craft_wav("stereo.wav", 1, 2, 16, 22050, pcm16_bytes(interleaved));
  AudioClip clip = load_wav(path);
  EXPECT_EQ(clip.samples.size(), 1000u);
  for (double s : clip.samples) ASSERT_EQ(s, 0.0);
}

TEST(LoadWav, Float32Decodes) {
  std::vector<std::uint8_t> data;
  for (int i = 0; i < 100; ++i) {
    float v = 0.25f;
    std::uint8_t b[4];
    std::memcpy(b, &v, 4);
    data.insert(data.end(), b, b + 4);
  }
  auto path = craft_wav("float.wav", 3, 1, 32, 48000, data);
  AudioClip clip = load_wav(path);
  ASSERT_EQ(clip.samples.size(), 100u);
  EXPECT_DOUBLE_EQ(clip.sample_rate, 48000.0);
  EXPECT_NEAR(clip.samples[0], 0.25, 1e-7);
}

TEST(LoadWav, MuLawIsUnsupportedEncoding) {
  auto path = craft_wav("mulaw.wav", 7, 1, 8, 8000, std::vector<std::uint8_t>(8000, 0x7f));
  try {
    load_wav(path);
    FAIL() << "expected unsupported-encoding";
  } catch (const McpError& e) {
    EXPECT_EQ(e.code(), ErrorCode::unsupported_encoding);
  }
}

TEST(LoadWav, ZeroLengthAudioIsError) {
  auto path = craft_wav("empty.wav", 1, 1, 16, 22050, {});
  try {
    load_wav(path);
    FAIL() << "expected empty-audio";
  } catch (const McpError& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_audio);
  }
}

TEST(LoadWav, MissingFileIsIoError) {
  try {
    load_wav(test_dir() / "does_not_exist.wav");
    FAIL() << "expected io-error";
  } catch (const McpError& e) {
    EXPECT_EQ(e.code(), ErrorCode::io_error);
  }
}

TEST(LoadWav, DecodeIsDeterministic) {
  AudioClip clip = synth_fixture(FixtureSpec::sine(440.0, 1.0));
  auto path = test_dir() / "sine.wav";
  write_wav(path, clip);
  AudioClip a = load_wav(path);
  AudioClip b = load_wav(path);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) ASSERT_EQ(a.samples[i], b.samples[i]);
}

TEST(LoadWav, MixdownCommutesWithGain) {
  AudioClip clip = synth_fixture(FixtureSpec::sine(311.13, 0.5));
  AudioClip half = clip;
  for (auto& s : half.samples) s *= 0.5;
  auto p1 = test_dir() / "full.wav";
  auto p2 = test_dir() / "half.wav";
  write_wav(p1, clip);
  write_wav(p2, half);
  AudioClip a = load_wav(p1);
  AudioClip b = load_wav(p2);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    // one quantization step of headroom on each side of the comparison
    ASSERT_NEAR(0.5 * a.samples[i], b.samples[i], 2.0 / 32768.0);
  }
}

TEST(Resample, SameRateIsIdentity) {
  AudioClip clip = synth_fixture(FixtureSpec::sine(440.0, 1.0));
  AudioClip out = resample(clip, 22050.0);
  ASSERT_EQ(out.samples.size(), clip.samples.size());
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    ASSERT_EQ(out.samples[i], clip.samples[i]);
  }
}

TEST(Resample, DurationConserved) {
  FixtureSpec spec = FixtureSpec::sine(440.0, 1.0);
  spec.sample_rate = 44100.0;
  AudioClip clip = synth_fixture(spec);
  ASSERT_EQ(clip.samples.size(), 44100u);
  AudioClip down = resample(clip, 22050.0);
  EXPECT_NEAR(static_cast<double>(down.samples.size()), 22050.0, 1.0);

  AudioClip back = resample(down, 44100.0);
  EXPECT_NEAR(static_cast<double>(back.samples.size()), 44100.0, 2.0);
}

TEST(Resample, SpectralPeakSurvivesDownsampling) {
  FixtureSpec spec = FixtureSpec::sine(440.0, 1.0);
  spec.sample_rate = 44100.0;
  AudioClip down = resample(synth_fixture(spec), 22050.0);

  auto mags = oracle::dft_magnitudes(down.samples, 2048, 2048);
  std::size_t argmax = 0;
  for (std::size_t k = 1; k < mags.size(); ++k) {
    if (mags[k] > mags[argmax]) argmax = k;
  }
  auto expected = static_cast<std::size_t>(std::lround(440.0 * 2048.0 / 22050.0));
  EXPECT_EQ(argmax, expected);
}

TEST(Resample, RejectsNonPositiveRate) {
  AudioClip clip = synth_fixture(FixtureSpec::sine(440.0, 1.0));
  EXPECT_THROW(resample(clip, 0.0), McpError);
}

TEST(SynthFixture, ClickSpacingExact) {
  AudioClip clip = synth_fixture(FixtureSpec::click_track(120.0, 10.0));
  // click onsets are placed at exact sample positions by construction
  std::vector<std::size_t> onsets;
  for (std::size_t i = 1; i < clip.samples.size(); ++i) {
    if (clip.samples[i] != 0.0 && clip.samples[i - 1] == 0.0) onsets.push_back(i);
  }
  ASSERT_EQ(onsets.size(), 20u);
  for (std::size_t i = 1; i < onsets.size(); ++i) {
    EXPECT_EQ(onsets[i] - onsets[i - 1], 11025u);  // 0.5 s at 22050 Hz
  }
}

TEST(SynthFixture, SineZeroCrossings) {
  AudioClip clip = synth_fixture(FixtureSpec::sine(440.0, 1.0));
  int crossings = 0;
  for (std::size_t i = 1; i < clip.samples.size(); ++i) {
    if ((clip.samples[i - 1] < 0.0 && clip.samples[i] >= 0.0) ||
        (clip.samples[i - 1] > 0.0 && clip.samples[i] <= 0.0)) {
      ++crossings;
    }
  }
  EXPECT_NEAR(crossings, 880, 2);
}

TEST(SynthFixture, SeededNoiseIsBitIdentical) {
  AudioClip a = synth_fixture(FixtureSpec::white_noise(42, 2.0));
  AudioClip b = synth_fixture(FixtureSpec::white_noise(42, 2.0));
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) ASSERT_EQ(a.samples[i], b.samples[i]);

  AudioClip c = synth_fixture(FixtureSpec::white_noise(43, 2.0));
  bool any_diff = false;
  for (std::size_t i = 0; i < a.samples.size(); ++i) any_diff |= a.samples[i] != c.samples[i];
  EXPECT_TRUE(any_diff);
}

TEST(SynthFixture, RejectsOutOfRangeParameters) {
  EXPECT_THROW(synth_fixture(FixtureSpec::click_track(30.0, 5.0)), McpError);
  EXPECT_THROW(synth_fixture(FixtureSpec::click_track(300.0, 5.0)), McpError);
  EXPECT_THROW(synth_fixture(FixtureSpec::sine(20.0, 1.0)), McpError);
  EXPECT_THROW(synth_fixture(FixtureSpec::sine(5000.0, 1.0)), McpError);
  // melody note outside the playable range
  EXPECT_THROW(synth_fixture(FixtureSpec::melody({{127, 0.5}}, 1.0)), McpError);
}

TEST(SynthFixture, ConcatKeepsPartLengths) {
  AudioClip clip = synth_fixture(FixtureSpec::concat(
      {FixtureSpec::band_noise(7, 2.0, 300, 1200), FixtureSpec::band_noise(9, 3.0, 2800, 5600)}));
  EXPECT_EQ(clip.samples.size(), static_cast<std::size_t>(5.0 * 22050));
}
