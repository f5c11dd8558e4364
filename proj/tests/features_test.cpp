// Tests for the shared analysis features: STFT, onset envelope, chromagram,
// mel timbre bands.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "musecp/features.hpp"
#include "musecp/fixtures.hpp"
#include "oracles.hpp"

using namespace musecp;

namespace {

AudioClip zeros(double seconds) { return synth_fixture(FixtureSpec::silence(seconds)); }

constexpr int kPitchClassA = 9;

}  // namespace

TEST(Stft, AllZeroClipGivesAllZeroMagnitudes) {
  Spectrogram spec = stft(zeros(1.0), 2048, 512);
  ASSERT_GT(spec.frames(), 0u);
  EXPECT_EQ(spec.frames(), (22050u - 2048u) / 512u + 1u);
  for (const auto& row : spec.magnitudes) {
    for (double m : row) ASSERT_EQ(m, 0.0);
  }
}

TEST(Stft, SineArgmaxBinMatchesDftOracle) {
  AudioClip clip = synth_fixture(FixtureSpec::sine(440.0, 1.0));
  Spectrogram spec = stft(clip, 2048, 512);
  const std::size_t expected_bin = 41;  // round(440 * 2048 / 22050)

  // oracle: direct DFT of one interior frame (rectangular window is enough
  // to localize the peak bin)
  auto mags = oracle::dft_magnitudes(clip.samples, 10 * 512, 2048);
  std::size_t oracle_argmax = 0;
  for (std::size_t k = 1; k < mags.size(); ++k) {
    if (mags[k] > mags[oracle_argmax]) oracle_argmax = k;
  }
  EXPECT_EQ(oracle_argmax, expected_bin);

  for (std::size_t f = 1; f + 1 < spec.frames(); ++f) {
    const auto& row = spec.magnitudes[f];
    std::size_t argmax = 0;
    for (std::size_t k = 1; k < row.size(); ++k) {
      if (row[k] > row[argmax]) argmax = k;
    }
    ASSERT_EQ(argmax, expected_bin) << "frame " << f;
  }
}

TEST(Stft, CenteredImpulseHasFlatSpectrum) {
  AudioClip clip = zeros(1.0);
  clip.samples[1024] = 1.0;  // center of frame 0's window
  Spectrogram spec = stft(clip, 2048, 512);
  const auto& row = spec.magnitudes[0];
  double lo = *std::min_element(row.begin(), row.end());
  double hi = *std::max_element(row.begin(), row.end());
  ASSERT_GT(lo, 0.0);
  EXPECT_LT((hi - lo) / hi, 0.01);
}

TEST(Stft, RejectsShortClipAndBadParameters) {
  AudioClip clip = synth_fixture(FixtureSpec::sine(440.0, 1.0));
  AudioClip stub = clip;
  stub.samples.resize(1000);
  EXPECT_THROW(stft(stub, 2048, 512), McpError);
  EXPECT_THROW(stft(clip, 2000, 512), McpError);  // not a power of two
  EXPECT_THROW(stft(clip, 2048, 0), McpError);
  EXPECT_THROW(stft(clip, 2048, 4096), McpError);
}

TEST(OnsetEnvelope, ConstantSpectrogramGivesZeroFlux) {
  Spectrogram spec;
  spec.frame_hop = 512.0 / 22050.0;
  spec.window_size = 2048;
  spec.sample_rate = 22050.0;
  spec.magnitudes.assign(40, std::vector<double>(1025, 0.25));
  spec.frame_rms.assign(40, 0.25);
  OnsetEnvelope env = onset_envelope(spec);
  ASSERT_EQ(env.strengths.size(), 39u);
  for (double v : env.strengths) ASSERT_EQ(v, 0.0);
}

TEST(OnsetEnvelope, ClickTrackPeaksSpacedByPeriod) {
  AudioClip clip = synth_fixture(FixtureSpec::click_track(120.0, 10.0));
  OnsetEnvelope env = onset_envelope(stft(clip, 2048, 512));
  double mean = 0.0;
  for (double v : env.strengths) mean += v;
  mean /= static_cast<double>(env.strengths.size());

  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < env.strengths.size(); ++i) {
    if (env.strengths[i] > 4.0 * mean && env.strengths[i] >= env.strengths[i - 1] &&
        env.strengths[i] > env.strengths[i + 1]) {
      peaks.push_back(i);
    }
  }
  ASSERT_GE(peaks.size(), 18u);
  const double period_frames = 0.5 / env.frame_hop;  // 21.53
  for (std::size_t i = 1; i < peaks.size(); ++i) {
    double gap = static_cast<double>(peaks[i] - peaks[i - 1]);
    double periods = std::round(gap / period_frames);
    ASSERT_EQ(periods, 1.0) << "double/missed peak at " << i;
    ASSERT_LE(std::abs(gap - period_frames), 1.0);
  }
}

TEST(OnsetEnvelope, SilenceToToneStepPeaksAtStep) {
  FixtureSpec tone = FixtureSpec::sine(440.0, 1.0);
  AudioClip clip = synth_fixture(FixtureSpec::concat({FixtureSpec::silence(1.0), tone}));
  OnsetEnvelope env = onset_envelope(stft(clip, 2048, 512));
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < env.strengths.size(); ++i) {
    if (env.strengths[i] > env.strengths[argmax]) argmax = i;
  }
  // envelope index i measures flux into STFT frame i+1; the onset at t = 1 s
  // first appears in the frame whose window tail reaches sample 22050
  double onset_time = (static_cast<double>(argmax) * 512.0 + 2048.0) / 22050.0;
  EXPECT_NEAR(onset_time, 1.0, 0.05);
}

TEST(OnsetEnvelope, NeedsTwoFrames) {
  Spectrogram spec;
  spec.magnitudes.assign(1, std::vector<double>(1025, 0.0));
  spec.frame_rms.assign(1, 0.0);
  EXPECT_THROW(onset_envelope(spec), McpError);
}

TEST(Chromagram, SinePitchClassDominates) {
  AudioClip clip = synth_fixture(FixtureSpec::sine(440.0, 2.0));
  Chromagram ch = chromagram(clip);
  std::size_t active = 0, a_wins = 0;
  for (const auto& row : ch.frames) {
    double peak = *std::max_element(row.begin(), row.end());
    if (peak <= 0.0) continue;
    ++active;
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < 12; ++i) {
      if (row[i] > row[argmax]) argmax = i;
    }
    a_wins += argmax == kPitchClassA;
  }
  ASSERT_GT(active, 0u);
  EXPECT_GE(static_cast<double>(a_wins) / static_cast<double>(active), 0.95);
}

TEST(Chromagram, TriadHoldsTopThreeMass) {
  // C major triad as three simultaneous equal-tempered sines
  AudioClip clip = synth_fixture(FixtureSpec::mix({FixtureSpec::sine(261.6256, 2.0),
                                                   FixtureSpec::sine(329.6276, 2.0),
                                                   FixtureSpec::sine(391.9954, 2.0)},
                                                  {0.33, 0.33, 0.33}));
  Chromagram ch = chromagram(clip);
  std::size_t active = 0, hits = 0;
  for (const auto& row : ch.frames) {
    double peak = *std::max_element(row.begin(), row.end());
    if (peak <= 0.0) continue;
    ++active;
    std::vector<std::size_t> order(12);
    for (std::size_t i = 0; i < 12; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return row[x] > row[y]; });
    std::vector<std::size_t> top3(order.begin(), order.begin() + 3);
    std::sort(top3.begin(), top3.end());
    hits += top3 == std::vector<std::size_t>{0, 4, 7};
  }
  ASSERT_GT(active, 0u);
  EXPECT_GE(static_cast<double>(hits) / static_cast<double>(active), 0.90);
}

TEST(Chromagram, SilenceStaysAllZero) {
  Chromagram ch = chromagram(zeros(1.5));
  for (const auto& row : ch.frames) {
    for (double v : row) ASSERT_EQ(v, 0.0);
  }
}

TEST(Chromagram, GainInvariant) {
  AudioClip clip = synth_fixture(FixtureSpec::sine(523.25, 1.5));
  AudioClip scaled = clip;
  for (auto& s : scaled.samples) s *= 0.3;
  Chromagram a = chromagram(clip);
  Chromagram b = chromagram(scaled);
  ASSERT_EQ(a.frames.size(), b.frames.size());
  for (std::size_t f = 0; f < a.frames.size(); ++f) {
    for (std::size_t i = 0; i < 12; ++i) ASSERT_NEAR(a.frames[f][i], b.frames[f][i], 1e-9);
  }
}

TEST(Features, HopShiftMovesFramesByOne) {
  AudioClip clip = synth_fixture(FixtureSpec::melody({{60, 0.3}, {64, 0.3}, {67, 0.3}}, 3.0));
  AudioClip shifted;
  shifted.sample_rate = clip.sample_rate;
  shifted.source_id = clip.source_id;
  shifted.samples.assign(clip.samples.begin() + 512, clip.samples.end());

  Spectrogram a = stft(clip, 2048, 512);
  Spectrogram b = stft(shifted, 2048, 512);
  ASSERT_GE(a.frames(), b.frames());
  for (std::size_t f = 0; f < b.frames(); ++f) {
    for (std::size_t k = 0; k < a.bins(); ++k) {
      ASSERT_DOUBLE_EQ(a.magnitudes[f + 1][k], b.magnitudes[f][k]);
    }
  }
}

TEST(Timbre, AllZeroClipHitsEnergyFloor) {
  Spectrogram spec = stft(zeros(1.0), 2048, 512);
  auto bands = timbre_features(spec, 8);
  const double floor_log = std::log(1e-10);
  for (const auto& row : bands) {
    for (double v : row) ASSERT_DOUBLE_EQ(v, floor_log);
  }
}

TEST(Timbre, DisjointPassbandsSeparateCentroids) {
  AudioClip lo = synth_fixture(FixtureSpec::band_noise(7, 4.0, 300, 1200));
  AudioClip hi = synth_fixture(FixtureSpec::band_noise(9, 4.0, 2800, 5600));
  auto centroid = [](const std::vector<std::vector<double>>& bands) {
    double num = 0.0, den = 0.0;
    for (const auto& row : bands) {
      double lo_v = *std::min_element(row.begin(), row.end());
      for (std::size_t b = 0; b < row.size(); ++b) {
        double w = row[b] - lo_v;  // energy above the frame floor
        num += w * static_cast<double>(b);
        den += w;
      }
    }
    return num / den;
  };
  double c_lo = centroid(timbre_features(stft(lo, 2048, 512), 8));
  double c_hi = centroid(timbre_features(stft(hi, 2048, 512), 8));
  EXPECT_GE(c_hi - c_lo, 2.0);
}

TEST(Timbre, DeterministicAndRejectsFewBands) {
  AudioClip clip = synth_fixture(FixtureSpec::band_noise(5, 2.0, 500, 2000));
  Spectrogram spec = stft(clip, 2048, 512);
  auto a = timbre_features(spec, 8);
  auto b = timbre_features(spec, 8);
  ASSERT_EQ(a, b);
  EXPECT_THROW(timbre_features(spec, 3), McpError);
}

TEST(Features, FiniteOnAllFixtures) {
  for (const auto& spec : {FixtureSpec::click_track(90.0, 5.0), FixtureSpec::white_noise(3, 5.0),
                           FixtureSpec::scale(62, true, 5.0, 0.25)}) {
    AudioClip clip = synth_fixture(spec);
    Spectrogram sg = stft(clip, 2048, 512);
    OnsetEnvelope env = onset_envelope(sg);
    Chromagram ch = chromagram(clip);
    auto bands = timbre_features(sg, 8);
    for (const auto& row : sg.magnitudes) {
      for (double v : row) ASSERT_TRUE(std::isfinite(v));
    }
    for (double v : env.strengths) ASSERT_TRUE(std::isfinite(v) && v >= 0.0);
    for (const auto& row : ch.frames) {
      for (double v : row) ASSERT_TRUE(std::isfinite(v) && v >= 0.0);
    }
    for (const auto& row : bands) {
      for (double v : row) ASSERT_TRUE(std::isfinite(v));
    }
  }
}
