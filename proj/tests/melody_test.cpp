// Tests for YIN pitch tracking, voicing recall, note segmentation, and the
// motif 3-gram metrics.

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "musecp/fixtures.hpp"
#include "musecp/melody.hpp"
#include "oracles.hpp"

using namespace musecp;

namespace {

PitchTrack make_track(const std::vector<int>& midi_or_unvoiced, double hop = 512.0 / 22050.0) {
  PitchTrack t;
  t.frame_hop = hop;
  for (std::size_t i = 0; i < midi_or_unvoiced.size(); ++i) {
    PitchFrame f;
    f.time = static_cast<double>(i) * hop;
    if (midi_or_unvoiced[i] >= 0) {
      f.voiced = true;
      f.f0 = 440.0 * std::pow(2.0, (midi_or_unvoiced[i] - 69) / 12.0);
      f.confidence = 0.9;
    }
    t.frames.push_back(f);
  }
  return t;
}

NoteSequence make_notes(const std::vector<int>& pitches) {
  NoteSequence seq;
  double t = 0.0;
  for (int p : pitches) {
    seq.notes.push_back({t, 0.25, p});
    t += 0.25;
  }
  return seq;
}

}  // namespace

TEST(TrackPitch, PureSineIsAccuratelyVoiced) {
  AudioClip clip = synth_fixture(FixtureSpec::sine(440.0, 2.0));
  PitchTrack track = track_pitch(clip);
  ASSERT_GT(track.frames.size(), 20u);
  std::size_t voiced = 0, accurate = 0, interior = 0;
  for (std::size_t i = 2; i + 2 < track.frames.size(); ++i) {
    ++interior;
    if (!track.frames[i].voiced) continue;
    ++voiced;
    accurate += std::abs(track.frames[i].f0 - 440.0) <= 2.0;
  }
  EXPECT_GE(static_cast<double>(voiced) / static_cast<double>(interior), 0.95);
  EXPECT_EQ(accurate, voiced);
}

TEST(TrackPitch, NoiseIsMostlyUnvoiced) {
  AudioClip clip = synth_fixture(FixtureSpec::white_noise(11, 2.0));
  PitchTrack track = track_pitch(clip);
  ASSERT_FALSE(track.frames.empty());
  std::size_t unvoiced = 0;
  for (const auto& f : track.frames) unvoiced += !f.voiced;
  EXPECT_GE(static_cast<double>(unvoiced) / static_cast<double>(track.frames.size()), 0.90);
}

TEST(TrackPitch, SilenceIsFullyUnvoiced) {
  AudioClip clip = synth_fixture(FixtureSpec::silence(2.0));
  PitchTrack track = track_pitch(clip);
  for (const auto& f : track.frames) ASSERT_FALSE(f.voiced);
}

TEST(VoicingRecall, CountsMatchingFrames) {
  PitchTrack ref = make_track({69, 69, 69, 69, 69, 69, 69, 69, 69, 69});
  VoicingRecall same = voicing_recall(ref, ref);
  EXPECT_DOUBLE_EQ(same.plain, 1.0);
  EXPECT_DOUBLE_EQ(same.pitched, 1.0);

  PitchTrack none = make_track(std::vector<int>(10, -1));
  EXPECT_DOUBLE_EQ(voicing_recall(ref, none).plain, 0.0);

  // est voices 7 of the 10 reference frames
  PitchTrack seven = make_track({69, 69, 69, 69, 69, 69, 69, -1, -1, -1});
  EXPECT_DOUBLE_EQ(voicing_recall(ref, seven).plain, 0.7);

  // pitch gate: voiced but a whole tone off counts for plain, not pitched
  PitchTrack detuned = make_track(std::vector<int>(10, 71));
  VoicingRecall vr = voicing_recall(ref, detuned);
  EXPECT_DOUBLE_EQ(vr.plain, 1.0);
  EXPECT_DOUBLE_EQ(vr.pitched, 0.0);
}

TEST(VoicingRecall, UnvoicedReferenceIsMissing) {
  PitchTrack none = make_track(std::vector<int>(10, -1));
  PitchTrack est = make_track(std::vector<int>(10, 69));
  EXPECT_THROW(voicing_recall(none, est), McpError);
}

TEST(SegmentNotes, StepwiseFixtureYieldsThreeNotes) {
  AudioClip clip = synth_fixture(
      FixtureSpec::melody({{60, 0.5}, {64, 0.5}, {67, 0.5}}, 1.5));
  NoteSequence seq = segment_notes(track_pitch(clip));
  ASSERT_EQ(seq.notes.size(), 3u);
  EXPECT_EQ(seq.notes[0].midi, 60);
  EXPECT_EQ(seq.notes[1].midi, 64);
  EXPECT_EQ(seq.notes[2].midi, 67);
  EXPECT_LT(seq.notes[0].onset, seq.notes[1].onset);
}

TEST(SegmentNotes, ConstantToneIsOneNote) {
  AudioClip clip = synth_fixture(FixtureSpec::sine(440.0, 2.0));
  NoteSequence seq = segment_notes(track_pitch(clip));
  ASSERT_EQ(seq.notes.size(), 1u);
  EXPECT_EQ(seq.notes[0].midi, 69);
  EXPECT_GT(seq.notes[0].duration, 1.5);
}

TEST(SegmentNotes, VibratoWithinQuantizationIsOneNote) {
  FixtureSpec spec = FixtureSpec::sine(440.0, 2.0);
  spec.vibrato_cents = 40.0;
  spec.vibrato_rate_hz = 5.0;
  NoteSequence seq = segment_notes(track_pitch(synth_fixture(spec)));
  ASSERT_EQ(seq.notes.size(), 1u);
  EXPECT_EQ(seq.notes[0].midi, 69);
}

TEST(SegmentNotes, BridgesShortGapsAndDropsShortNotes) {
  EvalConfig cfg;
  // 3-frame unvoiced gap (~70 ms) inside an A4 run: bridged into one note
  std::vector<int> with_gap(40, 69);
  with_gap[20] = with_gap[21] = with_gap[22] = -1;
  NoteSequence bridged = segment_notes(make_track(with_gap), cfg);
  ASSERT_EQ(bridged.notes.size(), 1u);

  // 6-frame gap (~140 ms) splits the run
  std::vector<int> with_long_gap(40, 69);
  for (int i = 18; i < 24; ++i) with_long_gap[static_cast<std::size_t>(i)] = -1;
  NoteSequence split = segment_notes(make_track(with_long_gap), cfg);
  ASSERT_EQ(split.notes.size(), 2u);

  // a 2ize-frame blip (~46 ms) is below the 80 ms minimum and is dropped
  std::vector<int> blip(40, -1);
  blip[10] = blip[11] = 64;
  NoteSequence dropped = segment_notes(make_track(blip), cfg);
  EXPECT_TRUE(dropped.notes.empty());
}

TEST(Motif3Grams, HandComputedExamples) {
  MotifSet grams = motif_3grams(make_notes({60, 64, 67, 72}));
  ASSERT_EQ(grams.size(), 1u);
  EXPECT_TRUE(grams.count({4, 3, 5}));

  EXPECT_TRUE(motif_3grams(make_notes({60, 64, 67})).empty());

  MotifSet dup = motif_3grams(make_notes({60, 62, 64, 66, 68}));
  ASSERT_EQ(dup.size(), 1u);
  EXPECT_TRUE(dup.count({2, 2, 2}));
}

TEST(Motif3Grams, IntervalsClampToTwoOctaves) {
  MotifSet grams = motif_3grams(make_notes({20, 100, 20, 100, 20}));
  ASSERT_EQ(grams.size(), 2u);
  EXPECT_TRUE(grams.count({24, -24, 24}));
  EXPECT_TRUE(grams.count({-24, 24, -24}));
}

TEST(Motif3Grams, TranspositionInvariant) {
  oracle::Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<int> pitches;
    int n = rng.uniform_int(4, 12);
    for (int i = 0; i < n; ++i) pitches.push_back(rng.uniform_int(48, 84));
    int shift = rng.uniform_int(-12, 12);
    std::vector<int> shifted;
    for (int p : pitches) shifted.push_back(p + shift);
    ASSERT_EQ(motif_3grams(make_notes(pitches)), motif_3grams(make_notes(shifted)));
  }
}

TEST(MotifOverlap, SetArithmetic) {
  MotifSet ref = {{1, 2, 3}, {2, 3, 4}, {3, 4, 5}};
  MotifSet est = {{2, 3, 4}, {3, 4, 5}, {4, 5, 6}};
  MotifOverlap o = motif_overlap(ref, est);
  EXPECT_DOUBLE_EQ(o.jaccard, 0.5);
  ASSERT_TRUE(o.recall.has_value());
  EXPECT_NEAR(*o.recall, 2.0 / 3.0, 1e-12);

  MotifOverlap same = motif_overlap(ref, ref);
  EXPECT_DOUBLE_EQ(same.jaccard, 1.0);
  EXPECT_DOUBLE_EQ(*same.recall, 1.0);

  MotifOverlap disjoint = motif_overlap(ref, {{9, 9, 9}});
  EXPECT_DOUBLE_EQ(disjoint.jaccard, 0.0);
  EXPECT_DOUBLE_EQ(*disjoint.recall, 0.0);

  MotifOverlap empty = motif_overlap({}, {});
  EXPECT_DOUBLE_EQ(empty.jaccard, 1.0);
  EXPECT_FALSE(empty.recall.has_value());
}

TEST(MotifOverlap, JaccardRecallSetIdentity) {
  oracle::Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    MotifSet ref, est;
    for (int i = rng.uniform_int(0, 8); i > 0; --i) {
      ref.insert({rng.uniform_int(-3, 3), rng.uniform_int(-3, 3), rng.uniform_int(-3, 3)});
    }
    for (int i = rng.uniform_int(0, 8); i > 0; --i) {
      est.insert({rng.uniform_int(-3, 3), rng.uniform_int(-3, 3), rng.uniform_int(-3, 3)});
    }
    MotifOverlap o = motif_overlap(ref, est);
    ASSERT_LE(o.jaccard, 1.0);
    if (o.recall) {
      ASSERT_LE(*o.recall, 1.0);
      std::size_t uni = ref.size() + est.size();
      for (const auto& g : ref) uni -= est.count(g);
      ASSERT_NEAR(o.jaccard,
                  *o.recall * static_cast<double>(ref.size()) / static_cast<double>(uni), 1e-12);
    }
  }
}

TEST(EvalMelody, IdentityPair) {
  AudioClip clip = synth_fixture(FixtureSpec::melody(
      {{60, 0.25}, {64, 0.25}, {67, 0.25}, {72, 0.25}, {67, 0.25}, {64, 0.25}}, 6.0));
  MelodyScores s = eval_melody(clip, clip);
  EXPECT_DOUBLE_EQ(*s.voicing_recall.value, 1.0);
  EXPECT_DOUBLE_EQ(*s.motif_jaccard.value, 1.0);
  EXPECT_DOUBLE_EQ(*s.motif_recall.value, 1.0);
}

TEST(EvalMelody, TranspositionKeepsMotifs) {
  FixtureSpec orig = FixtureSpec::melody(
      {{60, 0.25}, {64, 0.25}, {67, 0.25}, {72, 0.25}, {67, 0.25}, {64, 0.25}}, 6.0);
  AudioClip a = synth_fixture(orig);
  AudioClip b = synth_fixture(orig.transposed(5));
  MelodyScores s = eval_melody(a, b);
  EXPECT_DOUBLE_EQ(*s.motif_jaccard.value, 1.0);
  EXPECT_GE(*s.voicing_recall.value, 0.95);
}

TEST(EvalMelody, RetrogradeChangesMotifs) {
  std::vector<FixtureSpec::Note> fwd = {{60, 0.25}, {64, 0.25}, {67, 0.25},
                                        {72, 0.25}, {69, 0.25}, {62, 0.25}};
  std::vector<FixtureSpec::Note> rev(fwd.rbegin(), fwd.rend());
  AudioClip a = synth_fixture(FixtureSpec::melody(fwd, 6.0));
  AudioClip b = synth_fixture(FixtureSpec::melody(rev, 6.0));
  MelodyScores s = eval_melody(a, b);

  // the expected jaccard from the hand-computed gram sets of the two loops
  std::vector<int> fp, rp;
  for (int k = 0; k < 5; ++k) {  // looped sequences: repeat the cycle
    for (const auto& n : fwd) fp.push_back(n.midi);
    for (const auto& n : rev) rp.push_back(n.midi);
  }
  MotifOverlap expected = motif_overlap(motif_3grams(make_notes(fp)),
                                        motif_3grams(make_notes(rp)));
  ASSERT_TRUE(s.motif_jaccard.present());
  EXPECT_LT(*s.motif_jaccard.value, 1.0);
  EXPECT_NEAR(*s.motif_jaccard.value, expected.jaccard, 1e-12);
}
