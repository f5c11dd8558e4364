#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "musecp/audio.hpp"
#include "musecp/error.hpp"
#include "musecp/fixtures.hpp"

namespace musecp {

struct NamedFixture {
  std::string name;
  FixtureSpec spec;
};

/// The ten canonical identity-suite fixtures. Each one is tonal, rhythmic,
/// and melodic enough that every metric is measurable on an identity pair:
/// at least 4 s of onsets, a clear key, and four or more segmented notes.
inline std::vector<NamedFixture> identity_fixture_set() {
  using Note = FixtureSpec::Note;
  std::vector<NamedFixture> set;

  auto melody = [](std::vector<Note> notes, double seconds) {
    return FixtureSpec::melody(std::move(notes), seconds);
  };

  // 120 BPM eighth-note line in C major.
  set.push_back({"melody_a_120",
                 melody({{57, 0.5}, {60, 0.5}, {64, 0.5}, {67, 0.5},
                         {64, 0.5}, {62, 0.5}, {59, 0.5}, {60, 0.5}}, 12.0)});
  // 90 BPM line in D minor territory.
  set.push_back({"melody_b_90",
                 melody({{62, 0.667}, {65, 0.667}, {69, 0.667}, {67, 0.667},
                         {65, 0.667}, {63, 0.667}}, 12.0)});
  // 150 BPM line with wider leaps.
  set.push_back({"melody_c_150",
                 melody({{64, 0.4}, {71, 0.4}, {67, 0.4}, {72, 0.4},
                         {69, 0.4}, {66, 0.4}, {64, 0.4}, {62, 0.4}}, 12.0)});
  set.push_back({"scale_c_major", FixtureSpec::scale(60, false, 10.0, 0.3)});
  set.push_back({"scale_a_minor", FixtureSpec::scale(57, true, 10.0, 0.3)});
  set.push_back({"scale_g_major", FixtureSpec::scale(67, false, 10.0, 0.3)});
  set.push_back({"scale_e_minor", FixtureSpec::scale(64, true, 10.0, 0.3)});
  set.push_back({"arpeggio_c_major",
                 melody({{60, 0.25}, {64, 0.25}, {67, 0.25}, {72, 0.25},
                         {67, 0.25}, {64, 0.25}}, 10.0)});
  set.push_back({"arpeggio_fs_major",
                 melody({{66, 0.25}, {70, 0.25}, {73, 0.25}, {78, 0.25},
                         {73, 0.25}, {70, 0.25}}, 10.0)});
  set.push_back({"arpeggio_a_minor",
                 melody({{57, 0.25}, {60, 0.25}, {64, 0.25}, {69, 0.25},
                         {64, 0.25}, {60, 0.25}}, 10.0)});
  return set;
}

/// Contrast fixtures exercising specific metric behaviors (tempo deltas,
/// tritone transposition, structural boundaries, ...).
inline std::vector<NamedFixture> contrast_fixture_set() {
  std::vector<NamedFixture> set;
  set.push_back({"click_120", FixtureSpec::click_track(120.0, 10.0)});
  set.push_back({"click_90", FixtureSpec::click_track(90.0, 10.0)});
  set.push_back({"triad_c_major", FixtureSpec::triad_loop(60, false, 120.0, 12.0)});
  set.push_back({"triad_fs_major", FixtureSpec::triad_loop(66, false, 120.0, 12.0)});
  set.push_back({"triad_a_minor", FixtureSpec::triad_loop(57, true, 120.0, 12.0)});

  FixtureSpec band_a = FixtureSpec::band_noise(7, 8.0, 300.0, 1200.0);
  FixtureSpec band_b = FixtureSpec::band_noise(9, 8.0, 2800.0, 5600.0);
  FixtureSpec band_b2 = FixtureSpec::band_noise(21, 8.0, 2200.0, 4400.0);
  set.push_back({"texture_ab", FixtureSpec::concat({band_a, band_b})});
  set.push_back({"texture_ab_alt", FixtureSpec::concat({band_a, band_b2})});
  set.push_back({"texture_homog", FixtureSpec::band_noise(7, 16.0, 300.0, 1200.0)});

  auto identity = identity_fixture_set();
  set.push_back({"melody_a_trans5", identity[0].spec.transposed(5)});
  return set;
}

/// Write the full fixture corpus plus a ready-to-run JSON-lines manifest
/// (identity pairs for the canonical ten, contrast pairs for the rest).
/// Byte-identical on every run.
inline void write_fixture_corpus(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);

  auto write_one = [&](const NamedFixture& f) {
    AudioClip clip = synth_fixture(f.spec);
    write_wav(dir / (f.name + ".wav"), clip);
  };
  for (const auto& f : identity_fixture_set()) write_one(f);
  for (const auto& f : contrast_fixture_set()) write_one(f);

  std::ofstream manifest(dir / "fixtures.jsonl");
  if (!manifest) {
    throw McpError(ErrorCode::io_error, "cannot write manifest in " + dir.string());
  }
  auto emit = [&](const std::string& pair_id, const std::string& system,
                  const std::string& original, const std::string& edited) {
    manifest << "{\"pair_id\": \"" << pair_id << "\", \"system_id\": \"" << system
             << "\", \"original_path\": \"" << (dir / (original + ".wav")).string()
             << "\", \"edited_path\": \"" << (dir / (edited + ".wav")).string() << "\"}\n";
  };
  for (const auto& f : identity_fixture_set()) {
    emit("identity_" + f.name, "identity", f.name, f.name);
  }
  emit("tempo_120_vs_90", "contrast", "click_120", "click_90");
  emit("tritone_triads", "contrast", "triad_c_major", "triad_fs_major");
  emit("relative_keys", "contrast", "scale_c_major", "scale_a_minor");
  emit("melody_transposed_5", "contrast", "melody_a_120", "melody_a_trans5");
  emit("structure_lost", "contrast", "texture_ab", "texture_homog");
  emit("structure_kept", "contrast", "texture_ab", "texture_ab_alt");
  if (!manifest) {
    throw McpError(ErrorCode::io_error, "short write for manifest in " + dir.string());
  }
}

}  // namespace musecp
