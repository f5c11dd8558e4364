// musecp: command-line front end for the MuseCPBench evaluation library.
//
// Subcommands:
//   evaluate-pair ORIGINAL EDITED     one (original, edited) pair -> JSON on stdout
//   evaluate-corpus MANIFEST          JSON-lines manifest -> report file
//   make-fixtures OUT_DIR             deterministic synthetic corpus + manifest
//   dump-features CLIP                columnar feature dumps for cross-checking
//
// Exit codes: 0 success, 1 partial results (no pair succeeded), 2 usage/IO/
// validation errors.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "musecp/musecp.hpp"

namespace {

musecp::EvalConfig resolve_config(const std::string& config_path) {
  if (config_path.empty()) {
    musecp::EvalConfig cfg;
    cfg.validate();
    return cfg;
  }
  return musecp::load_config(config_path);
}

int explain_metric(const std::string& id) {
  const musecp::MetricInfo* info = musecp::find_metric(id);
  if (info == nullptr) {
    std::cerr << "unknown metric '" << id << "'. Available metrics:\n";
    for (const auto& m : musecp::kMetrics) {
      std::cerr << "  " << m.id << (m.headline ? "" : " (diagnostic)") << "\n";
    }
    return 2;
  }
  std::cout << info->display << " [" << info->id << "]\n"
            << "facet: " << info->facet << "\n"
            << "direction: " << (info->higher_better ? "higher is better" : "lower is better")
            << "\n"
            << (info->headline ? "headline metric" : "diagnostic metric") << "\n\n"
            << info->definition << "\n";
  return 0;
}

nlohmann::ordered_json record_to_json(const musecp::PairRecord& rec) {
  nlohmann::ordered_json j;
  j["pair_id"] = rec.pair_id;
  j["system_id"] = rec.system_id;
  j["failed"] = rec.failed;
  if (rec.failed) {
    j["failure"] = rec.failure;
    return j;
  }
  auto metrics = nlohmann::ordered_json::object();
  auto reasons = nlohmann::ordered_json::object();
  for (const auto& m : musecp::kMetrics) {
    auto it = rec.metrics.find(std::string(m.id));
    if (it == rec.metrics.end()) continue;
    if (it->second.present()) {
      metrics[std::string(m.id)] = *it->second.value;
    } else {
      metrics[std::string(m.id)] = nullptr;
      reasons[std::string(m.id)] = it->second.reason;
    }
  }
  j["metrics"] = std::move(metrics);
  j["missing_reasons"] = std::move(reasons);
  return j;
}

int run_evaluate_pair(const std::string& original, const std::string& edited,
                      const std::string& config_path) {
  musecp::EvalConfig cfg = resolve_config(config_path);
  musecp::EvalPair pair;
  pair.pair_id = "cli";
  pair.system_id = "cli";
  pair.original_path = original;
  pair.edited_path = edited;
  musecp::PairRecord rec = musecp::evaluate_pair(pair, cfg);
  if (rec.failed) {
    std::cerr << "error: " << rec.failure << "\n";
    return 2;
  }
  nlohmann::ordered_json j = record_to_json(rec);
  j["config_fingerprint"] = cfg.fingerprint();
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_evaluate_corpus(const std::string& manifest_path, const std::string& out_path,
                        const std::string& format_name, int jobs,
                        const std::string& config_path) {
  musecp::EvalConfig cfg = resolve_config(config_path);
  musecp::ReportFormat format = musecp::parse_report_format(format_name);
  std::vector<musecp::EvalPair> pairs = musecp::load_manifest(manifest_path);
  if (pairs.empty()) {
    std::cerr << "error: manifest has no pairs\n";
    return 2;
  }

  auto progress = [](const musecp::PairRecord& rec, std::size_t done, std::size_t total) {
    std::fprintf(stderr, "[%zu/%zu] %s %s (%.2fs)%s\n", done, total, rec.pair_id.c_str(),
                 rec.failed ? "FAILED" : "ok", rec.analysis_seconds,
                 rec.failed ? (" - " + rec.failure).c_str() : "");
  };
  std::vector<musecp::PairRecord> records = musecp::evaluate_corpus(pairs, cfg, jobs, progress);

  std::size_t succeeded = 0;
  for (const auto& r : records) {
    if (!r.failed) ++succeeded;
  }

  musecp::McpReport report = musecp::aggregate(std::move(records), cfg.fingerprint());
  std::string body = musecp::emit_report(report, format);
  if (out_path == "-") {
    std::cout << body;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return 2;
    }
    out << body;
  }
  std::fprintf(stderr, "%zu/%zu pairs evaluated\n", succeeded, pairs.size());
  return succeeded > 0 ? 0 : 1;
}

int run_make_fixtures(const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  auto probe = dir / ".write_probe";
  {
    std::ofstream test(probe);
    if (!test) {
      std::cerr << "error: directory not writable: " << out_dir << "\n";
      return 2;
    }
  }
  std::filesystem::remove(probe, ec);
  musecp::write_fixture_corpus(dir);
  std::cout << "fixtures written to " << dir.string() << "\n";
  return 0;
}

int run_dump_features(const std::string& clip_path, const std::string& out_dir,
                      const std::string& config_path) {
  musecp::EvalConfig cfg = resolve_config(config_path);
  std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);

  musecp::AudioClip clip = musecp::admit_clip(musecp::load_wav(clip_path), cfg);
  musecp::Spectrogram spec = musecp::stft(clip, cfg);
  musecp::Chromagram ch = musecp::chromagram(clip, cfg);
  musecp::OnsetEnvelope env = musecp::onset_envelope(spec, cfg);
  auto timbre = musecp::timbre_features(spec, cfg.timbre_bands, cfg);

  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) {
      throw musecp::McpError(musecp::ErrorCode::io_error,
                             std::string("cannot write ") + name + " in " + out_dir);
    }
    out.precision(10);
    return out;
  };

  {
    auto out = open("chroma.tsv");
    for (std::size_t f = 0; f < ch.frames.size(); ++f) {
      out << static_cast<double>(f) * ch.frame_hop;
      for (double v : ch.frames[f]) out << '\t' << v;
      out << '\n';
    }
  }
  {
    auto out = open("onset.tsv");
    for (std::size_t f = 0; f < env.strengths.size(); ++f) {
      out << static_cast<double>(f) * env.frame_hop << '\t' << env.strengths[f] << '\n';
    }
  }
  {
    auto out = open("timbre.tsv");
    for (std::size_t f = 0; f < timbre.size(); ++f) {
      out << static_cast<double>(f) * spec.frame_hop;
      for (double v : timbre[f]) out << '\t' << v;
      out << '\n';
    }
  }
  {
    auto out = open("beats.txt");
    try {
      musecp::BeatGrid grid = musecp::track_beats(env, musecp::estimate_tempo(env, cfg), cfg);
      for (double t : grid.beat_times) out << t << '\n';
    } catch (const musecp::McpError&) {
      // no tempo: leave the file empty
    }
  }
  {
    auto out = open("notes.tsv");
    musecp::NoteSequence notes = musecp::segment_notes(musecp::track_pitch(clip, cfg), cfg);
    for (const auto& n : notes.notes) {
      out << n.onset << '\t' << n.duration << '\t' << n.midi << '\n';
    }
  }
  {
    auto out = open("segments.tsv");
    auto seg = musecp::segment_structure(ch, timbre, clip.duration_seconds(), cfg);
    for (std::size_t s = 0; s + 1 < seg.boundaries.size(); ++s) {
      double lo = seg.boundaries[s], hi = seg.boundaries[s + 1];
      double mid = 0.5 * (lo + hi);
      std::size_t li = std::min(seg.frame_labels.size() - 1,
                                static_cast<std::size_t>(mid / seg.label_hop));
      out << lo << '\t' << hi << '\t' << seg.frame_labels[li] << '\n';
    }
  }
  std::cout << "features written to " << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MuseCPBench: music context preservation metrics over (original, edited) pairs"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string explain_id;
  app.add_option("--explain", explain_id, "Print a metric's definition and exit");

  std::string config_path;
  app.add_option("--config", config_path, "Config file (key = value lines)")
      ->envname("MUSECP_CONFIG");

  auto* pair_cmd = app.add_subcommand("evaluate-pair", "Evaluate one original/edited pair");
  std::string original, edited;
  pair_cmd->add_option("original", original, "Reference WAV")->required();
  pair_cmd->add_option("edited", edited, "Edited WAV")->required();

  auto* corpus_cmd = app.add_subcommand("evaluate-corpus", "Evaluate a JSON-lines manifest");
  std::string manifest_path, out_path = "-", format_name = "json";
  int jobs = 1;
  corpus_cmd->add_option("manifest", manifest_path, "Manifest path (JSON lines)")->required();
  corpus_cmd->add_option("--out", out_path, "Report path ('-' = stdout)");
  corpus_cmd->add_option("--format", format_name, "Report format: json|csv|md")
      ->check(CLI::IsMember({"json", "csv", "md", "markdown"}));
  corpus_cmd->add_option("--jobs", jobs, "Concurrent pair evaluations")
      ->check(CLI::Range(1, 256));

  auto* fixtures_cmd = app.add_subcommand("make-fixtures", "Write the synthetic fixture corpus");
  std::string fixtures_dir;
  fixtures_cmd->add_option("out_dir", fixtures_dir, "Output directory")->required();

  auto* dump_cmd = app.add_subcommand("dump-features", "Dump analysis features as text");
  std::string dump_clip, dump_dir = "features";
  dump_cmd->add_option("clip", dump_clip, "WAV to analyze")->required();
  dump_cmd->add_option("--out", dump_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (!explain_id.empty()) return explain_metric(explain_id);
    if (pair_cmd->parsed()) return run_evaluate_pair(original, edited, config_path);
    if (corpus_cmd->parsed()) {
      return run_evaluate_corpus(manifest_path, out_path, format_name, jobs, config_path);
    }
    if (fixtures_cmd->parsed()) return run_make_fixtures(fixtures_dir);
    if (dump_cmd->parsed()) return run_dump_features(dump_clip, dump_dir, config_path);
    std::cout << app.help();
    return 0;
  } catch (const musecp::McpError& e) {
    std::cerr << "error (" << musecp::to_string(e.code()) << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
