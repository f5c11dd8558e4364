#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "musecp/error.hpp"
#include "musecp/metric_value.hpp"
#include "musecp/metrics_info.hpp"

namespace musecp {

/// Result of evaluating one pair. Wall-clock analysis time is kept for
/// progress reporting only and never serialized, so reports stay
/// byte-deterministic.
struct PairRecord {
  std::string pair_id;
  std::string system_id;
  bool failed = false;
  std::string failure;  // reason when failed
  std::map<std::string, MetricValue> metrics;
  double analysis_seconds = 0.0;  // not part of any report
};

struct MetricAggregate {
  double mean = 0.0;
  int present = 0;
  int missing = 0;
  bool has_mean() const { return present > 0; }
};

struct SystemAggregate {
  std::string system_id;
  int pair_count = 0;     // evaluated pairs (failures excluded)
  int failure_count = 0;
  std::map<std::string, MetricAggregate> metrics;
  std::vector<std::string> best_in;  // headline metrics this system wins
};

struct McpReport {
  std::string config_fingerprint;
  std::vector<PairRecord> per_pair;          // sorted by pair_id
  std::vector<SystemAggregate> per_system;   // sorted by system_id
};

/// Fold per-pair records into per-system means over non-missing values and
/// flag the best system per headline metric (direction-aware). The fold is a
/// pure function of the record multiset: input order never matters.
inline McpReport aggregate(std::vector<PairRecord> records,
                           const std::string& config_fingerprint) {
  if (records.empty()) {
    throw McpError(ErrorCode::invalid_argument, "aggregate: no records");
  }
  std::sort(records.begin(), records.end(),
            [](const PairRecord& a, const PairRecord& b) { return a.pair_id < b.pair_id; });

  McpReport report;
  report.config_fingerprint = config_fingerprint;

  std::map<std::string, SystemAggregate> systems;
  for (const auto& rec : records) {
    SystemAggregate& sys = systems[rec.system_id];
    sys.system_id = rec.system_id;
    if (rec.failed) {
      ++sys.failure_count;
      continue;
    }
    ++sys.pair_count;
    for (const auto& m : kMetrics) {
      auto it = rec.metrics.find(std::string(m.id));
      MetricAggregate& agg = sys.metrics[std::string(m.id)];
      if (it != rec.metrics.end() && it->second.present()) {
        agg.mean += *it->second.value;  // running sum; divided below
        ++agg.present;
      } else {
        ++agg.missing;
      }
    }
  }
  for (auto& [id, sys] : systems) {
    for (auto& [metric, agg] : sys.metrics) {
      if (agg.present > 0) agg.mean /= agg.present;
    }
  }

  // Direction-aware winner flags over headline metrics; ties share the flag.
  for (const auto& m : kMetrics) {
    if (!m.headline) continue;
    bool any = false;
    double best = 0.0;
    for (const auto& [id, sys] : systems) {
      auto it = sys.metrics.find(std::string(m.id));
      if (it == sys.metrics.end() || !it->second.has_mean()) continue;
      double v = it->second.mean;
      if (!any || (m.higher_better ? v > best : v < best)) {
        best = v;
        any = true;
      }
    }
    if (!any) continue;
    for (auto& [id, sys] : systems) {
      auto it = sys.metrics.find(std::string(m.id));
      if (it != sys.metrics.end() && it->second.has_mean() && it->second.mean == best) {
        sys.best_in.push_back(std::string(m.id));
      }
    }
  }

  report.per_pair = std::move(records);
  for (auto& [id, sys] : systems) report.per_system.push_back(std::move(sys));
  return report;
}

enum class ReportFormat { json, csv, markdown };

inline ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  if (name == "md" || name == "markdown") return ReportFormat::markdown;
  throw McpError(ErrorCode::invalid_argument, "unknown report format: " + name);
}

namespace detail {

inline std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline nlohmann::ordered_json report_json(const McpReport& report) {
  nlohmann::ordered_json root;
  root["config_fingerprint"] = report.config_fingerprint;
  root["pair_count"] = report.per_pair.size();

  auto pairs = nlohmann::ordered_json::array();
  for (const auto& rec : report.per_pair) {
    nlohmann::ordered_json j;
    j["pair_id"] = rec.pair_id;
    j["system_id"] = rec.system_id;
    j["failed"] = rec.failed;
    if (rec.failed) {
      j["failure"] = rec.failure;
    } else {
      auto metrics = nlohmann::ordered_json::object();
      auto reasons = nlohmann::ordered_json::object();
      for (const auto& m : kMetrics) {
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
    }
    pairs.push_back(std::move(j));
  }
  root["per_pair"] = std::move(pairs);

  auto systems = nlohmann::ordered_json::array();
  for (const auto& sys : report.per_system) {
    nlohmann::ordered_json j;
    j["system_id"] = sys.system_id;
    j["pair_count"] = sys.pair_count;
    j["failure_count"] = sys.failure_count;
    auto metrics = nlohmann::ordered_json::object();
    for (const auto& m : kMetrics) {
      auto it = sys.metrics.find(std::string(m.id));
      if (it == sys.metrics.end()) continue;
      nlohmann::ordered_json cell;
      if (it->second.has_mean()) {
        cell["mean"] = it->second.mean;
      } else {
        cell["mean"] = nullptr;
      }
      cell["present"] = it->second.present;
      cell["missing"] = it->second.missing;
      metrics[std::string(m.id)] = std::move(cell);
    }
    j["metrics"] = std::move(metrics);
    j["best_in"] = sys.best_in;
    systems.push_back(std::move(j));
  }
  root["per_system"] = std::move(systems);
  return root;
}

inline std::string report_csv(const McpReport& report) {
  std::string out = "pair_id,system_id";
  for (const auto& m : kMetrics) {
    out += ',';
    out += m.id;
  }
  out += ",failed,failure\n";
  for (const auto& rec : report.per_pair) {
    out += rec.pair_id + ',' + rec.system_id;
    for (const auto& m : kMetrics) {
      out += ',';
      auto it = rec.metrics.find(std::string(m.id));
      if (it != rec.metrics.end() && it->second.present()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", *it->second.value);
        out += buf;
      }
    }
    out += ',';
    out += rec.failed ? "1" : "0";
    out += ',';
    std::string failure = rec.failure;
    std::replace(failure.begin(), failure.end(), ',', ';');
    out += failure;
    out += '\n';
  }
  return out;
}

inline std::string report_markdown(const McpReport& report) {
  auto cell = [&](const SystemAggregate& sys, std::string_view id) -> std::string {
    auto it = sys.metrics.find(std::string(id));
    if (it == sys.metrics.end() || !it->second.has_mean()) return "—";
    std::string v = fixed3(it->second.mean);
    bool best = std::find(sys.best_in.begin(), sys.best_in.end(), std::string(id)) !=
                sys.best_in.end();
    return best ? "**" + v + "**" : v;
  };
  auto arrow = [](const MetricInfo& m) { return m.higher_better ? " ↑" : " ↓"; };

  static constexpr std::string_view block1[] = {"cof_distance", "chroma_dtw_similarity",
                                                "majmin_score", "delta_bpm",
                                                "beat_f_measure", "information_gain"};
  static constexpr std::string_view block2[] = {"adjusted_rand_index", "boundary_f_measure",
                                                "voicing_recall", "motif_jaccard",
                                                "motif_recall"};

  std::string out;
  out += "config fingerprint: `" + report.config_fingerprint + "`\n\n";
  auto emit_block = [&](const std::string_view* ids, std::size_t count,
                        const std::string& title) {
    out += "**" + title + "**\n\n";
    out += "| System |";
    for (std::size_t i = 0; i < count; ++i) {
      const MetricInfo* m = find_metric(ids[i]);
      out += ' ';
      out += m->display;
      out += arrow(*m);
      out += " |";
    }
    out += "\n|---|";
    for (std::size_t i = 0; i < count; ++i) out += "---|";
    out += '\n';
    for (const auto& sys : report.per_system) {
      out += "| " + sys.system_id + " |";
      for (std::size_t i = 0; i < count; ++i) {
        out += ' ' + cell(sys, ids[i]) + " |";
      }
      out += '\n';
    }
    out += '\n';
  };
  emit_block(block1, 6, "Harmony & Tonality / Rhythm & Meter");
  emit_block(block2, 5, "Structural Form / Melodic Content & Motifs");
  return out;
}

}  // namespace detail

/// Serialize a report. JSON carries full precision and the per-pair detail;
/// CSV is flat per-pair rows; markdown is the two-block summary table with
/// 3-decimal values and the best system per metric in bold.
inline std::string emit_report(const McpReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::json: return detail::report_json(report).dump(2) + "\n";
    case ReportFormat::csv: return detail::report_csv(report);
    case ReportFormat::markdown: return detail::report_markdown(report);
  }
  throw McpError(ErrorCode::invalid_argument, "unknown report format");
}

}  // namespace musecp
