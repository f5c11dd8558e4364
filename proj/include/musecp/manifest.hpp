#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "musecp/error.hpp"

namespace musecp {

/// One evaluation item: the original clip, the edited output of some system,
/// and the (metadata-only) instruction that produced it.
struct EvalPair {
  std::string pair_id;
  std::string system_id;
  std::string original_path;
  std::string edited_path;
  std::string instruction;  // optional
};

/// Parse a JSON-lines manifest, one pair per line. Schema problems are fatal
/// and name the offending line; unresolvable audio paths are not checked
/// here — they surface as per-pair failures at evaluation time.
inline std::vector<EvalPair> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw McpError(ErrorCode::io_error, "cannot open manifest: " + path.string());
  }

  std::vector<EvalPair> pairs;
  std::set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
    if (blank) continue;

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw McpError(ErrorCode::parse_error, "manifest line " + std::to_string(line_no) +
                                                 ": malformed JSON (" + e.what() + ")");
    }
    if (!j.is_object()) {
      throw McpError(ErrorCode::parse_error,
                     "manifest line " + std::to_string(line_no) + ": expected an object");
    }

    EvalPair pair;
    auto require_string = [&](const char* field) {
      if (!j.contains(field) || !j[field].is_string() || j[field].get<std::string>().empty()) {
        throw McpError(ErrorCode::parse_error, "manifest line " + std::to_string(line_no) +
                                                   ": missing or empty field '" +
                                                   std::string(field) + "'");
      }
      return j[field].get<std::string>();
    };
    pair.pair_id = require_string("pair_id");
    pair.system_id = require_string("system_id");
    pair.original_path = require_string("original_path");
    pair.edited_path = require_string("edited_path");
    if (j.contains("instruction") && j["instruction"].is_string()) {
      pair.instruction = j["instruction"].get<std::string>();
    }

    if (!seen_ids.insert(pair.pair_id).second) {
      throw McpError(ErrorCode::parse_error, "manifest line " + std::to_string(line_no) +
                                                 ": duplicate pair_id '" + pair.pair_id + "'");
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace musecp
