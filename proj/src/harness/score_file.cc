// Copyright 2026 The estime Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "estime/score_file.h"

#include <cmath>
#include <fstream>
#include <set>

#include "estime/error.h"

namespace estime {
namespace {

using nlohmann::json;

json ParseObject(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error &e) {
    throw Error(ErrorCode::kParse, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kSchema, "expected a JSON object");
  return j;
}

}  // namespace

std::string MetaToJsonLine(const ScoreMeta &meta) {
  json m;
  m["measure"] = meta.measure;
  m["negative_sense"] = meta.negative_sense;
  m["config"] = meta.config;
  json j;
  j["meta"] = std::move(m);
  return j.dump();
}

std::string ScoreToJsonLine(const ScoreRecord &record) {
  json j;
  j["id"] = record.id;
  j["measure"] = record.measure;
  j["value"] = record.value;
  if (record.detail) j["detail"] = *record.detail;
  return j.dump();
}

ScoreMeta ParseMetaLine(std::string_view line) {
  const json j = ParseObject(line);
  const auto it = j.find("meta");
  if (it == j.end() || !it->is_object()) {
    throw Error(ErrorCode::kSchema, "expected a {\"meta\": {...}} header");
  }
  ScoreMeta meta;
  const auto measure = it->find("measure");
  if (measure == it->end() || !measure->is_string()) {
    throw Error(ErrorCode::kSchema, "meta.measure must be a string");
  }
  meta.measure = measure->get<std::string>();
  if (const auto ns = it->find("negative_sense"); ns != it->end()) {
    if (!ns->is_boolean()) {
      throw Error(ErrorCode::kSchema, "meta.negative_sense must be a boolean");
    }
    meta.negative_sense = ns->get<bool>();
  }
  if (const auto config = it->find("config"); config != it->end()) {
    meta.config = *config;
  }
  return meta;
}

ScoreRecord ParseScoreLine(std::string_view line) {
  const json j = ParseObject(line);
  ScoreRecord r;
  const auto id = j.find("id");
  const auto measure = j.find("measure");
  const auto value = j.find("value");
  if (id == j.end() || !id->is_string()) {
    throw Error(ErrorCode::kSchema, "field 'id' must be a string");
  }
  if (measure == j.end() || !measure->is_string()) {
    throw Error(ErrorCode::kSchema, "field 'measure' must be a string");
  }
  if (value == j.end() || !value->is_number()) {
    throw Error(ErrorCode::kSchema, "field 'value' must be a number");
  }
  r.id = id->get<std::string>();
  r.measure = measure->get<std::string>();
  r.value = value->get<double>();
  if (!std::isfinite(r.value)) {
    throw Error(ErrorCode::kSchema, "non-finite value for '" + r.id + "'");
  }
  if (const auto detail = j.find("detail"); detail != j.end()) {
    r.detail = *detail;
  }
  return r;
}

ScoreFile ReadScoreFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  ScoreFile file;
  bool have_meta = false;
  std::set<std::string> seen;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      if (!have_meta) {
        file.meta = ParseMetaLine(line);
        have_meta = true;
        continue;
      }
      ScoreRecord r = ParseScoreLine(line);
      if (r.measure != file.meta.measure) {
        throw Error(ErrorCode::kSchema, "measure '" + r.measure +
                                            "' differs from the header's '" +
                                            file.meta.measure + "'");
      }
      if (!seen.insert(r.id).second) {
        throw Error(ErrorCode::kSchema, "duplicate id '" + r.id + "'");
      }
      file.records.push_back(std::move(r));
    } catch (const Error &e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(number) +
                                ": " + e.what());
    }
  }
  if (!have_meta) {
    throw Error(ErrorCode::kSchema, path.string() + ": missing meta header");
  }
  return file;
}

void WriteScoreFile(const std::filesystem::path &path, const ScoreFile &file) {
  std::string content = MetaToJsonLine(file.meta) + '\n';
  for (const ScoreRecord &r : file.records) {
    content += ScoreToJsonLine(r);
    content += '\n';
  }
  WriteFileAtomically(path, content);
}

void WriteFileAtomically(const std::filesystem::path &path,
                         std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, "cannot rename " + tmp.string() + " to " +
                                    path.string() + ": " + ec.message());
  }
}

}  // namespace estime
