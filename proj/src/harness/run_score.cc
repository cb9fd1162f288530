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

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "estime/error.h"
#include "estime/harness.h"

namespace estime {
namespace {

using nlohmann::json;

json ResultDetail(const EstimeResult &result, bool include_matches) {
  json detail;
  detail["num_checked"] = result.num_checked;
  if (include_matches) {
    json matches = json::array();
    for (const TokenMatch &m : result.matches) {
      matches.push_back({{"summary_pos", m.summary_pos},
                         {"text_pos", m.text_pos},
                         {"summary_token", m.summary_token},
                         {"text_token", m.text_token},
                         {"similarity", m.similarity}});
    }
    detail["matches"] = std::move(matches);
  }
  return detail;
}

// Reads the completed records of an earlier run. A torn final line (the
// process died mid-write) is dropped; anything else malformed is an error.
std::map<std::string, ScoreRecord> ReadJournal(const std::filesystem::path &path,
                                               const ScoreMeta &expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();
  const bool torn_tail = !content.empty() && content.back() != '\n';
  std::vector<std::string> lines;
  std::string line;
  for (std::istringstream split(content); std::getline(split, line);) {
    lines.push_back(line);
  }

  std::map<std::string, ScoreRecord> records;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      if (i == 0) {
        if (ParseMetaLine(lines[0]) != expected) {
          throw Error(ErrorCode::kConfiguration,
                      "journal was written by a run with different settings; "
                      "delete it to start over");
        }
        continue;
      }
      ScoreRecord r = ParseScoreLine(lines[i]);
      records.insert_or_assign(r.id, std::move(r));
    } catch (const Error &e) {
      const bool last = i + 1 == lines.size();
      if (last && torn_tail && e.code() != ErrorCode::kConfiguration && i > 0) {
        break;
      }
      throw Error(e.code(), path.string() + ":" + std::to_string(i + 1) +
                                ": " + e.what());
    }
  }
  if (lines.empty()) {
    throw Error(ErrorCode::kSchema, path.string() + ": empty journal");
  }
  return records;
}

}  // namespace

ScoreMeta RunScoreMeta(const RunScoreOptions &options,
                       const std::string &model_name) {
  const EstimeConfig &c = options.config;
  ScoreMeta meta;
  meta.measure = options.measure.empty()
                     ? "ESTIME-" + std::to_string(c.layer)
                     : options.measure;
  meta.negative_sense = true;
  meta.config = {{"model", model_name},
                 {"window", c.window},
                 {"stride", c.stride},
                 {"margin", c.margin},
                 {"layer", c.layer},
                 {"filter_to_text_tokens", c.filter_to_text_tokens},
                 {"include_continuation_tokens", c.include_continuation_tokens},
                 {"include_matches", options.include_matches}};
  return meta;
}

std::filesystem::path JournalPath(const std::filesystem::path &out) {
  std::filesystem::path journal = out;
  journal += ".journal";
  return journal;
}

RunScoreSummary RunScore(std::span<const PairRecord> pairs,
                         const BackendFactory &factory,
                         const RunScoreOptions &options,
                         const std::filesystem::path &out) {
  CheckUniqueIds(pairs);
  std::string model_name;
  {
    std::unique_ptr<MaskedLmBackend> probe = factory();
    ValidateConfig(options.config, probe->capabilities());
    model_name = probe->model_name();
  }
  const ScoreMeta meta = RunScoreMeta(options, model_name);
  const std::filesystem::path journal = JournalPath(out);

  RunScoreSummary summary;
  summary.total = pairs.size();
  std::map<std::string, ScoreRecord> done;
  if (std::filesystem::exists(journal)) done = ReadJournal(journal, meta);

  // Rewrite the journal so that appends start on a clean line.
  {
    std::string content = MetaToJsonLine(meta) + '\n';
    for (const PairRecord &p : pairs) {
      const auto it = done.find(p.id);
      if (it != done.end()) content += ScoreToJsonLine(it->second) + '\n';
    }
    WriteFileAtomically(journal, content);
  }

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (done.contains(pairs[i].id)) {
      ++summary.resumed;
    } else {
      pending.push_back(i);
    }
  }
  bool interrupted = false;
  if (options.max_new_items && pending.size() > *options.max_new_items) {
    pending.resize(*options.max_new_items);
    interrupted = true;
  }

  std::vector<TextSummary> items;
  items.reserve(pending.size());
  for (std::size_t i : pending) {
    items.push_back({pairs[i].text, pairs[i].summary});
  }

  std::ofstream log(journal, std::ios::binary | std::ios::app);
  if (!log) throw Error(ErrorCode::kIo, "cannot append to " + journal.string());
  bool log_failed = false;
  auto on_done = [&](std::size_t k, const ScoreOutcome &outcome) {
    const PairRecord &pair = pairs[pending[k]];
    if (!outcome.result) {
      summary.failures.emplace_back(pair.id, outcome.error);
      return;
    }
    ScoreRecord record;
    record.id = pair.id;
    record.measure = meta.measure;
    record.value = outcome.result->num_inconsistencies;
    record.detail = ResultDetail(*outcome.result, options.include_matches);
    log << ScoreToJsonLine(record) << '\n' << std::flush;
    if (!log) log_failed = true;
    done.insert_or_assign(pair.id, std::move(record));
    ++summary.computed;
  };
  ScoreBatch(items, options.config, factory, options.workers, on_done);
  log.close();
  if (log_failed) {
    throw Error(ErrorCode::kIo, "failed writing " + journal.string());
  }
  // Completion order depends on scheduling; report failures by input order.
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < pairs.size(); ++i) position[pairs[i].id] = i;
  std::sort(summary.failures.begin(), summary.failures.end(),
            [&](const auto &a, const auto &b) {
              return position[a.first] < position[b.first];
            });

  if (interrupted) return summary;
  ScoreFile file;
  file.meta = meta;
  for (const PairRecord &p : pairs) {
    const auto it = done.find(p.id);
    if (it != done.end()) file.records.push_back(it->second);
  }
  WriteScoreFile(out, file);
  summary.complete = true;
  if (summary.failures.empty()) std::filesystem::remove(journal);
  return summary;
}

}  // namespace estime
