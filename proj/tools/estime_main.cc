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

// Command-line driver: scoring, error generation, correlation and dataset
// utilities. Exit codes: 0 success, 1 some items failed, 2 configuration or
// I/O error.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "estime/bundle_backend.h"
#include "estime/dataset.h"
#include "estime/error.h"
#include "estime/harness.h"
#include "estime/mock_backend.h"
#include "estime/score_file.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitItemFailures = 1;
constexpr int kExitConfig = 2;

struct BackendChoice {
  std::string model_dir;
  bool mock = false;
};

void AddBackendOptions(CLI::App *app, BackendChoice *choice) {
  auto *dir = app->add_option("--model-dir", choice->model_dir,
                              "Model bundle directory");
  auto *mock = app->add_flag("--mock", choice->mock,
                             "Use the built-in deterministic mock model");
  dir->excludes(mock);
}

estime::BackendFactory MakeFactory(const BackendChoice &choice) {
  if (choice.mock) {
    return [] { return std::make_unique<estime::MockBackend>(); };
  }
  if (choice.model_dir.empty()) {
    throw estime::Error(estime::ErrorCode::kConfiguration,
                        "one of --model-dir or --mock is required");
  }
  return estime::BundleBackendFactory(
      estime::ModelBundle::Load(choice.model_dir));
}

struct ScoreArgs {
  BackendChoice backend;
  estime::RunScoreOptions run;
  bool no_filter = false;
  bool no_continuation = false;
  std::size_t limit = 0;
  std::string in;
  std::string out;
};

int RunScoreCommand(ScoreArgs &args) {
  args.run.config.filter_to_text_tokens = !args.no_filter;
  args.run.config.include_continuation_tokens = !args.no_continuation;
  if (args.limit > 0) args.run.max_new_items = args.limit;
  const std::vector<estime::PairRecord> pairs = estime::ReadPairs(args.in);
  const estime::RunScoreSummary summary =
      estime::RunScore(pairs, MakeFactory(args.backend), args.run, args.out);
  for (const auto &[id, message] : summary.failures) {
    std::cerr << "failed: " << id << ": " << message << "\n";
  }
  std::cerr << "scored " << summary.computed << ", resumed " << summary.resumed
            << ", failed " << summary.failures.size() << " of "
            << summary.total << "\n";
  if (!summary.complete) {
    std::cerr << "stopped early; rerun to continue from "
              << estime::JournalPath(args.out).string() << "\n";
    return kExitOk;
  }
  return summary.failures.empty() ? kExitOk : kExitItemFailures;
}

struct GenErrorsArgs {
  BackendChoice backend;
  estime::ErrorGenConfig config;
  std::string in;
  std::string out;
  std::string audit;
};

int RunGenErrors(const GenErrorsArgs &args) {
  const std::vector<estime::PairRecord> pairs = estime::ReadPairs(args.in);
  std::unique_ptr<estime::MaskedLmBackend> backend = MakeFactory(args.backend)();
  const estime::Benchmark benchmark =
      estime::BuildErrorBenchmark(pairs, args.config, *backend);
  estime::WritePairs(args.out, benchmark.pairs);
  std::string audit;
  for (const estime::BenchmarkAudit &a : benchmark.audit) {
    audit += estime::AuditToJsonLine(a) + '\n';
  }
  estime::WriteFileAtomically(
      args.audit.empty() ? args.out + ".audit.jsonl" : args.audit, audit);
  for (const estime::BenchmarkSkip &s : benchmark.skipped) {
    std::cerr << "skipped: " << s.id << ": " << s.reason << "\n";
  }
  std::cerr << "wrote " << benchmark.pairs.size() << " pairs, skipped "
            << benchmark.skipped.size() << " of " << pairs.size() << "\n";
  return benchmark.skipped.empty() ? kExitOk : kExitItemFailures;
}

struct CorrelateArgs {
  std::string pairs;
  std::vector<std::string> scores;
  std::string level = "summary";
  estime::CorrelateOptions options;
  std::string out;
};

int RunCorrelate(CorrelateArgs &args) {
  args.options.level = estime::ParseLevel(args.level);
  if (args.options.permutation.permutations < 1) {
    throw estime::Error(estime::ErrorCode::kConfiguration,
                        "--perms must be positive");
  }
  const std::vector<estime::PairRecord> pairs = estime::ReadPairs(args.pairs);
  std::vector<estime::MeasureCorrelation> results;
  for (const std::string &path : args.scores) {
    results.push_back(estime::CorrelateScores(
        pairs, estime::ReadScoreFile(path), args.options));
  }
  const std::string report =
      estime::ReportToJson(results, args.options).dump(2) + "\n";
  if (args.out.empty()) {
    std::cout << report;
  } else {
    estime::WriteFileAtomically(args.out, report);
    for (const estime::MeasureCorrelation &r : results) {
      std::cout << (r.negative_sense ? "(-)" : "") << r.measure
                << "  rho=" << r.report.rho << " (p=" << r.report.rho_p
                << ")  tau_c=" << r.report.tau_c << " (p=" << r.report.tau_p
                << ")  n=" << r.report.n << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Reference-free estimation of summary inconsistency"};
  app.require_subcommand(1);
  std::function<int()> run;

  ScoreArgs score;
  auto *score_cmd = app.add_subcommand("score", "Score text-summary pairs");
  AddBackendOptions(score_cmd, &score.backend);
  score_cmd->add_option("--layer", score.run.config.layer, "Hidden layer")
      ->capture_default_str();
  score_cmd->add_option("--window", score.run.config.window, "Window size")
      ->capture_default_str();
  score_cmd->add_option("--stride", score.run.config.stride, "Mask stride")
      ->capture_default_str();
  score_cmd->add_option("--margin", score.run.config.margin, "Left margin")
      ->capture_default_str();
  score_cmd->add_flag("--no-filter", score.no_filter,
                      "Check summary tokens absent from the text too");
  score_cmd->add_flag("--no-continuation", score.no_continuation,
                      "Skip summary tokens that continue a word");
  score_cmd->add_option("--measure", score.run.measure,
                        "Measure name (default ESTIME-<layer>)");
  score_cmd->add_flag("--with-matches", score.run.include_matches,
                      "Store every token match in the score detail");
  score_cmd->add_option("--workers", score.run.workers, "Worker threads")
      ->capture_default_str();
  score_cmd->add_option("--limit", score.limit,
                        "Stop after scoring this many new pairs");
  score_cmd->add_option("--in", score.in, "Input pairs-jsonl")->required();
  score_cmd->add_option("--out", score.out, "Output scores-jsonl")->required();
  score_cmd->callback([&] { run = [&] { return RunScoreCommand(score); }; });

  GenErrorsArgs gen;
  auto *gen_cmd =
      app.add_subcommand("gen-errors", "Build the clean/corrupted benchmark");
  AddBackendOptions(gen_cmd, &gen.backend);
  gen_cmd->add_option("--k", gen.config.num_errors, "Errors per summary")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.config.seed, "Random seed")
      ->capture_default_str();
  gen_cmd->add_option("--depth", gen.config.candidate_depth,
                      "Ranked candidates considered per error")
      ->capture_default_str();
  gen_cmd->add_option("--in", gen.in, "Clean pairs-jsonl")->required();
  gen_cmd->add_option("--out", gen.out, "Benchmark pairs-jsonl")->required();
  gen_cmd->add_option("--audit", gen.audit,
                      "Error records (default <out>.audit.jsonl)");
  gen_cmd->callback([&] { run = [&] { return RunGenErrors(gen); }; });

  CorrelateArgs corr;
  auto *corr_cmd =
      app.add_subcommand("correlate", "Correlate scores with quality");
  corr_cmd->add_option("--pairs", corr.pairs, "Pairs-jsonl")->required();
  corr_cmd->add_option("--scores", corr.scores, "Scores-jsonl files")
      ->required();
  corr_cmd->add_option("--quality", corr.options.quality,
                       "coherence, consistency, fluency, relevance or gold")
      ->capture_default_str();
  corr_cmd->add_option("--level", corr.level, "summary or system")
      ->capture_default_str();
  corr_cmd->add_option("--perms", corr.options.permutation.permutations,
                       "Permutations for p-values")
      ->capture_default_str();
  corr_cmd->add_option("--seed", corr.options.permutation.seed,
                       "Permutation seed")
      ->capture_default_str();
  corr_cmd->add_option("--out", corr.out, "Report JSON (default stdout)");
  corr_cmd->callback([&] { run = [&] { return RunCorrelate(corr); }; });

  std::string ingest_in;
  std::string ingest_out;
  auto *ingest_cmd = app.add_subcommand(
      "ingest-summeval", "Convert SummEval annotations to pairs-jsonl");
  ingest_cmd->add_option("--in", ingest_in,
                         "model_annotations.aligned.paired.jsonl or its "
                         "directory")
      ->required();
  ingest_cmd->add_option("--out", ingest_out, "Output pairs-jsonl")
      ->required();
  ingest_cmd->callback([&] {
    run = [&] {
      const auto pairs =
          estime::Ingest(ingest_in, estime::InputFormat::kSummEval);
      estime::WritePairs(ingest_out, pairs);
      std::cerr << "wrote " << pairs.size() << " pairs\n";
      return kExitOk;
    };
  });

  std::string sample_in;
  std::string sample_out;
  std::size_t sample_n = 0;
  std::uint64_t sample_seed = 0;
  auto *sample_cmd =
      app.add_subcommand("sample", "Seeded uniform sample of pairs");
  sample_cmd->add_option("--in", sample_in, "Input pairs-jsonl")->required();
  sample_cmd->add_option("--out", sample_out, "Output pairs-jsonl")
      ->required();
  sample_cmd->add_option("--n", sample_n, "Sample size")->required();
  sample_cmd->add_option("--seed", sample_seed, "Random seed")
      ->capture_default_str();
  sample_cmd->callback([&] {
    run = [&] {
      const auto pairs = estime::ReadPairs(sample_in);
      estime::WritePairs(sample_out,
                         estime::SamplePairs(pairs, sample_n, sample_seed));
      return kExitOk;
    };
  });

  std::string null_pairs;
  std::string null_out;
  std::uint64_t null_seed = 0;
  auto *null_cmd = app.add_subcommand(
      "null-scores", "Random baseline scores for a pairs file");
  null_cmd->add_option("--pairs", null_pairs, "Pairs-jsonl")->required();
  null_cmd->add_option("--out", null_out, "Output scores-jsonl")->required();
  null_cmd->add_option("--seed", null_seed, "Random seed")
      ->capture_default_str();
  null_cmd->callback([&] {
    run = [&] {
      const auto pairs = estime::ReadPairs(null_pairs);
      estime::WriteScoreFile(null_out, estime::NullScores(pairs, null_seed));
      return kExitOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    return run();
  } catch (const estime::Error &e) {
    std::cerr << "error (" << estime::ErrorCodeName(e.code())
              << "): " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
