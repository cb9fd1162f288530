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

// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion.
//
//   estime_acceptance --desk      criteria runnable with the mock model
//   estime_acceptance --extended  reproduction runs on the real data
//   estime_acceptance             both
//
// The reproduction runs need:
//   ESTIME_SUMMEVAL           SummEval model_annotations.aligned.paired.jsonl
//                             (or its directory)
//   ESTIME_SCORER_BUNDLE      bundle of bert-large-uncased-whole-word-masking
//   ESTIME_CNNDM_PAIRS        pairs-jsonl of the CNN/DailyMail test split
//                             (text = article, summary = highlights)
//   ESTIME_GENERATOR_BUNDLE   bundle of bert-base-cased
//   ESTIME_WORK_DIR           where intermediate files go (optional)
// A criterion whose inputs are missing is reported as SKIP. When every
// requested criterion is skipped the exit code is 77.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "../test_util.h"
#include "estime/bundle_backend.h"
#include "estime/dataset.h"
#include "estime/error.h"
#include "estime/errorgen.h"
#include "estime/harness.h"
#include "estime/mock_backend.h"
#include "estime/scorer.h"
#include "estime/stats.h"

namespace estime {
namespace {

namespace fs = std::filesystem;

constexpr int kSkipExit = 77;

// Runtime limits.
constexpr double kPlanSeconds = 10.0;
constexpr double kIdentitySeconds = 5.0;
constexpr double kStatsSeconds = 30.0;

// Reproduction targets and tolerances.
constexpr double kEstime12Rho = 0.374;
constexpr double kEstime12Tau = 0.184;
constexpr double kEstime24Rho = 0.358;
constexpr double kEstime24Tau = 0.176;
constexpr double kSummaryTolerance = 0.03;
constexpr double kSystem24Rho = 0.815;
constexpr double kSystemTolerance = 0.05;
constexpr double kBenchmark24Rho = 0.169;
constexpr double kBenchmarkTolerance = 0.05;
constexpr double kNullBound = 0.05;
constexpr std::size_t kBenchmarkPairs = 2000;
constexpr int kBenchmarkErrors = 3;
constexpr std::uint64_t kBenchmarkSeed = 2021;

enum class Outcome { kPass, kFail, kSkip };

struct Verdict {
  Outcome outcome = Outcome::kFail;
  std::string detail;
};

Verdict Pass(std::string d) { return {Outcome::kPass, std::move(d)}; }
Verdict Fail(std::string d) { return {Outcome::kFail, std::move(d)}; }
Verdict Skip(std::string d) { return {Outcome::kSkip, std::move(d)}; }

std::string Fixed(double v, int digits = 3) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

class Timer {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

std::string TimeNote(double seconds, double limit) {
  return Fixed(seconds, 2) + " s, limit " + Fixed(limit, 0) + " s";
}

// Masking plan.

std::string CheckPlan(std::size_t n, const EstimeConfig &c,
                      const MaskingPlan &plan) {
  const auto w = static_cast<std::size_t>(c.window);
  const auto l = static_cast<std::size_t>(c.stride);
  const auto m = static_cast<std::size_t>(c.margin);
  std::vector<int> count(n, 0);
  std::size_t first_untaken = 0;
  for (std::size_t k = 0; k < plan.passes.size(); ++k) {
    const MaskingPass &p = plan.passes[k];
    if (p.mask_positions.empty()) return "pass with no masks";
    const std::size_t t = p.mask_positions.front();
    while (first_untaken < n && count[first_untaken] > 0) ++first_untaken;
    if (t != first_untaken) return "pass does not start at leftmost untaken";
    if (p.window.begin != (t > m ? t - m : 0)) return "window start";
    if (p.window.end != std::min(n, p.window.begin + w)) return "window end";
    if (p.window.size() > w) return "window too wide";
    for (std::size_t i = 0; i < p.mask_positions.size(); ++i) {
      const std::size_t q = p.mask_positions[i];
      if (!p.window.Contains(q)) return "mask outside window";
      if ((q - t) % l != 0) return "mask off the stride grid";
      if (i > 0 && q - p.mask_positions[i - 1] < l) return "masks too close";
      if (i > 0 && q <= p.mask_positions[i - 1]) return "masks not increasing";
      ++count[q];
    }
  }
  if (plan.passes.size() > n) return "more passes than tokens";
  for (std::size_t i = 0; i < n; ++i) {
    if (count[i] != 1) {
      return "token " + std::to_string(i) + " masked " +
             std::to_string(count[i]) + " times";
    }
  }
  return "";
}

Verdict MaskingPlanFuzz() {
  Timer timer;
  std::mt19937_64 rng(20211);
  for (int i = 0; i < 1000; ++i) {
    EstimeConfig c;
    const std::size_t n = rng() % 5001;
    c.window = 16 + static_cast<int>(rng() % (512 - 16 + 1));
    c.stride = 1 + static_cast<int>(rng() % c.window);
    c.margin = static_cast<int>(rng() % c.window);
    const std::string problem = CheckPlan(n, c, PlanMasking(n, c));
    if (!problem.empty()) {
      return Fail("case n=" + std::to_string(n) + " W=" +
                  std::to_string(c.window) + " L=" + std::to_string(c.stride) +
                  " M=" + std::to_string(c.margin) + ": " + problem);
    }
  }
  const MaskingPlan ten = PlanMasking(10, EstimeConfig{});
  const std::vector<std::vector<std::size_t>> expected = {
      {0, 8}, {1, 9}, {2}, {3}, {4}, {5}, {6}, {7}};
  if (ten.passes.size() != expected.size()) {
    return Fail("n=10 plan has " + std::to_string(ten.passes.size()) +
                " passes, expected 8");
  }
  for (std::size_t j = 0; j < expected.size(); ++j) {
    if (ten.passes[j].window != IndexRange{0, 10} ||
        ten.passes[j].mask_positions != expected[j]) {
      return Fail("n=10 plan differs at pass " + std::to_string(j));
    }
  }
  const double s = timer.Seconds();
  if (s >= kPlanSeconds) return Fail("too slow: " + TimeNote(s, kPlanSeconds));
  return Pass("1000 cases + n=10 plan; " + TimeNote(s, kPlanSeconds));
}

// Mock identity.

Verdict MockIdentity() {
  Timer timer;
  MockBackend mock;
  std::mt19937_64 rng(20212);
  const EstimeConfig config;
  for (int i = 0; i < 100; ++i) {
    const std::string doc =
        testing::RandomDocument(rng, 1 + static_cast<int>(rng() % 300));
    const EstimeResult r = Estime(doc, doc, config, mock);
    if (r.num_inconsistencies != 0) {
      return Fail("document " + std::to_string(i) + " has " +
                  std::to_string(r.num_inconsistencies) + " inconsistencies");
    }
  }
  EstimeConfig on;
  EstimeConfig off;
  off.filter_to_text_tokens = false;
  const EstimeResult a = Estime("a b c", "a d", on, mock);
  const EstimeResult b = Estime("a b c", "a d", off, mock);
  if (a.num_checked != 1 || a.num_inconsistencies != 0) {
    return Fail("filter on: checked " + std::to_string(a.num_checked) +
                ", inconsistencies " + std::to_string(a.num_inconsistencies));
  }
  if (b.num_checked != 2 || b.num_inconsistencies != 1) {
    return Fail("filter off: checked " + std::to_string(b.num_checked) +
                ", inconsistencies " + std::to_string(b.num_inconsistencies));
  }
  const double s = timer.Seconds();
  if (s >= kIdentitySeconds) {
    return Fail("too slow: " + TimeNote(s, kIdentitySeconds));
  }
  return Pass("100 documents + filter example; " +
              TimeNote(s, kIdentitySeconds));
}

// Statistics oracle.

Verdict StatisticsOracle() {
  Timer timer;
  PermutationOptions values_only;
  values_only.exact_max_n = 0;
  values_only.permutations = 1;

  std::vector<double> x(7);
  std::iota(x.begin(), x.end(), 1.0);
  std::vector<double> y = x;
  int permutations = 0;
  do {
    const double rho = Spearman(x, y, values_only).value;
    const double tau = KendallTauC(x, y, values_only).value;
    if (rho != testing::OracleSpearman(x, y) ||
        tau != testing::OracleTauC(x, y)) {
      return Fail("permutation " + std::to_string(permutations) +
                  " differs from the oracle");
    }
    ++permutations;
  } while (std::next_permutation(y.begin(), y.end()));
  if (permutations != 5040) return Fail("enumerated " + std::to_string(permutations));

  std::mt19937_64 rng(20213);
  int tied = 0;
  while (tied < 200) {
    const std::size_t n = 2 + rng() % 40;
    std::vector<double> a(n);
    std::vector<double> b(n);
    const int la = 2 + static_cast<int>(rng() % 5);
    const int lb = 2 + static_cast<int>(rng() % 5);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<double>(rng() % la);
      b[i] = static_cast<double>(rng() % lb);
    }
    auto constant = [](const std::vector<double> &v) {
      return std::all_of(v.begin(), v.end(), [&](double e) { return e == v[0]; });
    };
    if (constant(a) || constant(b)) continue;
    if (Spearman(a, b, values_only).value != testing::OracleSpearman(a, b) ||
        KendallTauC(a, b, values_only).value != testing::OracleTauC(a, b)) {
      return Fail("tied vector " + std::to_string(tied) +
                  " differs from the oracle");
    }
    ++tied;
  }

  const std::vector<double> up = {1, 2, 3, 4, 5};
  const std::vector<double> down = {5, 4, 3, 2, 1};
  if (Spearman(up, up).value != 1.0 || Spearman(up, down).value != -1.0 ||
      KendallTauC(up, up).value != 1.0 || KendallTauC(up, down).value != -1.0) {
    return Fail("identity/reversal not exactly +-1");
  }
  const double s = timer.Seconds();
  if (s >= kStatsSeconds) return Fail("too slow: " + TimeNote(s, kStatsSeconds));
  return Pass("5040 permutations + 200 tied vectors exact; " +
              TimeNote(s, kStatsSeconds));
}

// Error generator.

Verdict ErrorGenerator() {
  MockBackend mock;
  std::mt19937_64 rng(20214);
  ErrorGenConfig config;
  int non_idempotent = 0;
  for (int i = 0; i < 200; ++i) {
    const std::string summary =
        testing::RandomDocument(rng, 6 + static_cast<int>(rng() % 40));
    config.num_errors = 1 + static_cast<int>(rng() % 3);
    config.seed = rng();
    const CorruptedSummary out = GenerateErrors(summary, config, mock);
    const CorruptedSummary again = GenerateErrors(summary, config, mock);
    if (again.text != out.text || again.errors != out.errors) {
      return Fail("summary " + std::to_string(i) + " not deterministic");
    }
    if (out.errors.size() != static_cast<std::size_t>(config.num_errors)) {
      return Fail("summary " + std::to_string(i) + ": " +
                  std::to_string(out.errors.size()) + " records");
    }
    for (const ErrorRecord &e : out.errors) {
      if (e.replacement.id == e.original.id) {
        return Fail("replacement equals original in summary " +
                    std::to_string(i));
      }
    }
    const TokenSequence clean = mock.Tokenize(summary);
    const TokenSequence bad = mock.Tokenize(out.text);
    if (bad.size() != clean.size()) {
      ++non_idempotent;
      continue;
    }
    std::set<std::size_t> changed;
    std::set<std::size_t> recorded;
    for (std::size_t p = 0; p < clean.size(); ++p) {
      if (clean.ids[p] != bad.ids[p]) changed.insert(p);
    }
    for (const ErrorRecord &e : out.errors) recorded.insert(e.position);
    if (changed != recorded || changed.size() != out.errors.size()) {
      return Fail("summary " + std::to_string(i) +
                  ": changed positions differ from the records");
    }
  }
  if (non_idempotent * 20 >= 200) {
    return Fail(std::to_string(non_idempotent) +
                " of 200 outputs do not retokenize to the same length");
  }

  const std::string summary = testing::RandomDocument(rng, 50);
  std::set<std::vector<std::size_t>> sets;
  ErrorGenConfig seeded;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    seeded.seed = seed;
    std::vector<std::size_t> positions;
    for (const ErrorRecord &e : GenerateErrors(summary, seeded, mock).errors) {
      positions.push_back(e.position);
    }
    sets.insert(positions);
  }
  if (sets.size() < 90) {
    return Fail("only " + std::to_string(sets.size()) +
                " distinct position sets over 100 seeds");
  }
  return Pass("200 summaries exact (" + std::to_string(non_idempotent) +
              " skipped as non-idempotent), " + std::to_string(sets.size()) +
              "/100 distinct position sets");
}

// Harness determinism.

Verdict HarnessDeterminism() {
  const fs::path dir = testing::MakeTempDir("acceptance_harness");
  std::mt19937_64 rng(20215);
  std::vector<PairRecord> pairs;
  for (int i = 0; i < 24; ++i) {
    PairRecord p;
    p.id = "pair-" + std::to_string(i);
    p.text = testing::RandomDocument(rng, 200 + static_cast<int>(rng() % 400));
    p.summary = testing::RandomDocument(rng, 30);
    pairs.push_back(p);
  }
  const BackendFactory factory = [] { return std::make_unique<MockBackend>(); };
  RunScoreOptions options;
  options.config.filter_to_text_tokens = false;
  options.include_matches = true;

  options.workers = 1;
  RunScore(pairs, factory, options, dir / "w1.jsonl");
  options.workers = 4;
  RunScore(pairs, factory, options, dir / "w4.jsonl");
  const std::string w1 = testing::ReadFile(dir / "w1.jsonl");
  if (w1.empty() || w1 != testing::ReadFile(dir / "w4.jsonl")) {
    return Fail("outputs for 1 and 4 workers differ");
  }

  options.workers = 4;
  options.max_new_items = 10;
  const RunScoreSummary cut = RunScore(pairs, factory, options, dir / "r.jsonl");
  if (cut.complete || cut.computed != 10) return Fail("interrupt not honoured");
  options.workers = 1;
  options.max_new_items.reset();
  const RunScoreSummary rest =
      RunScore(pairs, factory, options, dir / "r.jsonl");
  if (!rest.ok() || rest.resumed != 10 || rest.computed != 14) {
    return Fail("resume recomputed " + std::to_string(rest.computed) +
                " items, expected 14");
  }
  if (testing::ReadFile(dir / "r.jsonl") != w1) {
    return Fail("resumed output differs from uninterrupted run");
  }
  return Pass("24 pairs byte-identical for workers {1, 4} and after resume");
}

// Reproduction runs.

std::optional<fs::path> EnvPath(const char *name) {
  const char *value = std::getenv(name);
  if (value == nullptr || *value == '\0') return std::nullopt;
  return fs::path(value);
}

fs::path WorkDir() {
  const fs::path dir = EnvPath("ESTIME_WORK_DIR").value_or(
      fs::temp_directory_path() / "estime_reproduction");
  fs::create_directories(dir);
  return dir;
}

int Workers() {
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

ScoreFile ScoreWithLayer(std::span<const PairRecord> pairs,
                         const BackendFactory &factory, int layer,
                         const fs::path &out) {
  if (!fs::exists(out)) {
    RunScoreOptions options;
    options.config.layer = layer;
    options.workers = Workers();
    const RunScoreSummary s = RunScore(pairs, factory, options, out);
    if (!s.ok()) {
      throw Error(ErrorCode::kBackend,
                  std::to_string(s.failures.size()) + " pairs failed to score");
    }
  }
  return ReadScoreFile(out);
}

bool Within(double value, double target, double tolerance) {
  return std::abs(value - target) <= tolerance;
}

std::vector<Verdict> SummEvalReproduction() {
  const auto data = EnvPath("ESTIME_SUMMEVAL");
  const auto bundle = EnvPath("ESTIME_SCORER_BUNDLE");
  if (!data || !bundle) {
    const Verdict skip =
        Skip("set ESTIME_SUMMEVAL and ESTIME_SCORER_BUNDLE to run");
    return {skip, skip};
  }
  try {
    const std::vector<PairRecord> pairs = ReadSummEval(*data);
    if (pairs.size() != 1600) {
      const Verdict bad = Fail("SummEval has " + std::to_string(pairs.size()) +
                               " pairs, expected 1600");
      return {bad, bad};
    }
    const fs::path dir = WorkDir();
    const BackendFactory factory =
        BundleBackendFactory(ModelBundle::Load(*bundle));
    const ScoreFile s12 =
        ScoreWithLayer(pairs, factory, 12, dir / "summeval_estime12.jsonl");
    const ScoreFile s24 =
        ScoreWithLayer(pairs, factory, 24, dir / "summeval_estime24.jsonl");

    CorrelateOptions summary_level;
    const auto r12 = CorrelateScores(pairs, s12, summary_level).report;
    const auto r24 = CorrelateScores(pairs, s24, summary_level).report;
    const bool t1 = Within(r12.rho, kEstime12Rho, kSummaryTolerance) &&
                    Within(r12.tau_c, kEstime12Tau, kSummaryTolerance) &&
                    Within(r24.rho, kEstime24Rho, kSummaryTolerance) &&
                    Within(r24.tau_c, kEstime24Tau, kSummaryTolerance);
    const std::string d1 = "ESTIME-12 rho=" + Fixed(r12.rho) + " tau_c=" +
                           Fixed(r12.tau_c) + ", ESTIME-24 rho=" +
                           Fixed(r24.rho) + " tau_c=" + Fixed(r24.tau_c) +
                           " (tolerance " + Fixed(kSummaryTolerance, 2) + ")";

    CorrelateOptions system_level;
    system_level.level = Level::kSystem;
    const auto sys = CorrelateScores(pairs, s24, system_level).report;
    const bool t2 = Within(sys.rho, kSystem24Rho, kSystemTolerance);
    const std::string d2 = "ESTIME-24 system rho=" + Fixed(sys.rho) +
                           " (tolerance " + Fixed(kSystemTolerance, 2) + ")";
    return {t1 ? Pass(d1) : Fail(d1), t2 ? Pass(d2) : Fail(d2)};
  } catch (const std::exception &e) {
    const Verdict bad = Fail(std::string("error: ") + e.what());
    return {bad, bad};
  }
}

Verdict BenchmarkReproduction() {
  const auto cnndm = EnvPath("ESTIME_CNNDM_PAIRS");
  const auto scorer = EnvPath("ESTIME_SCORER_BUNDLE");
  const auto generator = EnvPath("ESTIME_GENERATOR_BUNDLE");
  if (!cnndm || !scorer || !generator) {
    return Skip(
        "set ESTIME_CNNDM_PAIRS, ESTIME_SCORER_BUNDLE and "
        "ESTIME_GENERATOR_BUNDLE to run");
  }
  try {
    const fs::path dir = WorkDir();
    const fs::path bench_path = dir / "cnndm_benchmark.jsonl";
    std::vector<PairRecord> bench;
    if (fs::exists(bench_path)) {
      bench = ReadPairs(bench_path);
    } else {
      const std::vector<PairRecord> sample =
          SamplePairs(ReadPairs(*cnndm), kBenchmarkPairs, kBenchmarkSeed);
      BundleBackend backend(ModelBundle::Load(*generator));
      ErrorGenConfig config;
      config.num_errors = kBenchmarkErrors;
      config.seed = kBenchmarkSeed;
      bench = BuildErrorBenchmark(sample, config, backend).pairs;
      WritePairs(bench_path, bench);
    }
    const BackendFactory factory =
        BundleBackendFactory(ModelBundle::Load(*scorer));
    const ScoreFile s24 =
        ScoreWithLayer(bench, factory, 24, dir / "cnndm_estime24.jsonl");
    CorrelateOptions gold;
    gold.quality = std::string(kGoldQuality);
    const auto est = CorrelateScores(bench, s24, gold).report;
    const auto null =
        CorrelateScores(bench, NullScores(bench, kBenchmarkSeed), gold).report;
    const bool ok = Within(est.rho, kBenchmark24Rho, kBenchmarkTolerance) &&
                    std::abs(null.rho) < kNullBound && est.rho > null.rho;
    const std::string d = std::to_string(bench.size()) + " pairs, ESTIME-24 rho=" +
                          Fixed(est.rho) + " tau_c=" + Fixed(est.tau_c) +
                          ", null rho=" + Fixed(null.rho);
    return ok ? Pass(d) : Fail(d);
  } catch (const std::exception &e) {
    return Fail(std::string("error: ") + e.what());
  }
}

struct Tally {
  int pass = 0;
  int fail = 0;
  int skip = 0;
};

void Report(const std::string &name, const Verdict &v, Tally *tally) {
  const char *tag = v.outcome == Outcome::kPass   ? "PASS"
                    : v.outcome == Outcome::kFail ? "FAIL"
                                                  : "SKIP";
  std::cout << tag << "  " << name << "  [" << v.detail << "]" << std::endl;
  if (v.outcome == Outcome::kPass) ++tally->pass;
  if (v.outcome == Outcome::kFail) ++tally->fail;
  if (v.outcome == Outcome::kSkip) ++tally->skip;
}

Verdict Guarded(const std::function<Verdict()> &check) {
  try {
    return check();
  } catch (const std::exception &e) {
    return Fail(std::string("error: ") + e.what());
  }
}

int Main(int argc, char **argv) {
  bool desk = true;
  bool extended = true;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--desk") {
      extended = false;
    } else if (arg == "--extended") {
      desk = false;
    } else {
      std::cerr << "usage: " << argv[0] << " [--desk | --extended]\n";
      return 2;
    }
  }
  Tally tally;
  if (desk) {
    Report("masking-plan fuzz", Guarded(MaskingPlanFuzz), &tally);
    Report("mock-backend identity", Guarded(MockIdentity), &tally);
    Report("statistics oracle", Guarded(StatisticsOracle), &tally);
    Report("error generator", Guarded(ErrorGenerator), &tally);
    Report("harness determinism", Guarded(HarnessDeterminism), &tally);
  }
  if (extended) {
    const std::vector<Verdict> summeval = SummEvalReproduction();
    Report("summary-level consistency (ESTIME-12/24 vs SummEval experts)",
           summeval[0], &tally);
    Report("system-level consistency (ESTIME-24)", summeval[1], &tally);
    Report("subtle-error benchmark (ESTIME-24 vs gold, null baseline)",
           Guarded(BenchmarkReproduction), &tally);
  }
  std::cout << tally.pass << " passed, " << tally.fail << " failed, "
            << tally.skip << " skipped" << std::endl;
  if (tally.fail > 0) return 1;
  if (tally.pass == 0 && tally.skip > 0) return kSkipExit;
  return 0;
}

}  // namespace
}  // namespace estime

int main(int argc, char **argv) { return estime::Main(argc, argv); }
