// Copyright 2026 The channelsum Authors.
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


// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
//
//   channelsum_acceptance <path to channelsum CLI> [criterion numbers...]
//
// Criteria 7 and 8 drive the command-line tool. Setting CHANNELSUM_FULL_TRAIN
// and CHANNELSUM_FULL_TEST (and optionally CHANNELSUM_FULL_EMBEDDINGS) to
// corpus files additionally runs criterion 7 at full scale.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "channelsum/channel.hpp"
#include "channelsum/gradcheck.hpp"
#include "channelsum/rouge.hpp"
#include "channelsum/synthetic.hpp"
#include "channelsum/trainer.hpp"
#include "support/rouge_oracle.hpp"
#include "support/table_scorer.hpp"

namespace channelsum {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

fs::path WorkDir() {
  const fs::path dir = fs::temp_directory_path() / "channelsum_acceptance";
  fs::create_directories(dir);
  return dir;
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// ---- 1. gradient correctness ------------------------------------------------

Outcome GradientCorrectness() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::string worst_where;
  bool all = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GradCheckConfig cfg;
    cfg.seed = seed;
    const GradCheckReport r = GradCheck(cfg);
    all = all && r.passed;
    if (r.max_rel_err >= worst) {
      worst = r.max_rel_err;
      worst_where = "seed " + std::to_string(seed) + " " + r.worst_param;
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {all && worst < 1e-4 && secs < 60.0,
          Fmt("10 seeds, max rel err %.2e (%s) < 1e-4, %.1fs < 60s", worst, worst_where.c_str(),
              secs)};
}

// ---- 2. ROUGE oracle equivalence --------------------------------------------

Outcome RougeOracles() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20260101);
  int ngram_mismatch = 0, lcs_mismatch = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto c = testing::RandomTokenList(rng, 20, 30);
    const auto r = testing::RandomTokenList(rng, 20, 30);
    for (std::size_t n : {1u, 2u}) {
      const RougeScore got = RougeN(std::span<const int>(c), std::span<const int>(r), n);
      const auto want = testing::OracleRougeN(c, r, n);
      if (got.precision != want.precision || got.recall != want.recall || got.f1 != want.f1) {
        ++ngram_mismatch;
      }
    }
  }
  for (int trial = 0; trial < 500; ++trial) {
    const auto c = testing::RandomTokenList(rng, 20, 30);
    const auto r = testing::RandomTokenList(rng, 20, 30);
    const std::size_t lcs = LcsLength(std::span<const int>(c), std::span<const int>(r));
    const RougeScore rl = RougeL(std::span<const int>(c), std::span<const int>(r));
    const auto want = testing::OracleFromCounts(static_cast<double>(testing::OracleLcs(c, r)),
                                                static_cast<double>(c.size()),
                                                static_cast<double>(r.size()));
    if (lcs != testing::OracleLcs(c, r) || rl.f1 != want.f1 || rl.recall != want.recall) {
      ++lcs_mismatch;
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {ngram_mismatch == 0 && lcs_mismatch == 0 && secs < 10.0,
          Fmt("ROUGE-1/2 mismatches %d/1000, ROUGE-L mismatches %d/500, %.2fs < 10s",
              ngram_mismatch, lcs_mismatch, secs)};
}

// ---- 3. penalization analytics ----------------------------------------------

Outcome PenaltyValues() {
  using ad::Tensor;
  const double balanced =
      Penalization(Tensor::Constant({4, 2}, {1, 0, 0, 1, 1, 0, 0, 1})).item();
  const double uniform = Penalization(Tensor::Constant({2, 2}, {0.5, 0.5, 0.5, 0.5})).item();
  return {std::abs(balanced) <= 1e-6 && std::abs(uniform - 1.0) <= 1e-6,
          Fmt("balanced one-hot 4x2 -> %.3g (want 0), uniform 2x2 -> %.12g (want 1)", balanced,
              uniform)};
}

// ---- 4. greedy extraction contract ------------------------------------------

Outcome ExtractionContract() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(4);
  int argmax_mismatch = 0, duplicates = 0, unsorted = 0, wrong_size = 0;
  ExtractConfig two;
  two.l = 2;
  for (int trial = 0; trial < 200; ++trial) {
    testing::TableScorer t(4, rng, trial % 2 == 1);
    auto want = testing::StepwiseArgmax(t, 2);
    if (GreedySelect(t, 2) != want) ++argmax_mismatch;
    std::sort(want.begin(), want.end());
    if (SelectInDocumentOrder(t, two) != want) ++argmax_mismatch;
  }
  std::uniform_int_distribution<std::size_t> n_dist(1, 10);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = n_dist(rng);
    ExtractConfig cfg;
    cfg.l = std::uniform_int_distribution<std::size_t>(1, n + 2)(rng);
    testing::TableScorer t(n, rng, trial % 3 == 0);
    const auto out = SelectInDocumentOrder(t, cfg);
    if (std::set<std::size_t>(out.begin(), out.end()).size() != out.size()) ++duplicates;
    if (!std::is_sorted(out.begin(), out.end())) ++unsorted;
    if (out.size() != std::min(cfg.l, n)) ++wrong_size;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {argmax_mismatch == 0 && duplicates == 0 && unsorted == 0 && wrong_size == 0 &&
              secs < 10.0,
          Fmt("argmax mismatches %d/400, duplicates %d/1000, unsorted %d/1000, wrong size "
              "%d/1000, %.2fs < 10s",
              argmax_mismatch, duplicates, unsorted, wrong_size, secs)};
}

// ---- 5. learning signal on the planted-topic corpus -------------------------

Outcome LearningSignal() {
  SyntheticConfig cfg;  // 200 train / 50 held-out, 8 sentences, 200 words, hidden 64, 5 epochs
  const SyntheticResult r = RunSynthetic(cfg);
  return {r.margin_positive >= 0.9 && r.topic_recovery >= 0.7 && r.seconds < 600.0,
          Fmt("margin > 0 on %.0f%% of held-out pairs (>= 90%%; single-draw %.0f%%), >= 2 of 3 "
              "topics recovered on %.0f%% (>= 70%%), %d epochs, %.1fs < 600s",
              100.0 * r.margin_positive, 100.0 * r.drawn_margin_positive,
              100.0 * r.topic_recovery, static_cast<int>(r.epochs), r.seconds)};
}

// ---- 6. determinism ---------------------------------------------------------

Outcome Determinism() {
  SyntheticConfig sc;
  sc.train_pairs = 40;
  const SyntheticCorpus corpus = GenerateSynthetic(sc);
  const Vocabulary vocab = BuildVocabulary(corpus.train);
  const auto examples = PrepareExamples(corpus.train, vocab);
  TrainConfig cfg;
  cfg.hidden = 16;
  cfg.emb_dim = 12;
  cfg.lr = 1e-3;
  cfg.seed = 606;
  cfg.epochs = 3;
  cfg.log_every = 0;
  const EmbeddingTable emb = RandomEmbeddings(vocab, cfg.emb_dim, cfg.seed);
  auto run = [&](Checkpoint& ckpt, const TrainConfig& c) {
    std::vector<double> losses;
    Train(examples, ckpt, c, [&](const StepRecord& s) { losses.push_back(s.loss.total); });
    return losses;
  };
  const fs::path dir = WorkDir();

  Checkpoint a = InitCheckpoint(vocab, emb, cfg), b = InitCheckpoint(vocab, emb, cfg);
  const auto la = run(a, cfg);
  const auto lb = run(b, cfg);
  SaveCheckpoint(a, dir / "det_a.ckpt");
  SaveCheckpoint(b, dir / "det_b.ckpt");
  const bool identical =
      la == lb && ReadFile(dir / "det_a.ckpt") == ReadFile(dir / "det_b.ckpt");

  TrainConfig first = cfg;
  first.epochs = 1;
  Checkpoint part = InitCheckpoint(vocab, emb, first);
  auto resumed = run(part, first);
  SaveCheckpoint(part, dir / "det_part.ckpt");
  Checkpoint loaded = LoadCheckpoint(dir / "det_part.ckpt", cfg);
  const auto rest = run(loaded, cfg);
  resumed.insert(resumed.end(), rest.begin(), rest.end());
  SaveCheckpoint(loaded, dir / "det_resumed.ckpt");
  const bool same_trajectory =
      resumed == la && ReadFile(dir / "det_resumed.ckpt") == ReadFile(dir / "det_a.ckpt");

  return {identical && same_trajectory,
          Fmt("two runs bit-identical: %s; save/load after epoch 1 reproduces %zu-step loss "
              "trajectory and final checkpoint: %s",
              identical ? "yes" : "no", la.size(), same_trajectory ? "yes" : "no")};
}

// ---- 7. end-to-end pipeline through the CLI ----------------------------------

// stdout goes to `out` when given, otherwise to the log; stderr always to the log.
int Run(const std::string& cmd, const fs::path& log, const fs::path& out = {}) {
  const std::string log_q = "\"" + log.string() + "\"";
  const std::string full = cmd + (out.empty() ? " >>" + log_q : " >\"" + out.string() + "\"") +
                           " 2>>" + log_q;
  const int rc = std::system(full.c_str());
  return rc == 0 ? 0 : (WIFEXITED(rc) ? WEXITSTATUS(rc) : 99);
}

std::string Q(const fs::path& p) { return "\"" + p.string() + "\""; }

struct PipelineResult {
  bool ok = false;
  std::string stage;
  nlohmann::json full_f1;
  nlohmann::json recall75;
  double seconds = 0.0;
};

PipelineResult Pipeline(const std::string& cli, const fs::path& train, const fs::path& test,
                        const std::string& embeddings, const fs::path& dir) {
  const auto start = std::chrono::steady_clock::now();
  PipelineResult r;
  const fs::path log = dir / "pipeline.log";
  fs::remove(log);
  auto step = [&](const std::string& name, const std::string& args, const fs::path& out = {}) {
    if (!r.stage.empty()) return;
    if (Run(Q(cli) + " " + args, log, out) != 0) {
      r.stage = name + " failed (see " + log.string() + ")";
    }
  };
  // Default hyperparameters: 1 epoch, lr 1e-5, alpha 0.001, dropout 0.3, hidden 1024,
  // emb-dim 300, l = 3.
  step("preprocess", "preprocess --in " + Q(train) + " --out " + Q(dir / "train.jsonl") +
                         " --vocab-out " + Q(dir / "vocab.txt"));
  step("train", "train --corpus " + Q(dir / "train.jsonl") + " --vocab " + Q(dir / "vocab.txt") +
                    " --out " + Q(dir / "model.ckpt") +
                    " --epochs 1 --lr 1e-5 --alpha 0.001 --seed 1" +
                    (embeddings.empty() ? "" : " --embeddings \"" + embeddings + "\""));
  step("extract", "extract --model " + Q(dir / "model.ckpt") + " --vocab " +
                      Q(dir / "vocab.txt") + " --in " + Q(test) + " --l 3 --out " +
                      Q(dir / "extracted.jsonl"));
  step("evaluate", "evaluate --hyp " + Q(dir / "extracted.jsonl") + " --ref " + Q(test) +
                       " --mode full-f1", dir / "full.json");
  step("evaluate", "evaluate --hyp " + Q(dir / "extracted.jsonl") + " --ref " + Q(test) +
                       " --mode limited-recall --bytes 75", dir / "recall75.json");
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!r.stage.empty()) return r;
  try {
    r.full_f1 = nlohmann::json::parse(ReadFile(dir / "full.json"));
    r.recall75 = nlohmann::json::parse(ReadFile(dir / "recall75.json"));
  } catch (const std::exception& e) {
    r.stage = std::string("report parse failed: ") + e.what();
    return r;
  }
  r.ok = true;
  return r;
}

Outcome EndToEnd(const std::string& cli, const fs::path& data_dir) {
  if (cli.empty()) return {false, "no CLI path given"};
  const fs::path dir = WorkDir() / "pipeline";
  fs::create_directories(dir);
  const fs::path test = data_dir / "mini_news_test.jsonl";
  const PipelineResult r = Pipeline(cli, data_dir / "mini_news_train.jsonl", test, "", dir);
  if (!r.ok) return {false, "bundled corpus: " + r.stage};
  const std::size_t n = r.full_f1.value("n", 0);
  std::string detail =
      Fmt("bundled corpus, default hyperparameters: preprocess/train/extract/evaluate ok, %zu records, "
          "R-1/2/L F1 %.2f/%.2f/%.2f, 75-byte recall %.2f/%.2f/%.2f, %.1fs",
          n, r.full_f1["rouge1"].get<double>(), r.full_f1["rouge2"].get<double>(),
          r.full_f1["rougeL"].get<double>(), r.recall75["rouge1"].get<double>(),
          r.recall75["rouge2"].get<double>(), r.recall75["rougeL"].get<double>(), r.seconds);
  bool pass = n == 4;

  const char* full_train = std::getenv("CHANNELSUM_FULL_TRAIN");
  const char* full_test = std::getenv("CHANNELSUM_FULL_TEST");
  if (full_train && full_test) {
    const char* emb = std::getenv("CHANNELSUM_FULL_EMBEDDINGS");
    const fs::path full_dir = WorkDir() / "full";
    fs::create_directories(full_dir);
    const PipelineResult f = Pipeline(cli, full_train, full_test, emb ? emb : "", full_dir);
    if (!f.ok) {
      pass = false;
      detail += "; full-scale: " + f.stage;
    } else {
      detail += Fmt("; full-scale R-1/2/L F1 %.2f/%.2f/%.2f (reference 41.50/17.77/37.62, "
                    "expected offset up to 1.5 points from tokenization)",
                    f.full_f1["rouge1"].get<double>(), f.full_f1["rouge2"].get<double>(),
                    f.full_f1["rougeL"].get<double>());
    }
  } else {
    detail += "; full-scale run skipped (CHANNELSUM_FULL_TRAIN/CHANNELSUM_FULL_TEST unset)";
  }
  return {pass, detail};
}

// ---- 8. alpha ablation table through the CLI --------------------------------

Outcome Ablation(const std::string& cli) {
  if (cli.empty()) return {false, "no CLI path given"};
  const fs::path dir = WorkDir();
  const fs::path table = dir / "ablation.md";
  fs::remove(table);
  const auto start = std::chrono::steady_clock::now();
  const int rc = Run(Q(cli) + " ablate --alphas 0,0.001,0.01,0.1 --out " + Q(table),
                     dir / "ablation.log");
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string text = ReadFile(table);
  std::vector<std::string> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("| ", 0) == 0 && line.find("alpha") == std::string::npos) rows.push_back(line);
  }
  const bool zero_row = !rows.empty() && rows[0].rfind("| 0 |", 0) == 0;
  std::string rendered;
  for (const auto& row : rows) rendered += "\n    " + row;
  return {rc == 0 && rows.size() == 4 && zero_row,
          Fmt("exit %d, %zu table rows, alpha=0 run %s, %.1fs", rc, rows.size(),
              zero_row ? "completed" : "missing", secs) +
              rendered};
}

}  // namespace
}  // namespace channelsum

int main(int argc, char** argv) {
  using namespace channelsum;
  const std::string cli = argc > 1 ? argv[1] : "";
  const fs::path data_dir = argc > 2 ? fs::path(argv[2]) : fs::path(CHANNELSUM_TEST_DATA_DIR);
  std::set<int> only;
  for (int i = 3; i < argc; ++i) only.insert(std::atoi(argv[i]));

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient correctness", GradientCorrectness},
      {"ROUGE oracle equivalence", RougeOracles},
      {"penalization analytics", PenaltyValues},
      {"greedy extraction contract", ExtractionContract},
      {"end-to-end learning signal", LearningSignal},
      {"determinism", Determinism},
      {"end-to-end pipeline", [&] { return EndToEnd(cli, data_dir); }},
      {"alpha ablation harness", [&] { return Ablation(cli); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(number)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d (%s): %s - %s\n", number, criteria[i].first.c_str(),
                o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
