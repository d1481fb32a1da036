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

// channelsum command line. Exit status: 0 success, 1 some records failed,
// 2 usage or fatal error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "channelsum/channelsum.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitFatal = 2;

using Json = nlohmann::ordered_json;

struct Fatal {
  cs_status status;
};

void Check(cs_status status) {
  if (status != CS_OK) throw Fatal{status};
}

void PrintConfig(const std::string& command, Json config) {
  Json j;
  j["command"] = command;
  j["config"] = std::move(config);
  std::cerr << j.dump() << std::endl;
}

Json TrainConfigJson(const cs_train_config& c) {
  std::string buf(4096, '\0');
  Check(cs_train_config_json(&c, buf.data(), buf.size()));
  return Json::parse(buf.c_str());
}

Json SyntheticConfigJson(const cs_synthetic_config& c) {
  std::string buf(4096, '\0');
  Check(cs_synthetic_config_json(&c, buf.data(), buf.size()));
  return Json::parse(buf.c_str());
}

int RecordsExit(std::size_t ok, std::size_t failed) {
  std::cerr << "records: " << ok << " ok, " << failed << " failed" << std::endl;
  return failed > 0 ? kExitPartial : kExitOk;
}

void AddTrainFlags(CLI::App* cmd, cs_train_config& c) {
  cmd->add_option("--lr", c.lr, "Adam learning rate")->capture_default_str();
  cmd->add_option("--alpha", c.alpha, "Weight of the attention penalty")->capture_default_str();
  cmd->add_option("--dropout", c.dropout, "Dropout probability")->capture_default_str();
  cmd->add_option("--epochs", c.epochs, "Total number of epochs")->capture_default_str();
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  cmd->add_option("--hidden", c.hidden, "GRU hidden size")->capture_default_str();
  cmd->add_option("--emb-dim", c.emb_dim, "Word embedding size")->capture_default_str();
  cmd->add_option("--adam-beta1", c.adam_beta1)->capture_default_str();
  cmd->add_option("--adam-beta2", c.adam_beta2)->capture_default_str();
  cmd->add_option("--adam-eps", c.adam_eps)->capture_default_str();
  cmd->add_option("--workers", c.workers, "Data-parallel workers (1 = deterministic)")
      ->capture_default_str();
  cmd->add_option("--log-every", c.log_every, "Steps between loss reports (0 = off)")
      ->capture_default_str();
}

void AddSyntheticFlags(CLI::App* cmd, cs_synthetic_config& c) {
  cmd->add_option("--seed", c.seed)->capture_default_str();
  cmd->add_option("--train-pairs", c.train_pairs)->capture_default_str();
  cmd->add_option("--heldout-pairs", c.heldout_pairs)->capture_default_str();
  cmd->add_option("--doc-sentences", c.doc_sentences)->capture_default_str();
  cmd->add_option("--topic-sentences", c.topic_sentences)->capture_default_str();
  cmd->add_option("--vocab-words", c.vocab_words)->capture_default_str();
  cmd->add_option("--topic-words", c.topic_words)->capture_default_str();
  cmd->add_option("--words-per-topic", c.words_per_topic)->capture_default_str();
  cmd->add_option("--min-tokens", c.min_tokens)->capture_default_str();
  cmd->add_option("--max-tokens", c.max_tokens)->capture_default_str();
  cmd->add_option("--hidden", c.hidden)->capture_default_str();
  cmd->add_option("--emb-dim", c.emb_dim)->capture_default_str();
  cmd->add_option("--epochs", c.epochs)->capture_default_str();
  cmd->add_option("--lr", c.lr)->capture_default_str();
  cmd->add_option("--alpha", c.alpha)->capture_default_str();
  cmd->add_option("--dropout", c.dropout)->capture_default_str();
  cmd->add_option("--l", c.l, "Sentences to extract")->capture_default_str();
}

Json ResultJson(const cs_synthetic_result& r) {
  Json j;
  j["alpha"] = r.alpha;
  j["epochs"] = r.epochs;
  j["final_epoch_loss"] = r.final_epoch_loss;
  j["mean_margin"] = r.mean_margin;
  j["margin_positive"] = r.margin_positive;
  j["drawn_margin_positive"] = r.drawn_margin_positive;
  j["topic_recovery"] = r.topic_recovery;
  j["mean_topics_recovered"] = r.mean_topics_recovered;
  j["seconds"] = r.seconds;
  return j;
}

void PrintStep(const cs_step_info* info, void* user) {
  auto* out = static_cast<std::ofstream*>(user);
  Json j;
  j["epoch"] = info->epoch;
  j["step"] = info->step;
  j["id"] = info->id;
  j["total"] = info->total;
  j["con"] = info->con;
  j["penal"] = info->penal;
  j["margin"] = info->margin;
  *out << j.dump() << '\n';
}

class ModelHandle {
 public:
  ModelHandle() = default;
  ModelHandle(const ModelHandle&) = delete;
  ModelHandle& operator=(const ModelHandle&) = delete;
  ~ModelHandle() { cs_model_free(model_); }
  cs_model** out() { return &model_; }
  cs_model* get() const { return model_; }

 private:
  cs_model* model_ = nullptr;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extractive summarization with a channel salience model"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cs_version()));

  // preprocess
  std::string pre_in, pre_out, pre_vocab;
  std::size_t vocab_size = 50000;
  auto* preprocess = app.add_subcommand("preprocess", "Normalize a corpus and build a vocabulary");
  preprocess->add_option("--in", pre_in, "Raw corpus (JSONL)")->required();
  preprocess->add_option("--out", pre_out, "Preprocessed corpus")->required();
  preprocess->add_option("--vocab-out", pre_vocab, "Vocabulary file")->required();
  preprocess->add_option("--vocab-size", vocab_size)->capture_default_str();

  // train
  cs_train_config train_cfg;
  cs_train_config_default(&train_cfg);
  std::string tr_corpus, tr_vocab, tr_out, tr_embeddings, tr_resume, tr_loss_log;
  auto* train = app.add_subcommand("train", "Train a model (or continue a checkpoint)");
  train->add_option("--corpus", tr_corpus, "Training corpus (JSONL)")->required();
  train->add_option("--vocab", tr_vocab, "Vocabulary file")->required();
  train->add_option("--out", tr_out, "Output checkpoint")->required();
  train->add_option("--embeddings", tr_embeddings, "Pretrained embeddings (text)");
  train->add_option("--resume", tr_resume, "Checkpoint to continue from");
  train->add_option("--loss-log", tr_loss_log, "Write one JSON line per step");
  AddTrainFlags(train, train_cfg);

  // extract
  std::string ex_model, ex_vocab, ex_in, ex_out = "-";
  std::size_t ex_l = 3, ex_workers = 1;
  auto* extract = app.add_subcommand("extract", "Greedy extraction with a trained model");
  extract->add_option("--model", ex_model, "Checkpoint")->required();
  extract->add_option("--vocab", ex_vocab, "Vocabulary file")->required();
  extract->add_option("--in", ex_in, "Corpus (JSONL)")->required();
  extract->add_option("--out", ex_out, "Output corpus, - for stdout")->capture_default_str();
  extract->add_option("--l", ex_l, "Sentences per summary")->capture_default_str();
  extract->add_option("--workers", ex_workers)->capture_default_str();

  // evaluate
  std::string ev_hyp, ev_ref, ev_mode = "full-f1";
  std::size_t ev_bytes = 75;
  auto* evaluate = app.add_subcommand("evaluate", "ROUGE-1/2/L of hypotheses against references");
  evaluate->add_option("--hyp", ev_hyp)->required();
  evaluate->add_option("--ref", ev_ref)->required();
  evaluate->add_option("--mode", ev_mode)
      ->check(CLI::IsMember({"full-f1", "limited-recall"}))
      ->capture_default_str();
  evaluate->add_option("--bytes", ev_bytes, "Byte budget in limited-recall mode (75 or 275)")
      ->capture_default_str();

  // make-contrastive
  std::string mc_corpus, mc_vocab, mc_out = "-";
  std::uint64_t mc_seed = 0;
  auto* make_contrastive =
      app.add_subcommand("make-contrastive", "Dump sampled positive/negative summary pairs");
  make_contrastive->add_option("--corpus", mc_corpus)->required();
  make_contrastive->add_option("--vocab", mc_vocab)->required();
  make_contrastive->add_option("--out", mc_out)->capture_default_str();
  make_contrastive->add_option("--seed", mc_seed)->capture_default_str();

  // gradcheck
  cs_gradcheck_config gc;
  cs_gradcheck_config_default(&gc);
  std::size_t gc_seeds = 1;
  bool gc_zero = false, gc_verbose = false;
  auto* gradcheck = app.add_subcommand("gradcheck", "Compare gradients with finite differences");
  gradcheck->add_option("--seed", gc.seed, "First seed")->capture_default_str();
  gradcheck->add_option("--seeds", gc_seeds, "Number of consecutive seeds")->capture_default_str();
  gradcheck->add_option("--hidden", gc.hidden)->capture_default_str();
  gradcheck->add_option("--emb-dim", gc.emb_dim)->capture_default_str();
  gradcheck->add_option("--vocab", gc.vocab)->capture_default_str();
  gradcheck->add_option("--doc-sentences", gc.doc_sentences)->capture_default_str();
  gradcheck->add_option("--summary-sentences", gc.summary_sentences)->capture_default_str();
  gradcheck->add_option("--max-tokens", gc.max_tokens)->capture_default_str();
  gradcheck->add_option("--alpha", gc.alpha)->capture_default_str();
  gradcheck->add_option("--dropout", gc.dropout)->capture_default_str();
  gradcheck->add_option("--epsilon", gc.epsilon)->capture_default_str();
  gradcheck->add_option("--tolerance", gc.tolerance)->capture_default_str();
  gradcheck->add_flag("--zero-weights", gc_zero, "Start from an all-zero model");
  gradcheck->add_flag("--verbose", gc_verbose, "Print the per-tensor report");

  // synth
  cs_synthetic_config syn;
  cs_synthetic_config_default(&syn);
  std::string syn_train, syn_heldout;
  auto* synth = app.add_subcommand("synth", "Train and score on the planted-topic toy corpus");
  AddSyntheticFlags(synth, syn);
  synth->add_option("--write-train", syn_train, "Also write the generated training corpus");
  synth->add_option("--write-heldout", syn_heldout, "Also write the generated held-out corpus");

  // ablate
  cs_synthetic_config abl;
  cs_synthetic_config_default(&abl);
  std::vector<double> alphas = {0.0, 0.001, 0.01, 0.1};
  std::string abl_out;
  auto* ablate = app.add_subcommand("ablate", "Rerun the toy experiment for several alphas");
  AddSyntheticFlags(ablate, abl);
  ablate->add_option("--alphas", alphas, "Comma-separated penalty weights")
      ->delimiter(',')
      ->capture_default_str();
  ablate->add_option("--out", abl_out, "Also write the table to this file");

  // attention
  std::string at_model, at_vocab, at_corpus, at_out = "-";
  auto* attention = app.add_subcommand("attention", "Dump attention over the gold summaries");
  attention->add_option("--model", at_model)->required();
  attention->add_option("--vocab", at_vocab)->required();
  attention->add_option("--corpus", at_corpus)->required();
  attention->add_option("--out", at_out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitFatal;
  }

  try {
    if (*preprocess) {
      PrintConfig("preprocess", {{"in", pre_in},
                                 {"out", pre_out},
                                 {"vocab_out", pre_vocab},
                                 {"vocab_size", vocab_size}});
      std::size_t kept = 0, skipped = 0;
      Check(cs_preprocess(pre_in.c_str(), pre_out.c_str(), pre_vocab.c_str(), vocab_size, &kept,
                          &skipped));
      return RecordsExit(kept, skipped);
    }

    if (*train) {
      Json cfg = TrainConfigJson(train_cfg);
      cfg["corpus"] = tr_corpus;
      cfg["vocab"] = tr_vocab;
      cfg["out"] = tr_out;
      cfg["embeddings"] = tr_embeddings;
      cfg["resume"] = tr_resume;
      PrintConfig("train", cfg);
      ModelHandle model;
      if (tr_resume.empty()) {
        Check(cs_model_init(tr_vocab.c_str(), tr_embeddings.empty() ? nullptr : tr_embeddings.c_str(),
                            &train_cfg, model.out()));
      } else {
        Check(cs_model_load(tr_resume.c_str(), tr_vocab.c_str(), &train_cfg, model.out()));
      }
      std::ofstream loss_log;
      if (!tr_loss_log.empty()) {
        loss_log.open(tr_loss_log);
        if (!loss_log) {
          std::cerr << "error: cannot write " << tr_loss_log << std::endl;
          return kExitFatal;
        }
      }
      cs_train_stats stats{};
      Check(cs_model_train(model.get(), tr_corpus.c_str(), &train_cfg,
                           loss_log.is_open() ? PrintStep : nullptr, &loss_log, &stats));
      Check(cs_model_save(model.get(), tr_out.c_str()));
      std::cerr << "steps: " << stats.steps << ", mean loss " << stats.mean_loss
                << ", skipped pairs " << stats.skipped_pairs << ", skipped records "
                << stats.skipped_records << std::endl;
      return kExitOk;
    }

    if (*extract) {
      PrintConfig("extract", {{"model", ex_model},
                              {"vocab", ex_vocab},
                              {"in", ex_in},
                              {"out", ex_out},
                              {"l", ex_l},
                              {"workers", ex_workers}});
      ModelHandle model;
      Check(cs_model_load(ex_model.c_str(), ex_vocab.c_str(), nullptr, model.out()));
      std::size_t ok = 0, failed = 0;
      Check(cs_extract_file(model.get(), ex_in.c_str(), ex_out.c_str(), ex_l, ex_workers, &ok,
                            &failed));
      return RecordsExit(ok, failed);
    }

    if (*evaluate) {
      const bool limited = ev_mode == "limited-recall";
      PrintConfig("evaluate", {{"hyp", ev_hyp},
                               {"ref", ev_ref},
                               {"mode", ev_mode},
                               {"bytes", limited ? Json(ev_bytes) : Json(nullptr)}});
      cs_rouge_report report{};
      std::string json(1024, '\0');
      Check(cs_evaluate(ev_hyp.c_str(), ev_ref.c_str(),
                        limited ? CS_EVAL_LIMITED_RECALL : CS_EVAL_FULL_F1, ev_bytes, &report,
                        json.data(), json.size()));
      std::cout << json.c_str() << std::endl;
      return kExitOk;
    }

    if (*make_contrastive) {
      PrintConfig("make-contrastive",
                  {{"corpus", mc_corpus}, {"vocab", mc_vocab}, {"out", mc_out}, {"seed", mc_seed}});
      std::size_t ok = 0, failed = 0;
      Check(cs_make_contrastive(mc_corpus.c_str(), mc_vocab.c_str(), mc_out.c_str(), mc_seed, &ok,
                                &failed));
      return RecordsExit(ok, failed);
    }

    if (*gradcheck) {
      gc.zero_weights = gc_zero ? 1 : 0;
      PrintConfig("gradcheck", {{"seed", gc.seed},
                                {"seeds", gc_seeds},
                                {"hidden", gc.hidden},
                                {"emb_dim", gc.emb_dim},
                                {"vocab", gc.vocab},
                                {"doc_sentences", gc.doc_sentences},
                                {"summary_sentences", gc.summary_sentences},
                                {"max_tokens", gc.max_tokens},
                                {"alpha", gc.alpha},
                                {"dropout", gc.dropout},
                                {"epsilon", gc.epsilon},
                                {"tolerance", gc.tolerance},
                                {"zero_weights", gc_zero}});
      bool all_passed = true;
      const std::uint64_t first = gc.seed;
      for (std::size_t k = 0; k < gc_seeds; ++k) {
        gc.seed = first + k;
        cs_gradcheck_report report{};
        std::string json(1 << 16, '\0');
        Check(cs_gradcheck(&gc, &report, json.data(), json.size()));
        if (gc_verbose) std::cout << json.c_str() << std::endl;
        std::printf("seed %llu: max_rel_err %.3e %s %.0e (worst: %s) %s\n",
                    static_cast<unsigned long long>(gc.seed), report.max_rel_err,
                    report.passed ? "<" : ">=", gc.tolerance, report.worst_param,
                    report.passed ? "PASS" : "FAIL");
        all_passed = all_passed && report.passed;
      }
      return all_passed ? kExitOk : kExitFatal;
    }

    if (*synth) {
      PrintConfig("synth", SyntheticConfigJson(syn));
      if (!syn_train.empty() || !syn_heldout.empty()) {
        if (syn_train.empty() || syn_heldout.empty()) {
          std::cerr << "error: --write-train and --write-heldout go together" << std::endl;
          return kExitFatal;
        }
        Check(cs_synthetic_write(&syn, syn_train.c_str(), syn_heldout.c_str()));
      }
      cs_synthetic_result result{};
      Check(cs_synthetic_run(&syn, &result));
      std::cout << ResultJson(result).dump() << std::endl;
      return kExitOk;
    }

    if (*ablate) {
      Json cfg = SyntheticConfigJson(abl);
      cfg.erase("alpha");
      cfg["alphas"] = alphas;
      PrintConfig("ablate", cfg);
      std::vector<cs_synthetic_result> results(alphas.size());
      std::string table(1 << 16, '\0');
      Check(cs_ablate(&abl, alphas.data(), alphas.size(), results.data(), table.data(),
                      table.size()));
      std::cout << table.c_str();
      if (!abl_out.empty()) {
        std::ofstream out(abl_out);
        out << table.c_str();
        if (!out) {
          std::cerr << "error: cannot write " << abl_out << std::endl;
          return kExitFatal;
        }
      }
      return kExitOk;
    }

    if (*attention) {
      PrintConfig("attention", {{"model", at_model},
                                {"vocab", at_vocab},
                                {"corpus", at_corpus},
                                {"out", at_out}});
      ModelHandle model;
      Check(cs_model_load(at_model.c_str(), at_vocab.c_str(), nullptr, model.out()));
      std::size_t ok = 0, failed = 0;
      Check(cs_export_attention(model.get(), at_corpus.c_str(), at_out.c_str(), &ok, &failed));
      return RecordsExit(ok, failed);
    }
  } catch (const Fatal& f) {
    std::cerr << "error: " << cs_status_name(f.status) << ": " << cs_last_error() << std::endl;
    return kExitFatal;
  }
  return kExitFatal;
}
