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

#include "channelsum/channelsum.h"

#include <cstring>
#include <fstream>
#include <iostream>
#include <new>
#include <random>
#include <string>

#include "channelsum/channel.hpp"
#include "channelsum/contrastive.hpp"
#include "channelsum/corpus.hpp"
#include "channelsum/error.hpp"
#include "channelsum/extractor.hpp"
#include "channelsum/gradcheck.hpp"
#include "channelsum/logging.hpp"
#include "channelsum/rouge.hpp"
#include "channelsum/synthetic.hpp"
#include "channelsum/trainer.hpp"

struct cs_model {
  channelsum::Checkpoint ckpt;
  channelsum::Vocabulary vocab;
};

namespace {

using channelsum::Error;
using channelsum::ErrorCode;

thread_local std::string g_last_error;

template <typename Fn>
cs_status Guard(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return CS_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<cs_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown exception";
  }
  return CS_ERR_INTERNAL;
}

void Require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

void CopyOut(const std::string& text, char* buf, std::size_t cap) {
  if (!buf) return;
  if (text.size() + 1 > cap) {
    throw Error(ErrorCode::kInvalidArgument,
                "output buffer too small: need " + std::to_string(text.size() + 1) + " bytes");
  }
  std::memcpy(buf, text.c_str(), text.size() + 1);
}

// "-" selects stdout.
class Output {
 public:
  explicit Output(const char* path) {
    if (std::strcmp(path, "-") == 0) {
      out_ = &std::cout;
    } else {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw Error(ErrorCode::kIo, std::string("cannot write ") + path);
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }
  void Finish() {
    out_->flush();
    if (!*out_) throw Error(ErrorCode::kIo, "write failed");
  }

 private:
  std::ofstream file_;
  std::ostream* out_ = nullptr;
};

channelsum::TrainConfig FromC(const cs_train_config& c) {
  channelsum::TrainConfig t;
  t.lr = c.lr;
  t.alpha = c.alpha;
  t.dropout = c.dropout;
  t.epochs = c.epochs;
  t.seed = c.seed;
  t.hidden = c.hidden;
  t.emb_dim = c.emb_dim;
  t.adam_beta1 = c.adam_beta1;
  t.adam_beta2 = c.adam_beta2;
  t.adam_eps = c.adam_eps;
  t.workers = c.workers;
  t.log_every = c.log_every;
  return t;
}

cs_train_config ToC(const channelsum::TrainConfig& t) {
  return {t.lr,     t.alpha,      t.dropout,    t.epochs,   t.seed,    t.hidden,
          t.emb_dim, t.adam_beta1, t.adam_beta2, t.adam_eps, t.workers, t.log_every};
}

channelsum::SyntheticConfig FromC(const cs_synthetic_config& c) {
  channelsum::SyntheticConfig s;
  s.seed = c.seed;
  s.train_pairs = c.train_pairs;
  s.heldout_pairs = c.heldout_pairs;
  s.doc_sentences = c.doc_sentences;
  s.topic_sentences = c.topic_sentences;
  s.vocab_words = c.vocab_words;
  s.topic_words = c.topic_words;
  s.words_per_topic = c.words_per_topic;
  s.min_tokens = c.min_tokens;
  s.max_tokens = c.max_tokens;
  s.hidden = c.hidden;
  s.emb_dim = c.emb_dim;
  s.epochs = c.epochs;
  s.lr = c.lr;
  s.alpha = c.alpha;
  s.dropout = c.dropout;
  s.l = c.l;
  return s;
}

cs_synthetic_result ToC(const channelsum::SyntheticResult& r) {
  return {r.alpha,          r.epochs,         r.final_epoch_loss,
          r.mean_margin,    r.margin_positive, r.drawn_margin_positive,
          r.topic_recovery, r.mean_topics_recovered, r.seconds};
}

void SetCount(std::size_t* dst, std::size_t value) {
  if (dst) *dst = value;
}

// Runs `fn` on every record of `path`; failures of single records (bad JSON,
// nothing left after preprocessing, ...) are logged and counted.
template <typename Fn>
void ForEachRecord(const char* path, std::size_t* n_ok, std::size_t* n_failed, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, std::string("cannot open ") + path);
  std::size_t ok = 0, failed = 0, line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(channelsum::ParseRecord(line, line_no), line_no);
      ++ok;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kIo) throw;
      channelsum::Log().warn("line {}: skipped: {}", line_no, e.what());
      ++failed;
    }
  }
  SetCount(n_ok, ok);
  SetCount(n_failed, failed);
}

}  // namespace

extern "C" {

const char* cs_version(void) { return "1.0.0"; }

const char* cs_status_name(cs_status status) {
  if (status == CS_OK) return "Ok";
  return channelsum::ErrorCodeName(static_cast<ErrorCode>(status));
}

const char* cs_last_error(void) { return g_last_error.c_str(); }

void cs_train_config_default(cs_train_config* config) {
  if (config) *config = ToC(channelsum::TrainConfig{});
}

cs_status cs_train_config_json(const cs_train_config* config, char* buf, size_t cap) {
  return Guard([&] {
    Require(config && buf, "null argument");
    CopyOut(FromC(*config).ToJson(), buf, cap);
  });
}

cs_status cs_preprocess(const char* in, const char* out, const char* vocab_out,
                        size_t vocab_size, size_t* n_kept, size_t* n_skipped) {
  return Guard([&] {
    Require(in && out && vocab_out, "null argument");
    Require(vocab_size > 0, "vocab_size must be >= 1");
    std::vector<channelsum::RawPair> kept;
    ForEachRecord(in, n_kept, n_skipped, [&](const channelsum::RawPair& raw, std::size_t) {
      kept.push_back(channelsum::PreprocessText(raw));
    });
    channelsum::BuildVocabulary(kept, vocab_size).Save(vocab_out);
    Output o(out);
    channelsum::CorpusWriter writer(o.stream());
    for (const auto& r : kept) writer.Write(r);
    o.Finish();
  });
}

cs_status cs_make_contrastive(const char* corpus, const char* vocab, const char* out,
                              uint64_t seed, size_t* n_ok, size_t* n_failed) {
  return Guard([&] {
    Require(corpus && vocab && out, "null argument");
    const auto v = channelsum::Vocabulary::Load(vocab);
    Output o(out);
    std::size_t index = 0;
    ForEachRecord(corpus, n_ok, n_failed, [&](const channelsum::RawPair& raw, std::size_t) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(index++)};
      std::mt19937_64 rng(seq);
      auto [doc, gold] = channelsum::PreprocessPair(raw, v);
      const auto pair = channelsum::MakeContrastive(doc, gold, rng);
      o.stream() << channelsum::ContrastiveToJson(raw.id, pair, gold) << '\n';
    });
    o.Finish();
  });
}

cs_status cs_model_init(const char* vocab, const char* embeddings,
                        const cs_train_config* config, cs_model** out) {
  return Guard([&] {
    Require(vocab && config && out, "null argument");
    *out = nullptr;
    const auto cfg = FromC(*config);
    cfg.Validate();
    auto model = std::make_unique<cs_model>();
    model->vocab = channelsum::Vocabulary::Load(vocab);
    const auto table =
        embeddings ? channelsum::LoadEmbeddings(embeddings, model->vocab, cfg.emb_dim, cfg.seed)
                   : channelsum::RandomEmbeddings(model->vocab, cfg.emb_dim, cfg.seed);
    if (embeddings) {
      channelsum::Log().info("embeddings: {} of {} rows found in {}", table.found,
                             model->vocab.size(), embeddings);
    }
    model->ckpt = channelsum::InitCheckpoint(model->vocab, table, cfg);
    *out = model.release();
  });
}

cs_status cs_model_load(const char* checkpoint, const char* vocab,
                        const cs_train_config* expected, cs_model** out) {
  return Guard([&] {
    Require(checkpoint && vocab && out, "null argument");
    *out = nullptr;
    auto model = std::make_unique<cs_model>();
    std::optional<channelsum::TrainConfig> want;
    if (expected) want = FromC(*expected);
    model->ckpt = channelsum::LoadCheckpoint(checkpoint, want);
    model->vocab = channelsum::Vocabulary::Load(vocab);
    if (model->vocab.size() != model->ckpt.vocab_size) {
      throw Error(ErrorCode::kShapeMismatch,
                  "vocabulary has " + std::to_string(model->vocab.size()) +
                      " entries, checkpoint expects " + std::to_string(model->ckpt.vocab_size));
    }
    if (model->vocab.Digest() != model->ckpt.vocab_digest) {
      throw Error(ErrorCode::kInvalidArgument,
                  "vocabulary digest does not match the checkpoint");
    }
    *out = model.release();
  });
}

cs_status cs_model_save(const cs_model* model, const char* path) {
  return Guard([&] {
    Require(model && path, "null argument");
    channelsum::SaveCheckpoint(model->ckpt, path);
  });
}

void cs_model_free(cs_model* model) { delete model; }

cs_status cs_model_config(const cs_model* model, cs_train_config* out) {
  return Guard([&] {
    Require(model && out, "null argument");
    *out = ToC(model->ckpt.config);
  });
}

cs_status cs_model_epochs_done(const cs_model* model, uint64_t* out) {
  return Guard([&] {
    Require(model && out, "null argument");
    *out = model->ckpt.epochs_done;
  });
}

cs_status cs_model_equal(const cs_model* a, const cs_model* b, int params_only, int* equal) {
  return Guard([&] {
    Require(a && b && equal, "null argument");
    const auto& x = a->ckpt;
    const auto& y = b->ckpt;
    bool same = params_only ||
                (x.epochs_done == y.epochs_done && x.adam.step == y.adam.step &&
                 x.vocab_digest == y.vocab_digest && x.adam.m == y.adam.m && x.adam.v == y.adam.v);
    const auto px = x.params.Tensors();
    const auto py = y.params.Tensors();
    same = same && px.size() == py.size();
    for (std::size_t i = 0; same && i < px.size(); ++i) {
      const auto vx = px[i].values();
      const auto vy = py[i].values();
      same = px[i].shape() == py[i].shape() &&
             std::memcmp(vx.data(), vy.data(), vx.size() * sizeof(double)) == 0;
    }
    *equal = same ? 1 : 0;
  });
}

cs_status cs_model_train(cs_model* model, const char* corpus, const cs_train_config* config,
                         cs_step_callback callback, void* user, cs_train_stats* stats) {
  return Guard([&] {
    Require(model && corpus && config, "null argument");
    const auto cfg = FromC(*config);
    const auto raw = channelsum::ReadCorpus(corpus);
    std::size_t skipped = 0;
    const auto examples = channelsum::PrepareExamples(raw, model->vocab, &skipped);
    channelsum::StepCallback on_step;
    if (callback) {
      on_step = [&](const channelsum::StepRecord& r) {
        const cs_step_info info{r.epoch,      r.step,       r.id.c_str(), r.loss.total,
                                r.loss.con,   r.loss.penal, r.loss.margin};
        callback(&info, user);
      };
    }
    const auto s = channelsum::Train(examples, model->ckpt, cfg, on_step);
    if (stats) *stats = {s.steps, s.skipped, skipped, s.mean_loss};
  });
}

cs_status cs_extract_file(const cs_model* model, const char* in, const char* out, size_t l,
                          size_t workers, size_t* n_ok, size_t* n_failed) {
  return Guard([&] {
    Require(model && in && out, "null argument");
    channelsum::ExtractConfig ec;
    ec.l = l;
    ec.Validate();
    Output o(out);
    const auto stats = channelsum::ExtractBatch(in, o.stream(), model->ckpt.params,
                                                model->vocab, ec, workers);
    o.Finish();
    SetCount(n_ok, stats.ok);
    SetCount(n_failed, stats.failed);
  });
}

cs_status cs_export_attention(const cs_model* model, const char* corpus, const char* out,
                              size_t* n_ok, size_t* n_failed) {
  return Guard([&] {
    Require(model && corpus && out, "null argument");
    Output o(out);
    ForEachRecord(corpus, n_ok, n_failed, [&](const channelsum::RawPair& raw, std::size_t) {
      auto [doc, gold] = channelsum::PreprocessPair(raw, model->vocab);
      const auto result = channelsum::EvaluateSalience(doc, gold, model->ckpt.params);
      o.stream() << channelsum::AttentionToJson(raw.id, result.attention) << '\n';
    });
    o.Finish();
  });
}

cs_status cs_evaluate(const char* hyp, const char* ref, cs_eval_mode mode, size_t byte_budget,
                      cs_rouge_report* report, char* json, size_t cap) {
  return Guard([&] {
    Require(hyp && ref, "null argument");
    channelsum::EvalMode m;
    if (mode == CS_EVAL_FULL_F1) {
      m = channelsum::EvalMode::FullF1();
    } else if (mode == CS_EVAL_LIMITED_RECALL) {
      Require(byte_budget > 0, "byte budget must be >= 1");
      m = channelsum::EvalMode::LimitedRecall(byte_budget);
    } else {
      Require(false, "unknown evaluation mode");
    }
    const auto r = channelsum::EvaluateCorpus(channelsum::ReadCorpus(hyp),
                                              channelsum::ReadCorpus(ref), m);
    if (report) *report = {r.rouge1, r.rouge2, r.rougeL, r.n};
    CopyOut(r.ToJson(), json, cap);
  });
}

void cs_gradcheck_config_default(cs_gradcheck_config* config) {
  if (!config) return;
  const channelsum::GradCheckConfig d;
  *config = {d.seed,       d.hidden,     d.emb_dim, d.vocab,   d.doc_sentences,
             d.summary_sentences, d.max_tokens, d.alpha, d.dropout, d.epsilon,
             d.tolerance,  d.zero_weights ? 1 : 0};
}

cs_status cs_gradcheck(const cs_gradcheck_config* config, cs_gradcheck_report* report,
                       char* json, size_t cap) {
  return Guard([&] {
    Require(config, "null argument");
    channelsum::GradCheckConfig c;
    c.seed = config->seed;
    c.hidden = config->hidden;
    c.emb_dim = config->emb_dim;
    c.vocab = config->vocab;
    c.doc_sentences = config->doc_sentences;
    c.summary_sentences = config->summary_sentences;
    c.max_tokens = config->max_tokens;
    c.alpha = config->alpha;
    c.dropout = config->dropout;
    c.epsilon = config->epsilon;
    c.tolerance = config->tolerance;
    c.zero_weights = config->zero_weights != 0;
    const auto r = channelsum::GradCheck(c);
    if (report) {
      report->max_rel_err = r.max_rel_err;
      std::snprintf(report->worst_param, sizeof(report->worst_param), "%s",
                    r.worst_param.c_str());
      report->passed = r.passed ? 1 : 0;
    }
    CopyOut(r.ToJson(), json, cap);
  });
}

void cs_synthetic_config_default(cs_synthetic_config* config) {
  if (!config) return;
  const channelsum::SyntheticConfig d;
  *config = {d.seed,          d.train_pairs, d.heldout_pairs,   d.doc_sentences,
             d.topic_sentences, d.vocab_words, d.topic_words,   d.words_per_topic,
             d.min_tokens,    d.max_tokens,  d.hidden,          d.emb_dim,
             d.epochs,        d.lr,          d.alpha,           d.dropout,
             d.l};
}

cs_status cs_synthetic_config_json(const cs_synthetic_config* config, char* buf, size_t cap) {
  return Guard([&] {
    Require(config && buf, "null argument");
    CopyOut(FromC(*config).ToJson(), buf, cap);
  });
}

cs_status cs_synthetic_write(const cs_synthetic_config* config, const char* train,
                             const char* heldout) {
  return Guard([&] {
    Require(config && train && heldout, "null argument");
    const auto corpus = channelsum::GenerateSynthetic(FromC(*config));
    channelsum::WriteCorpus(train, corpus.train);
    channelsum::WriteCorpus(heldout, corpus.heldout);
  });
}

cs_status cs_synthetic_run(const cs_synthetic_config* config, cs_synthetic_result* result) {
  return Guard([&] {
    Require(config && result, "null argument");
    *result = ToC(channelsum::RunSynthetic(FromC(*config)));
  });
}

cs_status cs_ablate(const cs_synthetic_config* config, const double* alphas, size_t n_alphas,
                    cs_synthetic_result* results, char* table, size_t cap) {
  return Guard([&] {
    Require(config && alphas && results && n_alphas > 0, "null argument");
    const auto rs = channelsum::RunAblation(FromC(*config), {alphas, n_alphas});
    for (std::size_t i = 0; i < rs.size(); ++i) results[i] = ToC(rs[i]);
    CopyOut(channelsum::AblationTable(rs), table, cap);
  });
}

}  // extern "C"
