// Copyright 2026 The sdtag Authors.
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

#include "sdt/train.h"

#include <cmath>
#include <numeric>

#include "sdt/error.h"
#include "sdt/ops.h"
#include "sdt/parallel.h"

namespace sdt {

void Adam::Step(std::span<Tensor* const> params, std::span<const Tensor> grads) {
  if (params.size() != grads.size()) throw InternalError("adam: parameter/gradient count");
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k]->shape() != grads[k].shape()) {
      throw InternalError("adam: gradient " + std::to_string(k) + " has shape " +
                          ShapeString(grads[k].shape()) + ", parameter " +
                          ShapeString(params[k]->shape()));
    }
  }
  if (m_.empty()) {
    for (const Tensor* p : params) {
      m_.emplace_back(p->shape());
      v_.emplace_back(p->shape());
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto p = params[k]->values();
    auto g = grads[k].values();
    auto m = m_[k].values();
    auto v = v_[k].values();
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
      p[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
    }
  }
}

bool EarlyStopping::Update(int epoch, double loss) {
  if (!seen_ || loss < best_loss_) {
    seen_ = true;
    best_loss_ = loss;
    best_epoch_ = epoch;
    stale_ = 0;
    return true;
  }
  ++stale_;
  return false;
}

std::vector<Instance> MakeInstances(const Corpus& corpus, std::size_t c) {
  std::vector<Instance> out;
  for (std::size_t p = 0; p < corpus.paragraphs.size(); ++p) {
    for (const auto& [b, e] : Windows(corpus.paragraphs[p].clauses.size(), c)) {
      out.push_back({p, b, e});
    }
  }
  return out;
}

std::vector<std::size_t> WindowTags(const Paragraph& paragraph, const BioScheme& scheme,
                                    std::size_t begin, std::size_t end) {
  std::vector<std::string> labels;
  labels.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    const auto& gold = paragraph.clauses[i].gold_label;
    if (!gold) {
      throw ValidationError("paragraph " + paragraph.id + " clause " + std::to_string(i) +
                            " has no gold label");
    }
    labels.push_back(*gold);
  }
  return scheme.Encode(labels);
}

namespace {

std::vector<Tensor> ZeroGrads(const TaggerModel& model) {
  std::vector<Tensor> grads;
  for (const auto& [name, t] : model.Parameters()) grads.emplace_back(t->shape());
  return grads;
}

bool HasTokens(const EmbeddedParagraph& ep) {
  for (std::uint8_t m : ep.clause_mask) {
    if (m) return true;
  }
  return false;
}

}  // namespace

double InstanceGradient(const Corpus& corpus, const EmbeddingStore& store,
                        const TaggerModel& model, const Instance& instance,
                        Dropout* dropout, std::vector<Tensor>& grads) {
  const Paragraph& paragraph = corpus.paragraphs[instance.paragraph];
  const EmbeddedParagraph ep = EmbedClauses(RecordFor(store, paragraph), store.dim(),
                                            instance.begin, instance.end, model.config.w);
  if (!HasTokens(ep)) return 0.0;
  const std::vector<std::size_t> gold =
      WindowTags(paragraph, model.scheme(), instance.begin, instance.end);
  Tape tape;
  const ModelVars vars = BindLeaves(tape, model);
  Var loss = ParagraphLoss(vars, model, ep, gold, dropout);
  tape.Backward(loss, grads);
  return loss.value().scalar();
}

double MeanLoss(const Corpus& corpus, const EmbeddingStore& store, const TaggerModel& model) {
  const std::vector<Instance> instances = MakeInstances(corpus, model.config.c);
  if (instances.empty()) return 0.0;
  std::vector<double> losses(instances.size(), 0.0);
  const BioScheme scheme = model.scheme();
  ParallelFor(instances.size(), [&](std::size_t i) {
    const Instance& in = instances[i];
    const Paragraph& paragraph = corpus.paragraphs[in.paragraph];
    const EmbeddedParagraph ep = EmbedClauses(RecordFor(store, paragraph), store.dim(),
                                              in.begin, in.end, model.config.w);
    if (!HasTokens(ep)) return;
    const std::vector<std::size_t> gold = WindowTags(paragraph, scheme, in.begin, in.end);
    Tape tape;
    const ModelVars vars = BindReferences(tape, model);
    losses[i] = ParagraphLoss(vars, model, ep, gold, nullptr).value().scalar();
  });
  double total = 0.0;
  for (double l : losses) total += l;
  return total / static_cast<double>(instances.size());
}

TrainResult Train(const Corpus& corpus, const EmbeddingStore& store,
                  const TaggerConfig& config, const TaggerModel* init,
                  const TrainOptions& options) {
  config.Validate();
  if (corpus.paragraphs.empty()) throw ValidationError("training corpus is empty");
  corpus.Validate();
  for (const Paragraph& p : corpus.paragraphs) {
    RecordFor(store, p);
    for (const Clause& c : p.clauses) {
      if (!c.gold_label) throw ValidationError("paragraph " + p.id + " lacks gold labels");
    }
  }
  if (store.dim() != config.d) {
    throw ValidationError("embedding dim " + std::to_string(store.dim()) +
                          " does not match config d=" + std::to_string(config.d));
  }

  TaggerModel model = init ? *init : TaggerModel::Initialize(config, corpus.label_set, config.seed);
  if (init) {
    model.config = config;
    model.CheckShapes();
    if (!(model.label_set == corpus.label_set)) {
      throw ValidationError("model label set '" + model.label_set.name() +
                            "' does not match corpus label set '" +
                            corpus.label_set.name() + "'");
    }
  }

  Corpus train_part;
  Corpus held_out;
  if (options.validation != nullptr) {
    train_part = corpus;
    held_out = *options.validation;
    for (const Paragraph& p : held_out.paragraphs) RecordFor(store, p);
  } else {
    std::tie(train_part, held_out) = SplitCorpus(corpus, config.validation_ratio, config.seed);
  }
  const bool use_validation = !held_out.paragraphs.empty();

  TrainResult result;
  result.train_paragraphs = train_part.paragraphs.size();
  result.validation_paragraphs = held_out.paragraphs.size();
  result.model = model;

  const std::vector<Instance> instances = MakeInstances(train_part, config.c);
  std::vector<std::size_t> order(instances.size());
  Adam adam(config.lr);
  EarlyStopping stopping(config.patience);
  std::vector<Tensor*> params;
  for (auto& [name, t] : model.Parameters()) params.push_back(t);

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle = Rng::Derive(config.seed, static_cast<std::uint64_t>(epoch), 0x5u);
    shuffle.Shuffle(std::span<std::size_t>(order));

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, order.size() - start);
      std::vector<std::vector<Tensor>> grads(count);
      std::vector<double> losses(count, 0.0);
      ParallelFor(count, [&](std::size_t j) {
        const std::size_t id = order[start + j];
        grads[j] = ZeroGrads(model);
        Dropout dropout(Rng::Derive(config.seed, static_cast<std::uint64_t>(epoch), id + 1).Next());
        losses[j] = InstanceGradient(train_part, store, model, instances[id], &dropout, grads[j]);
      });
      std::vector<Tensor> total = std::move(grads[0]);
      epoch_loss += losses[0];
      for (std::size_t j = 1; j < count; ++j) {
        epoch_loss += losses[j];
        for (std::size_t k = 0; k < total.size(); ++k) {
          auto dst = total[k].values();
          auto src = grads[j][k].values();
          for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
        }
      }
      const double scale = 1.0 / static_cast<double>(count);
      for (Tensor& g : total) {
        for (double& v : g.values()) v *= scale;
      }
      adam.Step(params, total);
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = instances.empty() ? 0.0 : epoch_loss / static_cast<double>(instances.size());
    if (use_validation) entry.validation_loss = MeanLoss(held_out, store, model);
    entry.improved = stopping.Update(epoch, entry.validation_loss.value_or(entry.train_loss));
    if (entry.improved) result.model = model;
    result.log.push_back(entry);
    result.stopped_epoch = epoch;
    if (options.on_epoch) options.on_epoch(entry);
    if (stopping.ShouldStop()) break;
  }
  result.best_epoch = stopping.best_epoch();
  return result;
}

}  // namespace sdt
