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

#ifndef SDT_TRAIN_H_
#define SDT_TRAIN_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sdt/corpus.h"
#include "sdt/embeddings.h"
#include "sdt/tagger.h"

namespace sdt {

// Adaptive-moment optimizer (beta1 0.9, beta2 0.999, eps 1e-8) with bias
// correction.
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void Step(std::span<Tensor* const> params, std::span<const Tensor> grads);
  std::int64_t steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::vector<Tensor> m_, v_;
};

// Tracks the best loss seen and how many epochs have passed without a
// strict improvement.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience) : patience_(patience) {}

  // Returns true when `loss` improves on the best so far.
  bool Update(int epoch, double loss);
  bool ShouldStop() const { return stale_ >= patience_; }
  int best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }

 private:
  int patience_;
  int stale_ = 0;
  int best_epoch_ = 0;
  double best_loss_ = 0.0;
  bool seen_ = false;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;                 // mean instance loss during the epoch
  std::optional<double> validation_loss;   // inference-mode mean loss
  bool improved = false;
};

// One training instance: a window of at most c clauses of one paragraph.
struct Instance {
  std::size_t paragraph = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
};

std::vector<Instance> MakeInstances(const Corpus& corpus, std::size_t c);

// Per-window gold BIO tags; each window is encoded on its own so it starts
// from a clean B.
std::vector<std::size_t> WindowTags(const Paragraph& paragraph, const BioScheme& scheme,
                                    std::size_t begin, std::size_t end);

// Mean inference-mode loss over every window of the corpus.
double MeanLoss(const Corpus& corpus, const EmbeddingStore& store, const TaggerModel& model);

// Loss and gradient (in Parameters() order) of one instance.
double InstanceGradient(const Corpus& corpus, const EmbeddingStore& store,
                        const TaggerModel& model, const Instance& instance,
                        Dropout* dropout, std::vector<Tensor>& grads);

struct TrainOptions {
  // When set, used for early stopping instead of a held-out slice.
  const Corpus* validation = nullptr;
  std::function<void(const EpochLog&)> on_epoch;
};

struct TrainResult {
  TaggerModel model;        // best-epoch weights
  std::vector<EpochLog> log;
  int best_epoch = 0;       // 0 = initial weights
  int stopped_epoch = 0;
  std::size_t train_paragraphs = 0;
  std::size_t validation_paragraphs = 0;
};

// Mini-batch training from `init` (or a fresh model seeded from
// config.seed). Batches are processed data-parallel, with per-instance
// gradients summed in instance order, so results do not depend on the
// thread count.
TrainResult Train(const Corpus& corpus, const EmbeddingStore& store,
                  const TaggerConfig& config, const TaggerModel* init = nullptr,
                  const TrainOptions& options = {});

}  // namespace sdt

#endif  // SDT_TRAIN_H_
