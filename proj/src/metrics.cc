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

#include "sdt/metrics.h"

#include <cmath>
#include <map>
#include <sstream>

#include "sdt/error.h"

namespace sdt {
namespace {

void CheckAligned(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ValidationError(std::string(what) + ": sequences differ in length (" +
                          std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

std::vector<std::string> Flatten(std::span<const LabelSequence> seqs) {
  std::vector<std::string> out;
  for (const LabelSequence& s : seqs) out.insert(out.end(), s.begin(), s.end());
  return out;
}

double MicroF1(std::span<const LabelSequence> pred,
               std::span<const LabelSequence> gold) {
  CheckAligned(pred.size(), gold.size(), "micro_f1");
  for (std::size_t i = 0; i < pred.size(); ++i) {
    CheckAligned(pred[i].size(), gold[i].size(), "micro_f1");
  }
  const std::vector<std::string> p = Flatten(pred);
  const std::vector<std::string> g = Flatten(gold);
  return MicroF1(p, g);
}

double MicroF1(std::span<const std::string> pred, std::span<const std::string> gold) {
  CheckAligned(pred.size(), gold.size(), "micro_f1");
  if (pred.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == gold[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

double MicroF1ExcludingNone(std::span<const std::string> pred,
                            std::span<const std::string> gold,
                            const std::string& none_label) {
  CheckAligned(pred.size(), gold.size(), "micro_f1");
  std::size_t tp = 0, predicted = 0, actual = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] != none_label) ++predicted;
    if (gold[i] != none_label) ++actual;
    if (pred[i] != none_label && pred[i] == gold[i]) ++tp;
  }
  if (tp == 0) return 0.0;
  const double p = static_cast<double>(tp) / static_cast<double>(predicted);
  const double r = static_cast<double>(tp) / static_cast<double>(actual);
  return 2.0 * p * r / (p + r);
}

double BinaryF1(std::span<const int> pred, std::span<const int> gold) {
  CheckAligned(pred.size(), gold.size(), "binary_f1");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] != 0;
    const bool g = gold[i] != 0;
    if (p && g) ++tp;
    if (p && !g) ++fp;
    if (!p && g) ++fn;
  }
  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

double CohenKappa(std::span<const std::string> a, std::span<const std::string> b) {
  CheckAligned(a.size(), b.size(), "cohen_kappa");
  if (a.empty()) throw ValidationError("cohen_kappa: empty sequences");
  const double n = static_cast<double>(a.size());
  std::map<std::string, double> ma, mb;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma[a[i]] += 1.0;
    mb[b[i]] += 1.0;
    if (a[i] == b[i]) ++agree;
  }
  const double po = static_cast<double>(agree) / n;
  double pe = 0.0;
  for (const auto& [label, count] : ma) {
    auto it = mb.find(label);
    if (it != mb.end()) pe += (count / n) * (it->second / n);
  }
  if (pe >= 1.0) return agree == a.size() ? 1.0 : 0.0;
  return (po - pe) / (1.0 - pe);
}

double ChiSquare1Survival(double x) {
  if (x <= 0.0) return 1.0;
  return std::erfc(std::sqrt(x / 2.0));
}

McNemarResult McNemarFromCounts(std::size_t a_only, std::size_t b_only,
                                bool exact_small_sample) {
  McNemarResult r;
  r.a_only = a_only;
  r.b_only = b_only;
  const std::size_t n = a_only + b_only;
  if (n == 0) return r;
  const double diff = std::abs(static_cast<double>(a_only) - static_cast<double>(b_only));
  r.statistic = (diff - 1.0) * (diff - 1.0) / static_cast<double>(n);
  if (exact_small_sample && n < 25) {
    r.exact = true;
    const std::size_t k = std::min(a_only, b_only);
    // log C(n, i) 2^-n summed for i <= k.
    double tail = 0.0;
    for (std::size_t i = 0; i <= k; ++i) {
      tail += std::exp(std::lgamma(static_cast<double>(n) + 1) -
                       std::lgamma(static_cast<double>(i) + 1) -
                       std::lgamma(static_cast<double>(n - i) + 1) -
                       static_cast<double>(n) * std::log(2.0));
    }
    r.p_value = std::min(1.0, 2.0 * tail);
  } else {
    r.p_value = ChiSquare1Survival(r.statistic);
  }
  return r;
}

McNemarResult McNemar(std::span<const std::string> pred_a,
                      std::span<const std::string> pred_b,
                      std::span<const std::string> gold, bool exact_small_sample) {
  CheckAligned(pred_a.size(), gold.size(), "mcnemar");
  CheckAligned(pred_b.size(), gold.size(), "mcnemar");
  std::size_t a_only = 0, b_only = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool ca = pred_a[i] == gold[i];
    const bool cb = pred_b[i] == gold[i];
    if (ca && !cb) ++a_only;
    if (!ca && cb) ++b_only;
  }
  return McNemarFromCounts(a_only, b_only, exact_small_sample);
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t t = 0;
  for (const auto& row : counts) {
    for (std::int64_t c : row) t += c;
  }
  return t;
}

std::vector<std::vector<double>> ConfusionMatrix::RowNormalized() const {
  std::vector<std::vector<double>> out;
  for (const auto& row : counts) {
    std::int64_t sum = 0;
    for (std::int64_t c : row) sum += c;
    std::vector<double> r(row.size(), 0.0);
    if (sum > 0) {
      for (std::size_t j = 0; j < row.size(); ++j) {
        r[j] = static_cast<double>(row[j]) / static_cast<double>(sum);
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string ConfusionMatrix::ToTsv() const {
  std::ostringstream out;
  out << "gold\\pred";
  for (const std::string& l : labels) out << '\t' << l;
  out << '\n';
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << labels[i];
    for (std::int64_t c : counts[i]) out << '\t' << c;
    out << '\n';
  }
  return out.str();
}

ConfusionMatrix Confusion(std::span<const std::string> pred,
                          std::span<const std::string> gold,
                          const LabelSet& label_set) {
  CheckAligned(pred.size(), gold.size(), "confusion");
  ConfusionMatrix m;
  m.labels = label_set.labels();
  m.counts.assign(m.labels.size(), std::vector<std::int64_t>(m.labels.size(), 0));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++m.counts[label_set.IndexOf(gold[i])][label_set.IndexOf(pred[i])];
  }
  return m;
}

}  // namespace sdt
