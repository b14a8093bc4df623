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

#ifndef SDT_EMBEDDINGS_H_
#define SDT_EMBEDDINGS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sdt/corpus.h"
#include "sdt/tensor.h"

namespace sdt {

// Token vectors for one clause, stored as 32-bit floats.
struct ClauseEmbedding {
  std::vector<std::string> tokens;
  std::vector<float> vectors;  // tokens.size() * dim, row-major

  bool operator==(const ClauseEmbedding&) const = default;
};

struct EmbeddingRecord {
  std::string paragraph_id;
  std::vector<ClauseEmbedding> clauses;

  bool operator==(const EmbeddingRecord&) const = default;
};

struct EmbeddingHeader {
  std::uint32_t version = 1;
  std::uint32_t dim = 0;
  std::string encoder_name;
  std::string vocab_id;
  std::uint32_t max_tokens = 0;  // truncation length used by the exporter
  std::uint64_t truncated_clauses = 0;
  std::uint64_t oov_tokens = 0;

  bool operator==(const EmbeddingHeader&) const = default;
};

// In-memory view of an "SDTE" embedding file:
//   "SDTE" u32 version, u32 dim, str encoder, str vocab, u32 max_tokens,
//   u64 truncated_clauses, u64 oov_tokens, u64 record_count, then per
//   record: str paragraph_id, u32 clauses, and per clause u32 tokens,
//   the token strings, tokens * dim f32 values.
// Integers and floats are little-endian; str is a u32 byte length plus
// UTF-8 bytes.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  explicit EmbeddingStore(EmbeddingHeader header) : header_(std::move(header)) {}

  static EmbeddingStore Load(const std::filesystem::path& path);
  void Save(const std::filesystem::path& path) const;
  std::string Serialize() const;
  static EmbeddingStore Deserialize(const std::string& bytes,
                                    const std::string& source = "<memory>");

  const EmbeddingHeader& header() const { return header_; }
  EmbeddingHeader& mutable_header() { return header_; }
  std::size_t dim() const { return header_.dim; }
  std::size_t size() const { return order_.size(); }

  // Throws on a duplicate id or a vector length that is not tokens * dim.
  void Add(EmbeddingRecord record);
  const EmbeddingRecord* Find(const std::string& paragraph_id) const;
  const EmbeddingRecord& Get(const std::string& paragraph_id) const;
  const std::vector<std::string>& ids() const { return order_; }

 private:
  EmbeddingHeader header_;
  std::vector<std::string> order_;
  std::map<std::string, EmbeddingRecord> records_;
};

// Padded, masked embedding block for a run of clauses (c x w x d).
struct EmbeddedParagraph {
  Tensor embeddings;                        // zero at masked positions
  std::vector<std::uint8_t> token_mask;     // c * w
  std::vector<std::uint8_t> clause_mask;    // c
  std::vector<std::vector<std::string>> tokens;

  std::size_t clauses() const { return embeddings.dim(0); }
  std::size_t width() const { return embeddings.dim(1); }
  std::size_t dim() const { return embeddings.dim(2); }
  bool token_active(std::size_t clause, std::size_t j) const {
    return token_mask[clause * width() + j] != 0;
  }
  std::vector<std::size_t> ActiveTokens(std::size_t clause) const;
};

// Builds clauses [begin, end) of a record, keeping at most max_tokens tokens
// per clause (0 = no limit). The width is the longest kept clause (at least
// one column).
EmbeddedParagraph EmbedClauses(const EmbeddingRecord& record, std::size_t dim,
                               std::size_t begin, std::size_t end,
                               std::size_t max_tokens);

// Looks up a paragraph and checks that its clause count matches.
const EmbeddingRecord& RecordFor(const EmbeddingStore& store, const Paragraph& p);

// Deterministic pseudo-embeddings: each token maps to a fixed random unit
// vector derived from a hash of the token and the seed. Used for fixtures
// and tests where no contextual encoder is available.
EmbeddingStore HashedEmbeddings(const Corpus& corpus, std::size_t dim,
                                std::uint64_t seed);
std::vector<float> HashedVector(const std::string& token, std::size_t dim,
                                std::uint64_t seed);

}  // namespace sdt

#endif  // SDT_EMBEDDINGS_H_
