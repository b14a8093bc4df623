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

#include "sdt/embeddings.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sdt/binary_io.h"
#include "sdt/error.h"
#include "sdt/rng.h"

namespace sdt {
namespace {

constexpr char kMagic[4] = {'S', 'D', 'T', 'E'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t Fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

void EmbeddingStore::Add(EmbeddingRecord record) {
  for (const ClauseEmbedding& c : record.clauses) {
    if (c.vectors.size() != c.tokens.size() * header_.dim) {
      throw ValidationError("embedding record '" + record.paragraph_id +
                            "': vector length " + std::to_string(c.vectors.size()) +
                            " != tokens * dim");
    }
  }
  if (records_.count(record.paragraph_id)) {
    throw ValidationError("duplicate embedding record '" + record.paragraph_id + "'");
  }
  order_.push_back(record.paragraph_id);
  std::string id = record.paragraph_id;
  records_.emplace(std::move(id), std::move(record));
}

const EmbeddingRecord* EmbeddingStore::Find(const std::string& paragraph_id) const {
  auto it = records_.find(paragraph_id);
  return it == records_.end() ? nullptr : &it->second;
}

const EmbeddingRecord& EmbeddingStore::Get(const std::string& paragraph_id) const {
  const EmbeddingRecord* r = Find(paragraph_id);
  if (r == nullptr) {
    throw ValidationError("no embedding record for paragraph '" + paragraph_id + "'");
  }
  return *r;
}

std::string EmbeddingStore::Serialize() const {
  std::ostringstream out(std::ios::binary);
  out.write(kMagic, 4);
  binary::Write<std::uint32_t>(out, kVersion);
  binary::Write<std::uint32_t>(out, header_.dim);
  binary::WriteString(out, header_.encoder_name);
  binary::WriteString(out, header_.vocab_id);
  binary::Write<std::uint32_t>(out, header_.max_tokens);
  binary::Write<std::uint64_t>(out, header_.truncated_clauses);
  binary::Write<std::uint64_t>(out, header_.oov_tokens);
  binary::Write<std::uint64_t>(out, order_.size());
  for (const std::string& id : order_) {
    const EmbeddingRecord& r = records_.at(id);
    binary::WriteString(out, r.paragraph_id);
    binary::Write<std::uint32_t>(out, static_cast<std::uint32_t>(r.clauses.size()));
    for (const ClauseEmbedding& c : r.clauses) {
      binary::Write<std::uint32_t>(out, static_cast<std::uint32_t>(c.tokens.size()));
      for (const std::string& t : c.tokens) binary::WriteString(out, t);
      for (float v : c.vectors) binary::Write<float>(out, v);
    }
  }
  return out.str();
}

EmbeddingStore EmbeddingStore::Deserialize(const std::string& bytes,
                                           const std::string& source) {
  std::istringstream in(bytes, std::ios::binary);
  binary::ExpectMagic(in, kMagic, source);
  EmbeddingHeader h;
  h.version = binary::Read<std::uint32_t>(in, "version");
  if (h.version != kVersion) {
    throw ValidationError(source + ": unsupported embedding format version " +
                          std::to_string(h.version));
  }
  h.dim = binary::Read<std::uint32_t>(in, "dim");
  if (h.dim == 0) throw ValidationError(source + ": embedding dim is zero");
  h.encoder_name = binary::ReadString(in, "encoder name");
  h.vocab_id = binary::ReadString(in, "vocabulary id");
  h.max_tokens = binary::Read<std::uint32_t>(in, "max tokens");
  h.truncated_clauses = binary::Read<std::uint64_t>(in, "truncation stats");
  h.oov_tokens = binary::Read<std::uint64_t>(in, "oov stats");
  const auto count = binary::Read<std::uint64_t>(in, "record count");
  EmbeddingStore store(h);
  for (std::uint64_t r = 0; r < count; ++r) {
    EmbeddingRecord rec;
    rec.paragraph_id = binary::ReadString(in, "paragraph id");
    const auto clauses = binary::Read<std::uint32_t>(in, "clause count");
    rec.clauses.resize(clauses);
    for (ClauseEmbedding& c : rec.clauses) {
      const auto tokens = binary::Read<std::uint32_t>(in, "token count");
      if (h.max_tokens > 0 && tokens > h.max_tokens) {
        throw ValidationError(source + ": clause in '" + rec.paragraph_id +
                              "' exceeds the declared max_tokens");
      }
      c.tokens.reserve(tokens);
      for (std::uint32_t t = 0; t < tokens; ++t) {
        c.tokens.push_back(binary::ReadString(in, "token"));
      }
      c.vectors.resize(static_cast<std::size_t>(tokens) * h.dim);
      for (float& v : c.vectors) v = binary::Read<float>(in, "vector");
    }
    store.Add(std::move(rec));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ValidationError(source + ": trailing bytes after the last record");
  }
  return store;
}

EmbeddingStore EmbeddingStore::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return Deserialize(buf.str(), path.string());
}

void EmbeddingStore::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const std::string bytes = Serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::size_t> EmbeddedParagraph::ActiveTokens(std::size_t clause) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < width(); ++j) {
    if (token_active(clause, j)) out.push_back(j);
  }
  return out;
}

EmbeddedParagraph EmbedClauses(const EmbeddingRecord& record, std::size_t dim,
                               std::size_t begin, std::size_t end,
                               std::size_t max_tokens) {
  if (begin > end || end > record.clauses.size()) {
    throw ValidationError("clause window out of range for '" + record.paragraph_id + "'");
  }
  const std::size_t c = end - begin;
  std::size_t w = 1;
  for (std::size_t i = begin; i < end; ++i) {
    std::size_t n = record.clauses[i].tokens.size();
    if (max_tokens > 0) n = std::min(n, max_tokens);
    w = std::max(w, n);
  }
  EmbeddedParagraph ep;
  ep.embeddings = Tensor({c, w, dim});
  ep.token_mask.assign(c * w, 0);
  ep.clause_mask.assign(c, 0);
  ep.tokens.resize(c);
  for (std::size_t i = 0; i < c; ++i) {
    const ClauseEmbedding& ce = record.clauses[begin + i];
    std::size_t n = ce.tokens.size();
    if (max_tokens > 0) n = std::min(n, max_tokens);
    for (std::size_t j = 0; j < n; ++j) {
      ep.token_mask[i * w + j] = 1;
      ep.tokens[i].push_back(ce.tokens[j]);
      for (std::size_t k = 0; k < dim; ++k) {
        ep.embeddings.at(i, j, k) = static_cast<double>(ce.vectors[j * dim + k]);
      }
    }
    ep.clause_mask[i] = n > 0 ? 1 : 0;
  }
  return ep;
}

const EmbeddingRecord& RecordFor(const EmbeddingStore& store, const Paragraph& p) {
  const EmbeddingRecord& r = store.Get(p.id);
  if (r.clauses.size() != p.clauses.size()) {
    throw ValidationError("embedding record '" + p.id + "' has " +
                          std::to_string(r.clauses.size()) + " clauses, corpus has " +
                          std::to_string(p.clauses.size()));
  }
  return r;
}

std::vector<float> HashedVector(const std::string& token, std::size_t dim,
                                std::uint64_t seed) {
  Rng rng(Rng::Mix(Fnv1a(token) ^ Rng::Mix(seed)));
  std::vector<double> v(dim);
  double norm = 0.0;
  for (double& x : v) {
    x = rng.Normal();
    norm += x * x;
  }
  norm = std::sqrt(std::max(norm, 1e-30));
  std::vector<float> out(dim);
  for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(v[i] / norm);
  return out;
}

EmbeddingStore HashedEmbeddings(const Corpus& corpus, std::size_t dim,
                                std::uint64_t seed) {
  EmbeddingHeader h;
  h.dim = static_cast<std::uint32_t>(dim);
  h.encoder_name = "hashed";
  h.vocab_id = "hashed-seed-" + std::to_string(seed);
  EmbeddingStore store(h);
  for (const Paragraph& p : corpus.paragraphs) {
    EmbeddingRecord rec;
    rec.paragraph_id = p.id;
    for (const Clause& c : p.clauses) {
      ClauseEmbedding ce;
      ce.tokens = c.tokens;
      for (const std::string& t : c.tokens) {
        const std::vector<float> v = HashedVector(t, dim, seed);
        ce.vectors.insert(ce.vectors.end(), v.begin(), v.end());
      }
      rec.clauses.push_back(std::move(ce));
    }
    store.Add(std::move(rec));
  }
  return store;
}

}  // namespace sdt
