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

#include "sdt/cli.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "sdt/corpus.h"
#include "test_util.h"

namespace sdt {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome Sdtag(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json ReadJson(const fs::path& path) { return json::parse(Slurp(path)); }

#define ASSERT_OK(outcome)                                     \
  do {                                                         \
    const Outcome& o_ = (outcome);                             \
    ASSERT_EQ(o_.code, 0) << o_.err;                           \
  } while (0)

// Shared fixture files: a small keyword corpus, hashed embeddings and a
// short config so that training stays well under a second.
class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(testing::TempDir("cli"));
    const fs::path& d = *dir_;
    ASSERT_OK(Sdtag({"synth", "--kind", "keyword", "--label-set", "scidt", "--paragraphs", "12",
                   "--seed", "3", "--out", (d / "src.jsonl").string()}));
    ASSERT_OK(Sdtag({"synth", "--kind", "keyword", "--label-set", "coda", "--paragraphs", "12",
                   "--seed", "4", "--id-prefix", "c", "--out", (d / "tgt.jsonl").string()}));
    ASSERT_OK(Sdtag({"split", "--corpus", (d / "tgt.jsonl").string(), "--ratio", "0.5",
                   "--out-a", (d / "tgt_train.jsonl").string(), "--out-b",
                   (d / "tgt_test.jsonl").string()}));
    ASSERT_OK(Sdtag({"embed-synthetic", "--corpus", (d / "src.jsonl").string(), "--corpus",
                   (d / "tgt.jsonl").string(), "--dim", "16", "--out",
                   (d / "emb.sdte").string()}));
    std::ofstream(d / "cfg.json") << R"({"max_epochs": 15, "patience": 15})";
    ASSERT_OK(Sdtag(TrainArgs(d / "model.ckpt")));
  }
  static void TearDownTestSuite() {
    fs::remove_all(*dir_);
    delete dir_;
  }

  static std::vector<std::string> TrainArgs(const fs::path& out) {
    const fs::path& d = *dir_;
    return {"train", "--corpus", (d / "src.jsonl").string(), "--embeddings",
            (d / "emb.sdte").string(), "--preset", "scaled-down", "--config",
            (d / "cfg.json").string(), "--seed", "5", "--out", out.string()};
  }
  static fs::path Path(const std::string& name) { return *dir_ / name; }

  static fs::path* dir_;
};

fs::path* CliTest::dir_ = nullptr;

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(Sdtag({"--help"}).code, 0);
  EXPECT_EQ(Sdtag({}).code, 3);
  EXPECT_EQ(Sdtag({"frobnicate"}).code, 3);
  EXPECT_EQ(Sdtag({"train", "--corpus", "x"}).code, 3);
  EXPECT_EQ(Sdtag({"synth", "--kind", "poems", "--out", "x"}).code, 3);
}

TEST_F(CliTest, MissingInputIsIoError) {
  const Outcome o = Sdtag({"train", "--corpus", Path("absent.jsonl").string(), "--embeddings",
                         Path("emb.sdte").string(), "--out", Path("m").string()});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("absent.jsonl"), std::string::npos);
}

TEST_F(CliTest, MalformedInputIsValidationError) {
  std::ofstream(Path("bad.jsonl")) << "{not json\n";
  EXPECT_EQ(Sdtag({"eval", "--model", Path("model.ckpt").string(), "--corpus",
                 Path("bad.jsonl").string(), "--embeddings", Path("emb.sdte").string()})
                .code,
            3);
  std::ofstream(Path("bad.ckpt")) << "garbage";
  EXPECT_EQ(Sdtag({"eval", "--model", Path("bad.ckpt").string(), "--corpus",
                 Path("src.jsonl").string(), "--embeddings", Path("emb.sdte").string()})
                .code,
            3);
}

TEST_F(CliTest, ConfigMismatchesAreRejected) {
  std::ofstream(Path("wrong_d.json")) << R"({"d": 300})";
  std::vector<std::string> args = TrainArgs(Path("unused.ckpt"));
  args[8] = Path("wrong_d.json").string();
  EXPECT_EQ(Sdtag(args).code, 3);

  std::vector<std::string> claim = TrainArgs(Path("unused.ckpt"));
  claim.insert(claim.begin() + 1, {"--task", "claim"});
  EXPECT_EQ(Sdtag(claim).code, 3);
  EXPECT_FALSE(fs::exists(Path("unused.ckpt")));
}

TEST_F(CliTest, TrainingIsByteReproducible) {
  ASSERT_OK(Sdtag(TrainArgs(Path("again.ckpt"))));
  EXPECT_EQ(Slurp(Path("model.ckpt")), Slurp(Path("again.ckpt")));

  const json manifest = ReadJson(Path("model.ckpt.manifest.json"));
  EXPECT_EQ(manifest["command"], "train");
  EXPECT_EQ(manifest["seed"], 5);
  EXPECT_EQ(manifest["config"]["max_epochs"], 15);
  EXPECT_EQ(manifest["inputs"]["corpus"]["fnv1a64"], FileDigest(Path("src.jsonl").string()));
  EXPECT_EQ(manifest["outputs"][0], Path("model.ckpt").string());

  std::istringstream log(Slurp(Path("model.ckpt.log.tsv")));
  std::string line;
  std::getline(log, line);
  EXPECT_EQ(line, "epoch\ttrain_loss\tvalidation_loss\timproved");
  int rows = 0;
  while (std::getline(log, line)) ++rows;
  EXPECT_EQ(rows, manifest["stopped_epoch"].get<int>());
}

TEST_F(CliTest, FileDigestIsFnv1a) {
  std::ofstream(Path("a.txt"), std::ios::binary) << "a";
  EXPECT_EQ(FileDigest(Path("a.txt").string()), "af63dc4c8601ec8c");
  std::ofstream(Path("empty.txt"), std::ios::binary);
  EXPECT_EQ(FileDigest(Path("empty.txt").string()), "cbf29ce484222325");
}

TEST_F(CliTest, EvalReport) {
  ASSERT_OK(Sdtag({"eval", "--model", Path("model.ckpt").string(), "--corpus",
                 Path("src.jsonl").string(), "--embeddings", Path("emb.sdte").string(),
                 "--exclude-none", "--out", Path("eval.json").string(), "--confusion",
                 Path("confusion.tsv").string()}));
  const json r = ReadJson(Path("eval.json"));
  EXPECT_EQ(r["task"], "discourse");
  EXPECT_EQ(r["label_set"], "scidt");
  const double f1 = r["micro_f1"];
  EXPECT_GE(f1, 0.0);
  EXPECT_LE(f1, 1.0);
  EXPECT_TRUE(r.contains("micro_f1_excluding_none"));
  long total = 0, diagonal = 0;
  const auto& counts = r["confusion"]["counts"];
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = 0; j < counts[i].size(); ++j) {
      total += counts[i][j].get<long>();
      if (i == j) diagonal += counts[i][j].get<long>();
    }
  }
  EXPECT_EQ(total, r["clauses"].get<long>());
  EXPECT_NEAR(f1, static_cast<double>(diagonal) / total, 1e-12);
  EXPECT_TRUE(fs::exists(Path("confusion.tsv")));
}

TEST_F(CliTest, EvalRejectsForeignLabelSet) {
  EXPECT_EQ(Sdtag({"eval", "--model", Path("model.ckpt").string(), "--corpus",
                 Path("tgt.jsonl").string(), "--embeddings", Path("emb.sdte").string()})
                .code,
            3);
}

TEST_F(CliTest, CompareWithItselfHasNoDiscordance) {
  const Outcome o = Sdtag({"--manifest", Path("compare.manifest.json").string(), "eval",
                           "--model", Path("model.ckpt").string(), "--corpus",
                         Path("src.jsonl").string(), "--embeddings", Path("emb.sdte").string(),
                         "--compare", Path("model.ckpt").string()});
  ASSERT_OK(o);
  const json r = json::parse(o.out);
  EXPECT_EQ(r["mcnemar"]["a_only"], 0);
  EXPECT_EQ(r["mcnemar"]["b_only"], 0);
  EXPECT_EQ(r["mcnemar"]["p_value"], 1.0);
  EXPECT_EQ(r["compare"]["micro_f1"], r["micro_f1"]);
}

TEST_F(CliTest, FineTuneFromCheckpoint) {
  std::vector<std::string> args = TrainArgs(Path("tuned.ckpt"));
  args[2] = Path("tgt_train.jsonl").string();
  args.insert(args.end(), {"--pretrained", Path("model.ckpt").string()});
  ASSERT_OK(Sdtag(args));
  ASSERT_OK(Sdtag({"eval", "--model", Path("tuned.ckpt").string(), "--corpus",
                 Path("tgt_test.jsonl").string(), "--embeddings", Path("emb.sdte").string(),
                 "--out", Path("tuned.json").string()}));
  EXPECT_TRUE(ReadJson(Path("tuned.ckpt.manifest.json"))["inputs"].contains("pretrained"));
}

TEST_F(CliTest, ZeroShotWritesMapAndScore) {
  const fs::path out = Path("zs");
  const Outcome o = Sdtag({"zeroshot", "--model", Path("model.ckpt").string(), "--target-train",
                         Path("tgt_train.jsonl").string(), "--target-test",
                         Path("tgt_test.jsonl").string(), "--embeddings",
                         Path("emb.sdte").string(), "--out", out.string()});
  ASSERT_OK(o);
  const json map = ReadJson(out / "label_map.json");
  const json score = ReadJson(out / "zeroshot.json");
  EXPECT_EQ(score["label_map"], map);
  EXPECT_GE(score["micro_f1"].get<double>(), 0.0);
  EXPECT_TRUE(fs::exists(out / "zeroshot.manifest.json"));
}

TEST_F(CliTest, AttentionWeightsFormSimplexPerClause) {
  const fs::path out = Path("att");
  ASSERT_OK(Sdtag({"attention", "--model", Path("model.ckpt").string(), "--corpus",
                 Path("src.jsonl").string(), "--embeddings", Path("emb.sdte").string(), "--out",
                 out.string()}));
  const Corpus corpus = ReadJsonl(Path("src.jsonl").string());
  for (const Paragraph& p : corpus.paragraphs) {
    std::istringstream tsv(Slurp(out / (p.id + ".tsv")));
    ASSERT_TRUE(fs::exists(out / (p.id + ".html")));
    std::string line;
    std::getline(tsv, line);
    EXPECT_EQ(line, "clause_index\ttoken\tweight");
    std::map<std::size_t, double> sums;
    while (std::getline(tsv, line)) {
      std::istringstream row(line);
      std::size_t clause;
      std::string token;
      double weight;
      row >> clause >> token >> weight;
      sums[clause] += weight;
    }
    EXPECT_EQ(sums.size(), p.clauses.size()) << p.id;
    for (const auto& [clause, sum] : sums) EXPECT_NEAR(sum, 1.0, 1e-9) << p.id << " " << clause;
  }
}

class CliFragmentsTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(testing::TempDir("cli_fragments"));
    ASSERT_OK(Sdtag({"synth", "--kind", "blocks", "--paragraphs", "60", "--seed", "9",
                   "--violation-rate", "0.1", "--out", (*dir_ / "train.jsonl").string()}));
    ASSERT_OK(Sdtag({"synth", "--kind", "blocks", "--paragraphs", "30", "--seed", "10",
                   "--violation-rate", "0.1", "--out", (*dir_ / "test.jsonl").string()}));
  }
  static void TearDownTestSuite() {
    fs::remove_all(*dir_);
    delete dir_;
  }
  static std::string P(const std::string& name) { return (*dir_ / name).string(); }
  static fs::path* dir_;
};

fs::path* CliFragmentsTest::dir_ = nullptr;

TEST_F(CliFragmentsTest, GoldBioMatchesGeneratorBookkeeping) {
  const Outcome o = Sdtag({"--manifest", P("gold.manifest.json"), "fragments", "eval", "--corpus",
                           P("test.jsonl"), "--gold-bio"});
  ASSERT_OK(o);
  const json r = json::parse(o.out);
  const json manifest = ReadJson(P("test.jsonl.manifest.json"));
  EXPECT_NEAR(r["f1"].get<double>(), manifest["config"]["expected_gold_bio_f1"].get<double>(),
              1e-12);
}

TEST_F(CliFragmentsTest, TagsHelpAndPredictRoundTrips) {
  ASSERT_OK(Sdtag({"fragments", "train", "--corpus", P("train.jsonl"), "--gold-tags", "--out",
                 P("tags.crf")}));
  ASSERT_OK(Sdtag({"fragments", "train", "--corpus", P("train.jsonl"), "--no-tags", "--out",
                 P("notags.crf")}));
  const Outcome with = Sdtag({"--manifest", P("with.manifest.json"), "fragments", "eval",
                              "--corpus", P("test.jsonl"), "--gold-tags",
                              "--model", P("tags.crf")});
  const Outcome without = Sdtag({"--manifest", P("without.manifest.json"), "fragments", "eval",
                                 "--corpus", P("test.jsonl"), "--no-tags",
                                 "--model", P("notags.crf")});
  ASSERT_OK(with);
  ASSERT_OK(without);
  EXPECT_GE(json::parse(with.out)["f1"].get<double>(),
            json::parse(without.out)["f1"].get<double>());

  ASSERT_OK(Sdtag({"fragments", "predict", "--corpus", P("test.jsonl"), "--gold-tags", "--model",
                 P("tags.crf"), "--out", P("pred.jsonl")}));
  const Corpus pred = ReadJsonl(P("pred.jsonl"));
  const Corpus gold = ReadJsonl(P("test.jsonl"));
  ASSERT_EQ(pred.paragraphs.size(), gold.paragraphs.size());
  for (std::size_t i = 0; i < pred.paragraphs.size(); ++i) {
    ASSERT_TRUE(pred.paragraphs[i].fragment.has_value());
    EXPECT_EQ(pred.paragraphs[i].fragment->referred.size(), gold.paragraphs[i].clauses.size());
  }
}

TEST_F(CliFragmentsTest, ValidationSelectsL2) {
  ASSERT_OK(Sdtag({"fragments", "train", "--corpus", P("train.jsonl"), "--gold-tags",
                 "--validation", P("test.jsonl"), "--out", P("sel.crf")}));
  const json manifest = ReadJson(P("sel.crf.manifest.json"));
  EXPECT_EQ(manifest["config"]["l2_selection"].size(), 4u);
  EXPECT_EQ(Sdtag({"fragments", "train", "--corpus", P("train.jsonl"), "--gold-tags",
                 "--validation", P("test.jsonl"), "--l2", "1", "--out", P("x.crf")})
                .code,
            3);
}

TEST_F(CliFragmentsTest, TagSourceIsRequired) {
  EXPECT_EQ(Sdtag({"fragments", "train", "--corpus", P("train.jsonl"), "--out", P("y.crf")}).code,
            3);
  EXPECT_EQ(Sdtag({"fragments", "eval", "--corpus", P("test.jsonl"), "--no-tags"}).code, 3);
}

}  // namespace
}  // namespace sdt
