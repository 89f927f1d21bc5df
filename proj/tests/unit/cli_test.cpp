// Copyright 2026 The qe-hter Authors.
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
#include "qe_cli/cli.hpp"

#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qe/dataset.hpp"
#include "qe/model_io.hpp"
#include "qe/pipeline.hpp"
#include "support/synthetic.hpp"
#include "support/temp_dir.hpp"

namespace qe {
namespace {

using nlohmann::json;

struct Result {
  int code;
  std::string out, err;
};

Result Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    testing::SyntheticSpec s;
    s.n = 80;
    s.n_features = 5;
    ds_ = testing::MakeSyntheticCorpus(s);
    std::ostringstream feats, edits, hter, sents;
    WriteFeatures(feats, ds_.features);
    for (std::size_t i = 0; i < ds_.size(); ++i) {
      const auto& e = ds_.gold_edits[i];
      edits << e.insertions << ' ' << e.deletions << ' ' << e.substitutions << ' ' << e.shifts << '\n';
      hter << ds_.gold_hter[i] << '\n';
      for (int w = 0; w < ds_.target_lengths[i]; ++w) sents << (w ? " w" : "w");
      sents << '\n';
    }
    features_ = dir_.Write("features.txt", feats.str()).string();
    edits_ = dir_.Write("edits.txt", edits.str()).string();
    hter_ = dir_.Write("hter.txt", hter.str()).string();
    sentences_ = dir_.Write("target.txt", sents.str()).string();
  }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  Result TrainMlp4(const std::string& out) {
    return Cli({"train", "--features", features_, "--labels", edits_, "--variant", "MLP4",
                "--hidden", "8", "--max-epochs", "30", "--out", out});
  }

  testing::TempDir dir_;
  QeDataset ds_;
  std::string features_, edits_, hter_, sentences_;
};

TEST_F(CliTest, TerIdenticalFilesGiveZeroEdits) {
  const auto f = dir_.Write("a.txt", "the cat sat\non the mat\nhello\n").string();
  const auto r = Cli({"ter", "--hyp", f, "--ref", f});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto lines = Lines(r.out);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "ins\tdel\tsub\tshift\tref_len\thter");
  EXPECT_EQ(lines[1], "0\t0\t0\t0\t3\t0.000000");
  EXPECT_EQ(lines[3], "0\t0\t0\t0\t1\t0.000000");
}

TEST_F(CliTest, TerCountsAndCaseFolding) {
  const auto h = dir_.Write("h.txt", "A B C\n").string();
  const auto r = dir_.Write("r.txt", "b c a d\n").string();
  EXPECT_EQ(Lines(Cli({"ter", "--hyp", h, "--ref", r}).out)[1], "1\t0\t0\t1\t4\t0.500000");
  EXPECT_EQ(Lines(Cli({"ter", "--hyp", h, "--ref", r, "--case-sensitive"}).out)[1],
            "1\t0\t3\t0\t4\t1.000000");
}

TEST_F(CliTest, TerMismatchedLineCountsExit2) {
  const auto h = dir_.Write("h.txt", "a\nb\nc\n").string();
  const auto r = dir_.Write("r.txt", "a\nb\n").string();
  const auto res = Cli({"ter", "--hyp", h, "--ref", r});
  EXPECT_EQ(res.code, cli::kExitUsage);
  EXPECT_NE(res.err.find("line 3"), std::string::npos) << res.err;
}

TEST_F(CliTest, TerEmptyReferenceNamesLine) {
  const auto h = dir_.Write("h.txt", "a\nb\n").string();
  const auto r = dir_.Write("r.txt", "a\n\n").string();
  const auto res = Cli({"ter", "--hyp", h, "--ref", r});
  EXPECT_EQ(res.code, cli::kExitUsage);
  EXPECT_NE(res.err.find("line 2"), std::string::npos) << res.err;
}

TEST_F(CliTest, TrainMlp4WritesModelOfThatKind) {
  const auto model = Path("m.json");
  const auto r = TrainMlp4(model);
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(LoadPredictor(model).kind, VariantKind::kMlp4);
  EXPECT_NE(r.err.find("# config:"), std::string::npos);
}

TEST_F(CliTest, TrainRejectsLabelShapeForVariant) {
  EXPECT_EQ(Cli({"train", "--features", features_, "--labels", hter_, "--variant", "MLP4", "--out",
                 Path("m.json")}).code,
            cli::kExitUsage);
  EXPECT_EQ(Cli({"train", "--features", features_, "--labels", edits_, "--variant", "SVM", "--out",
                 Path("m.json")}).code,
            cli::kExitUsage);
}

TEST_F(CliTest, RetrainIsByteIdentical) {
  ASSERT_EQ(TrainMlp4(Path("a.json")).code, 0);
  ASSERT_EQ(TrainMlp4(Path("b.json")).code, 0);
  EXPECT_EQ(testing::ReadFile(Path("a.json")), testing::ReadFile(Path("b.json")));
  const auto svm = [&](const std::string& out) {
    return Cli({"train", "--features", features_, "--labels", hter_, "--variant", "svm", "--out", out});
  };
  ASSERT_EQ(svm(Path("s1.json")).code, 0);
  ASSERT_EQ(svm(Path("s2.json")).code, 0);
  EXPECT_EQ(testing::ReadFile(Path("s1.json")), testing::ReadFile(Path("s2.json")));
}

TEST_F(CliTest, TrainConfigFileAndFlags) {
  const auto cfg = dir_.Write("cfg.json", R"({"hidden_sizes": [6, 3], "activation": "tanh", "max_epochs": 5})");
  const auto r = Cli({"train", "--features", features_, "--labels", hter_, "--variant", "MLP", "--config",
                      cfg.string(), "--alpha", "0.5", "--out", Path("m.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto p = LoadPredictor(Path("m.json"));
  EXPECT_EQ(p.mlp->config.hidden_sizes, (std::vector<int>{6, 3}));
  EXPECT_EQ(p.mlp->config.activation, Activation::kTanh);
  EXPECT_EQ(p.mlp->config.alpha, 0.5);
  EXPECT_EQ(p.mlp->config.seed, 42u);
  const auto bad = dir_.Write("bad.json", R"({"hiden_sizes": [6]})");
  EXPECT_EQ(Cli({"train", "--features", features_, "--labels", hter_, "--variant", "MLP", "--config",
                 bad.string(), "--out", Path("m.json")}).code,
            cli::kExitUsage);
}

TEST_F(CliTest, DivergenceExits3) {
  const auto r = Cli({"train", "--features", features_, "--labels", edits_, "--variant", "MLP4",
                      "--learning-rate", "1e200", "--out", Path("m.json")});
  EXPECT_EQ(r.code, cli::kExitNumerical) << r.err;
}

TEST_F(CliTest, PredictMatchesLibraryForEveryPolicy) {
  const auto model = Path("m.json");
  ASSERT_EQ(TrainMlp4(model).code, 0);
  const auto p = LoadPredictor(model);
  for (bool round : {false, true}) {
    for (bool trim : {false, true}) {
      std::vector<std::string> args{"predict", "--model", model, "--features", features_,
                                    "--sentences", sentences_};
      if (round) args.push_back("--round");
      if (trim) args.push_back("--trim");
      const auto r = Cli(args);
      ASSERT_EQ(r.code, 0) << r.err;
      const auto lines = Lines(r.out);
      ASSERT_EQ(lines.size(), ds_.size() + 1);
      EXPECT_EQ(lines[0], "hter\tins\tdel\tsub\tshift");
      const auto want = PredictHter(p, ds_.features, ds_.target_lengths, {round, trim});
      for (std::size_t i = 0; i < ds_.size(); ++i) {
        std::istringstream row(lines[i + 1]);
        double h;
        row >> h;
        EXPECT_NEAR(h, want.hter[i], 5e-7);
        for (int k = 0; k < kNumEditOps; ++k) {
          double e;
          row >> e;
          EXPECT_NEAR(e, (*want.edits)(static_cast<Eigen::Index>(i), k), 5e-7);
          if (trim) EXPECT_GE(e, 0.0);
        }
        if (trim) EXPECT_GE(h, 0.0);
      }
    }
  }
}

TEST_F(CliTest, PredictDimensionMismatchExit2) {
  const auto model = Path("m.json");
  ASSERT_EQ(TrainMlp4(model).code, 0);
  const auto narrow = dir_.Write("narrow.txt", "1 2\n3 4\n").string();
  EXPECT_EQ(Cli({"predict", "--model", model, "--features", narrow, "--sentences", sentences_}).code,
            cli::kExitUsage);
}

TEST_F(CliTest, EvaluatePredAgainstItselfGivesRhoOne) {
  const auto json_path = Path("report.json");
  const auto r = Cli({"evaluate", "--pred", hter_, "--gold", hter_, "--json", json_path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("rho\t1.000000"), std::string::npos) << r.out;
  const auto doc = json::parse(testing::ReadFile(json_path));
  EXPECT_EQ(doc.at("schema_version"), 1);
  EXPECT_DOUBLE_EQ(doc.at("rho").get<double>(), 1.0);
  EXPECT_TRUE(doc.at("rho_edits").is_null());
}

TEST_F(CliTest, EvaluateEditPredictions) {
  const auto model = Path("m.json");
  ASSERT_EQ(TrainMlp4(model).code, 0);
  const auto pred = Path("pred.tsv");
  ASSERT_EQ(Cli({"predict", "--model", model, "--features", features_, "--sentences", sentences_,
                 "--out", pred}).code,
            0);
  const auto r = Cli({"evaluate", "--pred", pred, "--gold", hter_, "--gold-edits", edits_,
                      "--sentences", sentences_, "--json", Path("r.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(testing::ReadFile(Path("r.json")));
  EXPECT_TRUE(doc.at("rho_edits").is_number());
  EXPECT_TRUE(doc.at("rho_hter").is_number());
}

TEST_F(CliTest, EvaluateMisalignedExit2) {
  const auto shorter = dir_.Write("short.txt", "0.1\n0.2\n0.3\n").string();
  EXPECT_EQ(Cli({"evaluate", "--pred", shorter, "--gold", hter_}).code, cli::kExitUsage);
}

TEST_F(CliTest, SignificanceOfSystemAgainstItselfIsNotSignificant) {
  const auto r = Cli({"significance", "--pred-a", hter_, "--pred-b", hter_, "--gold", hter_, "--json",
                      Path("s.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("significant\tfalse"), std::string::npos);
  const auto doc = json::parse(testing::ReadFile(Path("s.json")));
  EXPECT_EQ(doc.at("schema_version"), 1);
  EXPECT_EQ(doc.at("significance").at("n_samples"), 1000);
  EXPECT_DOUBLE_EQ(doc.at("significance").at("alpha").get<double>(), 0.05);
  EXPECT_FALSE(doc.at("significance").at("significant").get<bool>());
}

TEST_F(CliTest, TuneSingleConfigGridReportsIt) {
  const auto grid = dir_.Write("grid.json", R"({"c": [3], "epsilon": [0.05], "gamma": [0.1]})");
  const auto r = Cli({"tune", "--features", features_, "--labels", edits_, "--variant", "QUAD_SVM",
                      "--grid", grid.string(), "--folds", "3", "--json", Path("t.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = Lines(r.out);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], "config\tC\tepsilon\tgamma\tfold1\tfold2\tfold3\tmean\tbest");
  EXPECT_EQ(lines[1].back(), '*');
  const auto doc = json::parse(testing::ReadFile(Path("t.json")));
  EXPECT_EQ(doc.at("best_index"), 0);
  EXPECT_EQ(doc.at("grid").size(), 1u);
  EXPECT_DOUBLE_EQ(doc.at("grid")[0].at("model").at("models")[2].at("c").get<double>(), 3.0);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Cli({}).code, cli::kExitUsage);
  EXPECT_EQ(Cli({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(Cli({"ter", "--hyp", Path("missing.txt"), "--ref", Path("missing.txt")}).code, cli::kExitUsage);
  EXPECT_EQ(Cli({"train", "--features", features_, "--labels", hter_, "--variant", "GBM", "--out",
                 Path("m.json")}).code,
            cli::kExitUsage);
  EXPECT_EQ(Cli({"--help"}).code, cli::kExitOk);
}

}  // namespace
}  // namespace qe
