/* Copyright 2026 The BaSNet Engine Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include "basnet/error.h"
#include "basnet/eval.h"
#include "basnet/random.h"
#include "oracles.h"

namespace basnet {
namespace {

std::string ParseError(const std::string& text) {
  try {
    ParseProposals(text, "props.json", {"run", "jump"});
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    return e.what();
  }
  ADD_FAILURE() << "accepted: " << text;
  return "";
}

TEST(TiouTest, Examples) {
  EXPECT_EQ(Tiou(2, 7, 2, 7), 1.0);
  EXPECT_EQ(Tiou(0, 1, 3, 4), 0.0);
  EXPECT_EQ(Tiou(0, 1, 1, 2), 0.0);
  EXPECT_NEAR(Tiou(0, 10, 5, 15), 1.0 / 3, 1e-15);
  EXPECT_THROW(Tiou(3, 3, 0, 1), Error);
  EXPECT_THROW(Tiou(0, 1, 2, 1), Error);
}

TEST(TiouTest, SymmetricAndBounded) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double as = UniformRange(rng, 0, 10), ae = as + UniformRange(rng, 0.01, 5);
    const double bs = UniformRange(rng, 0, 10), be = bs + UniformRange(rng, 0.01, 5);
    const double x = Tiou(as, ae, bs, be);
    EXPECT_EQ(x, Tiou(bs, be, as, ae));
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
    EXPECT_NEAR(x, oracle::Iou(as, ae, bs, be), 1e-15);
  }
}

Detection D(const std::string& v, double s, double e, double score) {
  return {v, 0, s, e, score};
}
GroundTruth G(const std::string& v, double s, double e) { return {v, 0, s, e}; }

TEST(AveragePrecisionTest, Examples) {
  const std::vector<GroundTruth> one = {G("a", 0, 10)};
  EXPECT_EQ(AveragePrecision(std::vector<Detection>{D("a", 0, 10, 0.9)}, one, 0.5), 1.0);
  EXPECT_EQ(AveragePrecision(std::vector<Detection>{D("a", 20, 30, 0.9),
                                                    D("a", 1, 10, 0.5)},
                             one, 0.5),
            0.5);
  EXPECT_EQ(AveragePrecision({}, one, 0.5), 0.0);
  EXPECT_FALSE(AveragePrecision({}, {}, 0.5).has_value());
  EXPECT_EQ(AveragePrecision(std::vector<Detection>{D("a", 0, 1, 1)}, {}, 0.5), 0.0);
  // Another video's ground truth never matches.
  EXPECT_EQ(AveragePrecision(std::vector<Detection>{D("b", 0, 10, 0.9)}, one, 0.1), 0.0);
  // A ground truth is used once: the duplicate is a false positive.
  EXPECT_EQ(AveragePrecision(std::vector<Detection>{D("a", 0, 10, 0.9),
                                                    D("a", 0, 10, 0.8)},
                             one, 0.5),
            1.0);
  const std::vector<GroundTruth> two = {G("a", 0, 10), G("a", 20, 30)};
  EXPECT_EQ(AveragePrecision(std::vector<Detection>{D("a", 0, 10, 0.9),
                                                    D("a", 0, 10, 0.8),
                                                    D("a", 20, 30, 0.7)},
                             two, 0.5),
            (1.0 + 2.0 / 3) / 2);
}

TEST(AveragePrecisionTest, MatchesBruteForceOracle) {
  Rng rng(2);
  const std::vector<std::string> videos = {"a", "b"};
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Detection> preds;
    std::vector<GroundTruth> gt;
    std::vector<oracle::Pred> opreds;
    std::vector<oracle::Truth> ogt;
    const auto np = UniformInt(rng, 0, 8), ng = UniformInt(rng, 0, 4);
    for (int i = 0; i < np; ++i) {
      const std::string& v = videos[UniformInt(rng, 0, 1)];
      const double s = static_cast<double>(UniformInt(rng, 0, 12));
      const double e = s + static_cast<double>(UniformInt(rng, 1, 6));
      const double score = static_cast<double>(UniformInt(rng, 0, 5)) / 5;
      preds.push_back(D(v, s, e, score));
      opreds.push_back({v, s, e, score});
    }
    for (int i = 0; i < ng; ++i) {
      const std::string& v = videos[UniformInt(rng, 0, 1)];
      const double s = static_cast<double>(UniformInt(rng, 0, 12));
      const double e = s + static_cast<double>(UniformInt(rng, 1, 6));
      gt.push_back(G(v, s, e));
      ogt.push_back({v, s, e});
    }
    const double thr = UniformRange(rng, 0.05, 0.95);
    const auto ap = AveragePrecision(preds, gt, thr);
    const double expected = oracle::AveragePrecision(opreds, ogt, thr);
    if (expected < 0) {
      EXPECT_FALSE(ap.has_value()) << "trial " << trial;
    } else {
      ASSERT_TRUE(ap.has_value()) << "trial " << trial;
      EXPECT_NEAR(*ap, expected, 1e-9) << "trial " << trial;
    }
  }
}

const std::vector<std::string> kClasses = {"run", "jump", "swim"};

TEST(MapAtTest, PerfectAndEmpty) {
  const std::vector<GroundTruth> gt = {{"a", 0, 1, 4}, {"b", 1, 0, 2}, {"b", 0, 5, 9}};
  std::vector<Detection> perfect;
  for (const auto& g : gt) perfect.push_back({g.video_id, g.class_id, g.start_sec, g.end_sec, 1});
  const EvalReport full = MapAt(perfect, gt, kClasses);
  for (double m : full.map) EXPECT_EQ(m, 1.0);
  EXPECT_EQ(full.avg, 1.0);
  // Class 2 has no ground truth and is left out of the mean.
  EXPECT_FALSE(full.ap[2][0].has_value());
  EXPECT_EQ(full.num_gt, 3u);
  EXPECT_EQ(full.num_predictions, 3u);

  const EvalReport none = MapAt({}, gt, kClasses);
  for (double m : none.map) EXPECT_EQ(m, 0.0);
  EXPECT_EQ(none.avg, 0.0);
  EXPECT_EQ(MapAt({}, {}, kClasses).avg, 0.0);

  const std::vector<Detection> bad = {{"a", 7, 0, 1, 1}};
  try {
    MapAt(bad, gt, kClasses);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMismatch);
  }
}

TEST(MapAtTest, MonotoneInThresholdAndAvgIsMean) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<GroundTruth> gt;
    std::vector<Detection> preds;
    for (int i = 0; i < 6; ++i) {
      const double s = UniformRange(rng, 0, 50);
      const int c = static_cast<int>(UniformInt(rng, 0, 2));
      gt.push_back({i % 2 ? "a" : "b", c, s, s + UniformRange(rng, 1, 10)});
    }
    for (int i = 0; i < 15; ++i) {
      const auto& g = gt[UniformInt(rng, 0, 5)];
      const double jitter = UniformRange(rng, -3, 3);
      preds.push_back({g.video_id, g.class_id, g.start_sec + jitter,
                       g.end_sec + jitter + UniformRange(rng, 0.1, 2), UniformUnit(rng)});
    }
    const EvalReport r = MapAt(preds, gt, kClasses);
    double sum = 0;
    for (std::size_t i = 0; i < r.map.size(); ++i) {
      sum += r.map[i];
      if (i > 0) EXPECT_LE(r.map[i], r.map[i - 1] + 1e-12);
      EXPECT_GE(r.map[i], 0.0);
      EXPECT_LE(r.map[i], 1.0);
    }
    EXPECT_NEAR(r.avg, sum / r.map.size(), 1e-12);
  }
}

TEST(ReportTest, JsonAndTable) {
  const std::vector<GroundTruth> gt = {{"a", 0, 1, 4}};
  EvalReport r = MapAt(std::vector<Detection>{{"a", 0, 1, 4, 0.5}}, gt, kClasses);
  r.background_f = 0.5;
  const std::string json = r.ToJson();
  for (const char* key : {"\"thresholds\"", "\"map\"", "\"avg\"", "\"per_class\"",
                          "\"background_f_measure\"", "\"num_gt\"", "\"num_predictions\""}) {
    EXPECT_NE(json.find(key), std::string::npos) << key;
  }
  const std::string table = r.ToTable();
  EXPECT_NE(table.find("mAP@IoU"), std::string::npos);
  EXPECT_NE(table.find("AVG"), std::string::npos);
  EXPECT_NE(table.find("background F-measure"), std::string::npos);
}

TEST(FMeasureTest, Examples) {
  using Masks = std::vector<std::vector<bool>>;
  const Masks truth = {{true, false, true, false}};
  EXPECT_EQ(FMeasureBackground(truth, truth), 1.0);
  EXPECT_NEAR(FMeasureBackground(Masks{{true, true, true, true}}, truth), 2.0 / 3, 1e-15);
  EXPECT_EQ(FMeasureBackground(Masks{{false, false, false, false}}, truth), 0.0);
  // Micro-averaged: counts pool across videos.
  const Masks pred2 = {{true, false}, {true, true, true}};
  const Masks truth2 = {{true, true}, {false, false, true}};
  // tp 2, fp 2, fn 1 -> P 1/2, R 2/3.
  EXPECT_NEAR(FMeasureBackground(pred2, truth2), 2 * 0.5 * (2.0 / 3) / (0.5 + 2.0 / 3),
              1e-15);
  EXPECT_THROW(FMeasureBackground(Masks{{true}}, truth), Error);
  EXPECT_THROW(FMeasureBackground(Masks{{true}}, Masks{}), Error);
}

TEST(FMeasureTest, GroundTruthMaskUsesSegmentCentres) {
  // 10 segments of 0.64 s; the action covers centres 0.96 .. 2.24.
  const std::vector<GtInterval> gt = {{0, 0.7, 2.3}};
  const auto mask = GtBackgroundMask(gt, {10, 10, 25});
  const std::vector<bool> expected = {true, false, false, false, true,
                                      true, true, true,  true,  true};
  EXPECT_EQ(mask, expected);
  EXPECT_EQ(GtBackgroundMask({}, {5, 5, 25}), std::vector<bool>(5, true));
}

TEST(ParseProposalsTest, Valid) {
  const auto d = ParseProposals(
      "[\n {\"video_id\": \"v1\", \"label\": \"jump\", \"segment\": [1.5, 3], "
      "\"score\": 0.25}\n]\n",
      "p.json", {"run", "jump"});
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].video_id, "v1");
  EXPECT_EQ(d[0].class_id, 1);
  EXPECT_EQ(d[0].start_sec, 1.5);
  EXPECT_EQ(d[0].end_sec, 3.0);
  EXPECT_EQ(d[0].score, 0.25);
  EXPECT_TRUE(ParseProposals("[]", "p.json", {"run"}).empty());
}

TEST(ParseProposalsTest, ErrorsNameTheLine) {
  const std::string good =
      "{\"video_id\": \"v\", \"label\": \"run\", \"segment\": [0, 1], \"score\": 1}";
  EXPECT_NE(ParseError("{}").find("props.json:1:"), std::string::npos);
  EXPECT_NE(ParseError("[\n" + good + ",\n{\"video_id\": \"v\"}\n]")
                .find("props.json:3:"),
            std::string::npos);
  const std::string unknown =
      ParseError("[\n" + good + ",\n" + good + ",\n"
                 "{\"video_id\": \"v\", \"label\": \"fly\", \"segment\": [0, 1], \"score\": 1}]");
  EXPECT_NE(unknown.find("props.json:4:"), std::string::npos);
  EXPECT_NE(unknown.find("fly"), std::string::npos);
  EXPECT_NE(ParseError("[\n\n{\"video_id\": \"v\", \"label\": \"run\", \"segment\": [2, 1], "
                       "\"score\": 1}]")
                .find("props.json:3:"),
            std::string::npos);
  EXPECT_NE(ParseError("[\n" + good + ",\n  {oops}\n]").find("props.json:3"),
            std::string::npos);
}

TEST(GroundTruthTest, FiltersByVideo) {
  Annotations ann;
  ann["a"] = {{"run", 0, 1}};
  ann["b"] = {{"jump", 2, 3}, {"run", 4, 5}};
  EXPECT_EQ(GroundTruthFrom(ann, {"run", "jump"}).size(), 3u);
  const auto only_b =
      GroundTruthFrom(ann, {"run", "jump"}, std::set<std::string>{"b"});
  ASSERT_EQ(only_b.size(), 2u);
  EXPECT_EQ(only_b[0].class_id, 1);
  EXPECT_THROW(GroundTruthFrom(ann, {"run"}), Error);
}

TEST(DefaultThresholdsTest, NineSteps) {
  const auto t = DefaultIouThresholds();
  ASSERT_EQ(t.size(), 9u);
  EXPECT_NEAR(t.front(), 0.1, 1e-12);
  EXPECT_NEAR(t.back(), 0.9, 1e-12);
}

}  // namespace
}  // namespace basnet
