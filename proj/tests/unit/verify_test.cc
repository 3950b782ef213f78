#include <gtest/gtest.h>

#include <random>

#include "fpkit/error.h"
#include "fpkit/verify/distance.h"
#include "fpkit/verify/evaluation.h"
#include "fpkit/verify/matching.h"
#include "test_data.h"

namespace fpkit {
namespace {

using testing::CategoricalSchema;

Schema MixedSchema() {
  return Schema({{"ua", AttributeKind::kTextual, false, std::nullopt, true},
                 {"plugins", AttributeKind::kSet, false, std::nullopt, true},
                 {"width", AttributeKind::kNumeric, false, std::nullopt, true},
                 {"lang", AttributeKind::kCategorical, false, std::nullopt, true},
                 {"canvas", AttributeKind::kCategorical, true, std::nullopt, true}});
}

TEST(DistanceTest, WorkedValues) {
  EXPECT_EQ(Levenshtein("kitten", "sitting"), 3u);
  EXPECT_EQ(Levenshtein("", "abc"), 3u);
  EXPECT_EQ(Levenshtein("héllo", "hello"), 1u);
  EXPECT_DOUBLE_EQ(JaccardDistance({"a", "b"}, {"b", "c"}), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(JaccardDistance({}, {}), 0.0);
  EXPECT_DOUBLE_EQ(AttributeDistance(AttributeValue::Number(1920),
                                     AttributeValue::Number(1900),
                                     DistanceFamily::kAbsolute),
                   20.0);
}

TEST(DistanceTest, FlagsAndCategoriesMismatchUnlessIdentical) {
  AttributeValue flag = AttributeValue::Flag(ErrorFlag::kTimeout);
  EXPECT_EQ(AttributeDistance(flag, flag, DistanceFamily::kEdit), 0.0);
  EXPECT_EQ(AttributeDistance(flag, AttributeValue::Text("x"), DistanceFamily::kEdit),
            kMismatchDistance);
  EXPECT_EQ(AttributeDistance(AttributeValue::Text("fr"), AttributeValue::Text("en"),
                              DistanceFamily::kIdentity),
            kMismatchDistance);
  EXPECT_EQ(ParseFamily("jaccard"), DistanceFamily::kJaccard);
  EXPECT_THROW(ParseFamily("cosine"), ConfigError);
}

TEST(DistanceTest, EditDistanceIsAMetricOnRandomStrings) {
  std::mt19937 rng(3);
  auto draw = [&] {
    std::string s(rng() % 6, 'a');
    for (char& c : s) c = static_cast<char>('a' + rng() % 3);
    return s;
  };
  for (int i = 0; i < 2000; ++i) {
    std::string a = draw(), b = draw(), c = draw();
    EXPECT_EQ(Levenshtein(a, b), Levenshtein(b, a));
    EXPECT_EQ(Levenshtein(a, b) == 0, a == b);
    EXPECT_LE(Levenshtein(a, c), Levenshtein(a, b) + Levenshtein(b, c));
  }
}

TEST(MatchingTest, ConfigValidation) {
  Schema schema = MixedSchema();
  std::vector<AttributeThreshold> t = {{DistanceFamily::kEdit, 2},
                                       {DistanceFamily::kJaccard, 0.5},
                                       {DistanceFamily::kAbsolute, 10},
                                       {DistanceFamily::kIdentity, 0},
                                       {DistanceFamily::kIdentity, 1}};
  EXPECT_THROW(MatchingConfig(schema, t, 3), ConfigError);
  t[4].theta = 0;
  t[0].theta = -1;
  EXPECT_THROW(MatchingConfig(schema, t, 3), ConfigError);
  t.pop_back();
  EXPECT_THROW(MatchingConfig(schema, t, 3), SchemaError);
  EXPECT_TRUE(MatchingConfig(schema, 5).IsStrict());
}

TEST(MatchingTest, JsonRoundTripAndCoverage) {
  Schema schema = MixedSchema();
  MatchingConfig config(schema,
                        {{DistanceFamily::kEdit, 2},
                         {DistanceFamily::kJaccard, 0.5},
                         {DistanceFamily::kAbsolute, 10},
                         {DistanceFamily::kIdentity, 0},
                         {DistanceFamily::kIdentity, 0}},
                        4);
  Json j = MatchingConfigToJson(config);
  MatchingConfig back = MatchingConfigFromJson(j, schema);
  EXPECT_EQ(back.theta(), 4u);
  EXPECT_EQ(back[1].theta, 0.5);
  j["attributes"]["extra"] = {{"family", "identity"}, {"theta", 0}};
  EXPECT_THROW(MatchingConfigFromJson(j, schema), SchemaError);
  j["attributes"].erase("extra");
  j["attributes"].erase("lang");
  EXPECT_THROW(MatchingConfigFromJson(j, schema), SchemaError);
}

TEST(MatchingTest, AdvancedCountToleratesSmallDifferences) {
  Schema schema = MixedSchema();
  MatchingConfig config(schema,
                        {{DistanceFamily::kEdit, 2},
                         {DistanceFamily::kJaccard, 0.5},
                         {DistanceFamily::kAbsolute, 10},
                         {DistanceFamily::kIdentity, 0},
                         {DistanceFamily::kIdentity, 0}},
                        4);
  Fingerprint stored = {AttributeValue::Text("Firefox/70.0"),
                        AttributeValue::Set({"a", "b", "c"}), AttributeValue::Number(1920),
                        AttributeValue::Text("fr"), AttributeValue::Text("c1")};
  Fingerprint presented = {AttributeValue::Text("Firefox/71.0"),
                           AttributeValue::Set({"a", "b"}), AttributeValue::Number(1915),
                           AttributeValue::Text("fr"), AttributeValue::Text("c2")};
  EXPECT_EQ(CountIdentical(stored, presented), 1u);
  EXPECT_EQ(CountForMode(stored, presented, config, VerificationMode::kSimple), 1u);
  EXPECT_EQ(CountForMode(stored, presented, config, VerificationMode::kAdvanced), 4u);
  EXPECT_TRUE(Verdict(stored, presented, config, VerificationMode::kAdvanced));
  EXPECT_FALSE(Verdict(stored, presented, config, VerificationMode::kSimple));
}

TEST(MatchingTest, ThresholdBoundaryAndMonotonicity) {
  Dataset ds = testing::SmallDataset(200, 4);
  MatchingConfig config(ds.schema(), ds.schema().size());
  std::mt19937_64 rng(8);
  for (int i = 0; i < 3000; ++i) {
    const Fingerprint& f = ds[rng() % ds.size()].fingerprint;
    const Fingerprint& g = ds[rng() % ds.size()].fingerprint;
    const size_t count = CountForMode(f, g, config, VerificationMode::kAdvanced);
    EXPECT_GE(count, CountIdentical(f, g));
    config.set_theta(count);
    EXPECT_TRUE(Verdict(f, g, config, VerificationMode::kAdvanced));
    config.set_theta(count + 1);
    EXPECT_FALSE(Verdict(f, g, config, VerificationMode::kAdvanced));
    if (count > 0) {
      config.set_theta(count - 1);
      EXPECT_TRUE(Verdict(f, g, config, VerificationMode::kAdvanced));
    }
  }
}

TEST(EvaluationTest, MonthIndexCountsCalendarMonths) {
  const std::int64_t jan1 = 1546300800000;  // 2019-01-01
  EXPECT_EQ(MonthIndex(jan1, jan1), 0);
  EXPECT_EQ(MonthIndex(jan1 + 31 * kMillisPerDay - 1, jan1), 0);
  EXPECT_EQ(MonthIndex(jan1 + 31 * kMillisPerDay, jan1), 1);
  EXPECT_EQ(MonthIndex(jan1 + 365 * kMillisPerDay, jan1), 12);
}

TEST(EvaluationTest, ErrorCurveAndEqualError) {
  CountedSample sample;
  sample.same = {3, 3, 2, 3};
  sample.different = {0, 1, 1, 2};
  ErrorCurve curve = ComputeErrorCurve(std::span<const CountedSample>(&sample, 1), 3);
  ASSERT_EQ(curve.fmr.size(), 4u);
  EXPECT_DOUBLE_EQ(curve.fmr[0], 1.0);
  EXPECT_DOUBLE_EQ(curve.fmr[2], 0.25);
  EXPECT_DOUBLE_EQ(curve.fnmr[0], 0.0);
  EXPECT_DOUBLE_EQ(curve.fnmr[3], 0.25);
  for (size_t t = 1; t < curve.fmr.size(); ++t) {
    EXPECT_LE(curve.fmr[t], curve.fmr[t - 1]);
    EXPECT_GE(curve.fnmr[t], curve.fnmr[t - 1]);
  }
  EqualError eer = EqualErrorRate(curve);
  EXPECT_EQ(eer.theta, 2u);
  EXPECT_DOUBLE_EQ(eer.fmr, 0.25);
  EXPECT_DOUBLE_EQ(eer.fnmr, 0.0);
  EXPECT_DOUBLE_EQ(eer.rate, 0.125);
  EXPECT_THROW(EqualErrorRate(ErrorCurve{}), ArgumentError);
}

TEST(EvaluationTest, ComparisonSetsAreBalancedAndSeeded) {
  Dataset ds = testing::SmallDataset(300, 6);
  std::vector<MonthSample> a = BuildComparisonSets(ds, 2, 1);
  std::vector<MonthSample> b = BuildComparisonSets(ds, 2, 1);
  ASSERT_FALSE(a.empty());
  for (size_t m = 0; m < a.size(); ++m) {
    EXPECT_EQ(a[m].same, b[m].same);
    EXPECT_EQ(a[m].different, b[m].different);
    EXPECT_EQ(a[m].same.size(), a[m].different.size());
    for (const auto& p : a[m].same) {
      EXPECT_TRUE(p.same_browser);
      EXPECT_EQ(ds[p.a].uid, ds[p.b].uid);
    }
    for (const auto& p : a[m].different) {
      EXPECT_FALSE(p.same_browser);
      EXPECT_NE(ds[p.a].uid, ds[p.b].uid);
    }
  }
}

TEST(LearnTest, SplitPicksTheMidpoint) {
  Split s = LearnSplit({1, 2}, {3, 4});
  EXPECT_DOUBLE_EQ(s.theta, 2.5);
  EXPECT_EQ(s.errors, 0u);
  EXPECT_DOUBLE_EQ(s.margin, 0.5);
  EXPECT_FALSE(s.degenerate);
  EXPECT_TRUE(LearnSplit({1, 2}, {}).degenerate);
  EXPECT_TRUE(LearnSplit({0, 0}, {0, 0}).degenerate);
}

TEST(LearnTest, LearnedConfigRespectsDynamicAttributes) {
  Dataset ds = testing::SmallDataset(300, 7);
  std::vector<MonthSample> samples = BuildComparisonSets(ds, 2, 0);
  LearnResult learned = LearnThresholds(ds, samples);
  for (size_t i = 0; i < ds.schema().size(); ++i) {
    EXPECT_GE(learned.config[i].theta, 0.0);
    if (ds.schema()[i].dynamic) EXPECT_EQ(learned.config[i].theta, 0.0);
  }
  EXPECT_LE(learned.equal_error.theta, ds.schema().size());
}

}  // namespace
}  // namespace fpkit
