#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "fpkit/error.h"
#include "fpkit/model/dataset.h"
#include "fpkit/model/fingerprint.h"
#include "fpkit/model/io.h"
#include "fpkit/util/digest.h"
#include "test_data.h"

namespace fpkit {
namespace {

using testing::CategoricalSchema;
using testing::MakeEntry;

Schema MixedSchema() {
  return Schema({{"language", AttributeKind::kCategorical, false, std::nullopt, true},
                 {"ratio", AttributeKind::kNumeric, false, std::nullopt, true},
                 {"canvas", AttributeKind::kCategorical, true, std::nullopt, true}});
}

TEST(ValueTest, IdentityFollowsPayload) {
  EXPECT_TRUE(ValueIdentical(AttributeValue::Text("fr"), AttributeValue::Text("fr")));
  EXPECT_TRUE(ValueIdentical(AttributeValue::Flag(ErrorFlag::kTimeout),
                             AttributeValue::Flag(ErrorFlag::kTimeout)));
  EXPECT_FALSE(ValueIdentical(AttributeValue::Flag(ErrorFlag::kTimeout),
                              AttributeValue::Text("")));
  EXPECT_FALSE(ValueIdentical(AttributeValue::Text("1"), AttributeValue::Number(1)));
  EXPECT_EQ(AttributeValue::Set({"b", "a", "a"}), AttributeValue::Set({"a", "b"}));
}

TEST(ValueTest, IdentityIsAnEquivalenceOnRandomTriples) {
  std::mt19937 rng(7);
  auto draw = [&] {
    switch (rng() % 4) {
      case 0:
        return AttributeValue::Text(std::string(1, static_cast<char>('a' + rng() % 3)));
      case 1:
        return AttributeValue::Number(static_cast<double>(rng() % 3));
      case 2:
        return AttributeValue::Set({std::string(1, static_cast<char>('a' + rng() % 2))});
      default:
        return AttributeValue::Flag(static_cast<ErrorFlag>(rng() % 4));
    }
  };
  for (int i = 0; i < 5000; ++i) {
    AttributeValue a = draw(), b = draw(), c = draw();
    EXPECT_TRUE(ValueIdentical(a, a));
    EXPECT_EQ(ValueIdentical(a, b), ValueIdentical(b, a));
    if (ValueIdentical(a, b) && ValueIdentical(b, c)) {
      EXPECT_TRUE(ValueIdentical(a, c));
    }
  }
}

TEST(ValueTest, NumbersUseShortestRoundTrip) {
  EXPECT_EQ(AttributeValue::Number(0.1).encoded(), "0.1");
  EXPECT_EQ(AttributeValue::Number(24).encoded(), "24");
  EXPECT_EQ(AttributeValue::Number(1e21).encoded(), "1e+21");
}

TEST(HashTest, CanonicalSerializationIsFrozen) {
  Fingerprint f = {AttributeValue::Text("fr"), AttributeValue::Number(1.5),
                   AttributeValue::Flag(ErrorFlag::kTimeout)};
  EXPECT_EQ(HashFingerprint(f).ToHex(),
            "7c94f05851b0efd23464b5862528cf1d1197e33f2b60acd669025bf654c3e261");
  EXPECT_EQ(HashFingerprint(Fingerprint{}).ToHex(),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(HashTest, FlagsAreDistinctValues) {
  Schema schema = MixedSchema();
  AttributeMap a = {{"language", AttributeValue::Text("fr")},
                    {"ratio", AttributeValue::Number(2)},
                    {"canvas", AttributeValue::Flag(ErrorFlag::kTimeout)}};
  AttributeMap b = a;
  b["canvas"] = AttributeValue::Flag(ErrorFlag::kException);
  EXPECT_EQ(CanonicalHash(a, schema), CanonicalHash(a, schema));
  EXPECT_NE(CanonicalHash(a, schema), CanonicalHash(b, schema));
}

TEST(HashTest, MissingAttributeIsASchemaError) {
  AttributeMap partial = {{"language", AttributeValue::Text("fr")}};
  EXPECT_THROW(CanonicalHash(partial, MixedSchema()), SchemaError);
}

TEST(HashTest, DistinctFingerprintsGetDistinctDigests) {
  std::mt19937_64 rng(11);
  std::set<std::vector<std::string>> fingerprints;
  std::set<FingerprintHash> digests;
  while (fingerprints.size() < 1000) {
    Fingerprint f;
    std::vector<std::string> encoded;
    for (int a = 0; a < 5; ++a) {
      f.push_back(AttributeValue::Text(std::to_string(rng() % 7)));
      encoded.push_back(f.back().encoded());
    }
    if (fingerprints.insert(encoded).second) digests.insert(HashFingerprint(f));
  }
  EXPECT_EQ(digests.size(), 1000u);
}

TEST(HashTest, RepeatedCallsAgree) {
  Fingerprint f = {AttributeValue::Text("x"), AttributeValue::Set({"a", "b"})};
  const FingerprintHash first = HashFingerprint(f);
  for (int i = 0; i < 10000; ++i) ASSERT_EQ(HashFingerprint(f), first);
}

TEST(CountIdenticalTest, CountsEqualPositions) {
  Fingerprint f = {AttributeValue::Text("a"), AttributeValue::Text("b")};
  Fingerprint g = {AttributeValue::Text("a"), AttributeValue::Text("c")};
  EXPECT_EQ(CountIdentical(f, g), 1u);
  EXPECT_THROW(CountIdentical(f, Fingerprint{}), SchemaError);
}

TEST(SchemaTest, RejectsInconsistentDescriptors) {
  EXPECT_THROW(Schema({{"a", AttributeKind::kCategorical, false, std::nullopt, true},
                       {"a", AttributeKind::kCategorical, false, std::nullopt, true}}),
               SchemaError);
  EXPECT_THROW(Schema({{"c", AttributeKind::kTextual, true, std::nullopt, true}}),
               SchemaError);
  EXPECT_THROW(Schema({{"x", AttributeKind::kNumeric, false, "missing", true}}),
               SchemaError);
}

TEST(SchemaTest, JsonRoundTrip) {
  Schema schema({{"plugins", AttributeKind::kSet, false, std::nullopt, true},
                 {"pluginCount", AttributeKind::kNumeric, false, "plugins", true},
                 {"accept", AttributeKind::kTextual, false, std::nullopt, false}});
  EXPECT_EQ(SchemaFromJson(SchemaToJson(schema)), schema);
}

TEST(DatasetTest, SortsByUidThenTime) {
  Schema schema = CategoricalSchema(1);
  Dataset ds(schema, {MakeEntry("b", 5, {"x"}), MakeEntry("a", 9, {"x"}),
                      MakeEntry("a", 1, {"y"})});
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds[0].uid, "a");
  EXPECT_EQ(ds[0].ts_ms, 1);
  EXPECT_EQ(ds[1].ts_ms, 9);
  EXPECT_EQ(ds[2].uid, "b");
  EXPECT_EQ(ds.BrowserCount(), 2u);
  auto ranges = ds.BrowserRanges();
  ASSERT_EQ(ranges.size(), 2u);
  EXPECT_EQ(ranges[0], std::make_pair(size_t{0}, size_t{2}));
}

TEST(DatasetTest, RejectsNegativeTimestampsAndWrongWidth) {
  Schema schema = CategoricalSchema(2);
  EXPECT_THROW(Dataset(schema, {MakeEntry("a", -1, {"x", "y"})}), ArgumentError);
  EXPECT_THROW(Dataset(schema, {MakeEntry("a", 1, {"x"})}), SchemaError);
}

TEST(IoTest, JsonlRoundTripKeepsEverything) {
  Schema schema = MixedSchema();
  Entry e;
  e.uid = "u1";
  e.ts_ms = 1546300800123;
  e.ip_hash = std::string(64, 'a');
  e.fingerprint = {AttributeValue::Text("fr"), AttributeValue::Number(0.25),
                   AttributeValue::Flag(ErrorFlag::kUnsupported)};
  e.times_ms = {{"canvas", 12}};
  e.total_ms = 40;
  Dataset ds(schema, {e});
  std::stringstream buffer;
  WriteJsonl(buffer, ds);
  Dataset back = ReadJsonl(buffer, schema);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].fingerprint, e.fingerprint);
  EXPECT_EQ(back[0].hash, ds[0].hash);
  EXPECT_EQ(back[0].times_ms, e.times_ms);
  EXPECT_EQ(back[0].total_ms, e.total_ms);
  EXPECT_EQ(back[0].ip_hash, e.ip_hash);
}

TEST(IoTest, FlagsUseTheFlagObject) {
  Json j = ValueToJson(AttributeValue::Flag(ErrorFlag::kTimeout));
  EXPECT_EQ(j, Json({{"flag", "timeout"}}));
  EXPECT_EQ(ValueFromJson(Json(nullptr), AttributeKind::kTextual),
            AttributeValue::Flag(ErrorFlag::kUndefinedValue));
  EXPECT_THROW(ValueFromJson(Json({{"flag", "bogus"}}), AttributeKind::kTextual),
               ParseError);
}

TEST(IoTest, LenientLoaderCountsBadLines) {
  Schema schema = CategoricalSchema(1);
  std::stringstream in;
  in << R"({"uid":"a","ts_ms":1,"ip_hash":"h","attrs":{"a00":"x"}})" << "\n"
     << "not json\n"
     << R"({"uid":"a","ts_ms":2,"ip_hash":"h","attrs":{"zz":"x"}})" << "\n";
  LoadResult loaded = LoadJsonl(in, schema);
  EXPECT_EQ(loaded.dataset.size(), 1u);
  EXPECT_EQ(loaded.malformed, 2u);
}

TEST(IoTest, RawIpIsHashedWithHmac) {
  Schema schema = CategoricalSchema(1);
  Json record = {{"uid", "a"}, {"ts_ms", 1}, {"ip", "192.0.2.1"}, {"attrs", {{"a00", "x"}}}};
  IngestOptions options;
  options.ip_hmac_key = "key";
  Entry e = EntryFromJson(record, schema, options);
  EXPECT_EQ(e.ip_hash, HexEncode(HmacSha256("key", "192.0.2.1")));
  EXPECT_EQ(e.ip_hash.size(), 64u);
}

TEST(IoTest, LegacyRecordsSplitOnSemicolons) {
  Schema schema = MixedSchema();
  std::stringstream in;
  in << "u1;1000;abc;fr;2.5;ERR:timeout\n"
     << "u2;1000;abc;fr;2.5\n";
  LoadResult loaded = LoadLegacy(in, schema);
  ASSERT_EQ(loaded.dataset.size(), 1u);
  EXPECT_EQ(loaded.malformed, 1u);
  const Entry& e = loaded.dataset[0];
  EXPECT_EQ(e.fingerprint[0], AttributeValue::Text("fr"));
  EXPECT_EQ(e.fingerprint[1], AttributeValue::Number(2.5));
  EXPECT_EQ(e.fingerprint[2], AttributeValue::Flag(ErrorFlag::kTimeout));
  EXPECT_EQ(FormatLegacyRecord(e, schema), "u1;1000;abc;fr;2.5;ERR:timeout");
}

}  // namespace
}  // namespace fpkit
