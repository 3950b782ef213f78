#ifndef FPKIT_TESTS_SUPPORT_TEST_DATA_H_
#define FPKIT_TESTS_SUPPORT_TEST_DATA_H_

#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpkit/metrics/stability.h"
#include "fpkit/model/dataset.h"
#include "fpkit/synth/config.h"

namespace fpkit::testing {

// Categorical attributes named a00, a01, ...
Schema CategoricalSchema(size_t n);

// Values are rendered as text categorical tokens.
Entry MakeEntry(const std::string& uid, std::int64_t ts_ms,
                std::initializer_list<const char*> values,
                const std::string& ip_hash = "ip");

Dataset MakeDataset(const Schema& schema, std::vector<Entry> entries);

// A few low-cardinality attributes, frequent changes, oscillation and
// churn, so that anonymity sets and interleavings are common.
GeneratorConfig SmallConfig(size_t browsers, std::uint64_t seed);

// Generated and deduplicated.
Dataset SmallDataset(size_t browsers, std::uint64_t seed);

// Brute-force references. They scan raw entry lists and never rely on the
// dataset's sort order or helper indexes.
std::map<std::string, FingerprintHash> OracleSnapshot(const Dataset& ds, int day,
                                                      std::int64_t origin_ms);
std::map<size_t, size_t> OracleAnonymitySets(
    const std::map<std::string, FingerprintHash>& snapshot);
std::optional<double> OracleUnicity(const Dataset& ds);
std::vector<ConsecutivePair> OracleConsecutivePairs(const Dataset& ds,
                                                    TimeRange range);
struct OracleBucket {
  size_t pairs = 0;
  std::optional<double> average_similarity;
  bool excluded = true;
};
std::map<std::int64_t, OracleBucket> OracleStability(const Dataset& ds,
                                                     size_t min_pairs);
size_t OracleIdentical(const Fingerprint& f, const Fingerprint& g);

}  // namespace fpkit::testing

#endif  // FPKIT_TESTS_SUPPORT_TEST_DATA_H_
