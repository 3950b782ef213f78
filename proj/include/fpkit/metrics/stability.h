#ifndef FPKIT_METRICS_STABILITY_H_
#define FPKIT_METRICS_STABILITY_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fpkit/model/dataset.h"

namespace fpkit {

// Proportion of identical attributes. Throws SchemaError on mismatched
// lengths or empty fingerprints.
double Similarity(std::span<const AttributeValue> f,
                  std::span<const AttributeValue> g);
double Similarity(const AttributeMap& f, const AttributeMap& g,
                  const Schema& schema);

// Half-open time-lapse range [min_ms, max_ms).
struct TimeRange {
  std::int64_t min_ms = 0;
  std::int64_t max_ms = 0;

  static TimeRange Days(std::int64_t first_day, std::int64_t end_day) {
    return {first_day * kMillisPerDay, end_day * kMillisPerDay};
  }
  static TimeRange All();
  bool Contains(std::int64_t gap_ms) const {
    return gap_ms >= min_ms && gap_ms < max_ms;
  }
};

// Two adjacent entries of one browser, as indices into the dataset.
struct ConsecutivePair {
  size_t first = 0;
  size_t second = 0;
  std::int64_t gap_ms = 0;

  bool operator==(const ConsecutivePair&) const = default;
};

// Adjacent entry pairs of each browser whose time gap lies in |range|.
// With |max_gap_ms| set, pairs separated by more than it are dropped as
// bogus. Expects a deduplicated dataset.
std::vector<ConsecutivePair> ConsecutivePairs(
    const Dataset& ds, TimeRange range = TimeRange::All(),
    std::optional<std::int64_t> max_gap_ms = std::nullopt);

struct StabilityBucket {
  // Time-lapse bucket [day, day + 1) days.
  std::int64_t day = 0;
  size_t pairs = 0;
  // Sum of identical-attribute counts over the bucket's pairs.
  std::uint64_t identical_total = 0;
  // Mean similarity; absent when the bucket has no pair.
  std::optional<double> average_similarity;
  // Fewer than the minimum number of pairs.
  bool excluded = true;
};

struct StabilityCurve {
  size_t attribute_count = 0;
  size_t min_pairs = 10;
  std::vector<StabilityBucket> buckets;
};

// Average similarity of consecutive fingerprints per one-day time-lapse
// bucket, from day 0 to the largest observed gap.
StabilityCurve ComputeStabilityCurve(
    const Dataset& ds, size_t min_pairs = 10,
    std::optional<std::int64_t> max_gap_ms = std::nullopt);

}  // namespace fpkit

#endif  // FPKIT_METRICS_STABILITY_H_
