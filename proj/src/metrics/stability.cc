#include "fpkit/metrics/stability.h"

#include <limits>

#include "fpkit/error.h"

namespace fpkit {

double Similarity(std::span<const AttributeValue> f,
                  std::span<const AttributeValue> g) {
  if (f.empty()) throw SchemaError("similarity of empty fingerprints");
  return static_cast<double>(CountIdentical(f, g)) /
         static_cast<double>(f.size());
}

double Similarity(const AttributeMap& f, const AttributeMap& g,
                  const Schema& schema) {
  return Similarity(AlignToSchema(f, schema), AlignToSchema(g, schema));
}

TimeRange TimeRange::All() {
  return {0, std::numeric_limits<std::int64_t>::max()};
}

std::vector<ConsecutivePair> ConsecutivePairs(
    const Dataset& ds, TimeRange range,
    std::optional<std::int64_t> max_gap_ms) {
  std::vector<ConsecutivePair> pairs;
  for (const auto& [begin, end] : ds.BrowserRanges()) {
    for (size_t i = begin + 1; i < end; ++i) {
      std::int64_t gap = ds[i].ts_ms - ds[i - 1].ts_ms;
      if (!range.Contains(gap)) continue;
      if (max_gap_ms && gap > *max_gap_ms) continue;
      pairs.push_back({i - 1, i, gap});
    }
  }
  return pairs;
}

StabilityCurve ComputeStabilityCurve(const Dataset& ds, size_t min_pairs,
                                     std::optional<std::int64_t> max_gap_ms) {
  StabilityCurve curve;
  curve.attribute_count = ds.schema().size();
  curve.min_pairs = min_pairs;
  for (const auto& pair :
       ConsecutivePairs(ds, TimeRange::All(), max_gap_ms)) {
    auto day = static_cast<size_t>(pair.gap_ms / kMillisPerDay);
    if (curve.buckets.size() <= day) {
      size_t old = curve.buckets.size();
      curve.buckets.resize(day + 1);
      for (size_t d = old; d <= day; ++d)
        curve.buckets[d].day = static_cast<std::int64_t>(d);
    }
    auto& bucket = curve.buckets[day];
    ++bucket.pairs;
    bucket.identical_total +=
        CountIdentical(ds[pair.first].fingerprint, ds[pair.second].fingerprint);
  }
  for (auto& bucket : curve.buckets) {
    bucket.excluded = bucket.pairs < min_pairs;
    if (bucket.pairs > 0 && curve.attribute_count > 0) {
      bucket.average_similarity =
          static_cast<double>(bucket.identical_total) /
          (static_cast<double>(bucket.pairs) *
           static_cast<double>(curve.attribute_count));
    }
  }
  return curve;
}

}  // namespace fpkit
