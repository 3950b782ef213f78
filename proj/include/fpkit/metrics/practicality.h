#ifndef FPKIT_METRICS_PRACTICALITY_H_
#define FPKIT_METRICS_PRACTICALITY_H_

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fpkit/metrics/entropy.h"
#include "fpkit/model/dataset.h"

namespace fpkit {

inline constexpr std::int64_t kDefaultOutlierCapMs = 30'000;

// Element at floor(q * (n - 1)) of the ascending order; q in [0, 1].
// |sorted| must be sorted and non-empty.
template <typename T>
T SortedPercentile(const std::vector<T>& sorted, double q) {
  auto index = static_cast<size_t>(q * static_cast<double>(sorted.size() - 1));
  return sorted[index];
}

// Lower middle element of an unsorted sample; absent when empty.
std::optional<std::int64_t> LowerMedian(std::vector<std::int64_t> values);

// UTF-8 byte length of a serialized value.
size_t ValueSize(AttributeValue value);
// Sum of the attribute value sizes, metadata excluded.
size_t FingerprintSize(const Fingerprint& fingerprint);

struct AttributePracticality {
  std::string name;
  // Absent when the dataset holds no consecutive pair.
  std::optional<double> sameness_rate;
  std::int64_t median_size = 0;
  // Absent when no retained entry reports a time for the attribute.
  std::optional<std::int64_t> median_time_ms;
};

// Sameness over all consecutive pairs, median value size, and median
// collection time excluding entries whose total time exceeds the cap.
std::vector<AttributePracticality> AttributePracticalities(
    const Dataset& ds, std::int64_t outlier_cap_ms = kDefaultOutlierCapMs);

struct Distribution {
  size_t count = 0;
  std::optional<double> mean;
  // Quantile -> value, for the fixed reporting quantiles.
  std::map<double, std::int64_t> percentiles;
  // Ascending sample, kept for cumulative plots.
  std::vector<std::int64_t> sorted;

  static Distribution Of(std::vector<std::int64_t> values);
};

struct PracticalityGroup {
  Distribution size_bytes;
  Distribution time_ms;
  size_t time_outliers = 0;
  size_t size_outliers = 0;
  size_t missing_time = 0;
};

struct FingerprintPracticality {
  std::int64_t outlier_cap_ms = kDefaultOutlierCapMs;
  PracticalityGroup overall;
  // Keyed by device type name.
  std::map<std::string, PracticalityGroup> by_device;
};

// Collection time and size distributions of whole fingerprints. The time
// of an entry is its recorded total, else the sum of its attribute times.
// Times above the cap and sizes above mean + 15 sd are outliers.
FingerprintPracticality ComputeFingerprintPracticality(
    const Dataset& ds, std::int64_t outlier_cap_ms = kDefaultOutlierCapMs,
    const std::string& user_agent_attribute = "userAgent");

struct AttributeStats {
  std::string name;
  size_t distinct_values = 0;
  double entropy_bits = 0.0;
  std::optional<double> normalized_entropy;
  std::optional<double> min_nce;
  std::optional<double> sameness_rate;
  std::int64_t median_size = 0;
  std::optional<std::int64_t> median_time_ms;
};

std::vector<AttributeStats> ComputeAttributeStats(
    const Dataset& ds, std::int64_t outlier_cap_ms = kDefaultOutlierCapMs,
    const NceMatrix* nce = nullptr);

// Columns: attribute, values, normalized entropy, min NCE, sameness, size,
// time. Absent values are empty cells.
void WriteAttributeStatsCsv(std::ostream& out,
                            const std::vector<AttributeStats>& stats);

}  // namespace fpkit

#endif  // FPKIT_METRICS_PRACTICALITY_H_
