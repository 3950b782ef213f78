#ifndef FPKIT_METRICS_DISTINCTIVENESS_H_
#define FPKIT_METRICS_DISTINCTIVENESS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpkit/model/dataset.h"

namespace fpkit {

// State of every browser's fingerprint at the end of day |day|: for each
// browser seen by then, the hash of its latest entry with ts <= cutoff_ms.
struct Snapshot {
  int day = 0;
  std::int64_t cutoff_ms = 0;
  std::map<std::string, FingerprintHash> latest;
};

// Last millisecond of day |day| counted from |day_origin_ms|.
std::int64_t DayCutoff(std::int64_t day_origin_ms, int day);

// Throws ArgumentError when |day| is negative.
Snapshot TakeSnapshot(const Dataset& ds, int day, std::int64_t day_origin_ms);

// anonymity set size -> number of fingerprints with that size.
using AnonymityHistogram = std::map<size_t, size_t>;

AnonymityHistogram AnonymitySets(const Snapshot& snapshot);

// Fingerprints seen for exactly one browser over the number of browsers.
// Absent for an empty snapshot.
std::optional<double> UnicityRate(const Snapshot& snapshot);
std::optional<double> UnicityRate(const AnonymityHistogram& histogram);

// Over a whole dataset: fingerprints provided by exactly one browser over
// the number of distinct (fingerprint, browser) pairs.
std::optional<double> UnicityRate(const Dataset& ds);

struct PartitionStats {
  int day = 0;
  size_t browsers = 0;
  AnonymityHistogram histogram;
  std::optional<double> unicity;
};

// One snapshot per day from day 0 through the day of the latest entry.
// Snapshots are computed incrementally in one pass over the entries.
std::vector<PartitionStats> TimePartitionedStats(const Dataset& ds,
                                                 std::int64_t day_origin_ms);

}  // namespace fpkit

#endif  // FPKIT_METRICS_DISTINCTIVENESS_H_
