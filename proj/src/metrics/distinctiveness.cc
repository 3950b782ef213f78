#include "fpkit/metrics/distinctiveness.h"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "fpkit/error.h"

namespace fpkit {

std::int64_t DayCutoff(std::int64_t day_origin_ms, int day) {
  return day_origin_ms + static_cast<std::int64_t>(day + 1) * kMillisPerDay - 1;
}

Snapshot TakeSnapshot(const Dataset& ds, int day, std::int64_t day_origin_ms) {
  if (day < 0) throw ArgumentError("snapshot day must be non-negative");
  Snapshot s;
  s.day = day;
  s.cutoff_ms = DayCutoff(day_origin_ms, day);
  for (const auto& [begin, end] : ds.BrowserRanges()) {
    // Entries of a browser are time-ordered; the last one at or before the
    // cutoff wins.
    const Entry* latest = nullptr;
    for (size_t i = begin; i < end && ds[i].ts_ms <= s.cutoff_ms; ++i)
      latest = &ds[i];
    if (latest) s.latest.emplace(latest->uid, latest->hash);
  }
  return s;
}

AnonymityHistogram AnonymitySets(const Snapshot& snapshot) {
  std::unordered_map<FingerprintHash, size_t> browsers_per_fingerprint;
  for (const auto& [uid, hash] : snapshot.latest)
    ++browsers_per_fingerprint[hash];
  AnonymityHistogram histogram;
  for (const auto& [hash, count] : browsers_per_fingerprint)
    ++histogram[count];
  return histogram;
}

std::optional<double> UnicityRate(const AnonymityHistogram& histogram) {
  size_t browsers = 0;
  for (const auto& [size, count] : histogram) browsers += size * count;
  if (browsers == 0) return std::nullopt;
  auto it = histogram.find(1);
  size_t unique = it == histogram.end() ? 0 : it->second;
  return static_cast<double>(unique) / static_cast<double>(browsers);
}

std::optional<double> UnicityRate(const Snapshot& snapshot) {
  return UnicityRate(AnonymitySets(snapshot));
}

std::optional<double> UnicityRate(const Dataset& ds) {
  std::set<std::pair<FingerprintHash, std::string_view>> pairs;
  for (const auto& e : ds.entries()) pairs.emplace(e.hash, e.uid);
  if (pairs.empty()) return std::nullopt;
  std::unordered_map<FingerprintHash, size_t> browsers_per_fingerprint;
  for (const auto& [hash, uid] : pairs) ++browsers_per_fingerprint[hash];
  size_t unique = 0;
  for (const auto& [hash, count] : browsers_per_fingerprint)
    unique += (count == 1);
  return static_cast<double>(unique) / static_cast<double>(pairs.size());
}

std::vector<PartitionStats> TimePartitionedStats(const Dataset& ds,
                                                 std::int64_t day_origin_ms) {
  std::vector<PartitionStats> out;
  auto latest_ts = ds.LatestTimestamp();
  if (!latest_ts) return out;
  const int last_day =
      static_cast<int>((*latest_ts - day_origin_ms) / kMillisPerDay);

  // Entries in time order; each moves its browser's current fingerprint.
  std::vector<size_t> order(ds.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return ds[a].ts_ms < ds[b].ts_ms;
  });

  std::unordered_map<std::string_view, FingerprintHash> current;
  std::unordered_map<FingerprintHash, size_t> sharing;
  size_t next = 0;
  for (int day = 0; day <= last_day; ++day) {
    const std::int64_t cutoff = DayCutoff(day_origin_ms, day);
    while (next < order.size() && ds[order[next]].ts_ms <= cutoff) {
      const Entry& e = ds[order[next++]];
      auto [it, inserted] = current.try_emplace(e.uid, e.hash);
      if (!inserted) {
        if (--sharing[it->second] == 0) sharing.erase(it->second);
        it->second = e.hash;
      }
      ++sharing[e.hash];
    }
    PartitionStats stats;
    stats.day = day;
    stats.browsers = current.size();
    for (const auto& [hash, count] : sharing) ++stats.histogram[count];
    stats.unicity = UnicityRate(stats.histogram);
    out.push_back(std::move(stats));
  }
  return out;
}

}  // namespace fpkit
