#include "fpkit/model/dataset.h"

#include <algorithm>

#include "fpkit/error.h"

namespace fpkit {

Dataset::Dataset(Schema schema, std::vector<Entry> entries,
                 std::vector<std::string> provenance, Hashes hashes)
    : schema_(std::move(schema)),
      entries_(std::move(entries)),
      provenance_(std::move(provenance)) {
  for (auto& e : entries_) {
    if (e.fingerprint.size() != schema_.size())
      throw SchemaError("entry of browser " + e.uid + " has " +
                        std::to_string(e.fingerprint.size()) +
                        " values, schema has " +
                        std::to_string(schema_.size()));
    if (e.ts_ms < 0)
      throw ArgumentError("negative timestamp for browser " + e.uid);
    if (hashes == Hashes::kRecompute) e.hash = HashFingerprint(e.fingerprint);
  }
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const Entry& a, const Entry& b) {
                     if (a.uid != b.uid) return a.uid < b.uid;
                     return a.ts_ms < b.ts_ms;
                   });
}

std::vector<std::pair<size_t, size_t>> Dataset::BrowserRanges() const {
  std::vector<std::pair<size_t, size_t>> ranges;
  size_t begin = 0;
  for (size_t i = 1; i <= entries_.size(); ++i) {
    if (i == entries_.size() || entries_[i].uid != entries_[begin].uid) {
      ranges.emplace_back(begin, i);
      begin = i;
    }
  }
  return ranges;
}

size_t Dataset::BrowserCount() const {
  size_t count = 0;
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (i == 0 || entries_[i].uid != entries_[i - 1].uid) ++count;
  }
  return count;
}

std::optional<std::int64_t> Dataset::EarliestTimestamp() const {
  if (entries_.empty()) return std::nullopt;
  std::int64_t t = entries_.front().ts_ms;
  for (const auto& e : entries_) t = std::min(t, e.ts_ms);
  return t;
}

std::optional<std::int64_t> Dataset::LatestTimestamp() const {
  if (entries_.empty()) return std::nullopt;
  std::int64_t t = entries_.front().ts_ms;
  for (const auto& e : entries_) t = std::max(t, e.ts_ms);
  return t;
}

std::int64_t DefaultDayOrigin(const Dataset& ds) {
  auto earliest = ds.EarliestTimestamp();
  if (!earliest) return 0;
  return *earliest / kMillisPerDay * kMillisPerDay;
}

}  // namespace fpkit
