#ifndef FPKIT_MODEL_DATASET_H_
#define FPKIT_MODEL_DATASET_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fpkit/model/attribute.h"
#include "fpkit/model/fingerprint.h"

namespace fpkit {

inline constexpr std::int64_t kMillisPerDay = 86'400'000;

// One observation: fingerprint |fingerprint| presented by browser |uid| at
// |ts_ms|.
struct Entry {
  Fingerprint fingerprint;
  std::string uid;
  std::int64_t ts_ms = 0;
  std::string ip_hash;
  // Per-attribute collection durations, when the collector reported them.
  std::map<std::string, std::int64_t, std::less<>> times_ms;
  // Whole-fingerprint collection duration, when reported.
  std::optional<std::int64_t> total_ms;
  // Maintained by Dataset; equals HashFingerprint(fingerprint).
  FingerprintHash hash;
};

// Entries plus their schema. Entries are kept sorted by (uid, ts_ms); ties
// keep their input order. Transformations build new datasets.
class Dataset {
 public:
  enum class Hashes { kRecompute, kTrusted };

  Dataset() = default;
  // Throws SchemaError if an entry does not cover the schema and
  // ArgumentError on a negative timestamp. With Hashes::kTrusted the entry
  // hashes are assumed current (callers that did not touch fingerprints).
  Dataset(Schema schema, std::vector<Entry> entries,
          std::vector<std::string> provenance = {},
          Hashes hashes = Hashes::kRecompute);

  const Schema& schema() const { return schema_; }
  const std::vector<Entry>& entries() const { return entries_; }
  const std::vector<std::string>& provenance() const { return provenance_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Entry& operator[](size_t i) const { return entries_[i]; }

  // Half-open index ranges, one per browser, in uid order.
  std::vector<std::pair<size_t, size_t>> BrowserRanges() const;
  size_t BrowserCount() const;

  std::optional<std::int64_t> EarliestTimestamp() const;
  std::optional<std::int64_t> LatestTimestamp() const;

  std::vector<Entry> TakeEntries() && { return std::move(entries_); }
  std::vector<std::string> TakeProvenance() && {
    return std::move(provenance_);
  }

 private:
  Schema schema_;
  std::vector<Entry> entries_;
  std::vector<std::string> provenance_;
};

// Midnight UTC of the earliest entry; the default day-0 origin.
std::int64_t DefaultDayOrigin(const Dataset& ds);

}  // namespace fpkit

#endif  // FPKIT_MODEL_DATASET_H_
