#include "fpkit/preprocess/uid_resync.h"

#include <algorithm>
#include <map>
#include <unordered_set>

namespace fpkit {

bool IsInterleaved(const std::vector<std::string>& uid_sequence) {
  std::unordered_set<std::string_view> finished;
  for (size_t i = 0; i < uid_sequence.size(); ++i) {
    if (i > 0 && uid_sequence[i] == uid_sequence[i - 1]) continue;
    if (!finished.insert(uid_sequence[i]).second) return true;
  }
  return false;
}

Dataset ResynchronizeUids(Dataset ds, ResyncReport* report) {
  ResyncReport local;
  Schema schema = ds.schema();
  std::vector<std::string> provenance = std::move(ds).TakeProvenance();
  std::vector<Entry> entries = std::move(ds).TakeEntries();

  std::map<std::pair<FingerprintHash, std::string>, std::vector<size_t>>
      groups;
  for (size_t i = 0; i < entries.size(); ++i)
    groups[{entries[i].hash, entries[i].ip_hash}].push_back(i);

  for (auto& [key, members] : groups) {
    ++local.groups;
    // Entries arrive sorted by (uid, ts); order the group by time, keeping
    // the uid order for equal timestamps.
    std::stable_sort(members.begin(), members.end(), [&](size_t a, size_t b) {
      return entries[a].ts_ms < entries[b].ts_ms;
    });
    std::vector<std::string> sequence;
    sequence.reserve(members.size());
    for (size_t i : members) sequence.push_back(entries[i].uid);
    if (IsInterleaved(sequence)) {
      ++local.interleaved_groups;
      continue;
    }
    const std::string survivor =
        *std::min_element(sequence.begin(), sequence.end());
    bool rewritten = false;
    for (size_t i : members) {
      if (entries[i].uid != survivor) {
        entries[i].uid = survivor;
        ++local.rewritten_entries;
        rewritten = true;
      }
    }
    if (rewritten) ++local.rewritten_groups;
  }
  if (report) *report = local;
  provenance.push_back("resynchronize_uids");
  return Dataset(std::move(schema), std::move(entries), std::move(provenance),
                 Dataset::Hashes::kTrusted);
}

}  // namespace fpkit
