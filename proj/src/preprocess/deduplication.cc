#include "fpkit/preprocess/deduplication.h"

namespace fpkit {

Dataset Deduplicate(Dataset ds) {
  Schema schema = ds.schema();
  std::vector<std::string> provenance = std::move(ds).TakeProvenance();
  std::vector<Entry> entries = std::move(ds).TakeEntries();
  std::vector<Entry> kept;
  kept.reserve(entries.size());
  for (auto& e : entries) {
    if (!kept.empty() && kept.back().uid == e.uid && kept.back().hash == e.hash)
      continue;
    kept.push_back(std::move(e));
  }
  provenance.push_back("deduplicate");
  return Dataset(std::move(schema), std::move(kept), std::move(provenance),
                 Dataset::Hashes::kTrusted);
}

}  // namespace fpkit
