#include "fpkit/preprocess/pipeline.h"

#include "fpkit/preprocess/deduplication.h"

namespace fpkit {

Json PipelineResult::ReportJson() const {
  return {{"cleaning", cleaning.ToJson()},
          {"resync",
           {{"groups", resync.groups},
            {"interleaved_groups", resync.interleaved_groups},
            {"rewritten_groups", resync.rewritten_groups},
            {"rewritten_entries", resync.rewritten_entries}}},
          {"deduplicated_entries", deduplicated_entries},
          {"output_entries", dataset.size()},
          {"browsers", dataset.BrowserCount()}};
}

PipelineResult Preprocess(Dataset raw, const PipelineOptions& options) {
  auto cleaned = Clean(std::move(raw), options.cleaning);
  ResyncReport resync;
  Dataset ds = ResynchronizeUids(std::move(cleaned.dataset), &resync);
  size_t before = ds.size();
  ds = Deduplicate(std::move(ds));
  size_t removed = before - ds.size();
  if (!options.rules.empty()) ds = DeriveExtracted(std::move(ds), options.rules);
  return {std::move(ds), cleaned.report, resync, removed};
}

TimeWindow WindowForDays(std::int64_t start_ms, int days) {
  return {start_ms, start_ms + static_cast<std::int64_t>(days) * kMillisPerDay - 1};
}

}  // namespace fpkit
