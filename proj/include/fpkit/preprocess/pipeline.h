#ifndef FPKIT_PREPROCESS_PIPELINE_H_
#define FPKIT_PREPROCESS_PIPELINE_H_

#include <vector>

#include "fpkit/preprocess/cleaning.h"
#include "fpkit/preprocess/extraction.h"
#include "fpkit/preprocess/uid_resync.h"

namespace fpkit {

struct PipelineOptions {
  CleaningOptions cleaning;
  std::vector<ExtractionRule> rules;
};

struct PipelineResult {
  Dataset dataset;
  CleaningReport cleaning;
  ResyncReport resync;
  size_t deduplicated_entries = 0;

  Json ReportJson() const;
};

// Cleaning, UID resynchronization, deduplication, then derivation of the
// extracted attributes when rules are given.
PipelineResult Preprocess(Dataset raw, const PipelineOptions& options);

// Window covering every timestamp from |start_ms| over |days| days.
TimeWindow WindowForDays(std::int64_t start_ms, int days);

}  // namespace fpkit

#endif  // FPKIT_PREPROCESS_PIPELINE_H_
