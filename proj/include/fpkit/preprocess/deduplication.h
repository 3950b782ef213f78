#ifndef FPKIT_PREPROCESS_DEDUPLICATION_H_
#define FPKIT_PREPROCESS_DEDUPLICATION_H_

#include "fpkit/model/dataset.h"

namespace fpkit {

// Per browser, in time order, keeps an entry iff its fingerprint differs
// from the previously kept one. Interleaved fingerprints (f1, f2, f1) are
// therefore kept.
Dataset Deduplicate(Dataset ds);

}  // namespace fpkit

#endif  // FPKIT_PREPROCESS_DEDUPLICATION_H_
