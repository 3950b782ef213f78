#ifndef FPKIT_PREPROCESS_UID_RESYNC_H_
#define FPKIT_PREPROCESS_UID_RESYNC_H_

#include <string>
#include <vector>

#include "fpkit/model/dataset.h"

namespace fpkit {

struct ResyncReport {
  size_t groups = 0;
  size_t interleaved_groups = 0;
  size_t rewritten_groups = 0;
  size_t rewritten_entries = 0;
};

// True when the UID sequence, with consecutive repeats collapsed, contains
// some UID twice (u1 ... u2 ... u1).
bool IsInterleaved(const std::vector<std::string>& uid_sequence);

// Groups entries by (fingerprint hash, ip_hash). Within every group whose
// timestamp-ordered UID sequence is not interleaved, all entries take the
// lexicographically smallest UID of the group. Fingerprints and timestamps
// are never modified.
Dataset ResynchronizeUids(Dataset ds, ResyncReport* report = nullptr);

}  // namespace fpkit

#endif  // FPKIT_PREPROCESS_UID_RESYNC_H_
