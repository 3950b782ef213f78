#ifndef FPKIT_METRICS_ENTROPY_H_
#define FPKIT_METRICS_ENTROPY_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fpkit/model/dataset.h"

namespace fpkit {

// log2(N), the entropy of N equally likely fingerprints.
double MaxEntropy(std::uint64_t fingerprint_count);

// Shannon entropy in bits of a frequency table summing to |total|.
double EntropyFromCounts(const std::vector<std::uint64_t>& counts,
                         std::uint64_t total);

struct AttributeEntropy {
  std::string name;
  size_t distinct_values = 0;
  double entropy_bits = 0.0;
  // Absent when the dataset holds one fingerprint or fewer.
  std::optional<double> normalized_entropy;
};

// Entropy of each attribute over all fingerprints of the dataset, in
// schema order. Error flags count as values.
std::vector<AttributeEntropy> AttributeEntropies(const Dataset& ds);

// Unordered attribute index pairs left out of the conditional analysis.
using ExclusionSet = std::set<std::pair<size_t, size_t>>;

// Source and extracted attribute pairs of the schema.
ExclusionSet SourceExtractedExclusions(const Schema& schema);

struct NceSummary {
  std::string name;
  std::optional<double> min;
  std::optional<double> avg;
  std::optional<double> max;
};

struct NceMatrix {
  size_t attribute_count = 0;
  std::uint64_t fingerprint_count = 0;
  double max_entropy = 0.0;
  // Conditional entropy in bits of the inferred attribute given the known
  // one, row-major by (known, inferred). Excluded pairs hold NaN.
  std::vector<double> conditional_bits;
  std::vector<bool> excluded;
  // One per inferred attribute; self pairs and excluded pairs are skipped.
  std::vector<NceSummary> summaries;

  double Bits(size_t known, size_t inferred) const {
    return conditional_bits[known * attribute_count + inferred];
  }
  bool IsExcluded(size_t known, size_t inferred) const {
    return excluded[known * attribute_count + inferred];
  }
  // H(inferred | known) / log2(N); absent for excluded pairs or N <= 1.
  std::optional<double> Normalized(size_t known, size_t inferred) const;
};

// Normalized conditional entropy for every ordered attribute pair.
NceMatrix ConditionalEntropyMatrix(const Dataset& ds,
                                   const ExclusionSet& exclusions);
NceMatrix ConditionalEntropyMatrix(const Dataset& ds);

}  // namespace fpkit

#endif  // FPKIT_METRICS_ENTROPY_H_
