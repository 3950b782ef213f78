#ifndef FPKIT_VERIFY_EVALUATION_H_
#define FPKIT_VERIFY_EVALUATION_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fpkit/model/dataset.h"
#include "fpkit/verify/matching.h"

namespace fpkit {

// Two entries of a dataset, by index.
struct ComparisonPair {
  size_t a = 0;
  size_t b = 0;
  bool same_browser = false;
  int month = 0;

  bool operator==(const ComparisonPair&) const = default;
};

struct MonthSample {
  int month = 0;
  std::vector<ComparisonPair> same;
  std::vector<ComparisonPair> different;
};

// Calendar month of |ts_ms| (UTC) counted from the month of |origin_ms|.
int MonthIndex(std::int64_t ts_ms, std::int64_t origin_ms);

// One sample per calendar month, starting with the month of the earliest
// entry. Same-browser pairs are the consecutive pairs lying in the month;
// different-browsers pairs are drawn uniformly without replacement among
// cross-browser pairs of the month, as many as same-browser pairs.
std::vector<MonthSample> BuildComparisonSets(const Dataset& ds, int months = 6,
                                             std::uint64_t seed = 0);

// Attribute counts of every pair of a month sample.
struct CountedSample {
  std::vector<std::uint32_t> same;
  std::vector<std::uint32_t> different;
};

CountedSample CountSample(const Dataset& ds, const MonthSample& sample,
                          const MatchingConfig& config, VerificationMode mode);

struct ErrorCurve {
  size_t attribute_count = 0;
  size_t months_used = 0;
  // Indexed by Θ in [0, attribute_count].
  std::vector<double> fmr;
  std::vector<double> fnmr;
};

// FMR(Θ): share of different-browsers pairs with count >= Θ. FNMR(Θ): share
// of same-browser pairs with count < Θ. Averaged over samples holding both
// classes.
ErrorCurve ComputeErrorCurve(std::span<const CountedSample> samples,
                             size_t attribute_count);
ErrorCurve ComputeErrorCurve(const Dataset& ds,
                             std::span<const MonthSample> samples,
                             const MatchingConfig& config,
                             VerificationMode mode);

struct EqualError {
  double rate = 0.0;
  size_t theta = 0;
  double fmr = 0.0;
  double fnmr = 0.0;
};

// Θ minimizing |FMR - FNMR|, ties toward the smaller Θ; the rate is the
// mean of both at that Θ. Throws ArgumentError on an empty curve.
EqualError EqualErrorRate(const ErrorCurve& curve);

// One-dimensional split between same-class and different-class distances.
struct Split {
  double theta = 0.0;
  size_t errors = 0;
  double margin = 0.0;
  // Both classes share one distribution, or one class is empty.
  bool degenerate = false;
};

// Threshold minimizing misclassified pairs (same-class above it,
// different-class at or below it). Candidates are 0, midpoints between
// adjacent finite distances and the largest finite distance; ties go to
// the widest margin, then the smaller threshold.
Split LearnSplit(std::vector<double> same, std::vector<double> different);

struct LearnResult {
  MatchingConfig config;
  // Attributes whose threshold fell back to 0 for lack of separation.
  std::vector<std::string> degenerate;
  // Global threshold from the advanced mechanism's error curve.
  EqualError equal_error;
};

// Per-attribute thresholds averaged over month samples. Dynamic and
// categorical attributes keep a threshold of 0.
LearnResult LearnThresholds(const Dataset& ds,
                            std::span<const MonthSample> samples);

}  // namespace fpkit

#endif  // FPKIT_VERIFY_EVALUATION_H_
