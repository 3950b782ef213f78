#ifndef FPKIT_VERIFY_DISTANCE_H_
#define FPKIT_VERIFY_DISTANCE_H_

#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "fpkit/model/value.h"

namespace fpkit {

enum class DistanceFamily { kEdit, kJaccard, kAbsolute, kIdentity };

std::string_view FamilyName(DistanceFamily family);
// Throws ConfigError on an unknown name.
DistanceFamily ParseFamily(std::string_view name);
DistanceFamily FamilyForKind(AttributeKind kind);

// Distance of values that can never match: mismatched categories, flags,
// or payloads of the wrong type. Larger than any finite threshold.
inline constexpr double kMismatchDistance =
    std::numeric_limits<double>::infinity();

// Edit distance over Unicode code points.
size_t Levenshtein(std::u32string_view a, std::u32string_view b);
size_t Levenshtein(std::string_view a, std::string_view b);

// 1 - |A ∩ B| / |A ∪ B|, and 0 when both sets are empty. Inputs must be
// sorted and free of duplicates.
double JaccardDistance(const std::vector<std::string>& a,
                       const std::vector<std::string>& b);

// Identical values are at distance 0 whatever the family.
double AttributeDistance(AttributeValue a, AttributeValue b,
                         DistanceFamily family);
inline double AttributeDistance(AttributeValue a, AttributeValue b,
                                AttributeKind kind) {
  return AttributeDistance(a, b, FamilyForKind(kind));
}

}  // namespace fpkit

#endif  // FPKIT_VERIFY_DISTANCE_H_
