#include "fpkit/verify/distance.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fpkit/error.h"
#include "fpkit/util/strings.h"

namespace fpkit {

std::string_view FamilyName(DistanceFamily family) {
  switch (family) {
    case DistanceFamily::kEdit:
      return "edit";
    case DistanceFamily::kJaccard:
      return "jaccard";
    case DistanceFamily::kAbsolute:
      return "absolute";
    case DistanceFamily::kIdentity:
      return "identity";
  }
  return "identity";
}

DistanceFamily ParseFamily(std::string_view name) {
  for (auto family : {DistanceFamily::kEdit, DistanceFamily::kJaccard,
                      DistanceFamily::kAbsolute, DistanceFamily::kIdentity}) {
    if (FamilyName(family) == name) return family;
  }
  throw ConfigError("unknown distance family: " + std::string(name));
}

DistanceFamily FamilyForKind(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::kTextual:
      return DistanceFamily::kEdit;
    case AttributeKind::kSet:
      return DistanceFamily::kJaccard;
    case AttributeKind::kNumeric:
      return DistanceFamily::kAbsolute;
    case AttributeKind::kCategorical:
      return DistanceFamily::kIdentity;
  }
  return DistanceFamily::kIdentity;
}

size_t Levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), size_t{0});
  for (size_t i = 1; i <= a.size(); ++i) {
    size_t diagonal = row[0];
    row[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      size_t above = row[j];
      row[j] = std::min({above + 1, row[j - 1] + 1,
                         diagonal + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diagonal = above;
    }
  }
  return row[b.size()];
}

size_t Levenshtein(std::string_view a, std::string_view b) {
  return Levenshtein(DecodeUtf8(a), DecodeUtf8(b));
}

double JaccardDistance(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  size_t united = a.size() + b.size() - common;
  return 1.0 - static_cast<double>(common) / static_cast<double>(united);
}

double AttributeDistance(AttributeValue a, AttributeValue b,
                         DistanceFamily family) {
  if (a == b) return 0.0;
  if (a.is_flag() || b.is_flag() || a.type() != b.type())
    return kMismatchDistance;
  switch (family) {
    case DistanceFamily::kEdit:
      if (a.type() != ValueType::kText) break;
      return static_cast<double>(Levenshtein(a.text(), b.text()));
    case DistanceFamily::kJaccard:
      if (a.type() != ValueType::kSet) break;
      return JaccardDistance(a.items(), b.items());
    case DistanceFamily::kAbsolute: {
      if (a.type() != ValueType::kNumber) break;
      double d = std::fabs(a.number() - b.number());
      return std::isnan(d) ? kMismatchDistance : d;
    }
    case DistanceFamily::kIdentity:
      break;
  }
  return kMismatchDistance;
}

}  // namespace fpkit
