#ifndef FPKIT_VERIFY_MATCHING_H_
#define FPKIT_VERIFY_MATCHING_H_

#include <span>
#include <string_view>
#include <vector>

#include "fpkit/model/fingerprint.h"
#include "fpkit/model/io.h"
#include "fpkit/verify/distance.h"

namespace fpkit {

enum class VerificationMode { kSimple, kAdvanced };

std::string_view ModeName(VerificationMode mode);
// Throws ConfigError on an unknown name.
VerificationMode ParseMode(std::string_view name);

struct AttributeThreshold {
  DistanceFamily family = DistanceFamily::kIdentity;
  double theta = 0.0;
};

// Per-attribute thresholds aligned with a schema, plus the global
// threshold on the number of matching attributes.
class MatchingConfig {
 public:
  MatchingConfig() = default;
  // Families from attribute kinds, every threshold 0.
  explicit MatchingConfig(const Schema& schema, size_t theta = 0);
  // Throws ConfigError when a dynamic attribute has a nonzero threshold or
  // a threshold is negative, SchemaError when sizes differ.
  MatchingConfig(const Schema& schema, std::vector<AttributeThreshold> thresholds,
                 size_t theta);

  const Schema& schema() const { return schema_; }
  const std::vector<AttributeThreshold>& thresholds() const {
    return thresholds_;
  }
  const AttributeThreshold& operator[](size_t i) const { return thresholds_[i]; }
  size_t size() const { return thresholds_.size(); }

  size_t theta() const { return theta_; }
  void set_theta(size_t theta) { theta_ = theta; }

  // True when every attribute threshold is 0.
  bool IsStrict() const;

 private:
  Schema schema_;
  std::vector<AttributeThreshold> thresholds_;
  size_t theta_ = 0;
};

// {"attributes": {name: {"family", "theta"}}, "theta": Θ}.
Json MatchingConfigToJson(const MatchingConfig& config);
// Every schema attribute must be covered; extra names are a SchemaError.
MatchingConfig MatchingConfigFromJson(const Json& json, const Schema& schema);

// Attributes whose distance is within their threshold. Never lower than
// CountIdentical on the same pair.
size_t CountMatching(std::span<const AttributeValue> f,
                     std::span<const AttributeValue> g,
                     const MatchingConfig& config);

size_t CountForMode(std::span<const AttributeValue> f,
                    std::span<const AttributeValue> g,
                    const MatchingConfig& config, VerificationMode mode);

// Accept iff the count under |mode| reaches the global threshold.
bool Verdict(std::span<const AttributeValue> stored,
             std::span<const AttributeValue> presented,
             const MatchingConfig& config, VerificationMode mode);

}  // namespace fpkit

#endif  // FPKIT_VERIFY_MATCHING_H_
