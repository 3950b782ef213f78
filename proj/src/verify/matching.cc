#include "fpkit/verify/matching.h"

#include <cmath>

#include "fpkit/error.h"

namespace fpkit {

std::string_view ModeName(VerificationMode mode) {
  return mode == VerificationMode::kSimple ? "simple" : "advanced";
}

VerificationMode ParseMode(std::string_view name) {
  if (name == "simple") return VerificationMode::kSimple;
  if (name == "advanced") return VerificationMode::kAdvanced;
  throw ConfigError("unknown verification mode: " + std::string(name));
}

MatchingConfig::MatchingConfig(const Schema& schema, size_t theta)
    : schema_(schema), theta_(theta) {
  thresholds_.reserve(schema.size());
  for (const auto& attribute : schema)
    thresholds_.push_back({FamilyForKind(attribute.kind), 0.0});
}

MatchingConfig::MatchingConfig(const Schema& schema,
                               std::vector<AttributeThreshold> thresholds,
                               size_t theta)
    : schema_(schema), thresholds_(std::move(thresholds)), theta_(theta) {
  if (thresholds_.size() != schema_.size())
    throw SchemaError("matching config does not cover the schema");
  for (size_t a = 0; a < schema_.size(); ++a) {
    double t = thresholds_[a].theta;
    if (!(t >= 0.0) || std::isinf(t))
      throw ConfigError("invalid threshold for " + schema_[a].name);
    if (schema_[a].dynamic && t != 0.0)
      throw ConfigError("dynamic attribute " + schema_[a].name +
                        " must have threshold 0");
  }
  if (theta_ > schema_.size())
    throw ConfigError("global threshold exceeds the attribute count");
}

bool MatchingConfig::IsStrict() const {
  for (const auto& t : thresholds_) {
    if (t.theta != 0.0) return false;
  }
  return true;
}

Json MatchingConfigToJson(const MatchingConfig& config) {
  Json attributes = Json::object();
  for (size_t a = 0; a < config.size(); ++a) {
    attributes[config.schema()[a].name] = {
        {"family", FamilyName(config[a].family)}, {"theta", config[a].theta}};
  }
  return {{"attributes", attributes}, {"theta", config.theta()}};
}

MatchingConfig MatchingConfigFromJson(const Json& json, const Schema& schema) {
  if (!json.is_object() || !json.contains("attributes"))
    throw ConfigError("matching config needs an attributes object");
  const Json& attributes = json.at("attributes");
  for (const auto& [name, ignored] : attributes.items()) {
    if (!schema.Contains(name))
      throw SchemaError("matching config names unknown attribute " + name);
  }
  std::vector<AttributeThreshold> thresholds;
  for (const auto& attribute : schema) {
    auto it = attributes.find(attribute.name);
    if (it == attributes.end())
      throw SchemaError("matching config misses attribute " + attribute.name);
    AttributeThreshold t;
    t.family = it->contains("family")
                   ? ParseFamily(it->at("family").get<std::string>())
                   : FamilyForKind(attribute.kind);
    t.theta = it->value("theta", 0.0);
    thresholds.push_back(t);
  }
  return MatchingConfig(schema, std::move(thresholds),
                        json.value("theta", size_t{0}));
}

size_t CountMatching(std::span<const AttributeValue> f,
                     std::span<const AttributeValue> g,
                     const MatchingConfig& config) {
  if (f.size() != g.size() || f.size() != config.size())
    throw SchemaError("fingerprint length does not match the config");
  size_t count = 0;
  for (size_t a = 0; a < f.size(); ++a) {
    if (f[a] == g[a]) {
      ++count;
      continue;
    }
    const auto& t = config[a];
    if (t.theta > 0.0 && AttributeDistance(f[a], g[a], t.family) <= t.theta)
      ++count;
  }
  return count;
}

size_t CountForMode(std::span<const AttributeValue> f,
                    std::span<const AttributeValue> g,
                    const MatchingConfig& config, VerificationMode mode) {
  if (mode == VerificationMode::kSimple) return CountIdentical(f, g);
  return CountMatching(f, g, config);
}

bool Verdict(std::span<const AttributeValue> stored,
             std::span<const AttributeValue> presented,
             const MatchingConfig& config, VerificationMode mode) {
  return CountForMode(stored, presented, config, mode) >= config.theta();
}

}  // namespace fpkit
