#ifndef FPKIT_SYNTH_CONFIG_H_
#define FPKIT_SYNTH_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fpkit/model/attribute.h"
#include "fpkit/model/io.h"

namespace fpkit {

// Attributes with generator-side meaning beyond their value distribution.
enum class AttributeRole { kPlain, kUserAgent, kCookie, kUniqueId };

std::string_view RoleName(AttributeRole role);
AttributeRole ParseRole(std::string_view name);

struct AttributeSpec {
  std::string name;
  AttributeKind kind = AttributeKind::kCategorical;
  bool dynamic = false;
  bool client_side = true;
  AttributeRole role = AttributeRole::kPlain;

  // Values are indices 0..cardinality-1 drawn with Zipf(zipf) weights,
  // unless explicit weights are given. Ignored for grouped attributes.
  size_t cardinality = 2;
  double zipf = 1.0;
  std::vector<double> weights;

  // Explicit textual or categorical values; otherwise rendered from the
  // template ("{}" is replaced by the index) or from the numeric range.
  std::vector<std::string> values;
  std::string text_template;
  double numeric_min = 0.0;
  double numeric_max = 100.0;

  // Probability that a revisit redraws the value.
  double change_probability = 0.0;
  // Probability that a browser reports an error flag instead of a value.
  double error_rate = 0.0;
  // Mean collection time, when times are generated.
  double time_ms = 5.0;
};

struct ClassSpec {
  std::string name;
  double weight = 1.0;
  // Device family used to render user agents: desktop, mobile or tablet.
  std::string device = "desktop";
  // Profiles per correlation group; 0 uses the group default.
  size_t profiles = 0;
};

// Attributes drawn jointly from per-class profiles.
struct GroupSpec {
  std::string name;
  std::vector<std::string> members;
  size_t profiles = 24;
  double profile_zipf = 0.5;
  // Per attribute: values private to each class and values shared by all.
  size_t class_values = 6;
  size_t shared_values = 2;
  double value_zipf = 2.5;
  // Probability per revisit that the group redraws a whole profile.
  double block_change_probability = 0.0;
};

struct ArrivalSpike {
  int day = 0;
  // Share of browsers arriving on that day.
  double weight = 0.0;
};

struct GeneratorConfig {
  std::uint64_t seed = 0;
  size_t browser_count = 1000;
  int days = 180;
  std::int64_t start_ms = 1'546'300'800'000;  // 2019-01-01T00:00:00Z
  std::vector<ArrivalSpike> spikes;

  // Mean number of extra visits per browser and mean gap between visits.
  double revisit_mean = 3.0;
  double revisit_gap_days = 5.0;

  std::vector<AttributeSpec> attributes;
  std::vector<ClassSpec> classes;
  std::vector<GroupSpec> groups;

  // Per-browser multiplier on change probabilities, lognormal with mean 1.
  double volatility_sd = 0.0;
  // Per revisit: the fingerprint returns to the previous one.
  double oscillation_probability = 0.0;
  // Per revisit: the browser loses its cookie and gets a new UID.
  double cookie_churn_probability = 0.0;
  // Per browser: another browser shares its IP and first fingerprint.
  double twin_fraction = 0.0;
  // Per entry.
  double robot_fraction = 0.0;
  double duplicate_fraction = 0.0;
  double out_of_window_fraction = 0.0;
  double cookie_disabled_fraction = 0.0;

  bool collection_times = false;
  double time_outlier_fraction = 0.0;

  std::string ip_key = "fpkit-synthetic";

  // Throws ConfigError when invalid.
  void Validate() const;
  Schema MakeSchema() const;
  const AttributeSpec* FindAttribute(std::string_view name) const;
};

Json GeneratorConfigToJson(const GeneratorConfig& config);
GeneratorConfig GeneratorConfigFromJson(const Json& json);

// 262 attributes: 8 correlation groups of 30 and 22 independent ones,
// desktop, mobile and a uniform "fleet" class.
GeneratorConfig StandardConfig(size_t browser_count = 1000,
                               std::uint64_t seed = 0);

// Zipf weights 1/k^s for k = 1..count, normalized.
std::vector<double> ZipfWeights(size_t count, double exponent);

}  // namespace fpkit

#endif  // FPKIT_SYNTH_CONFIG_H_
