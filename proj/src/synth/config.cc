#include "fpkit/synth/config.h"

#include <cmath>
#include <set>

#include "fpkit/error.h"
#include "fpkit/util/random.h"

namespace fpkit {

void to_json(Json& j, AttributeKind kind) { j = KindName(kind); }
void from_json(const Json& j, AttributeKind& kind) {
  auto parsed = ParseKind(j.get<std::string>());
  if (!parsed) throw ConfigError("unknown attribute kind " + j.dump());
  kind = *parsed;
}
void to_json(Json& j, AttributeRole role) { j = RoleName(role); }
void from_json(const Json& j, AttributeRole& role) {
  role = ParseRole(j.get<std::string>());
}

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    AttributeSpec, name, kind, dynamic, client_side, role, cardinality, zipf,
    weights, values, text_template, numeric_min, numeric_max,
    change_probability, error_rate, time_ms)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ClassSpec, name, weight,
                                                device, profiles)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GroupSpec, name, members,
                                                profiles, profile_zipf,
                                                class_values, shared_values,
                                                value_zipf,
                                                block_change_probability)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ArrivalSpike, day, weight)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    GeneratorConfig, seed, browser_count, days, start_ms, spikes,
    revisit_mean, revisit_gap_days, attributes, classes, groups,
    volatility_sd, oscillation_probability, cookie_churn_probability,
    twin_fraction, robot_fraction, duplicate_fraction, out_of_window_fraction,
    cookie_disabled_fraction, collection_times, time_outlier_fraction, ip_key)

namespace {

void CheckProbability(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ConfigError(what + " must lie in [0, 1]");
}

}  // namespace

std::string_view RoleName(AttributeRole role) {
  switch (role) {
    case AttributeRole::kPlain:
      return "plain";
    case AttributeRole::kUserAgent:
      return "user_agent";
    case AttributeRole::kCookie:
      return "cookie";
    case AttributeRole::kUniqueId:
      return "unique_id";
  }
  return "plain";
}

AttributeRole ParseRole(std::string_view name) {
  for (auto role : {AttributeRole::kPlain, AttributeRole::kUserAgent,
                    AttributeRole::kCookie, AttributeRole::kUniqueId}) {
    if (RoleName(role) == name) return role;
  }
  throw ConfigError("unknown attribute role: " + std::string(name));
}

std::vector<double> ZipfWeights(size_t count, double exponent) {
  std::vector<double> weights(count);
  double total = 0.0;
  for (size_t k = 0; k < count; ++k) {
    weights[k] = 1.0 / std::pow(static_cast<double>(k + 1), exponent);
    total += weights[k];
  }
  for (auto& w : weights) w /= total;
  return weights;
}

const AttributeSpec* GeneratorConfig::FindAttribute(std::string_view name) const {
  for (const auto& a : attributes) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

void GeneratorConfig::Validate() const {
  if (robot_fraction > 0.0 && browser_count == 0)
    throw ConfigError("robot entries need at least one browser");
  if (days < 1) throw ConfigError("days must be positive");
  if (revisit_mean < 0.0 || revisit_gap_days <= 0.0)
    throw ConfigError("invalid revisit process");
  if (volatility_sd < 0.0) throw ConfigError("volatility_sd must be >= 0");
  CheckProbability(oscillation_probability, "oscillation_probability");
  CheckProbability(cookie_churn_probability, "cookie_churn_probability");
  CheckProbability(twin_fraction, "twin_fraction");
  CheckProbability(robot_fraction, "robot_fraction");
  CheckProbability(duplicate_fraction, "duplicate_fraction");
  CheckProbability(out_of_window_fraction, "out_of_window_fraction");
  CheckProbability(cookie_disabled_fraction, "cookie_disabled_fraction");
  CheckProbability(time_outlier_fraction, "time_outlier_fraction");

  double spike_total = 0.0;
  for (const auto& spike : spikes) {
    if (spike.day < 0 || spike.day >= days)
      throw ConfigError("arrival spike outside the generated days");
    CheckProbability(spike.weight, "spike weight");
    spike_total += spike.weight;
  }
  if (spike_total > 1.0) throw ConfigError("spike weights exceed 1");

  if (attributes.empty()) throw ConfigError("no attributes configured");
  std::set<AttributeRole> roles;
  for (const auto& a : attributes) {
    CheckProbability(a.change_probability, a.name + " change_probability");
    CheckProbability(a.error_rate, a.name + " error_rate");
    if (a.role != AttributeRole::kPlain && !roles.insert(a.role).second)
      throw ConfigError("role " + std::string(RoleName(a.role)) +
                        " assigned twice");
    if (a.cardinality < 1 && a.values.empty())
      throw ConfigError(a.name + " needs at least one value");
    if (!a.values.empty() && a.cardinality != a.values.size())
      throw ConfigError(a.name + ": cardinality differs from values");
    if (!a.weights.empty() && a.weights.size() != a.cardinality)
      throw ConfigError(a.name + ": weights differ from cardinality");
    for (double w : a.weights) {
      if (!(w >= 0.0)) throw ConfigError(a.name + ": negative weight");
    }
    if (a.role == AttributeRole::kUserAgent &&
        a.kind != AttributeKind::kTextual)
      throw ConfigError("the user agent attribute must be textual");
  }
  if (robot_fraction > 0.0 && !roles.count(AttributeRole::kUserAgent))
    throw ConfigError("robot entries need a user agent attribute");
  if (cookie_disabled_fraction > 0.0 && !roles.count(AttributeRole::kCookie))
    throw ConfigError("cookie_disabled_fraction needs a cookie attribute");

  if (classes.empty()) throw ConfigError("no browser classes configured");
  double class_total = 0.0;
  for (const auto& c : classes) {
    if (!(c.weight >= 0.0)) throw ConfigError("negative class weight");
    if (c.device != "desktop" && c.device != "mobile" && c.device != "tablet")
      throw ConfigError("unknown device " + c.device);
    class_total += c.weight;
  }
  if (!(class_total > 0.0)) throw ConfigError("class weights sum to 0");

  std::set<std::string> grouped;
  for (const auto& g : groups) {
    CheckProbability(g.block_change_probability,
                     g.name + " block_change_probability");
    if (g.profiles < 1) throw ConfigError(g.name + " needs a profile");
    if (g.class_values + g.shared_values < 1)
      throw ConfigError(g.name + " needs values");
    for (const auto& member : g.members) {
      const AttributeSpec* spec = FindAttribute(member);
      if (!spec) throw ConfigError("group member " + member + " is unknown");
      if (spec->role != AttributeRole::kPlain)
        throw ConfigError("group member " + member + " has a special role");
      if (!grouped.insert(member).second)
        throw ConfigError(member + " belongs to two groups");
    }
  }
  MakeSchema();
}

Schema GeneratorConfig::MakeSchema() const {
  std::vector<AttributeDescriptor> descriptors;
  descriptors.reserve(attributes.size());
  for (const auto& a : attributes)
    descriptors.push_back({a.name, a.kind, a.dynamic, std::nullopt, a.client_side});
  return Schema(std::move(descriptors));
}

Json GeneratorConfigToJson(const GeneratorConfig& config) { return config; }

GeneratorConfig GeneratorConfigFromJson(const Json& json) {
  GeneratorConfig config;
  try {
    config = json.get<GeneratorConfig>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("invalid generator config: ") + e.what());
  }
  config.Validate();
  return config;
}

GeneratorConfig StandardConfig(size_t browser_count, std::uint64_t seed) {
  GeneratorConfig config;
  config.seed = seed;
  config.browser_count = browser_count;
  config.revisit_mean = 3.0;
  config.revisit_gap_days = 6.0;
  config.volatility_sd = 0.1;
  config.oscillation_probability = 0.02;
  config.cookie_churn_probability = 0.01;
  config.twin_fraction = 0.005;
  config.robot_fraction = 0.002;
  config.duplicate_fraction = 0.001;
  config.out_of_window_fraction = 0.001;
  config.cookie_disabled_fraction = 0.002;
  config.spikes = {{20, 0.05}, {95, 0.08}};

  config.classes = {{"desktop", 0.85, "desktop", 24},
                    {"mobile", 0.095, "mobile", 24},
                    {"fleet", 0.055, "desktop", 1}};

  const AttributeKind kinds[] = {AttributeKind::kTextual,
                                 AttributeKind::kNumeric, AttributeKind::kSet,
                                 AttributeKind::kCategorical};
  const char* group_names[] = {"navigator", "screen", "fonts", "webgl",
                               "codecs",    "css",    "media", "window"};
  for (size_t g = 0; g < 8; ++g) {
    GroupSpec group;
    group.name = group_names[g];
    group.block_change_probability = 0.003;
    for (size_t i = 0; i < 30; ++i) {
      AttributeSpec a;
      a.name = group.name + "." + (i < 10 ? "0" : "") + std::to_string(i);
      a.kind = kinds[(g + i) % 4];
      a.text_template = group.name + " " + std::to_string(i) + " build {}";
      a.numeric_min = 0.0;
      a.numeric_max = 4096.0;
      a.change_probability = 0.05;
      a.time_ms = 2.0 + static_cast<double>(i % 7);
      group.members.push_back(a.name);
      config.attributes.push_back(std::move(a));
    }
    config.groups.push_back(std::move(group));
  }

  Rng rng(7);
  auto independent = [&](std::string name, AttributeKind kind,
                         double change) -> AttributeSpec& {
    AttributeSpec a;
    a.name = std::move(name);
    a.kind = kind;
    a.cardinality = 2 + UniformBelow(rng, 48);
    a.zipf = 1.2;
    a.text_template = a.name + " {}";
    a.change_probability = change;
    config.attributes.push_back(std::move(a));
    return config.attributes.back();
  };
  using K = AttributeKind;
  auto& ua = independent("userAgent", K::kTextual, 0.15);
  ua.role = AttributeRole::kUserAgent;
  ua.cardinality = 40;
  auto& cookie = independent("cookieEnabled", K::kCategorical, 0.0);
  cookie.role = AttributeRole::kCookie;
  cookie.values = {"true"};
  cookie.cardinality = 1;
  independent("timezone", K::kCategorical, 0.01);
  auto& language = independent("language", K::kTextual, 0.01);
  language.values = {"fr",    "en-US", "en", "de", "es",
                     "it",    "nl",    "pt-BR", "ru", "ja"};
  language.cardinality = language.values.size();
  independent("platform", K::kCategorical, 0.01);
  independent("doNotTrack", K::kCategorical, 0.02).error_rate = 0.05;
  independent("hardwareConcurrency", K::kNumeric, 0.01).numeric_max = 64.0;
  independent("deviceMemory", K::kNumeric, 0.01).numeric_max = 32.0;
  independent("colorDepth", K::kNumeric, 0.01).numeric_max = 48.0;
  independent("plugins", K::kSet, 0.05);
  independent("mimeTypes", K::kSet, 0.05);
  for (const char* name : {"canvas", "canvasJpeg", "webglCanvas",
                           "audioSimple", "audioAdvanced"}) {
    auto& a = independent(name, K::kCategorical, 0.08);
    a.dynamic = true;
    a.time_ms = 120.0;
    a.error_rate = 0.01;
  }
  for (const char* name : {"acceptLanguage", "acceptHeader"})
    independent(name, K::kTextual, 0.02).client_side = false;
  independent("acceptEncoding", K::kCategorical, 0.01).client_side = false;
  independent("maxTouchPoints", K::kNumeric, 0.01).numeric_max = 10.0;
  independent("batteryLevel", K::kNumeric, 0.5).numeric_max = 1.0;
  independent("storageId", K::kCategorical, 0.0);
  return config;
}

}  // namespace fpkit
