#include "fpkit/synth/population.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fpkit/error.h"
#include "fpkit/util/digest.h"

namespace fpkit {
namespace {

constexpr std::uint64_t kModelStream = 0x6d6f64656cULL;
constexpr size_t kDeviceCount = 3;

size_t DeviceIndex(const std::string& device) {
  if (device == "mobile") return 1;
  if (device == "tablet") return 2;
  return 0;
}

std::string UserAgentFor(size_t device, std::uint32_t k) {
  std::string version = std::to_string(60 + k % 60) + ".0." +
                        std::to_string(3000 + (k * 37) % 1000) + "." +
                        std::to_string(k % 150);
  switch (device) {
    case 1:
      return "Mozilla/5.0 (Linux; Android 10; SM-G960F) AppleWebKit/537.36 "
             "(KHTML, like Gecko) Chrome/" + version +
             " Mobile Safari/537.36";
    case 2:
      return "Mozilla/5.0 (iPad; CPU OS 13_3 like Mac OS X) "
             "AppleWebKit/605.1.15 (KHTML, like Gecko) Version/" + version +
             " Safari/604.1";
    default:
      return "Mozilla/5.0 (Windows NT 10.0; Win64; x64) AppleWebKit/537.36 "
             "(KHTML, like Gecko) Chrome/" + version + " Safari/537.36";
  }
}

std::string ReplaceIndex(std::string text, std::uint32_t k) {
  auto pos = text.find("{}");
  if (pos == std::string::npos) return text + " " + std::to_string(k);
  return text.replace(pos, 2, std::to_string(k));
}

std::string Hex64(std::uint64_t x) {
  std::uint8_t bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<std::uint8_t>(x >> (56 - 8 * i));
  return HexEncode(bytes);
}

std::uint64_t NameSeed(const std::string& name) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : name) h = (h ^ c) * 1099511628211ULL;
  return h;
}

}  // namespace

Categorical::Categorical(const std::vector<double>& weights) {
  double total = 0.0;
  cdf_.reserve(weights.size());
  for (double w : weights) {
    total += std::max(w, 0.0);
    cdf_.push_back(total);
  }
  if (!(total > 0.0)) throw ConfigError("distribution without positive weight");
  for (auto& c : cdf_) c /= total;
  cdf_.back() = 1.0;
}

double Categorical::Probability(size_t i) const {
  if (i >= cdf_.size()) return 0.0;
  return cdf_[i] - (i == 0 ? 0.0 : cdf_[i - 1]);
}

size_t Categorical::Sample(Rng& rng) const {
  double u = UniformUnit(rng);
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return std::min(static_cast<size_t>(it - cdf_.begin()), cdf_.size() - 1);
}

size_t Categorical::SampleExcluding(Rng& rng, size_t current) const {
  if (current >= cdf_.size()) return Sample(rng);
  if (Probability(current) >= 1.0 - 1e-12) return current;
  for (;;) {
    size_t i = Sample(rng);
    if (i != current) return i;
  }
}

double Categorical::Collision() const {
  double sum = 0.0;
  for (size_t i = 0; i < cdf_.size(); ++i) sum += Probability(i) * Probability(i);
  return sum;
}

double StandardNormal(Rng& rng) {
  double u1 = 1.0 - UniformUnit(rng);
  double u2 = UniformUnit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Population::Population(GeneratorConfig config, bool render)
    : config_(std::move(config)) {
  config_.Validate();
  schema_ = config_.MakeSchema();
  size_t m = config_.attributes.size();

  std::vector<double> class_weights;
  for (const auto& c : config_.classes) {
    class_weights.push_back(c.weight);
    device_of_class_.push_back(DeviceIndex(c.device));
  }
  class_weights_ = Categorical(class_weights);

  group_of_.assign(m, -1);
  member_slot_.assign(m, 0);
  cardinality_.assign(m, 0);
  flag_of_.assign(m, ErrorFlag::kUnsupported);
  independent_.resize(m);

  for (size_t a = 0; a < m; ++a) {
    const auto& spec = config_.attributes[a];
    flag_of_[a] = spec.dynamic ? ErrorFlag::kTimeout : ErrorFlag::kUnsupported;
    size_t card = spec.values.empty() ? spec.cardinality : spec.values.size();
    if (spec.role == AttributeRole::kUniqueId) card = 0;
    if (card > 0) {
      independent_[a] = Categorical(
          spec.weights.empty() ? ZipfWeights(card, spec.zipf) : spec.weights);
    }
    cardinality_[a] = static_cast<std::uint32_t>(
        spec.role == AttributeRole::kUserAgent ? card * kDeviceCount : card);
  }

  Rng rng(MixSeed(config_.seed, kModelStream));
  BuildGroups(rng);
  if (render) BuildValues();
}

void Population::BuildGroups(Rng& rng) {
  size_t class_count = config_.classes.size();
  for (size_t g = 0; g < config_.groups.size(); ++g) {
    const auto& spec = config_.groups[g];
    GroupTable table;
    table.block_change = spec.block_change_probability;
    for (size_t i = 0; i < spec.members.size(); ++i) {
      size_t a = *schema_.IndexOf(spec.members[i]);
      table.members.push_back(a);
      group_of_[a] = static_cast<int>(g);
      member_slot_[a] = i;
      cardinality_[a] = static_cast<std::uint32_t>(
          spec.shared_values + class_count * spec.class_values);
    }
    size_t pool_size = spec.shared_values + spec.class_values;
    auto value_weights = ZipfWeights(pool_size, spec.value_zipf);
    for (size_t c = 0; c < class_count; ++c) {
      GroupClassTable ct;
      size_t profile_count = config_.classes[c].profiles
                                 ? config_.classes[c].profiles
                                 : spec.profiles;
      ct.profile_weights = Categorical(ZipfWeights(profile_count, spec.profile_zipf));
      ct.profiles.assign(profile_count,
                         std::vector<std::uint32_t>(spec.members.size()));
      for (size_t i = 0; i < spec.members.size(); ++i) {
        std::vector<std::uint32_t> items;
        for (size_t s = 0; s < spec.shared_values; ++s)
          items.push_back(static_cast<std::uint32_t>(s));
        for (size_t v = 0; v < spec.class_values; ++v) {
          items.push_back(static_cast<std::uint32_t>(
              spec.shared_values + c * spec.class_values + v));
        }
        for (size_t k = items.size(); k > 1; --k)
          std::swap(items[k - 1], items[UniformBelow(rng, k)]);
        std::vector<double> weights(cardinality_[table.members[i]], 0.0);
        for (size_t k = 0; k < items.size(); ++k) weights[items[k]] = value_weights[k];
        Categorical pool(weights);
        for (size_t p = 0; p < profile_count; ++p)
          ct.profiles[p][i] = static_cast<std::uint32_t>(pool.Sample(rng));
        ct.pools.push_back(std::move(pool));
      }
      table.by_class.push_back(std::move(ct));
    }
    groups_.push_back(std::move(table));
  }
}

AttributeValue Population::RenderIndex(size_t a, std::uint32_t k) const {
  const auto& spec = config_.attributes[a];
  if (k == cardinality_[a]) return AttributeValue::Flag(flag_of_[a]);
  if (spec.role == AttributeRole::kUserAgent) {
    std::uint32_t per_device = cardinality_[a] / kDeviceCount;
    if (!spec.values.empty()) return AttributeValue::Text(spec.values[k % per_device]);
    return AttributeValue::Text(UserAgentFor(k / per_device, k % per_device));
  }
  if (!spec.values.empty()) {
    if (spec.kind == AttributeKind::kNumeric) {
      try {
        return AttributeValue::Number(std::stod(spec.values[k]));
      } catch (const std::exception&) {
        throw ConfigError(spec.name + ": non-numeric value " + spec.values[k]);
      }
    }
    if (spec.kind == AttributeKind::kSet)
      return AttributeValue::Set({spec.values[k]});
    return AttributeValue::Text(spec.values[k]);
  }
  switch (spec.kind) {
    case AttributeKind::kNumeric: {
      double step = cardinality_[a] > 1
                        ? (spec.numeric_max - spec.numeric_min) /
                              static_cast<double>(cardinality_[a] - 1)
                        : 0.0;
      return AttributeValue::Number(spec.numeric_min + step * k);
    }
    case AttributeKind::kSet: {
      std::vector<std::string> items;
      for (std::uint32_t bit = 0; (k >> bit) != 0; ++bit) {
        if ((k >> bit) & 1u) items.push_back(spec.name + "-item" + std::to_string(bit));
      }
      return AttributeValue::Set(std::move(items));
    }
    case AttributeKind::kCategorical:
      if (spec.dynamic)
        return AttributeValue::Text(Hex64(MixSeed(NameSeed(spec.name), k)));
      [[fallthrough]];
    case AttributeKind::kTextual:
      return AttributeValue::Text(
          ReplaceIndex(spec.text_template.empty() ? spec.name : spec.text_template, k));
  }
  return AttributeValue();
}

void Population::BuildValues() {
  values_.resize(attribute_count());
  for (size_t a = 0; a < attribute_count(); ++a) {
    auto& table = values_[a];
    table.reserve(cardinality_[a] + 1);
    for (std::uint32_t k = 0; k <= cardinality_[a]; ++k)
      table.push_back(RenderIndex(a, k));
  }
}

std::uint32_t Population::FlagIndex(size_t attribute) const {
  return cardinality_[attribute];
}

std::uint32_t Population::DrawIndependent(size_t a, size_t class_index,
                                          Rng& rng) const {
  const auto& spec = config_.attributes[a];
  if (spec.role == AttributeRole::kUniqueId) return kUniqueIndex;
  auto k = static_cast<std::uint32_t>(independent_[a].Sample(rng));
  if (spec.role == AttributeRole::kUserAgent) {
    k += static_cast<std::uint32_t>(device_of_class_[class_index] *
                                    independent_[a].size());
  }
  return k;
}

std::uint32_t Population::RedrawIndependent(size_t a, size_t class_index,
                                            std::uint32_t current,
                                            Rng& rng) const {
  const auto& spec = config_.attributes[a];
  if (spec.role == AttributeRole::kUniqueId) return current;
  if (spec.role != AttributeRole::kUserAgent)
    return static_cast<std::uint32_t>(independent_[a].SampleExcluding(rng, current));
  auto per_device = static_cast<std::uint32_t>(independent_[a].size());
  std::uint32_t offset =
      static_cast<std::uint32_t>(device_of_class_[class_index]) * per_device;
  size_t local = current >= offset && current < offset + per_device
                     ? current - offset
                     : independent_[a].size();
  return offset + static_cast<std::uint32_t>(independent_[a].SampleExcluding(rng, local));
}

Population::Browser Population::SampleBrowser(Rng& rng,
                                              std::uint64_t browser_index) const {
  Browser b;
  b.class_index = class_weights_.Sample(rng);
  if (config_.volatility_sd > 0.0) {
    double s2 = std::log1p(config_.volatility_sd * config_.volatility_sd);
    b.volatility = std::exp(-s2 / 2.0 + std::sqrt(s2) * StandardNormal(rng));
  }
  b.values.assign(attribute_count(), 0);
  b.profiles.assign(groups_.size(), 0);
  for (size_t g = 0; g < groups_.size(); ++g) {
    const auto& ct = groups_[g].by_class[b.class_index];
    auto p = static_cast<std::uint32_t>(ct.profile_weights.Sample(rng));
    b.profiles[g] = p;
    for (size_t i = 0; i < groups_[g].members.size(); ++i)
      b.values[groups_[g].members[i]] = ct.profiles[p][i];
  }
  for (size_t a = 0; a < attribute_count(); ++a) {
    if (group_of_[a] >= 0) continue;
    const auto& spec = config_.attributes[a];
    if (spec.error_rate > 0.0 && Bernoulli(rng, spec.error_rate)) {
      b.values[a] = FlagIndex(a);
    } else {
      b.values[a] = DrawIndependent(a, b.class_index, rng);
    }
    if (spec.role == AttributeRole::kUniqueId) {
      b.unique = AttributeValue::Text(
          Hex64(MixSeed(config_.seed ^ kModelStream, browser_index)));
    }
  }
  return b;
}

size_t Population::Evolve(Browser& b, Rng& rng) const {
  std::vector<std::uint32_t> before = b.values;
  for (size_t g = 0; g < groups_.size(); ++g) {
    const auto& table = groups_[g];
    if (table.block_change <= 0.0 || !Bernoulli(rng, table.block_change)) continue;
    const auto& ct = table.by_class[b.class_index];
    auto p = static_cast<std::uint32_t>(ct.profile_weights.Sample(rng));
    b.profiles[g] = p;
    for (size_t i = 0; i < table.members.size(); ++i)
      b.values[table.members[i]] = ct.profiles[p][i];
  }
  for (size_t a = 0; a < attribute_count(); ++a) {
    const auto& spec = config_.attributes[a];
    if (spec.role == AttributeRole::kUniqueId ||
        spec.role == AttributeRole::kCookie)
      continue;
    double p = std::min(1.0, spec.change_probability * b.volatility);
    if (UniformUnit(rng) >= p) continue;
    if (group_of_[a] >= 0) {
      const auto& pool = groups_[static_cast<size_t>(group_of_[a])]
                             .by_class[b.class_index]
                             .pools[member_slot_[a]];
      b.values[a] = static_cast<std::uint32_t>(pool.SampleExcluding(rng, b.values[a]));
    } else {
      b.values[a] = RedrawIndependent(a, b.class_index, b.values[a], rng);
    }
  }
  size_t changed = 0;
  for (size_t a = 0; a < before.size(); ++a) changed += before[a] != b.values[a];
  return changed;
}

Fingerprint Population::Render(const Browser& b) const {
  if (values_.empty()) throw ConfigError("population built without values");
  Fingerprint fp(attribute_count());
  for (size_t a = 0; a < fp.size(); ++a) {
    fp[a] = b.values[a] == kUniqueIndex ? b.unique : values_[a][b.values[a]];
  }
  return fp;
}

Population::Moments Population::DifferentBrowserMoments() const {
  size_t class_count = config_.classes.size();
  double total_weight = 0.0;
  for (const auto& c : config_.classes) total_weight += c.weight;

  double ex = 0.0;
  double ex2 = 0.0;
  for (size_t c = 0; c < class_count; ++c) {
    for (size_t d = 0; d < class_count; ++d) {
      double w = config_.classes[c].weight * config_.classes[d].weight /
                 (total_weight * total_weight);
      if (w == 0.0) continue;
      double mean = 0.0;
      double var = 0.0;
      for (size_t a = 0; a < attribute_count(); ++a) {
        if (group_of_[a] >= 0) continue;
        const auto& spec = config_.attributes[a];
        double q;
        if (spec.role == AttributeRole::kUniqueId) {
          q = 0.0;
        } else {
          double e = spec.error_rate;
          bool same_space = spec.role != AttributeRole::kUserAgent ||
                            device_of_class_[c] == device_of_class_[d];
          q = (1 - e) * (1 - e) * (same_space ? independent_[a].Collision() : 0.0) +
              e * e;
        }
        mean += q;
        var += q * (1 - q);
      }
      for (const auto& table : groups_) {
        const auto& gc = table.by_class[c];
        const auto& gd = table.by_class[d];
        double e1 = 0.0;
        double e2 = 0.0;
        for (size_t p = 0; p < gc.profiles.size(); ++p) {
          double wp = gc.profile_weights.Probability(p);
          for (size_t r = 0; r < gd.profiles.size(); ++r) {
            double wr = wp * gd.profile_weights.Probability(r);
            size_t matches = 0;
            for (size_t i = 0; i < table.members.size(); ++i)
              matches += gc.profiles[p][i] == gd.profiles[r][i];
            auto mm = static_cast<double>(matches);
            e1 += wr * mm;
            e2 += wr * mm * mm;
          }
        }
        mean += e1;
        var += e2 - e1 * e1;
      }
      ex += w * mean;
      ex2 += w * (var + mean * mean);
    }
  }
  return {ex, std::sqrt(std::max(0.0, ex2 - ex * ex))};
}

}  // namespace fpkit
