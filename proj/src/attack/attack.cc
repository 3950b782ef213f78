#include "fpkit/attack/attack.h"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "fpkit/error.h"
#include "fpkit/util/random.h"

namespace fpkit {

std::string_view StrategyName(AttackStrategy strategy) {
  return strategy == AttackStrategy::kBruteForce ? "brute_force" : "dictionary";
}

AttackStrategy ParseStrategy(std::string_view name) {
  if (name == "brute" || name == "brute_force") return AttackStrategy::kBruteForce;
  if (name == "dict" || name == "dictionary") return AttackStrategy::kDictionary;
  throw ArgumentError("unknown attack strategy: " + std::string(name));
}

void AttackPolicy::Validate() const {
  if (attempts < 1) throw ArgumentError("attempts must be at least 1");
}

std::uint64_t ValueDomain::Size() const {
  std::uint64_t size = 1;
  for (const auto& v : values) {
    if (v.empty()) return 0;
    if (size > std::numeric_limits<std::uint64_t>::max() / v.size())
      return std::numeric_limits<std::uint64_t>::max();
    size *= v.size();
  }
  return size;
}

Fingerprint ValueDomain::At(std::uint64_t index) const {
  Fingerprint fp(values.size());
  for (size_t a = values.size(); a-- > 0;) {
    fp[a] = values[a][index % values[a].size()];
    index /= values[a].size();
  }
  return fp;
}

ValueDomain DomainFromDataset(const Dataset& ds) {
  ValueDomain domain;
  domain.values.resize(ds.schema().size());
  for (size_t a = 0; a < domain.values.size(); ++a) {
    std::set<AttributeValue> seen;
    for (const auto& entry : ds.entries()) seen.insert(entry.fingerprint[a]);
    domain.values[a].assign(seen.begin(), seen.end());
  }
  return domain;
}

FingerprintDistribution FingerprintDistribution::FromDataset(const Dataset& ds) {
  std::map<FingerprintHash, std::pair<size_t, size_t>> counts;  // count, first
  for (size_t i = 0; i < ds.size(); ++i) {
    auto [it, inserted] = counts.try_emplace(ds[i].hash, 0, i);
    ++it->second.first;
  }
  FingerprintDistribution distribution;
  for (const auto& [hash, info] : counts) {
    distribution.items.emplace_back(
        ds[info.second].fingerprint,
        static_cast<double>(info.first) / static_cast<double>(ds.size()));
  }
  return distribution;
}

std::vector<Fingerprint> FingerprintDistribution::Top(size_t k) const {
  std::vector<size_t> index(items.size());
  for (size_t i = 0; i < items.size(); ++i) index[i] = i;
  std::vector<FingerprintHash> hashes;
  hashes.reserve(items.size());
  for (const auto& [fp, p] : items) hashes.push_back(HashFingerprint(fp));
  std::sort(index.begin(), index.end(), [&](size_t a, size_t b) {
    if (items[a].second != items[b].second) return items[a].second > items[b].second;
    return hashes[a] < hashes[b];
  });
  std::vector<Fingerprint> top;
  for (size_t i = 0; i < std::min(k, index.size()); ++i)
    top.push_back(items[index[i]].first);
  return top;
}

double FingerprintDistribution::TopMass(size_t k) const {
  std::vector<double> p;
  for (const auto& item : items) p.push_back(item.second);
  std::sort(p.begin(), p.end(), std::greater<>());
  double mass = 0.0;
  for (size_t i = 0; i < std::min(k, p.size()); ++i) mass += p[i];
  return mass;
}

std::vector<Fingerprint> LatestFingerprints(const Dataset& ds) {
  std::vector<Fingerprint> latest;
  for (const auto& [begin, end] : ds.BrowserRanges())
    latest.push_back(ds[end - 1].fingerprint);
  return latest;
}

Json AttackReport::ToJson() const {
  return {{"strategy", StrategyName(strategy)},
          {"attempts", attempts},
          {"targets", targets},
          {"impersonated", impersonated},
          {"rate", Rate()}};
}

AttackReport BruteForce(std::span<const Fingerprint> targets,
                        const ValueDomain& domain, const AttackPolicy& policy,
                        const MatchingConfig& verifier, VerificationMode mode) {
  policy.Validate();
  if (domain.values.size() != verifier.size())
    throw SchemaError("attack domain does not cover the schema");
  for (const auto& v : domain.values) {
    if (v.empty()) throw ArgumentError("attack domain has an empty attribute");
  }
  AttackReport report;
  report.strategy = AttackStrategy::kBruteForce;
  report.attempts = policy.attempts;
  report.targets = targets.size();

  std::vector<Fingerprint> enumerated;
  if (policy.exhaustive) {
    std::uint64_t count = std::min<std::uint64_t>(policy.attempts, domain.Size());
    for (std::uint64_t i = 0; i < count; ++i) enumerated.push_back(domain.At(i));
  }
  Fingerprint candidate(domain.values.size());
  for (size_t t = 0; t < targets.size(); ++t) {
    bool success = false;
    if (policy.exhaustive) {
      for (const auto& fp : enumerated) {
        if (Verdict(targets[t], fp, verifier, mode)) {
          success = true;
          break;
        }
      }
    } else {
      Rng rng(MixSeed(policy.seed, t));
      for (size_t k = 0; k < policy.attempts && !success; ++k) {
        for (size_t a = 0; a < candidate.size(); ++a)
          candidate[a] = domain.values[a][UniformBelow(rng, domain.values[a].size())];
        success = Verdict(targets[t], candidate, verifier, mode);
      }
    }
    report.per_target.push_back(success);
    report.impersonated += success;
  }
  return report;
}

AttackReport DictionaryAttack(std::span<const Fingerprint> targets,
                              const FingerprintDistribution& distribution,
                              const AttackPolicy& policy,
                              const MatchingConfig& verifier,
                              VerificationMode mode) {
  policy.Validate();
  AttackReport report;
  report.strategy = AttackStrategy::kDictionary;
  report.attempts = policy.attempts;
  report.targets = targets.size();
  auto candidates = distribution.Top(policy.attempts);
  for (const auto& target : targets) {
    bool success = std::any_of(candidates.begin(), candidates.end(),
                               [&](const Fingerprint& fp) {
                                 return Verdict(target, fp, verifier, mode);
                               });
    report.per_target.push_back(success);
    report.impersonated += success;
  }
  return report;
}

}  // namespace fpkit
