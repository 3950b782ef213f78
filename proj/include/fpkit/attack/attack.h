#ifndef FPKIT_ATTACK_ATTACK_H_
#define FPKIT_ATTACK_ATTACK_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "fpkit/model/dataset.h"
#include "fpkit/model/io.h"
#include "fpkit/verify/matching.h"

namespace fpkit {

enum class AttackStrategy { kBruteForce, kDictionary };

std::string_view StrategyName(AttackStrategy strategy);
// Accepts "brute" and "dict" as well as the full names.
AttackStrategy ParseStrategy(std::string_view name);

struct AttackPolicy {
  AttackStrategy strategy = AttackStrategy::kBruteForce;
  // Submissions allowed per account before lockout.
  size_t attempts = 1;
  std::uint64_t seed = 0;
  // Brute force only: submit the first candidates of the domain in
  // mixed-radix order instead of random draws.
  bool exhaustive = false;

  // Throws ArgumentError when attempts is 0.
  void Validate() const;
};

// Candidate values of every attribute.
struct ValueDomain {
  std::vector<std::vector<AttributeValue>> values;

  // Number of fingerprints in the domain, saturating at UINT64_MAX.
  std::uint64_t Size() const;
  // The |index|-th fingerprint in mixed-radix order, attribute 0 varying
  // slowest.
  Fingerprint At(std::uint64_t index) const;
};

// Distinct values seen for each attribute, in value order.
ValueDomain DomainFromDataset(const Dataset& ds);

// Fingerprints with their probabilities.
struct FingerprintDistribution {
  std::vector<std::pair<Fingerprint, double>> items;

  // Empirical frequencies over the dataset entries.
  static FingerprintDistribution FromDataset(const Dataset& ds);
  // The |k| most probable fingerprints, ties broken by hash.
  std::vector<Fingerprint> Top(size_t k) const;
  double TopMass(size_t k) const;
};

// Latest fingerprint of each browser.
std::vector<Fingerprint> LatestFingerprints(const Dataset& ds);

struct AttackReport {
  AttackStrategy strategy = AttackStrategy::kBruteForce;
  size_t attempts = 0;
  size_t targets = 0;
  size_t impersonated = 0;
  std::vector<bool> per_target;

  double Rate() const {
    return targets ? static_cast<double>(impersonated) / static_cast<double>(targets)
                   : 0.0;
  }
  Json ToJson() const;
};

// Each target faces up to |attempts| candidate fingerprints: uniform
// independent draws per attribute (sub-seeded per target) or the first
// candidates of the domain in exhaustive mode.
AttackReport BruteForce(std::span<const Fingerprint> targets,
                        const ValueDomain& domain, const AttackPolicy& policy,
                        const MatchingConfig& verifier, VerificationMode mode);

// Every target faces the |attempts| most probable fingerprints.
AttackReport DictionaryAttack(std::span<const Fingerprint> targets,
                              const FingerprintDistribution& distribution,
                              const AttackPolicy& policy,
                              const MatchingConfig& verifier,
                              VerificationMode mode);

}  // namespace fpkit

#endif  // FPKIT_ATTACK_ATTACK_H_
