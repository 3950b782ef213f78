#ifndef FPKIT_SYNTH_POPULATION_H_
#define FPKIT_SYNTH_POPULATION_H_

#include <cstdint>
#include <vector>

#include "fpkit/model/fingerprint.h"
#include "fpkit/synth/config.h"
#include "fpkit/util/random.h"

namespace fpkit {

// Sampling over indices 0..n-1 by inverse CDF.
class Categorical {
 public:
  Categorical() = default;
  // Weights need not be normalized; at least one must be positive.
  explicit Categorical(const std::vector<double>& weights);

  size_t size() const { return cdf_.size(); }
  double Probability(size_t i) const;
  size_t Sample(Rng& rng) const;
  // Any index but |current|, unless |current| carries all the mass.
  size_t SampleExcluding(Rng& rng, size_t current) const;
  // Σ p_i^2, the chance that two draws coincide.
  double Collision() const;

 private:
  std::vector<double> cdf_;
};

// Standard normal deviate from two uniforms (Box-Muller).
double StandardNormal(Rng& rng);

// The browser population described by a generator config: per-class
// profile tables for each correlation group and value distributions for
// the independent attributes. Built deterministically from the config seed.
class Population {
 public:
  // Value index reserved for the per-browser unique identifier.
  static constexpr std::uint32_t kUniqueIndex = 0xFFFFFFFFu;

  // |render| builds the interned value tables needed by Render.
  explicit Population(GeneratorConfig config, bool render = true);

  const GeneratorConfig& config() const { return config_; }
  const Schema& schema() const { return schema_; }
  size_t attribute_count() const { return config_.attributes.size(); }

  struct Browser {
    size_t class_index = 0;
    std::vector<std::uint32_t> values;
    std::vector<std::uint32_t> profiles;
    double volatility = 1.0;
    AttributeValue unique;
  };

  Browser SampleBrowser(Rng& rng, std::uint64_t browser_index) const;
  // One revisit: block changes, then per-attribute redraws. Returns the
  // number of attributes whose value index changed.
  size_t Evolve(Browser& browser, Rng& rng) const;
  Fingerprint Render(const Browser& browser) const;

  // Index of the flag value of an attribute in its value table.
  std::uint32_t FlagIndex(size_t attribute) const;

  struct Moments {
    double mean = 0.0;
    double sd = 0.0;
  };
  // Identical-attribute count between fingerprints of two independently
  // sampled browsers, computed exactly from the tables.
  Moments DifferentBrowserMoments() const;

 private:
  struct GroupClassTable {
    Categorical profile_weights;
    // profiles x members value indices.
    std::vector<std::vector<std::uint32_t>> profiles;
    // Per member: distribution used to redraw a single value.
    std::vector<Categorical> pools;
  };
  struct GroupTable {
    std::vector<size_t> members;
    std::vector<GroupClassTable> by_class;
    double block_change = 0.0;
  };

  void BuildGroups(Rng& rng);
  void BuildValues();
  std::uint32_t DrawIndependent(size_t attribute, size_t class_index,
                                Rng& rng) const;
  std::uint32_t RedrawIndependent(size_t attribute, size_t class_index,
                                  std::uint32_t current, Rng& rng) const;
  AttributeValue RenderIndex(size_t attribute, std::uint32_t index) const;

  GeneratorConfig config_;
  Schema schema_;
  Categorical class_weights_;
  std::vector<size_t> device_of_class_;
  std::vector<GroupTable> groups_;
  // Group of each attribute and its position in it; -1 when independent.
  std::vector<int> group_of_;
  std::vector<size_t> member_slot_;
  std::vector<Categorical> independent_;
  // Number of value indices before the flag slot.
  std::vector<std::uint32_t> cardinality_;
  std::vector<ErrorFlag> flag_of_;
  std::vector<std::vector<AttributeValue>> values_;
};

}  // namespace fpkit

#endif  // FPKIT_SYNTH_POPULATION_H_
