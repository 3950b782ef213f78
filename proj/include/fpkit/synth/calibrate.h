#ifndef FPKIT_SYNTH_CALIBRATE_H_
#define FPKIT_SYNTH_CALIBRATE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "fpkit/model/io.h"
#include "fpkit/synth/config.h"
#include "fpkit/synth/population.h"

namespace fpkit {

struct CalibrationTargets {
  std::optional<double> unicity;
  // Identical-attribute counts of consecutive fingerprints of one browser
  // and of fingerprints of two browsers.
  double mean_same = 248.64;
  double sd_same = 3.91;
  double mean_diff = 127.41;
  double sd_diff = 44.06;
  // Attribute name -> share of consecutive pairs keeping the value.
  std::map<std::string, double> sameness;

  static CalibrationTargets FromJson(const Json& json);
};

struct SameBrowserStats {
  size_t pairs = 0;
  double mean = 0.0;
  double sd = 0.0;
  // Per attribute share of pairs keeping the value.
  std::vector<double> sameness;
};

// One revisit of |browsers| sampled browsers; pairs without any change are
// dropped as deduplication would.
SameBrowserStats SimulateSameBrowser(const Population& population,
                                     size_t browsers, std::uint64_t seed);

// Identical-attribute counts measured on a generated and preprocessed
// dataset, over month comparison sets.
struct ClassStatistics {
  size_t same_pairs = 0;
  size_t different_pairs = 0;
  double mean_same = 0.0;
  double sd_same = 0.0;
  double mean_diff = 0.0;
  double sd_diff = 0.0;
};

ClassStatistics MeasureClassStatistics(GeneratorConfig config, size_t browsers,
                                       int months = 6);

struct CalibrationResult {
  GeneratorConfig config;
  // Statistics of the model itself, before evolution.
  Population::Moments different;
  SameBrowserStats same;
  // On data generated with the calibrated config and its seed.
  ClassStatistics measured;
  // Achieved minus target, by target name.
  std::map<std::string, double> residuals;

  Json ToJson() const;
};

// Adjusts class weights and the profile and value skews of the groups to
// the different-browsers moments, then change probabilities and the
// volatility to the same-browser moments. Different-browsers residuals are
// measured on generated data. Best effort: residuals report
// what could not be reached. Throws ConfigError on targets outside [0, n].
CalibrationResult Calibrate(const CalibrationTargets& targets,
                            GeneratorConfig base = StandardConfig());

}  // namespace fpkit

#endif  // FPKIT_SYNTH_CALIBRATE_H_
