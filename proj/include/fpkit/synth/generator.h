#ifndef FPKIT_SYNTH_GENERATOR_H_
#define FPKIT_SYNTH_GENERATOR_H_

#include <cstddef>

#include "fpkit/model/dataset.h"
#include "fpkit/model/io.h"
#include "fpkit/synth/config.h"

namespace fpkit {

struct GenerationReport {
  size_t browsers = 0;
  size_t twins = 0;
  size_t entries = 0;
  size_t robot_entries = 0;
  size_t duplicate_entries = 0;
  size_t out_of_window_entries = 0;
  size_t cookie_disabled_entries = 0;
  size_t churned_uids = 0;
  size_t oscillations = 0;

  Json ToJson() const;
};

// Raw dataset drawn from |config|. Each browser uses its own sub-seed, so
// the output depends only on the config. Throws ConfigError on an invalid
// config.
Dataset Generate(const GeneratorConfig& config,
                 GenerationReport* report = nullptr);

// User agent strings given to robot entries.
const std::vector<std::string>& RobotUserAgents();

}  // namespace fpkit

#endif  // FPKIT_SYNTH_GENERATOR_H_
