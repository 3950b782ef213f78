#ifndef FPKIT_PREPROCESS_CLEANING_H_
#define FPKIT_PREPROCESS_CLEANING_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fpkit/model/dataset.h"
#include "fpkit/model/io.h"

namespace fpkit {

// Inclusive on both ends.
struct TimeWindow {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;

  bool Contains(std::int64_t ts_ms) const {
    return ts_ms >= start_ms && ts_ms <= end_ms;
  }
};

// Robot user agents: substring keywords and exact values, all lowercase.
struct RobotList {
  std::vector<std::string> keywords;
  std::vector<std::string> exact_values;

  // The blacklist compiled from the collection experiment.
  static RobotList Default();
  // One keyword per line; lines starting with '=' are exact values. Blank
  // lines and lines starting with '#' are skipped.
  static RobotList Parse(std::istream& in);
  static RobotList ReadFile(const std::string& path);
};

bool IsRobot(std::string_view user_agent, const RobotList& robots);

struct CleaningOptions {
  TimeWindow window;
  RobotList robots = RobotList::Default();
  // The robot filter and cookie filter are skipped when the schema lacks
  // the corresponding attribute.
  std::string user_agent_attribute = "userAgent";
  std::string cookie_attribute = "cookieEnabled";
  // Records already dropped by the loader for a wrong field count.
  size_t malformed_records = 0;
};

// input_entries = output_entries + rejected_robots + merged_exact_duplicates
//   + rejected_cookie_disabled + rejected_out_of_window
//   + rejected_wrong_field_count.
struct CleaningReport {
  size_t input_entries = 0;
  size_t output_entries = 0;
  size_t rejected_wrong_field_count = 0;
  size_t rejected_robots = 0;
  size_t merged_exact_duplicates = 0;
  size_t rejected_cookie_disabled = 0;
  size_t rejected_out_of_window = 0;

  Json ToJson() const;
};

struct CleaningResult {
  Dataset dataset;
  CleaningReport report;
};

// Drops robot entries, reduces exact copies (same uid, timestamp and
// fingerprint) to one, drops entries whose cookie attribute is not "true",
// and drops entries outside the window, in that order.
// Throws ArgumentError if the window is not well-ordered.
CleaningResult Clean(Dataset raw, const CleaningOptions& options);

}  // namespace fpkit

#endif  // FPKIT_PREPROCESS_CLEANING_H_
