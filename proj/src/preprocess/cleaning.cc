#include "fpkit/preprocess/cleaning.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <tuple>

#include "fpkit/error.h"
#include "fpkit/util/strings.h"

namespace fpkit {

RobotList RobotList::Default() {
  RobotList robots;
  robots.keywords = {"googlebot", "evaliant",           "bot.html",
                     "voilabot",  "google web preview", "spider",
                     "bingpreview"};
  robots.exact_values = {
      "mozilla/4.0 (compatible; msie 7.0; windows nt 6.1; trident/7.0; "
      "slcc2; .net clr 2.0.50727; .net clr 3.5.30729; .net clr 3.0.30729; "
      "media center pc 6.0; .net4.0c; .net4.0e)",
      "mozilla/5.0 (x11; linux x86_64) applewebkit/537.36 (khtml, like "
      "gecko) chrome/52.0.2743.116 safari/537.36",
      "mozilla/5.0 (windows nt 6.3; rv:36.0) gecko/20100101 firefox/36.0",
      "mozilla/5.0 (macintosh; intel mac os x 10.10; rv:38.0) "
      "gecko/20100101 firefox/38.0",
  };
  return robots;
}

RobotList RobotList::Parse(std::istream& in) {
  RobotList robots;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '=')
      robots.exact_values.push_back(ToLower(line.substr(1)));
    else
      robots.keywords.push_back(ToLower(line));
  }
  return robots;
}

RobotList RobotList::ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open robot list " + path);
  return Parse(in);
}

bool IsRobot(std::string_view user_agent, const RobotList& robots) {
  std::string ua = ToLower(user_agent);
  for (const auto& exact : robots.exact_values)
    if (ua == exact) return true;
  for (const auto& keyword : robots.keywords)
    if (ua.find(keyword) != std::string::npos) return true;
  return false;
}

Json CleaningReport::ToJson() const {
  return Json{{"input_entries", input_entries},
              {"output_entries", output_entries},
              {"rejected_wrong_field_count", rejected_wrong_field_count},
              {"rejected_robots", rejected_robots},
              {"merged_exact_duplicates", merged_exact_duplicates},
              {"rejected_cookie_disabled", rejected_cookie_disabled},
              {"rejected_out_of_window", rejected_out_of_window}};
}

CleaningResult Clean(Dataset raw, const CleaningOptions& options) {
  if (options.window.start_ms > options.window.end_ms)
    throw ArgumentError("cleaning window start is after its end");

  CleaningReport report;
  report.rejected_wrong_field_count = options.malformed_records;
  report.input_entries = raw.size() + options.malformed_records;

  Schema schema = raw.schema();
  auto ua_index = schema.IndexOf(options.user_agent_attribute);
  auto cookie_index = schema.IndexOf(options.cookie_attribute);
  std::vector<std::string> provenance = std::move(raw).TakeProvenance();
  std::vector<Entry> entries = std::move(raw).TakeEntries();

  std::set<std::tuple<std::string, std::int64_t, FingerprintHash>> seen;
  std::vector<Entry> kept;
  kept.reserve(entries.size());
  for (auto& e : entries) {
    if (ua_index) {
      AttributeValue ua = e.fingerprint[*ua_index];
      if (ua.type() == ValueType::kText && IsRobot(ua.text(), options.robots)) {
        ++report.rejected_robots;
        continue;
      }
    }
    if (!seen.emplace(e.uid, e.ts_ms, e.hash).second) {
      ++report.merged_exact_duplicates;
      continue;
    }
    if (cookie_index) {
      AttributeValue cookie = e.fingerprint[*cookie_index];
      if (!(cookie.type() == ValueType::kText && cookie.text() == "true")) {
        ++report.rejected_cookie_disabled;
        continue;
      }
    }
    if (!options.window.Contains(e.ts_ms)) {
      ++report.rejected_out_of_window;
      continue;
    }
    kept.push_back(std::move(e));
  }
  seen.clear();
  report.output_entries = kept.size();
  provenance.push_back("clean");
  return {Dataset(std::move(schema), std::move(kept), std::move(provenance),
                  Dataset::Hashes::kTrusted),
          report};
}

}  // namespace fpkit
