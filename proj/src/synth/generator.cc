#include "fpkit/synth/generator.h"

#include <cmath>
#include <cstdio>

#include "fpkit/synth/population.h"
#include "fpkit/util/digest.h"
#include "fpkit/util/random.h"

namespace fpkit {
namespace {

constexpr std::uint64_t kTwinStream = 0x7477696eULL;

std::string BrowserUid(size_t index) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "b%08zu", index);
  return buffer;
}

std::string BrowserIp(size_t index) {
  return "10." + std::to_string((index >> 16) & 255) + "." +
         std::to_string((index >> 8) & 255) + "." + std::to_string(index & 255);
}

double Exponential(Rng& rng, double mean) {
  return -mean * std::log(1.0 - UniformUnit(rng));
}

class Emitter {
 public:
  Emitter(const GeneratorConfig& config, const Population& population,
          GenerationReport& report)
      : config_(config), population_(population), report_(report) {
    for (size_t a = 0; a < config.attributes.size(); ++a) {
      if (config.attributes[a].role == AttributeRole::kUserAgent) ua_ = a;
      if (config.attributes[a].role == AttributeRole::kCookie) cookie_ = a;
    }
    for (const auto& ua : RobotUserAgents())
      robot_values_.push_back(AttributeValue::Text(ua));
    cookie_off_ = AttributeValue::Text("false");
  }

  // One visit of a browser; entry-level noise is applied here.
  void Emit(const Population::Browser& browser, const std::string& uid,
            const std::string& ip_hash, std::int64_t ts, Rng& rng) {
    Entry entry;
    entry.fingerprint = population_.Render(browser);
    entry.uid = uid;
    entry.ts_ms = ts;
    entry.ip_hash = ip_hash;
    if (config_.robot_fraction > 0.0 && Bernoulli(rng, config_.robot_fraction)) {
      entry.fingerprint[ua_] = robot_values_[UniformBelow(rng, robot_values_.size())];
      ++report_.robot_entries;
    }
    if (config_.cookie_disabled_fraction > 0.0 &&
        Bernoulli(rng, config_.cookie_disabled_fraction)) {
      entry.fingerprint[cookie_] = cookie_off_;
      ++report_.cookie_disabled_entries;
    }
    if (config_.out_of_window_fraction > 0.0 &&
        Bernoulli(rng, config_.out_of_window_fraction)) {
      std::int64_t shift = 1 + static_cast<std::int64_t>(
                                   UniformBelow(rng, 30 * kMillisPerDay));
      entry.ts_ms = std::max<std::int64_t>(0, config_.start_ms - shift);
      ++report_.out_of_window_entries;
    }
    if (config_.collection_times) AddTimes(entry, rng);
    bool duplicate = config_.duplicate_fraction > 0.0 &&
                     Bernoulli(rng, config_.duplicate_fraction);
    if (duplicate) {
      entries_.push_back(entry);
      ++report_.duplicate_entries;
    }
    entries_.push_back(std::move(entry));
  }

  std::vector<Entry> Take() { return std::move(entries_); }

 private:
  void AddTimes(Entry& entry, Rng& rng) {
    std::int64_t longest = 0;
    for (const auto& spec : config_.attributes) {
      auto ms = static_cast<std::int64_t>(std::llround(Exponential(rng, spec.time_ms)));
      entry.times_ms[spec.name] = ms;
      longest = std::max(longest, ms);
    }
    std::int64_t total = longest + static_cast<std::int64_t>(UniformBelow(rng, 500));
    if (config_.time_outlier_fraction > 0.0 &&
        Bernoulli(rng, config_.time_outlier_fraction)) {
      total = 30'001 + static_cast<std::int64_t>(UniformBelow(rng, 270'000));
    }
    entry.total_ms = total;
  }

  const GeneratorConfig& config_;
  const Population& population_;
  GenerationReport& report_;
  size_t ua_ = 0;
  size_t cookie_ = 0;
  std::vector<AttributeValue> robot_values_;
  AttributeValue cookie_off_;
  std::vector<Entry> entries_;
};

struct Timeline {
  std::int64_t start;
  std::int64_t end;  // inclusive
  double continue_probability;
  double gap_ms;
};

// Visits after the first one, each followed by evolution of the browser.
void Revisit(const Population& population, const Timeline& timeline,
             Population::Browser& browser, std::string uid,
             const std::string& ip_hash, std::int64_t ts, Rng& rng,
             Emitter& emitter, GenerationReport& report) {
  const auto& config = population.config();
  std::optional<Population::Browser> previous;
  size_t churns = 0;
  const std::string base_uid = uid;
  while (Bernoulli(rng, timeline.continue_probability)) {
    ts += 1000 + static_cast<std::int64_t>(Exponential(rng, timeline.gap_ms));
    if (ts > timeline.end) break;
    if (config.cookie_churn_probability > 0.0 &&
        Bernoulli(rng, config.cookie_churn_probability)) {
      uid = base_uid + "-" + std::to_string(++churns);
      ++report.churned_uids;
    } else if (previous && config.oscillation_probability > 0.0 &&
               Bernoulli(rng, config.oscillation_probability)) {
      std::swap(*previous, browser);
      ++report.oscillations;
    } else {
      Population::Browser before = browser;
      if (population.Evolve(browser, rng) > 0) previous = std::move(before);
    }
    emitter.Emit(browser, uid, ip_hash, ts, rng);
  }
}

}  // namespace

Json GenerationReport::ToJson() const {
  return {{"browsers", browsers},
          {"twins", twins},
          {"entries", entries},
          {"robot_entries", robot_entries},
          {"duplicate_entries", duplicate_entries},
          {"out_of_window_entries", out_of_window_entries},
          {"cookie_disabled_entries", cookie_disabled_entries},
          {"churned_uids", churned_uids},
          {"oscillations", oscillations}};
}

const std::vector<std::string>& RobotUserAgents() {
  static const std::vector<std::string> agents = {
      "Mozilla/5.0 (compatible; Googlebot/2.1; +http://www.google.com/bot.html)",
      "Mozilla/5.0 (compatible; bingbot/2.0; +http://www.bing.com/bingbot.htm) "
      "BingPreview/1.0b",
      "Mozilla/5.0 (compatible; Yahoo! Slurp; spider)",
      "Mozilla/5.0 (compatible; Google Web Preview)",
  };
  return agents;
}

Dataset Generate(const GeneratorConfig& config, GenerationReport* report) {
  Population population(config);
  GenerationReport local;
  Emitter emitter(population.config(), population, local);

  Timeline timeline;
  timeline.start = config.start_ms;
  timeline.end = config.start_ms + config.days * kMillisPerDay - 1;
  timeline.continue_probability = config.revisit_mean / (1.0 + config.revisit_mean);
  timeline.gap_ms = config.revisit_gap_days * static_cast<double>(kMillisPerDay);

  double spike_total = 0.0;
  for (const auto& spike : config.spikes) spike_total += spike.weight;

  for (size_t i = 0; i < config.browser_count; ++i) {
    Rng rng(MixSeed(config.seed, i));
    auto browser = population.SampleBrowser(rng, i);
    std::string uid = BrowserUid(i);
    std::string ip_hash = HashIpAddress(config.ip_key, BrowserIp(i));

    std::int64_t day;
    double u = UniformUnit(rng);
    if (u < spike_total) {
      size_t s = 0;
      double acc = config.spikes[0].weight;
      while (u >= acc && s + 1 < config.spikes.size()) acc += config.spikes[++s].weight;
      day = config.spikes[s].day;
    } else {
      day = static_cast<std::int64_t>(UniformBelow(rng, static_cast<std::uint64_t>(config.days)));
    }
    std::int64_t ts = config.start_ms + day * kMillisPerDay +
                      static_cast<std::int64_t>(UniformBelow(rng, kMillisPerDay));
    emitter.Emit(browser, uid, ip_hash, ts, rng);
    ++local.browsers;

    if (config.twin_fraction > 0.0 && Bernoulli(rng, config.twin_fraction)) {
      // A second browser behind the same address with the same fingerprint
      // visits between two identical visits of the first one.
      ++local.twins;
      Rng twin_rng(MixSeed(config.seed ^ kTwinStream, i));
      auto twin = browser;
      std::int64_t twin_ts = ts + 1 + static_cast<std::int64_t>(UniformBelow(twin_rng, 3'600'000));
      ts = twin_ts + 1 + static_cast<std::int64_t>(UniformBelow(twin_rng, 3'600'000));
      emitter.Emit(twin, uid + "-t", ip_hash, twin_ts, twin_rng);
      emitter.Emit(browser, uid, ip_hash, ts, rng);
      Revisit(population, timeline, twin, uid + "-t", ip_hash, twin_ts, twin_rng,
              emitter, local);
    }
    Revisit(population, timeline, browser, uid, ip_hash, ts, rng, emitter, local);
  }

  auto entries = emitter.Take();
  local.entries = entries.size();
  if (report) *report = local;
  return Dataset(population.schema(), std::move(entries), {"synth"});
}

}  // namespace fpkit
