#include "fpkit/synth/calibrate.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "fpkit/error.h"
#include "fpkit/metrics/distinctiveness.h"
#include "fpkit/preprocess/pipeline.h"
#include "fpkit/synth/generator.h"
#include "fpkit/verify/evaluation.h"

namespace fpkit {
namespace {

constexpr std::uint64_t kCalibrationStream = 0x63616c6962ULL;
constexpr size_t kSearchBrowsers = 5000;
constexpr size_t kReportBrowsers = 20000;
constexpr size_t kUnicityBrowsers = 3000;
constexpr size_t kProbeBrowsers = 8000;

struct DiffKnobs {
  double omega;
  double profile_zipf;
  double value_zipf;
};

class DiffSearch {
 public:
  DiffSearch(const GeneratorConfig& base, double mean, double sd)
      : base_(base), mean_(mean), sd_(sd) {
    for (size_t c = 0; c < base.classes.size(); ++c) {
      if (base.classes[c].profiles == 1) {
        fixed_weight_ += base.classes[c].weight;
      } else {
        free_.push_back(c);
      }
    }
    free_weight_ = 0.0;
    for (size_t c : free_) free_weight_ += base.classes[c].weight;
  }

  bool HasOmega() const { return free_.size() > 1; }

  GeneratorConfig Apply(const DiffKnobs& k) const {
    GeneratorConfig config = base_;
    for (auto& g : config.groups) {
      g.profile_zipf = k.profile_zipf;
      g.value_zipf = k.value_zipf;
    }
    if (HasOmega()) {
      double total = fixed_weight_ + free_weight_;
      double remainder = total - fixed_weight_ - k.omega * total;
      double others = free_weight_ - base_.classes[free_[0]].weight;
      config.classes[free_[0]].weight = k.omega * total;
      for (size_t i = 1; i < free_.size(); ++i) {
        double share = others > 0.0
                           ? base_.classes[free_[i]].weight / others
                           : 1.0 / static_cast<double>(free_.size() - 1);
        config.classes[free_[i]].weight = std::max(0.0, remainder * share);
      }
    }
    return config;
  }

  double Loss(const DiffKnobs& k, Population::Moments* moments = nullptr) const {
    Population population(Apply(k), false);
    auto m = population.DifferentBrowserMoments();
    if (moments) *moments = m;
    double dm = (m.mean - mean_) / std::max(1.0, mean_);
    double ds = (m.sd - sd_) / std::max(1.0, sd_);
    return dm * dm + ds * ds;
  }

  double MaxOmega() const {
    double total = fixed_weight_ + free_weight_;
    return std::max(0.0, (total - fixed_weight_) / total - 0.01);
  }

 private:
  const GeneratorConfig& base_;
  double mean_;
  double sd_;
  std::vector<size_t> free_;
  double fixed_weight_ = 0.0;
  double free_weight_ = 0.0;
};

DiffKnobs SearchDifferent(const DiffSearch& search, const GeneratorConfig& base) {
  DiffKnobs best{base.classes.empty() ? 0.0 : base.classes[0].weight,
                 base.groups.empty() ? 1.0 : base.groups[0].profile_zipf,
                 base.groups.empty() ? 1.0 : base.groups[0].value_zipf};
  if (base.groups.empty()) return best;
  double total = 0.0;
  for (const auto& c : base.classes) total += c.weight;
  best.omega /= total;
  double best_loss = search.Loss(best);

  std::vector<double> omegas{best.omega};
  if (search.HasOmega()) {
    omegas.clear();
    for (double o = 0.5; o <= search.MaxOmega() + 1e-9; o += 0.05) omegas.push_back(o);
  }
  for (double o : omegas) {
    for (double sp = 0.25; sp <= 2.5 + 1e-9; sp += 0.25) {
      for (double sv = 1.0; sv <= 4.0 + 1e-9; sv += 0.5) {
        DiffKnobs k{o, sp, sv};
        double loss = search.Loss(k);
        if (loss < best_loss) {
          best_loss = loss;
          best = k;
        }
      }
    }
  }
  // Coordinate refinement with shrinking steps.
  double steps[3] = {0.025, 0.125, 0.25};
  for (int round = 0; round < 5; ++round) {
    for (int knob = 0; knob < 3; ++knob) {
      if (knob == 0 && !search.HasOmega()) continue;
      for (double sign : {-1.0, 1.0}) {
        DiffKnobs k = best;
        double* field = knob == 0 ? &k.omega : knob == 1 ? &k.profile_zipf : &k.value_zipf;
        *field += sign * steps[knob];
        if (*field <= 0.0) continue;
        if (knob == 0 && *field > search.MaxOmega()) continue;
        double loss = search.Loss(k);
        if (loss < best_loss) {
          best_loss = loss;
          best = k;
        }
      }
    }
    for (auto& s : steps) s /= 2.0;
  }
  return best;
}

// Change probabilities are base * scale, except attributes with a
// sameness target.
GeneratorConfig ScaleChanges(const GeneratorConfig& base, double scale,
                             const std::set<std::string>& fixed) {
  GeneratorConfig config = base;
  for (auto& a : config.attributes) {
    if (fixed.count(a.name)) continue;
    a.change_probability = std::min(1.0, a.change_probability * scale);
  }
  return config;
}

SameBrowserStats SimulateConfig(const GeneratorConfig& config, size_t browsers,
                                std::uint64_t seed) {
  Population population(config, false);
  return SimulateSameBrowser(population, browsers, seed);
}

// Scale whose simulated mean same-browser count meets the target. The mean
// is close to linear in the scale, so secant steps converge quickly;
// bisection takes over if they leave the bracket.
double FitScale(const GeneratorConfig& base, const std::set<std::string>& fixed,
                double target, std::uint64_t seed, size_t browsers) {
  auto gap_at = [&](double s) {
    return SimulateConfig(ScaleChanges(base, s, fixed), browsers, seed).mean - target;
  };
  double lo = 0.0;
  double hi = 0.0;
  double x0 = 1.0;
  double f0 = gap_at(x0);
  if (f0 > 0.0) {
    lo = x0;
    hi = x0;
    double fh = f0;
    while (fh > 0.0 && hi < 1e4) {
      lo = hi;
      hi *= 2.0;
      fh = gap_at(hi);
    }
  } else {
    hi = x0;
  }
  double x1 = (lo + hi) / 2.0;
  double f1 = gap_at(x1);
  for (int i = 0; i < 20 && std::fabs(f1) > 0.005; ++i) {
    if (f1 > 0.0) {
      lo = std::max(lo, x1);
    } else {
      hi = std::min(hi, x1);
    }
    double next = f1 != f0 ? x1 - f1 * (x1 - x0) / (f1 - f0) : (lo + hi) / 2.0;
    if (!(next > lo && next < hi)) next = (lo + hi) / 2.0;
    x0 = x1;
    f0 = f1;
    x1 = next;
    f1 = gap_at(x1);
  }
  return x1;
}

}  // namespace

CalibrationTargets CalibrationTargets::FromJson(const Json& json) {
  CalibrationTargets t;
  if (json.contains("unicity") && !json["unicity"].is_null())
    t.unicity = json["unicity"].get<double>();
  t.mean_same = json.value("mean_same", t.mean_same);
  t.sd_same = json.value("sd_same", t.sd_same);
  t.mean_diff = json.value("mean_diff", t.mean_diff);
  t.sd_diff = json.value("sd_diff", t.sd_diff);
  if (json.contains("sameness"))
    t.sameness = json["sameness"].get<std::map<std::string, double>>();
  return t;
}

SameBrowserStats SimulateSameBrowser(const Population& population,
                                     size_t browsers, std::uint64_t seed) {
  SameBrowserStats stats;
  size_t n = population.attribute_count();
  std::vector<std::uint64_t> kept(n, 0);
  double sum = 0.0;
  double sum2 = 0.0;
  for (size_t i = 0; i < browsers; ++i) {
    Rng rng(MixSeed(seed, i));
    auto browser = population.SampleBrowser(rng, i);
    auto before = browser.values;
    size_t changed = population.Evolve(browser, rng);
    if (changed == 0) continue;
    ++stats.pairs;
    auto identical = static_cast<double>(n - changed);
    sum += identical;
    sum2 += identical * identical;
    for (size_t a = 0; a < n; ++a) kept[a] += before[a] == browser.values[a];
  }
  stats.sameness.assign(n, 1.0);
  if (stats.pairs > 0) {
    auto p = static_cast<double>(stats.pairs);
    stats.mean = sum / p;
    stats.sd = std::sqrt(std::max(0.0, sum2 / p - stats.mean * stats.mean));
    for (size_t a = 0; a < n; ++a) stats.sameness[a] = static_cast<double>(kept[a]) / p;
  }
  return stats;
}

ClassStatistics MeasureClassStatistics(GeneratorConfig config, size_t browsers,
                                       int months) {
  config.browser_count = browsers;
  PipelineOptions options;
  options.cleaning.window = WindowForDays(config.start_ms, config.days);
  auto processed = Preprocess(Generate(config), options);
  const Dataset& ds = processed.dataset;
  auto samples = BuildComparisonSets(ds, months, config.seed);
  ClassStatistics stats;
  double s1 = 0.0, s2 = 0.0, d1 = 0.0, d2 = 0.0;
  for (const auto& sample : samples) {
    auto counted = CountSample(ds, sample, MatchingConfig(ds.schema()),
                               VerificationMode::kSimple);
    for (auto c : counted.same) {
      s1 += c;
      s2 += static_cast<double>(c) * c;
    }
    for (auto c : counted.different) {
      d1 += c;
      d2 += static_cast<double>(c) * c;
    }
    stats.same_pairs += counted.same.size();
    stats.different_pairs += counted.different.size();
  }
  auto finish = [](double sum, double sum2, size_t count, double* mean, double* sd) {
    if (count == 0) return;
    *mean = sum / static_cast<double>(count);
    *sd = std::sqrt(std::max(0.0, sum2 / static_cast<double>(count) - *mean * *mean));
  };
  finish(s1, s2, stats.same_pairs, &stats.mean_same, &stats.sd_same);
  finish(d1, d2, stats.different_pairs, &stats.mean_diff, &stats.sd_diff);
  return stats;
}

Json CalibrationResult::ToJson() const {
  return {{"config", GeneratorConfigToJson(config)},
          {"measured",
           {{"browsers", kProbeBrowsers},
            {"same_pairs", measured.same_pairs},
            {"different_pairs", measured.different_pairs},
            {"mean_same", measured.mean_same},
            {"sd_same", measured.sd_same},
            {"mean_diff", measured.mean_diff},
            {"sd_diff", measured.sd_diff}}},
          {"different", {{"mean", different.mean}, {"sd", different.sd}}},
          {"same", {{"pairs", same.pairs}, {"mean", same.mean}, {"sd", same.sd}}},
          {"residuals", residuals}};
}

CalibrationResult Calibrate(const CalibrationTargets& targets,
                            GeneratorConfig base) {
  base.Validate();
  auto n = static_cast<double>(base.attributes.size());
  for (double v : {targets.mean_same, targets.mean_diff}) {
    if (!(v >= 0.0 && v <= n)) throw ConfigError("target mean outside [0, n]");
  }
  if (targets.sd_same < 0.0 || targets.sd_diff < 0.0)
    throw ConfigError("target deviations must be >= 0");
  if (targets.unicity && !(*targets.unicity >= 0.0 && *targets.unicity <= 1.0))
    throw ConfigError("target unicity outside [0, 1]");

  // Unicity 1 is reached by construction with a per-browser identifier.
  bool want_unique = targets.unicity && *targets.unicity >= 1.0;
  AttributeSpec* unique = nullptr;
  for (auto& a : base.attributes) {
    if (a.role == AttributeRole::kUniqueId) unique = &a;
  }
  if (want_unique && !unique) {
    std::set<std::string> grouped;
    for (const auto& g : base.groups) grouped.insert(g.members.begin(), g.members.end());
    for (auto it = base.attributes.rbegin(); it != base.attributes.rend(); ++it) {
      if (it->role == AttributeRole::kPlain && !it->dynamic && !grouped.count(it->name)) {
        it->role = AttributeRole::kUniqueId;
        it->change_probability = 0.0;
        it->error_rate = 0.0;
        break;
      }
    }
  } else if (targets.unicity && !want_unique && unique) {
    unique->role = AttributeRole::kPlain;
  }

  std::set<std::string> fixed;
  for (const auto& [name, sameness] : targets.sameness) {
    if (!(sameness >= 0.0 && sameness <= 1.0))
      throw ConfigError("sameness target outside [0, 1] for " + name);
    auto it = std::find_if(base.attributes.begin(), base.attributes.end(),
                           [&](const AttributeSpec& a) { return a.name == name; });
    if (it == base.attributes.end())
      throw ConfigError("sameness target for unknown attribute " + name);
    it->change_probability = 1.0 - sameness;
    fixed.insert(name);
  }

  const std::uint64_t seed = MixSeed(base.seed, kCalibrationStream);
  auto fit = [&](GeneratorConfig candidate) {
    double scale = FitScale(candidate, fixed, targets.mean_same, seed, kSearchBrowsers);
    return ScaleChanges(candidate, scale, fixed);
  };
  auto fit_same = [&](GeneratorConfig config) {
    config.volatility_sd = 0.0;
    GeneratorConfig fitted = fit(config);
    if (SimulateConfig(fitted, kSearchBrowsers, seed).sd >= targets.sd_same)
      return fitted;
    double lo = 0.0;
    double hi = 2.0;
    for (int i = 0; i < 8; ++i) {
      double mid = (lo + hi) / 2.0;
      config.volatility_sd = mid;
      if (SimulateConfig(fit(config), kSearchBrowsers, seed).sd < targets.sd_same) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    config.volatility_sd = (lo + hi) / 2.0;
    return fit(config);
  };

  // Evolution makes later fingerprints drift away from the profiles, so
  // measured different-browsers statistics fall short of the analytic
  // ones. The search target is shifted by the observed gap.
  double search_mean = targets.mean_diff;
  double search_sd = targets.sd_diff;
  GeneratorConfig fitted;
  for (int round = 0; round < 4; ++round) {
    DiffSearch search(base, search_mean, search_sd);
    fitted = fit_same(search.Apply(SearchDifferent(search, base)));
    if (round == 3) break;
    auto measured = MeasureClassStatistics(fitted, kProbeBrowsers);
    if (measured.different_pairs == 0) break;
    search_mean = std::clamp(search_mean + targets.mean_diff - measured.mean_diff, 0.0, n);
    search_sd = std::max(0.0, search_sd + targets.sd_diff - measured.sd_diff);
  }

  // Pull the fixed attributes onto their sameness targets.
  for (int round = 0; round < 2 && !fixed.empty(); ++round) {
    auto stats = SimulateConfig(fitted, kReportBrowsers, seed);
    for (auto& a : fitted.attributes) {
      if (!fixed.count(a.name)) continue;
      size_t index = *fitted.MakeSchema().IndexOf(a.name);
      double measured_change = 1.0 - stats.sameness[index];
      double wanted_change = 1.0 - targets.sameness.at(a.name);
      if (measured_change > 0.0 && a.change_probability > 0.0) {
        a.change_probability = std::clamp(
            a.change_probability * wanted_change / measured_change, 0.0, 1.0);
      }
    }
  }

  CalibrationResult result;
  result.config = fitted;
  Population population(fitted, false);
  result.different = population.DifferentBrowserMoments();
  result.same = SimulateSameBrowser(population, kReportBrowsers, seed);
  result.measured = MeasureClassStatistics(fitted, kProbeBrowsers);
  result.residuals["mean_diff"] = result.measured.mean_diff - targets.mean_diff;
  result.residuals["sd_diff"] = result.measured.sd_diff - targets.sd_diff;
  result.residuals["mean_same"] = result.measured.mean_same - targets.mean_same;
  result.residuals["sd_same"] = result.measured.sd_same - targets.sd_same;
  Schema schema = fitted.MakeSchema();
  for (const auto& [name, sameness] : targets.sameness) {
    result.residuals["sameness:" + name] =
        result.same.sameness[*schema.IndexOf(name)] - sameness;
  }
  if (targets.unicity) {
    GeneratorConfig probe = fitted;
    probe.browser_count = std::min(probe.browser_count, kUnicityBrowsers);
    PipelineOptions options;
    options.cleaning.window = WindowForDays(probe.start_ms, probe.days);
    auto processed = Preprocess(Generate(probe), options);
    result.residuals["unicity"] =
        UnicityRate(processed.dataset).value_or(0.0) - *targets.unicity;
  }
  return result;
}

}  // namespace fpkit
