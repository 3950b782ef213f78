#include "fpkit/verify/evaluation.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <unordered_set>

#include "fpkit/error.h"
#include "fpkit/metrics/stability.h"
#include "fpkit/util/random.h"

namespace fpkit {
namespace {

int AbsoluteMonth(std::int64_t ts_ms) {
  using namespace std::chrono;
  auto days = floor<std::chrono::days>(sys_time<milliseconds>(milliseconds(ts_ms)));
  year_month_day ymd(days);
  return static_cast<int>(ymd.year()) * 12 +
         static_cast<int>(static_cast<unsigned>(ymd.month())) - 1;
}

std::uint64_t PairKey(size_t a, size_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Uniform sample without replacement of |wanted| pairs of positions in
// |members| whose entries belong to distinct browsers.
std::vector<std::pair<size_t, size_t>> SampleCrossPairs(
    const Dataset& ds, const std::vector<size_t>& members, size_t wanted,
    Rng& rng) {
  std::vector<std::pair<size_t, size_t>> chosen;
  size_t n = members.size();
  if (wanted == 0 || n < 2) return chosen;

  std::map<std::string_view, std::uint64_t> per_browser;
  for (size_t i : members) ++per_browser[ds[i].uid];
  std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  for (const auto& [uid, c] : per_browser) total -= c * (c - 1) / 2;
  if (total == 0) return chosen;

  if (wanted * 2 >= total) {
    std::vector<std::pair<size_t, size_t>> all;
    all.reserve(total);
    for (size_t x = 0; x < n; ++x) {
      for (size_t y = x + 1; y < n; ++y) {
        if (ds[members[x]].uid != ds[members[y]].uid)
          all.emplace_back(members[x], members[y]);
      }
    }
    size_t take = std::min<size_t>(wanted, all.size());
    for (size_t k = 0; k < take; ++k) {
      size_t pick = k + UniformBelow(rng, all.size() - k);
      std::swap(all[k], all[pick]);
    }
    all.resize(take);
    return all;
  }

  std::unordered_set<std::uint64_t> seen;
  while (chosen.size() < wanted) {
    size_t x = members[UniformBelow(rng, n)];
    size_t y = members[UniformBelow(rng, n)];
    if (x == y || ds[x].uid == ds[y].uid) continue;
    if (!seen.insert(PairKey(x, y)).second) continue;
    chosen.emplace_back(std::min(x, y), std::max(x, y));
  }
  return chosen;
}

}  // namespace

int MonthIndex(std::int64_t ts_ms, std::int64_t origin_ms) {
  return AbsoluteMonth(ts_ms) - AbsoluteMonth(origin_ms);
}

std::vector<MonthSample> BuildComparisonSets(const Dataset& ds, int months,
                                             std::uint64_t seed) {
  if (months < 1) throw ArgumentError("months must be positive");
  std::vector<MonthSample> samples(static_cast<size_t>(months));
  for (int m = 0; m < months; ++m) samples[static_cast<size_t>(m)].month = m;
  if (ds.empty()) return samples;

  std::int64_t origin = *ds.EarliestTimestamp();
  std::vector<int> month_of(ds.size());
  std::vector<std::vector<size_t>> members(static_cast<size_t>(months));
  for (size_t i = 0; i < ds.size(); ++i) {
    month_of[i] = MonthIndex(ds[i].ts_ms, origin);
    if (month_of[i] < months) members[static_cast<size_t>(month_of[i])].push_back(i);
  }
  for (const auto& pair : ConsecutivePairs(ds)) {
    int m = month_of[pair.first];
    if (m != month_of[pair.second] || m >= months) continue;
    samples[static_cast<size_t>(m)].same.push_back(
        {pair.first, pair.second, true, m});
  }
  for (int m = 0; m < months; ++m) {
    auto& sample = samples[static_cast<size_t>(m)];
    Rng rng(MixSeed(seed, static_cast<std::uint64_t>(m)));
    for (auto [a, b] : SampleCrossPairs(ds, members[static_cast<size_t>(m)],
                                        sample.same.size(), rng)) {
      sample.different.push_back({a, b, false, m});
    }
  }
  return samples;
}

CountedSample CountSample(const Dataset& ds, const MonthSample& sample,
                          const MatchingConfig& config,
                          VerificationMode mode) {
  CountedSample counted;
  auto count = [&](const ComparisonPair& p) {
    return static_cast<std::uint32_t>(
        CountForMode(ds[p.a].fingerprint, ds[p.b].fingerprint, config, mode));
  };
  counted.same.reserve(sample.same.size());
  for (const auto& p : sample.same) counted.same.push_back(count(p));
  counted.different.reserve(sample.different.size());
  for (const auto& p : sample.different) counted.different.push_back(count(p));
  return counted;
}

ErrorCurve ComputeErrorCurve(std::span<const CountedSample> samples,
                             size_t attribute_count) {
  ErrorCurve curve;
  curve.attribute_count = attribute_count;
  curve.fmr.assign(attribute_count + 1, 0.0);
  curve.fnmr.assign(attribute_count + 1, 0.0);
  for (const auto& sample : samples) {
    if (sample.same.empty() || sample.different.empty()) continue;
    std::vector<std::uint64_t> same_hist(attribute_count + 1, 0);
    std::vector<std::uint64_t> diff_hist(attribute_count + 1, 0);
    for (auto c : sample.same) ++same_hist.at(c);
    for (auto c : sample.different) ++diff_hist.at(c);
    auto n_same = static_cast<double>(sample.same.size());
    auto n_diff = static_cast<double>(sample.different.size());
    // below: same pairs with count < Θ; at_least: different with count >= Θ.
    std::uint64_t below = 0;
    std::uint64_t at_least = sample.different.size();
    for (size_t theta = 0; theta <= attribute_count; ++theta) {
      if (theta > 0) {
        below += same_hist[theta - 1];
        at_least -= diff_hist[theta - 1];
      }
      curve.fnmr[theta] += static_cast<double>(below) / n_same;
      curve.fmr[theta] += static_cast<double>(at_least) / n_diff;
    }
    ++curve.months_used;
  }
  if (curve.months_used > 0) {
    auto k = static_cast<double>(curve.months_used);
    for (auto& v : curve.fmr) v /= k;
    for (auto& v : curve.fnmr) v /= k;
  }
  return curve;
}

ErrorCurve ComputeErrorCurve(const Dataset& ds,
                             std::span<const MonthSample> samples,
                             const MatchingConfig& config,
                             VerificationMode mode) {
  std::vector<CountedSample> counted;
  counted.reserve(samples.size());
  for (const auto& sample : samples)
    counted.push_back(CountSample(ds, sample, config, mode));
  return ComputeErrorCurve(counted, ds.schema().size());
}

EqualError EqualErrorRate(const ErrorCurve& curve) {
  if (curve.fmr.empty() || curve.months_used == 0)
    throw ArgumentError("equal error rate of an empty curve");
  EqualError best;
  double best_gap = std::numeric_limits<double>::infinity();
  for (size_t theta = 0; theta < curve.fmr.size(); ++theta) {
    double gap = std::fabs(curve.fmr[theta] - curve.fnmr[theta]);
    if (gap < best_gap) {
      best_gap = gap;
      best.theta = theta;
      best.fmr = curve.fmr[theta];
      best.fnmr = curve.fnmr[theta];
      best.rate = (best.fmr + best.fnmr) / 2.0;
    }
  }
  return best;
}

Split LearnSplit(std::vector<double> same, std::vector<double> different) {
  Split split;
  if (same.empty() || different.empty()) {
    split.degenerate = true;
    return split;
  }
  std::sort(same.begin(), same.end());
  std::sort(different.begin(), different.end());
  if (same == different) {
    split.degenerate = true;
    return split;
  }

  std::vector<double> finite;
  for (const auto* v : {&same, &different}) {
    for (double d : *v) {
      if (std::isfinite(d)) finite.push_back(d);
    }
  }
  std::sort(finite.begin(), finite.end());
  finite.erase(std::unique(finite.begin(), finite.end()), finite.end());

  // Candidates with the margin to the nearest finite distance.
  std::vector<std::pair<double, double>> candidates{{0.0, 0.0}};
  for (size_t i = 0; i + 1 < finite.size(); ++i) {
    double mid = finite[i] + (finite[i + 1] - finite[i]) / 2.0;
    candidates.emplace_back(mid, (finite[i + 1] - finite[i]) / 2.0);
  }
  if (!finite.empty()) candidates.emplace_back(finite.back(), 0.0);

  bool first = true;
  for (auto [theta, margin] : candidates) {
    if (theta < 0.0) continue;
    auto same_above = static_cast<size_t>(
        same.end() - std::upper_bound(same.begin(), same.end(), theta));
    auto diff_within = static_cast<size_t>(
        std::upper_bound(different.begin(), different.end(), theta) -
        different.begin());
    size_t errors = same_above + diff_within;
    bool better = first || errors < split.errors ||
                  (errors == split.errors && margin > split.margin) ||
                  (errors == split.errors && margin == split.margin &&
                   theta < split.theta);
    if (better) {
      split.theta = theta;
      split.errors = errors;
      split.margin = margin;
      first = false;
    }
  }
  return split;
}

LearnResult LearnThresholds(const Dataset& ds,
                            std::span<const MonthSample> samples) {
  const Schema& schema = ds.schema();
  size_t m = schema.size();
  MatchingConfig base(schema);
  std::vector<AttributeThreshold> thresholds = base.thresholds();
  std::vector<std::string> degenerate;

  std::vector<double> same;
  std::vector<double> different;
  for (size_t a = 0; a < m; ++a) {
    if (schema[a].dynamic || thresholds[a].family == DistanceFamily::kIdentity)
      continue;
    double sum = 0.0;
    size_t months = 0;
    size_t degenerate_months = 0;
    for (const auto& sample : samples) {
      if (sample.same.empty() || sample.different.empty()) continue;
      same.clear();
      different.clear();
      for (const auto& p : sample.same) {
        same.push_back(AttributeDistance(ds[p.a].fingerprint[a],
                                         ds[p.b].fingerprint[a],
                                         thresholds[a].family));
      }
      for (const auto& p : sample.different) {
        different.push_back(AttributeDistance(ds[p.a].fingerprint[a],
                                              ds[p.b].fingerprint[a],
                                              thresholds[a].family));
      }
      Split split = LearnSplit(std::move(same), std::move(different));
      same = {};
      different = {};
      if (split.degenerate) ++degenerate_months;
      sum += split.theta;
      ++months;
    }
    if (months == 0 || degenerate_months == months) {
      degenerate.push_back(schema[a].name);
      continue;
    }
    thresholds[a].theta = sum / static_cast<double>(months);
  }

  LearnResult result{MatchingConfig(schema, std::move(thresholds), 0),
                     std::move(degenerate), {}};
  auto curve = ComputeErrorCurve(ds, samples, result.config,
                                 VerificationMode::kAdvanced);
  if (curve.months_used > 0) {
    result.equal_error = EqualErrorRate(curve);
    result.config.set_theta(result.equal_error.theta);
  }
  return result;
}

}  // namespace fpkit
