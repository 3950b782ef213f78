#include "fpkit/metrics/practicality.h"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "fpkit/metrics/stability.h"
#include "fpkit/preprocess/environment.h"

namespace fpkit {
namespace {

constexpr double kReportQuantiles[] = {0.0,  0.1,  0.25, 0.5,
                                       0.75, 0.9,  0.95, 0.99, 1.0};
constexpr double kSizeOutlierSigmas = 15.0;

bool IsTimeOutlier(const Entry& entry, std::int64_t cap_ms) {
  return entry.total_ms && *entry.total_ms > cap_ms;
}

std::optional<std::int64_t> EntryTime(const Entry& entry) {
  if (entry.total_ms) return entry.total_ms;
  if (entry.times_ms.empty()) return std::nullopt;
  std::int64_t sum = 0;
  for (const auto& [name, ms] : entry.times_ms) sum += ms;
  return sum;
}

void WriteOptional(std::ostream& out, const std::optional<double>& value) {
  if (value) out << *value;
}

void WriteCsvField(std::ostream& out, const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

std::optional<std::int64_t> LowerMedian(std::vector<std::int64_t> values) {
  if (values.empty()) return std::nullopt;
  auto middle = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), middle, values.end());
  return *middle;
}

size_t ValueSize(AttributeValue value) { return value.encoded().size(); }

size_t FingerprintSize(const Fingerprint& fingerprint) {
  size_t total = 0;
  for (auto value : fingerprint) total += ValueSize(value);
  return total;
}

std::vector<AttributePracticality> AttributePracticalities(
    const Dataset& ds, std::int64_t outlier_cap_ms) {
  const Schema& schema = ds.schema();
  size_t m = schema.size();
  auto pairs = ConsecutivePairs(ds);
  std::vector<std::uint64_t> unchanged(m, 0);
  for (const auto& pair : pairs) {
    const auto& f = ds[pair.first].fingerprint;
    const auto& g = ds[pair.second].fingerprint;
    for (size_t a = 0; a < m; ++a) unchanged[a] += f[a] == g[a];
  }

  std::vector<AttributePracticality> result(m);
  std::vector<std::int64_t> sizes;
  std::vector<std::int64_t> times;
  for (size_t a = 0; a < m; ++a) {
    auto& stats = result[a];
    stats.name = schema[a].name;
    if (!pairs.empty()) {
      stats.sameness_rate = static_cast<double>(unchanged[a]) /
                            static_cast<double>(pairs.size());
    }
    sizes.clear();
    times.clear();
    for (const auto& entry : ds.entries()) {
      sizes.push_back(static_cast<std::int64_t>(ValueSize(entry.fingerprint[a])));
      if (IsTimeOutlier(entry, outlier_cap_ms)) continue;
      auto it = entry.times_ms.find(stats.name);
      if (it != entry.times_ms.end()) times.push_back(it->second);
    }
    stats.median_size = LowerMedian(sizes).value_or(0);
    stats.median_time_ms = LowerMedian(times);
  }
  return result;
}

Distribution Distribution::Of(std::vector<std::int64_t> values) {
  Distribution d;
  std::sort(values.begin(), values.end());
  d.count = values.size();
  if (!values.empty()) {
    double sum = 0.0;
    for (auto v : values) sum += static_cast<double>(v);
    d.mean = sum / static_cast<double>(values.size());
    for (double q : kReportQuantiles) d.percentiles[q] = SortedPercentile(values, q);
  }
  d.sorted = std::move(values);
  return d;
}

FingerprintPracticality ComputeFingerprintPracticality(
    const Dataset& ds, std::int64_t outlier_cap_ms,
    const std::string& user_agent_attribute) {
  auto ua_index = ds.schema().IndexOf(user_agent_attribute);

  struct Samples {
    std::vector<std::int64_t> sizes;
    std::vector<std::int64_t> times;
    size_t time_outliers = 0;
    size_t missing_time = 0;
  };
  Samples overall;
  std::map<std::string, Samples> by_device;

  for (const auto& entry : ds.entries()) {
    std::string device = "desktop";
    if (ua_index) {
      auto ua = entry.fingerprint[*ua_index];
      device = std::string(DeviceTypeName(
          ClassifyEnvironment(ua.is_flag() ? std::string_view() : ua.encoded())
              .device_type));
    }
    auto size = static_cast<std::int64_t>(FingerprintSize(entry.fingerprint));
    auto time = EntryTime(entry);
    for (Samples* s : {&overall, &by_device[device]}) {
      s->sizes.push_back(size);
      if (!time) {
        ++s->missing_time;
      } else if (*time > outlier_cap_ms) {
        ++s->time_outliers;
      } else {
        s->times.push_back(*time);
      }
    }
  }

  auto summarize = [](Samples& s) {
    PracticalityGroup group;
    group.time_outliers = s.time_outliers;
    group.missing_time = s.missing_time;
    group.time_ms = Distribution::Of(std::move(s.times));
    if (!s.sizes.empty()) {
      double n = static_cast<double>(s.sizes.size());
      double mean = 0.0;
      for (auto v : s.sizes) mean += static_cast<double>(v);
      mean /= n;
      double var = 0.0;
      for (auto v : s.sizes) var += (static_cast<double>(v) - mean) * (static_cast<double>(v) - mean);
      double limit = mean + kSizeOutlierSigmas * std::sqrt(var / n);
      auto kept = std::remove_if(s.sizes.begin(), s.sizes.end(), [&](std::int64_t v) {
        return static_cast<double>(v) > limit;
      });
      group.size_outliers = static_cast<size_t>(s.sizes.end() - kept);
      s.sizes.erase(kept, s.sizes.end());
    }
    group.size_bytes = Distribution::Of(std::move(s.sizes));
    return group;
  };

  FingerprintPracticality result;
  result.outlier_cap_ms = outlier_cap_ms;
  result.overall = summarize(overall);
  for (auto& [device, samples] : by_device)
    result.by_device[device] = summarize(samples);
  return result;
}

std::vector<AttributeStats> ComputeAttributeStats(const Dataset& ds,
                                                  std::int64_t outlier_cap_ms,
                                                  const NceMatrix* nce) {
  auto entropies = AttributeEntropies(ds);
  auto practicality = AttributePracticalities(ds, outlier_cap_ms);
  std::vector<AttributeStats> stats(entropies.size());
  for (size_t a = 0; a < stats.size(); ++a) {
    auto& s = stats[a];
    s.name = entropies[a].name;
    s.distinct_values = entropies[a].distinct_values;
    s.entropy_bits = entropies[a].entropy_bits;
    s.normalized_entropy = entropies[a].normalized_entropy;
    if (nce) s.min_nce = nce->summaries[a].min;
    s.sameness_rate = practicality[a].sameness_rate;
    s.median_size = practicality[a].median_size;
    s.median_time_ms = practicality[a].median_time_ms;
  }
  return stats;
}

void WriteAttributeStatsCsv(std::ostream& out,
                            const std::vector<AttributeStats>& stats) {
  out << "attribute,values,normalized_entropy,min_nce,sameness_rate,"
         "median_size,median_time_ms\n";
  auto precision = out.precision();
  out << std::setprecision(6);
  for (const auto& s : stats) {
    WriteCsvField(out, s.name);
    out << ',' << s.distinct_values << ',';
    WriteOptional(out, s.normalized_entropy);
    out << ',';
    WriteOptional(out, s.min_nce);
    out << ',';
    WriteOptional(out, s.sameness_rate);
    out << ',' << s.median_size << ',';
    if (s.median_time_ms) out << *s.median_time_ms;
    out << '\n';
  }
  out.precision(precision);
}

}  // namespace fpkit
