#include "fpkit/metrics/entropy.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace fpkit {
namespace {

constexpr std::uint64_t kDenseJointLimit = std::uint64_t{1} << 22;

// Attribute column remapped to dense codes in order of first appearance.
struct Column {
  std::vector<std::uint32_t> codes;
  std::vector<std::uint64_t> counts;
};

std::vector<Column> BuildColumns(const Dataset& ds) {
  std::vector<Column> columns(ds.schema().size());
  for (size_t a = 0; a < columns.size(); ++a) {
    std::unordered_map<std::uint32_t, std::uint32_t> index;
    auto& column = columns[a];
    column.codes.reserve(ds.size());
    for (const auto& entry : ds.entries()) {
      auto [it, inserted] = index.try_emplace(
          entry.fingerprint[a].id(),
          static_cast<std::uint32_t>(column.counts.size()));
      if (inserted) column.counts.push_back(0);
      ++column.counts[it->second];
      column.codes.push_back(it->second);
    }
  }
  return columns;
}

double SumCLogC(const std::vector<std::uint64_t>& counts) {
  double sum = 0.0;
  for (auto c : counts) {
    if (c > 1) sum += static_cast<double>(c) * std::log2(static_cast<double>(c));
  }
  return sum;
}

// Σ c log2 c over the joint frequencies of two columns, visited in
// ascending (known, inferred) code order.
double JointSumCLogC(const Column& known, const Column& inferred) {
  std::uint64_t width = inferred.counts.size();
  std::uint64_t cells = known.counts.size() * width;
  if (cells <= kDenseJointLimit) {
    std::vector<std::uint64_t> joint(cells, 0);
    for (size_t r = 0; r < known.codes.size(); ++r)
      ++joint[known.codes[r] * width + inferred.codes[r]];
    return SumCLogC(joint);
  }
  std::vector<std::uint64_t> keys(known.codes.size());
  for (size_t r = 0; r < keys.size(); ++r)
    keys[r] = (std::uint64_t{known.codes[r]} << 32) | inferred.codes[r];
  std::sort(keys.begin(), keys.end());
  std::vector<std::uint64_t> joint;
  for (size_t r = 0; r < keys.size();) {
    size_t s = r;
    while (s < keys.size() && keys[s] == keys[r]) ++s;
    joint.push_back(s - r);
    r = s;
  }
  return SumCLogC(joint);
}

}  // namespace

double MaxEntropy(std::uint64_t fingerprint_count) {
  if (fingerprint_count == 0) return 0.0;
  return std::log2(static_cast<double>(fingerprint_count));
}

double EntropyFromCounts(const std::vector<std::uint64_t>& counts,
                         std::uint64_t total) {
  if (total == 0) return 0.0;
  auto n = static_cast<double>(total);
  double h = (n * std::log2(n) - SumCLogC(counts)) / n;
  return std::max(h, 0.0);
}

std::vector<AttributeEntropy> AttributeEntropies(const Dataset& ds) {
  auto columns = BuildColumns(ds);
  std::uint64_t n = ds.size();
  double h_max = MaxEntropy(n);
  std::vector<AttributeEntropy> result;
  result.reserve(columns.size());
  for (size_t a = 0; a < columns.size(); ++a) {
    AttributeEntropy stats;
    stats.name = ds.schema()[a].name;
    stats.distinct_values = columns[a].counts.size();
    stats.entropy_bits = EntropyFromCounts(columns[a].counts, n);
    if (n > 1) stats.normalized_entropy = stats.entropy_bits / h_max;
    result.push_back(std::move(stats));
  }
  return result;
}

ExclusionSet SourceExtractedExclusions(const Schema& schema) {
  ExclusionSet exclusions;
  for (size_t a = 0; a < schema.size(); ++a) {
    if (!schema[a].extracted_from) continue;
    size_t source = schema.RequireIndex(*schema[a].extracted_from);
    exclusions.insert({std::min(a, source), std::max(a, source)});
  }
  return exclusions;
}

std::optional<double> NceMatrix::Normalized(size_t known,
                                            size_t inferred) const {
  if (IsExcluded(known, inferred) || fingerprint_count <= 1) return std::nullopt;
  return Bits(known, inferred) / max_entropy;
}

NceMatrix ConditionalEntropyMatrix(const Dataset& ds,
                                   const ExclusionSet& exclusions) {
  auto columns = BuildColumns(ds);
  size_t m = columns.size();
  NceMatrix matrix;
  matrix.attribute_count = m;
  matrix.fingerprint_count = ds.size();
  matrix.max_entropy = MaxEntropy(ds.size());
  matrix.conditional_bits.assign(m * m,
                                 std::numeric_limits<double>::quiet_NaN());
  matrix.excluded.assign(m * m, false);
  auto n = static_cast<double>(ds.size());

  std::vector<double> marginal(m);
  for (size_t a = 0; a < m; ++a) marginal[a] = SumCLogC(columns[a].counts);

  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < m; ++j) {
      size_t cell = i * m + j;
      if (exclusions.count({std::min(i, j), std::max(i, j)})) {
        matrix.excluded[cell] = true;
        continue;
      }
      if (ds.empty()) {
        matrix.conditional_bits[cell] = 0.0;
        continue;
      }
      // H(j | i) = Σ c_vw / N log2(c_v / c_vw).
      double bits = (marginal[i] - JointSumCLogC(columns[i], columns[j])) / n;
      matrix.conditional_bits[cell] = std::max(bits, 0.0);
    }
  }

  matrix.summaries.resize(m);
  for (size_t j = 0; j < m; ++j) {
    auto& summary = matrix.summaries[j];
    summary.name = ds.schema()[j].name;
    double total = 0.0;
    size_t count = 0;
    for (size_t i = 0; i < m; ++i) {
      if (i == j) continue;
      auto value = matrix.Normalized(i, j);
      if (!value) continue;
      summary.min = summary.min ? std::min(*summary.min, *value) : *value;
      summary.max = summary.max ? std::max(*summary.max, *value) : *value;
      total += *value;
      ++count;
    }
    if (count > 0) summary.avg = total / static_cast<double>(count);
  }
  return matrix;
}

NceMatrix ConditionalEntropyMatrix(const Dataset& ds) {
  return ConditionalEntropyMatrix(ds, SourceExtractedExclusions(ds.schema()));
}

}  // namespace fpkit
