#ifndef FPKIT_PREPROCESS_EXTRACTION_H_
#define FPKIT_PREPROCESS_EXTRACTION_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fpkit/model/dataset.h"
#include "fpkit/model/io.h"

namespace fpkit {

enum class ExtractionOp {
  // Number of items: set size, or number of separator-delimited items of a
  // string (0 for the empty string).
  kCount,
  // One item of a separator-delimited string (or of a sorted set),
  // optionally split again and reduced to one field.
  kPart,
};

struct ExtractionRule {
  std::string name;
  std::string source;
  ExtractionOp op = ExtractionOp::kPart;
  AttributeKind kind = AttributeKind::kCategorical;
  std::string item_separator = ",";
  size_t index = 0;
  std::optional<std::string> field_separator;
  size_t field = 0;
};

// Rule file: {"rules": [{"name", "source", "op": "count"|"part", "kind",
// "separator", "index", "field_separator", "field"}]}.
std::vector<ExtractionRule> ParseExtractionRules(const Json& json);
std::vector<ExtractionRule> ReadExtractionRulesFile(const std::string& path);

// Computes one extracted value. A flag source yields the same flag; a
// missing part or an unparsable number yields the undefined-value flag.
AttributeValue ApplyExtraction(const ExtractionRule& rule,
                               AttributeValue source);

// Appends one descriptor per rule (extracted_from = source) and computes the
// values for every entry. Throws ConfigError on an unknown or extracted
// source, or a name clash.
Dataset DeriveExtracted(Dataset ds, const std::vector<ExtractionRule>& rules);

}  // namespace fpkit

#endif  // FPKIT_PREPROCESS_EXTRACTION_H_
