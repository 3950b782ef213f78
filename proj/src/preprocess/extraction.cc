#include "fpkit/preprocess/extraction.h"

#include <charconv>

#include "fpkit/error.h"
#include "fpkit/util/strings.h"

namespace fpkit {

std::vector<ExtractionRule> ParseExtractionRules(const Json& json) {
  const Json& list = json.is_array() ? json : json.at("rules");
  std::vector<ExtractionRule> rules;
  for (const auto& j : list) {
    ExtractionRule r;
    r.name = j.at("name").get<std::string>();
    r.source = j.at("source").get<std::string>();
    std::string op = j.value("op", "part");
    if (op == "count") {
      r.op = ExtractionOp::kCount;
      r.kind = AttributeKind::kNumeric;
    } else if (op == "part") {
      r.op = ExtractionOp::kPart;
    } else {
      throw ConfigError("unknown extraction op: " + op);
    }
    if (j.contains("kind")) {
      auto kind = ParseKind(j["kind"].get<std::string>());
      if (!kind) throw ConfigError("unknown kind in rule " + r.name);
      r.kind = *kind;
    }
    r.item_separator = j.value("separator", std::string(","));
    r.index = j.value("index", size_t{0});
    if (j.contains("field_separator"))
      r.field_separator = j["field_separator"].get<std::string>();
    r.field = j.value("field", size_t{0});
    rules.push_back(std::move(r));
  }
  return rules;
}

std::vector<ExtractionRule> ReadExtractionRulesFile(const std::string& path) {
  return ParseExtractionRules(ReadJsonFile(path));
}

namespace {

AttributeValue Typed(const std::string& text, AttributeKind kind) {
  if (kind == AttributeKind::kNumeric) {
    double v = 0;
    auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc() || r.ptr != text.data() + text.size())
      return AttributeValue::Flag(ErrorFlag::kUndefinedValue);
    return AttributeValue::Number(v);
  }
  if (kind == AttributeKind::kSet) return AttributeValue::Set({text});
  return AttributeValue::Text(text);
}

}  // namespace

AttributeValue ApplyExtraction(const ExtractionRule& rule,
                               AttributeValue source) {
  if (source.is_flag()) return source;
  std::vector<std::string> items;
  switch (source.type()) {
    case ValueType::kSet:
      items = source.items();
      break;
    case ValueType::kText:
      if (!source.text().empty())
        items = SplitString(source.text(), rule.item_separator);
      break;
    case ValueType::kNumber:
      items = {source.encoded()};
      break;
    case ValueType::kFlag:
      break;
  }
  if (rule.op == ExtractionOp::kCount)
    return AttributeValue::Number(static_cast<double>(items.size()));

  if (rule.index >= items.size())
    return AttributeValue::Flag(ErrorFlag::kUndefinedValue);
  std::string part = items[rule.index];
  if (rule.field_separator) {
    auto fields = SplitString(part, *rule.field_separator);
    if (rule.field >= fields.size())
      return AttributeValue::Flag(ErrorFlag::kUndefinedValue);
    part = fields[rule.field];
  }
  return Typed(part, rule.kind);
}

Dataset DeriveExtracted(Dataset ds, const std::vector<ExtractionRule>& rules) {
  const Schema& base = ds.schema();
  std::vector<AttributeDescriptor> extra;
  std::vector<size_t> sources;
  for (const auto& rule : rules) {
    auto source = base.IndexOf(rule.source);
    if (!source)
      throw ConfigError("extraction rule " + rule.name +
                        " references unknown attribute " + rule.source);
    if (base[*source].extracted_from)
      throw ConfigError("extraction rule " + rule.name +
                        " uses extracted attribute " + rule.source);
    AttributeDescriptor d;
    d.name = rule.name;
    d.kind = rule.kind;
    d.extracted_from = rule.source;
    d.collectible_client_side = base[*source].collectible_client_side;
    extra.push_back(std::move(d));
    sources.push_back(*source);
  }
  Schema schema;
  try {
    schema = base.Extend(extra);
  } catch (const SchemaError& ex) {
    throw ConfigError(std::string("extraction rules: ") + ex.what());
  }

  std::vector<std::string> provenance = std::move(ds).TakeProvenance();
  std::vector<Entry> entries = std::move(ds).TakeEntries();
  for (auto& e : entries) {
    e.fingerprint.reserve(schema.size());
    for (size_t r = 0; r < rules.size(); ++r)
      e.fingerprint.push_back(
          ApplyExtraction(rules[r], e.fingerprint[sources[r]]));
  }
  provenance.push_back("derive_extracted");
  return Dataset(std::move(schema), std::move(entries), std::move(provenance));
}

}  // namespace fpkit
