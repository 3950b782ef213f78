#include "fpkit/model/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fpkit/error.h"
#include "fpkit/util/digest.h"

namespace fpkit {

namespace {

constexpr std::string_view kLegacyFlagPrefix = "ERR:";

std::vector<std::string> Split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::optional<double> ParseDouble(std::string_view s) {
  double v = 0;
  auto result = std::from_chars(s.data(), s.data() + s.size(), v);
  if (result.ec != std::errc() || result.ptr != s.data() + s.size())
    return std::nullopt;
  return v;
}

}  // namespace

Json SchemaToJson(const Schema& schema) {
  Json attributes = Json::array();
  for (const auto& a : schema) {
    Json j = {{"name", a.name},
              {"kind", KindName(a.kind)},
              {"dynamic", a.dynamic},
              {"client_side", a.collectible_client_side}};
    if (a.extracted_from) j["extracted_from"] = *a.extracted_from;
    attributes.push_back(std::move(j));
  }
  return Json{{"attributes", std::move(attributes)}};
}

Schema SchemaFromJson(const Json& json) {
  const Json& list = json.is_array() ? json : json.at("attributes");
  if (!list.is_array()) throw ParseError("schema attributes must be an array");
  std::vector<AttributeDescriptor> attributes;
  for (const auto& j : list) {
    AttributeDescriptor a;
    a.name = j.at("name").get<std::string>();
    std::string kind = j.value("kind", "categorical");
    auto parsed = ParseKind(kind);
    if (!parsed) throw ParseError("unknown attribute kind: " + kind);
    a.kind = *parsed;
    a.dynamic = j.value("dynamic", false);
    a.collectible_client_side = j.value("client_side", true);
    if (j.contains("extracted_from") && !j["extracted_from"].is_null())
      a.extracted_from = j["extracted_from"].get<std::string>();
    attributes.push_back(std::move(a));
  }
  return Schema(std::move(attributes));
}

Schema ReadSchemaFile(const std::string& path) {
  return SchemaFromJson(ReadJsonFile(path));
}

void WriteSchemaFile(const Schema& schema, const std::string& path) {
  WriteJsonFile(path, SchemaToJson(schema));
}

Json ValueToJson(AttributeValue value) {
  switch (value.type()) {
    case ValueType::kText:
      return value.text();
    case ValueType::kNumber: {
      double x = value.number();
      if (std::isfinite(x) && x == std::trunc(x) && std::fabs(x) < 0x1p53)
        return static_cast<std::int64_t>(x);
      if (!std::isfinite(x)) return Json{{"number", FormatNumber(x)}};
      return x;
    }
    case ValueType::kSet:
      return value.items();
    case ValueType::kFlag:
      return Json{{"flag", FlagCode(value.flag())}};
  }
  return nullptr;
}

AttributeValue ValueFromJson(const Json& json, AttributeKind kind) {
  if (json.is_null()) return AttributeValue::Flag(ErrorFlag::kUndefinedValue);
  if (json.is_object()) {
    if (json.contains("flag")) {
      std::string code = json["flag"].get<std::string>();
      auto flag = ParseFlagCode(code);
      if (!flag) throw ParseError("unknown flag code: " + code);
      return AttributeValue::Flag(*flag);
    }
    if (json.contains("number") && json["number"].is_string()) {
      std::string s = json["number"].get<std::string>();
      if (s == "nan") return AttributeValue::Number(std::nan(""));
      if (s == "inf") return AttributeValue::Number(HUGE_VAL);
      if (s == "-inf") return AttributeValue::Number(-HUGE_VAL);
    }
    throw ParseError("unrecognized value object: " + json.dump());
  }
  switch (kind) {
    case AttributeKind::kSet: {
      if (!json.is_array())
        throw ParseError("set attribute expects an array: " + json.dump());
      std::vector<std::string> items;
      for (const auto& item : json)
        items.push_back(item.is_string() ? item.get<std::string>()
                                         : item.dump());
      return AttributeValue::Set(std::move(items));
    }
    case AttributeKind::kNumeric: {
      if (json.is_number()) return AttributeValue::Number(json.get<double>());
      if (json.is_string()) {
        if (auto v = ParseDouble(json.get<std::string>()))
          return AttributeValue::Number(*v);
      }
      throw ParseError("numeric attribute expects a number: " + json.dump());
    }
    case AttributeKind::kTextual:
    case AttributeKind::kCategorical: {
      if (json.is_string()) return AttributeValue::Text(json.get<std::string>());
      if (json.is_boolean())
        return AttributeValue::Text(json.get<bool>() ? "true" : "false");
      if (json.is_number())
        return AttributeValue::Text(FormatNumber(json.get<double>()));
      throw ParseError("textual attribute expects a string: " + json.dump());
    }
  }
  throw ParseError("unreachable attribute kind");
}

Json AttributeMapToJson(const AttributeMap& fingerprint) {
  Json out = Json::object();
  for (const auto& [name, value] : fingerprint) out[name] = ValueToJson(value);
  return out;
}

AttributeMap AttributeMapFromJson(const Json& json, const Schema& schema) {
  if (!json.is_object()) throw ParseError("attribute map must be an object");
  AttributeMap out;
  for (const auto& [name, value] : json.items()) {
    size_t index = schema.RequireIndex(name);
    out.emplace(name, ValueFromJson(value, schema[index].kind));
  }
  return out;
}

Json FingerprintToJson(const Fingerprint& fingerprint, const Schema& schema) {
  Json out = Json::object();
  for (size_t i = 0; i < schema.size(); ++i)
    out[schema[i].name] = ValueToJson(fingerprint[i]);
  return out;
}

Fingerprint FingerprintFromJson(const Json& json, const Schema& schema) {
  return AlignToSchema(AttributeMapFromJson(json, schema), schema);
}

Json EntryToJson(const Entry& entry, const Schema& schema) {
  Json j = {{"uid", entry.uid},
            {"ts_ms", entry.ts_ms},
            {"ip_hash", entry.ip_hash},
            {"attrs", FingerprintToJson(entry.fingerprint, schema)}};
  if (!entry.times_ms.empty()) {
    Json times = Json::object();
    for (const auto& [name, ms] : entry.times_ms) times[name] = ms;
    j["times_ms"] = std::move(times);
  }
  if (entry.total_ms) j["total_ms"] = *entry.total_ms;
  return j;
}

Entry EntryFromJson(const Json& json, const Schema& schema,
                    const IngestOptions& options) {
  if (!json.is_object()) throw ParseError("entry must be an object");
  Entry e;
  e.uid = json.at("uid").get<std::string>();
  e.ts_ms = json.at("ts_ms").get<std::int64_t>();
  if (json.contains("ip_hash")) {
    e.ip_hash = json["ip_hash"].get<std::string>();
  } else if (json.contains("ip") && options.ip_hmac_key) {
    e.ip_hash = HashIpAddress(*options.ip_hmac_key,
                              json["ip"].get<std::string>());
  } else {
    throw ParseError("entry lacks ip_hash");
  }
  e.fingerprint = FingerprintFromJson(json.at("attrs"), schema);
  if (json.contains("times_ms")) {
    for (const auto& [name, ms] : json["times_ms"].items()) {
      std::int64_t v = ms.get<std::int64_t>();
      if (v < 0) throw ParseError("negative collection time for " + name);
      e.times_ms.emplace(name, v);
    }
  }
  if (json.contains("total_ms") && !json["total_ms"].is_null())
    e.total_ms = json["total_ms"].get<std::int64_t>();
  return e;
}

LoadResult LoadJsonl(std::istream& in, const Schema& schema,
                     const IngestOptions& options) {
  std::vector<Entry> entries;
  size_t malformed = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try {
      entries.push_back(EntryFromJson(Json::parse(line), schema, options));
    } catch (const std::exception&) {
      ++malformed;
    }
  }
  return {Dataset(schema, std::move(entries)), malformed};
}

Dataset ReadJsonl(std::istream& in, const Schema& schema,
                  const IngestOptions& options) {
  std::vector<Entry> entries;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try {
      entries.push_back(EntryFromJson(Json::parse(line), schema, options));
    } catch (const std::exception& ex) {
      throw ParseError("line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return Dataset(schema, std::move(entries));
}

Dataset ReadJsonlFile(const std::string& path, const Schema& schema,
                      const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path);
  return ReadJsonl(in, schema, options);
}

void WriteJsonl(std::ostream& out, const Dataset& dataset) {
  for (const auto& e : dataset.entries())
    out << EntryToJson(e, dataset.schema()).dump() << '\n';
}

void WriteJsonlFile(const std::string& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write " + path);
  WriteJsonl(out, dataset);
}

namespace {

AttributeValue LegacyValue(const std::string& field, AttributeKind kind) {
  if (field.starts_with(kLegacyFlagPrefix)) {
    if (auto flag = ParseFlagCode(field.substr(kLegacyFlagPrefix.size())))
      return AttributeValue::Flag(*flag);
  }
  switch (kind) {
    case AttributeKind::kSet:
      return AttributeValue::Set(field.empty() ? std::vector<std::string>{}
                                               : Split(field, ','));
    case AttributeKind::kNumeric:
      if (auto v = ParseDouble(field)) return AttributeValue::Number(*v);
      return AttributeValue::Flag(ErrorFlag::kUndefinedValue);
    default:
      return AttributeValue::Text(field);
  }
}

std::string LegacyField(AttributeValue value) {
  switch (value.type()) {
    case ValueType::kFlag:
      return std::string(kLegacyFlagPrefix) + std::string(FlagCode(value.flag()));
    case ValueType::kSet: {
      std::string out;
      for (size_t i = 0; i < value.items().size(); ++i) {
        if (i > 0) out.push_back(',');
        out += value.items()[i];
      }
      return out;
    }
    default:
      return value.encoded();
  }
}

}  // namespace

LoadResult LoadLegacy(std::istream& in, const Schema& schema) {
  std::vector<Entry> entries;
  size_t malformed = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = Split(line, ';');
    if (fields.size() != schema.size() + 3) {
      ++malformed;
      continue;
    }
    Entry e;
    e.uid = fields[0];
    auto ts = ParseDouble(fields[1]);
    if (!ts || *ts < 0 || *ts != std::trunc(*ts)) {
      ++malformed;
      continue;
    }
    e.ts_ms = static_cast<std::int64_t>(*ts);
    e.ip_hash = fields[2];
    e.fingerprint.reserve(schema.size());
    for (size_t i = 0; i < schema.size(); ++i)
      e.fingerprint.push_back(LegacyValue(fields[i + 3], schema[i].kind));
    entries.push_back(std::move(e));
  }
  return {Dataset(schema, std::move(entries)), malformed};
}

std::string FormatLegacyRecord(const Entry& entry, const Schema& schema) {
  std::string out = entry.uid + ";" + std::to_string(entry.ts_ms) + ";" +
                    entry.ip_hash;
  for (size_t i = 0; i < schema.size(); ++i) {
    out.push_back(';');
    out += LegacyField(entry.fingerprint[i]);
  }
  return out;
}

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& ex) {
    throw ParseError(path + ": " + ex.what());
  }
}

void WriteJsonFile(const std::string& path, const Json& json) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write " + path);
  out << json.dump(2) << '\n';
}

}  // namespace fpkit
