#ifndef FPKIT_MODEL_IO_H_
#define FPKIT_MODEL_IO_H_

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "fpkit/model/attribute.h"
#include "fpkit/model/dataset.h"
#include "fpkit/model/fingerprint.h"

namespace fpkit {

using Json = nlohmann::json;

// Schema sidecar: {"attributes": [{"name", "kind", "dynamic",
// "extracted_from", "client_side"}]}. A bare array is accepted on input.
Json SchemaToJson(const Schema& schema);
Schema SchemaFromJson(const Json& json);
Schema ReadSchemaFile(const std::string& path);
void WriteSchemaFile(const Schema& schema, const std::string& path);

// Value mapping: strings, numbers, arrays of strings, and {"flag": code}.
// JSON null reads as the undefined-value flag. Parsing is guided by the
// attribute kind; throws ParseError on a shape the kind cannot hold.
Json ValueToJson(AttributeValue value);
AttributeValue ValueFromJson(const Json& json, AttributeKind kind);

Json AttributeMapToJson(const AttributeMap& fingerprint);
// Throws SchemaError on unknown attribute names.
AttributeMap AttributeMapFromJson(const Json& json, const Schema& schema);

Json FingerprintToJson(const Fingerprint& fingerprint, const Schema& schema);
// Requires every schema attribute to be present.
Fingerprint FingerprintFromJson(const Json& json, const Schema& schema);

struct IngestOptions {
  // When set, records carrying a raw "ip" field instead of "ip_hash" are
  // hashed with HMAC-SHA256 under this key.
  std::optional<std::string> ip_hmac_key;
};

Json EntryToJson(const Entry& entry, const Schema& schema);
Entry EntryFromJson(const Json& json, const Schema& schema,
                    const IngestOptions& options = {});

struct LoadResult {
  Dataset dataset;
  // Records dropped because they could not be parsed against the schema.
  size_t malformed = 0;
};

// JSON Lines, one entry per line. Lenient: bad lines are counted.
LoadResult LoadJsonl(std::istream& in, const Schema& schema,
                     const IngestOptions& options = {});
// Strict variant: throws ParseError naming the first bad line.
Dataset ReadJsonl(std::istream& in, const Schema& schema,
                  const IngestOptions& options = {});
Dataset ReadJsonlFile(const std::string& path, const Schema& schema,
                      const IngestOptions& options = {});
void WriteJsonl(std::ostream& out, const Dataset& dataset);
void WriteJsonlFile(const std::string& path, const Dataset& dataset);

// Legacy semicolon-separated records: uid;ts_ms;ip_hash;v1;...;vn with the
// values in schema order. Set items are comma-separated and flags are
// written "ERR:<code>". Records with a wrong field count are counted as
// malformed and dropped.
LoadResult LoadLegacy(std::istream& in, const Schema& schema);
std::string FormatLegacyRecord(const Entry& entry, const Schema& schema);

Json ReadJsonFile(const std::string& path);
void WriteJsonFile(const std::string& path, const Json& json);

}  // namespace fpkit

#endif  // FPKIT_MODEL_IO_H_
