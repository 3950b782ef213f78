#include "fpkit/model/fingerprint.h"

#include "fpkit/error.h"
#include "fpkit/util/digest.h"

namespace fpkit {

namespace {
constexpr std::string_view kValueSeparator = "\x1F";
}  // namespace

std::string FingerprintHash::ToHex() const { return HexEncode(digest); }

size_t CountIdentical(std::span<const AttributeValue> f,
                      std::span<const AttributeValue> g) {
  if (f.size() != g.size())
    throw SchemaError("compared fingerprints have different lengths");
  size_t count = 0;
  for (size_t i = 0; i < f.size(); ++i) count += (f[i] == g[i]);
  return count;
}

FingerprintHash HashFingerprint(std::span<const AttributeValue> fingerprint) {
  Sha256 h;
  for (size_t i = 0; i < fingerprint.size(); ++i) {
    if (i > 0) h.Update(kValueSeparator);
    h.Update(fingerprint[i].encoded());
  }
  return FingerprintHash{h.Finish()};
}

FingerprintHash CanonicalHash(const AttributeMap& fingerprint,
                              const Schema& schema) {
  Fingerprint aligned;
  aligned.reserve(schema.size());
  for (const auto& attribute : schema) {
    auto it = fingerprint.find(attribute.name);
    if (it == fingerprint.end())
      throw SchemaError("fingerprint lacks attribute " + attribute.name);
    aligned.push_back(it->second);
  }
  return HashFingerprint(aligned);
}

Fingerprint AlignToSchema(const AttributeMap& fingerprint,
                          const Schema& schema) {
  Fingerprint aligned;
  aligned.reserve(schema.size());
  for (const auto& attribute : schema) {
    auto it = fingerprint.find(attribute.name);
    if (it == fingerprint.end())
      throw SchemaError("fingerprint lacks attribute " + attribute.name);
    aligned.push_back(it->second);
  }
  if (fingerprint.size() != schema.size()) {
    for (const auto& [name, value] : fingerprint) {
      if (!schema.Contains(name))
        throw SchemaError("fingerprint has unknown attribute " + name);
    }
  }
  return aligned;
}

AttributeMap ToAttributeMap(std::span<const AttributeValue> fingerprint,
                            const Schema& schema) {
  if (fingerprint.size() != schema.size())
    throw SchemaError("fingerprint size does not match schema");
  AttributeMap out;
  for (size_t i = 0; i < schema.size(); ++i)
    out.emplace(schema[i].name, fingerprint[i]);
  return out;
}

}  // namespace fpkit
