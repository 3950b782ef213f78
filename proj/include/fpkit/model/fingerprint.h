#ifndef FPKIT_MODEL_FINGERPRINT_H_
#define FPKIT_MODEL_FINGERPRINT_H_

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fpkit/model/attribute.h"
#include "fpkit/model/value.h"

namespace fpkit {

// Values aligned with a Schema: fingerprint[i] belongs to schema[i].
using Fingerprint = std::vector<AttributeValue>;

// Name-keyed form used at the edges (JSON payloads, CLI input).
using AttributeMap = std::map<std::string, AttributeValue, std::less<>>;

struct FingerprintHash {
  std::array<std::uint8_t, 32> digest{};

  std::string ToHex() const;
  friend auto operator<=>(const FingerprintHash&,
                          const FingerprintHash&) = default;
};

// Number of attributes with identical values. Throws SchemaError when the
// fingerprints have different lengths.
size_t CountIdentical(std::span<const AttributeValue> f,
                      std::span<const AttributeValue> g);

// SHA-256 over the canonical serialization: the encoded values in schema
// order, joined by 0x1F.
FingerprintHash HashFingerprint(std::span<const AttributeValue> fingerprint);

// Throws SchemaError when |fingerprint| lacks a schema attribute.
FingerprintHash CanonicalHash(const AttributeMap& fingerprint,
                              const Schema& schema);

// Throws SchemaError unless the keys are exactly the schema's names.
Fingerprint AlignToSchema(const AttributeMap& fingerprint,
                          const Schema& schema);
AttributeMap ToAttributeMap(std::span<const AttributeValue> fingerprint,
                            const Schema& schema);

}  // namespace fpkit

template <>
struct std::hash<fpkit::FingerprintHash> {
  size_t operator()(const fpkit::FingerprintHash& h) const noexcept {
    size_t out;
    std::memcpy(&out, h.digest.data(), sizeof(out));
    return out;
  }
};

#endif  // FPKIT_MODEL_FINGERPRINT_H_
