#ifndef FPKIT_MODEL_ATTRIBUTE_H_
#define FPKIT_MODEL_ATTRIBUTE_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fpkit {

// How the values of an attribute are compared by the advanced verifier:
// textual values by edit distance, sets by Jaccard distance, numbers by
// absolute difference, categories by identity only.
enum class AttributeKind { kTextual, kSet, kNumeric, kCategorical };

// Stored in place of a value when an attribute could not be collected.
enum class ErrorFlag { kUnsupported, kUndefinedValue, kException, kTimeout };

std::string_view KindName(AttributeKind kind);
std::optional<AttributeKind> ParseKind(std::string_view name);

std::string_view FlagCode(ErrorFlag flag);
std::optional<ErrorFlag> ParseFlagCode(std::string_view code);

struct AttributeDescriptor {
  std::string name;
  AttributeKind kind = AttributeKind::kCategorical;
  // Challenge-dependent media attribute (canvas, audio, WebGL).
  bool dynamic = false;
  // Set for attributes derived from another attribute during preprocessing.
  std::optional<std::string> extracted_from;
  // False for values taken from HTTP headers.
  bool collectible_client_side = true;

  bool operator==(const AttributeDescriptor&) const = default;
};

// Ordered attribute list. The order is canonical: fingerprints are stored
// as value vectors aligned with it and hashed in this order.
class Schema {
 public:
  Schema() = default;
  // Throws SchemaError if names repeat, an extraction source is unknown or
  // itself extracted, or a dynamic attribute is not categorical.
  explicit Schema(std::vector<AttributeDescriptor> attributes);

  size_t size() const { return attributes_.size(); }
  bool empty() const { return attributes_.empty(); }
  const AttributeDescriptor& operator[](size_t i) const {
    return attributes_[i];
  }
  const std::vector<AttributeDescriptor>& attributes() const {
    return attributes_;
  }
  auto begin() const { return attributes_.begin(); }
  auto end() const { return attributes_.end(); }

  std::optional<size_t> IndexOf(std::string_view name) const;
  // Like IndexOf but throws SchemaError when absent.
  size_t RequireIndex(std::string_view name) const;
  bool Contains(std::string_view name) const {
    return IndexOf(name).has_value();
  }

  // Returns a new schema with |extra| appended.
  Schema Extend(const std::vector<AttributeDescriptor>& extra) const;

  bool operator==(const Schema& other) const {
    return attributes_ == other.attributes_;
  }

 private:
  std::vector<AttributeDescriptor> attributes_;
  std::unordered_map<std::string, size_t> index_;
};

}  // namespace fpkit

#endif  // FPKIT_MODEL_ATTRIBUTE_H_
