#ifndef FPKIT_MODEL_VALUE_H_
#define FPKIT_MODEL_VALUE_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "fpkit/model/attribute.h"

namespace fpkit {

enum class ValueType : std::uint8_t { kText, kNumber, kSet, kFlag };

// Immutable attribute value: a string (textual or categorical attributes), a
// number, a set of strings, or an ErrorFlag.
//
// Values are interned in a process-wide table, so an AttributeValue is a
// 4-byte handle and equality is a handle comparison. Two values are equal
// iff they have the same type and the same canonical encoding; in
// particular two equal flags are equal and a flag never equals a concrete
// value. Interning is thread-safe and interned payloads live for the whole
// process.
class AttributeValue {
 public:
  // The undefined-value flag.
  AttributeValue();

  static AttributeValue Text(std::string_view text);
  static AttributeValue Number(double number);
  // Items are sorted and deduplicated.
  static AttributeValue Set(std::vector<std::string> items);
  static AttributeValue Flag(ErrorFlag flag);

  ValueType type() const;
  bool is_flag() const { return type() == ValueType::kFlag; }

  // Accessors are only meaningful for the matching type.
  const std::string& text() const;
  double number() const;
  const std::vector<std::string>& items() const;
  ErrorFlag flag() const;

  // Canonical byte encoding: text as-is, numbers in shortest round-trip
  // decimal, set items sorted and joined by 0x1E, flags as "\x02FLAG:<code>".
  const std::string& encoded() const;

  std::uint32_t id() const { return id_; }

  friend bool operator==(AttributeValue a, AttributeValue b) {
    return a.id_ == b.id_;
  }
  // Process-independent order: by type, then encoding.
  friend std::strong_ordering operator<=>(AttributeValue a, AttributeValue b);

 private:
  explicit AttributeValue(std::uint32_t id) : id_(id) {}

  std::uint32_t id_;
};

inline bool ValueIdentical(AttributeValue a, AttributeValue b) {
  return a == b;
}

// Shortest decimal representation that parses back to the same double.
std::string FormatNumber(double number);

}  // namespace fpkit

template <>
struct std::hash<fpkit::AttributeValue> {
  size_t operator()(fpkit::AttributeValue v) const noexcept {
    return std::hash<std::uint32_t>{}(v.id());
  }
};

#endif  // FPKIT_MODEL_VALUE_H_
