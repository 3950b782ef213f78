#include "fpkit/model/attribute.h"

#include "fpkit/error.h"

namespace fpkit {

std::string_view KindName(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::kTextual:
      return "textual";
    case AttributeKind::kSet:
      return "set";
    case AttributeKind::kNumeric:
      return "numeric";
    case AttributeKind::kCategorical:
      return "categorical";
  }
  return "categorical";
}

std::optional<AttributeKind> ParseKind(std::string_view name) {
  if (name == "textual") return AttributeKind::kTextual;
  if (name == "set") return AttributeKind::kSet;
  if (name == "numeric") return AttributeKind::kNumeric;
  if (name == "categorical") return AttributeKind::kCategorical;
  return std::nullopt;
}

std::string_view FlagCode(ErrorFlag flag) {
  switch (flag) {
    case ErrorFlag::kUnsupported:
      return "unsupported";
    case ErrorFlag::kUndefinedValue:
      return "undefined";
    case ErrorFlag::kException:
      return "exception";
    case ErrorFlag::kTimeout:
      return "timeout";
  }
  return "undefined";
}

std::optional<ErrorFlag> ParseFlagCode(std::string_view code) {
  if (code == "unsupported") return ErrorFlag::kUnsupported;
  if (code == "undefined") return ErrorFlag::kUndefinedValue;
  if (code == "exception") return ErrorFlag::kException;
  if (code == "timeout") return ErrorFlag::kTimeout;
  return std::nullopt;
}

Schema::Schema(std::vector<AttributeDescriptor> attributes)
    : attributes_(std::move(attributes)) {
  for (size_t i = 0; i < attributes_.size(); ++i) {
    const auto& a = attributes_[i];
    if (a.name.empty()) throw SchemaError("attribute with empty name");
    if (!index_.emplace(a.name, i).second)
      throw SchemaError("duplicate attribute name: " + a.name);
    if (a.dynamic && a.kind != AttributeKind::kCategorical)
      throw SchemaError("dynamic attribute must be categorical: " + a.name);
  }
  for (const auto& a : attributes_) {
    if (!a.extracted_from) continue;
    auto it = index_.find(*a.extracted_from);
    if (it == index_.end())
      throw SchemaError("attribute " + a.name +
                        " extracted from unknown attribute " +
                        *a.extracted_from);
    if (attributes_[it->second].extracted_from)
      throw SchemaError("attribute " + a.name +
                        " extracted from an extracted attribute");
  }
}

std::optional<size_t> Schema::IndexOf(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

size_t Schema::RequireIndex(std::string_view name) const {
  auto index = IndexOf(name);
  if (!index) throw SchemaError("unknown attribute: " + std::string(name));
  return *index;
}

Schema Schema::Extend(const std::vector<AttributeDescriptor>& extra) const {
  std::vector<AttributeDescriptor> all = attributes_;
  all.insert(all.end(), extra.begin(), extra.end());
  return Schema(std::move(all));
}

}  // namespace fpkit
