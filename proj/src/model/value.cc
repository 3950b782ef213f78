#include "fpkit/model/value.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace fpkit {
namespace {

struct Payload {
  ValueType type = ValueType::kFlag;
  double number = 0;
  ErrorFlag flag = ErrorFlag::kUndefinedValue;
  std::vector<std::string> items;
  std::string encoded;
};

constexpr char kItemSeparator = '\x1E';
constexpr std::string_view kFlagPrefix = "\x02" "FLAG:";

// Append-only table. Payload slots are allocated in fixed-size chunks whose
// addresses never change, so readers holding an id need no lock.
class ValueTable {
 public:
  static constexpr std::uint32_t kChunkBits = 14;
  static constexpr std::uint32_t kChunkSize = 1u << kChunkBits;
  static constexpr std::uint32_t kMaxChunks = 1u << 16;

  static ValueTable& Get() {
    static ValueTable* table = new ValueTable();
    return *table;
  }

  std::uint32_t Intern(Payload payload) {
    std::string key;
    key.reserve(payload.encoded.size() + 1);
    key.push_back(static_cast<char>(payload.type));
    key += payload.encoded;
    std::lock_guard lock(mutex_);
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    std::uint32_t id = size_;
    std::uint32_t chunk = id >> kChunkBits;
    if (chunk >= kMaxChunks) throw std::length_error("value table full");
    if (chunks_[chunk].load(std::memory_order_relaxed) == nullptr)
      chunks_[chunk].store(new Payload[kChunkSize], std::memory_order_release);
    chunks_[chunk].load(std::memory_order_relaxed)[id & (kChunkSize - 1)] =
        std::move(payload);
    ids_.emplace(std::move(key), id);
    ++size_;
    return id;
  }

  const Payload& At(std::uint32_t id) const {
    return chunks_[id >> kChunkBits].load(std::memory_order_acquire)
        [id & (kChunkSize - 1)];
  }

 private:
  ValueTable() {
    for (auto& c : chunks_) c.store(nullptr, std::memory_order_relaxed);
    // Flags occupy ids 0..3 in enum order.
    for (ErrorFlag f : {ErrorFlag::kUnsupported, ErrorFlag::kUndefinedValue,
                        ErrorFlag::kException, ErrorFlag::kTimeout}) {
      Payload p;
      p.type = ValueType::kFlag;
      p.flag = f;
      p.encoded = std::string(kFlagPrefix) + std::string(FlagCode(f));
      Intern(std::move(p));
    }
  }

  std::mutex mutex_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::uint32_t size_ = 0;
  std::array<std::atomic<Payload*>, kMaxChunks> chunks_;
};

}  // namespace

std::string FormatNumber(double number) {
  if (std::isnan(number)) return "nan";
  if (std::isinf(number)) return number > 0 ? "inf" : "-inf";
  std::array<char, 64> buf;
  auto result = std::to_chars(buf.data(), buf.data() + buf.size(), number);
  return std::string(buf.data(), result.ptr);
}

AttributeValue::AttributeValue()
    : id_(static_cast<std::uint32_t>(ErrorFlag::kUndefinedValue)) {}

AttributeValue AttributeValue::Text(std::string_view text) {
  Payload p;
  p.type = ValueType::kText;
  p.encoded = std::string(text);
  return AttributeValue(ValueTable::Get().Intern(std::move(p)));
}

AttributeValue AttributeValue::Number(double number) {
  Payload p;
  p.type = ValueType::kNumber;
  p.number = number;
  p.encoded = FormatNumber(number);
  return AttributeValue(ValueTable::Get().Intern(std::move(p)));
}

AttributeValue AttributeValue::Set(std::vector<std::string> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  Payload p;
  p.type = ValueType::kSet;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i > 0) p.encoded.push_back(kItemSeparator);
    p.encoded += items[i];
  }
  p.items = std::move(items);
  return AttributeValue(ValueTable::Get().Intern(std::move(p)));
}

AttributeValue AttributeValue::Flag(ErrorFlag flag) {
  return AttributeValue(static_cast<std::uint32_t>(flag));
}

ValueType AttributeValue::type() const { return ValueTable::Get().At(id_).type; }

const std::string& AttributeValue::text() const {
  return ValueTable::Get().At(id_).encoded;
}

double AttributeValue::number() const {
  return ValueTable::Get().At(id_).number;
}

const std::vector<std::string>& AttributeValue::items() const {
  return ValueTable::Get().At(id_).items;
}

ErrorFlag AttributeValue::flag() const {
  return ValueTable::Get().At(id_).flag;
}

const std::string& AttributeValue::encoded() const {
  return ValueTable::Get().At(id_).encoded;
}

std::strong_ordering operator<=>(AttributeValue a, AttributeValue b) {
  if (a.id_ == b.id_) return std::strong_ordering::equal;
  const auto& pa = ValueTable::Get().At(a.id_);
  const auto& pb = ValueTable::Get().At(b.id_);
  if (pa.type != pb.type) return pa.type <=> pb.type;
  int c = pa.encoded.compare(pb.encoded);
  return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
}

}  // namespace fpkit
