#ifndef FPKIT_UTIL_DIGEST_H_
#define FPKIT_UTIL_DIGEST_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace fpkit {

using Sha256Digest = std::array<std::uint8_t, 32>;

// Incremental SHA-256 backed by OpenSSL's EVP interface.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void Update(std::string_view bytes);
  Sha256Digest Finish();

 private:
  void* ctx_;
};

Sha256Digest Sha256Of(std::string_view bytes);
Sha256Digest HmacSha256(std::string_view key, std::string_view message);

std::string HexEncode(std::span<const std::uint8_t> bytes);
// Returns false when |hex| is not an even-length hexadecimal string.
bool HexDecode(std::string_view hex, std::string* out);

// HMAC-SHA256 of a raw IP address under an operator key, hex-encoded.
std::string HashIpAddress(std::string_view key, std::string_view ip);

// Comparison that does not short-circuit on the first differing byte.
bool ConstantTimeEquals(std::string_view a, std::string_view b);

}  // namespace fpkit

#endif  // FPKIT_UTIL_DIGEST_H_
