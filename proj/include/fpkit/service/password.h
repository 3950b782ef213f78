#ifndef FPKIT_SERVICE_PASSWORD_H_
#define FPKIT_SERVICE_PASSWORD_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace fpkit {

// Argon2id verifiers in the libsodium string format (salt and parameters
// embedded).
class PasswordHasher {
 public:
  PasswordHasher(std::uint64_t opslimit, size_t memlimit);

  std::string Hash(std::string_view password) const;
  bool Verify(std::string_view verifier, std::string_view password) const;

  // Runs a verification against a fixed decoy so that unknown accounts cost
  // the same as known ones.
  void VerifyDecoy(std::string_view password) const;

 private:
  std::uint64_t opslimit_;
  size_t memlimit_;
  std::string decoy_;
};

// Hex string of |bytes| random bytes from the system CSPRNG.
std::string RandomToken(size_t bytes);

// Throws Error("crypto_unavailable") when libsodium cannot start.
void EnsureSodium();

}  // namespace fpkit

#endif  // FPKIT_SERVICE_PASSWORD_H_
