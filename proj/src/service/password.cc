#include "fpkit/service/password.h"

#include <sodium.h>

#include <vector>

#include "fpkit/error.h"
#include "fpkit/util/digest.h"

namespace fpkit {

void EnsureSodium() {
  if (sodium_init() < 0) throw Error("crypto_unavailable", "sodium_init failed");
}

PasswordHasher::PasswordHasher(std::uint64_t opslimit, size_t memlimit)
    : opslimit_(opslimit), memlimit_(memlimit) {
  EnsureSodium();
  decoy_ = Hash(RandomToken(16));
}

std::string PasswordHasher::Hash(std::string_view password) const {
  char out[crypto_pwhash_STRBYTES];
  if (crypto_pwhash_str(out, password.data(), password.size(), opslimit_,
                        memlimit_) != 0)
    throw Error("out_of_memory", "password hashing failed");
  return out;
}

bool PasswordHasher::Verify(std::string_view verifier,
                            std::string_view password) const {
  std::string terminated(verifier);
  return crypto_pwhash_str_verify(terminated.c_str(), password.data(),
                                  password.size()) == 0;
}

void PasswordHasher::VerifyDecoy(std::string_view password) const {
  (void)Verify(decoy_, password);
}

std::string RandomToken(size_t bytes) {
  EnsureSodium();
  std::vector<std::uint8_t> buffer(bytes);
  randombytes_buf(buffer.data(), buffer.size());
  return HexEncode(buffer);
}

}  // namespace fpkit
