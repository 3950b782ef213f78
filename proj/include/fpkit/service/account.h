#ifndef FPKIT_SERVICE_ACCOUNT_H_
#define FPKIT_SERVICE_ACCOUNT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fpkit/model/fingerprint.h"
#include "fpkit/model/io.h"

namespace fpkit {

// A pre-provisioned challenge. The verifier is
// SHA-256(seed ":" response_hash), hex-encoded.
struct ChallengeEntry {
  std::string challenge_id;
  std::string seed;
  std::string verifier;
  bool used = false;
  bool pending = false;
};

struct RegisteredBrowser {
  std::string browser_id;
  Fingerprint fingerprint;
  std::int64_t last_update_ms = 0;
  std::vector<ChallengeEntry> ledger;

  size_t UnusedChallenges() const;
  bool Depleted() const { return UnusedChallenges() == 0; }
  bool HasSeed(std::string_view seed) const;
};

struct AccountRecord {
  std::string account_id;
  std::string password_verifier;
  std::vector<RegisteredBrowser> browsers;
  // SHA-256 of each unused backup code, hex-encoded.
  std::vector<std::string> backup_codes;
  size_t failed_attempts = 0;
  bool locked = false;
  std::uint64_t next_serial = 0;
  // Bumped by the store on every committed write.
  std::uint64_t version = 0;

  RegisteredBrowser* FindBrowser(std::string_view browser_id);
  const RegisteredBrowser* FindBrowser(std::string_view browser_id) const;
  // Browser owning |challenge_id| and the entry itself, or nulls.
  std::pair<RegisteredBrowser*, ChallengeEntry*> FindChallenge(
      std::string_view challenge_id);

  // Removes the code when present. Returns whether it was.
  bool ConsumeBackupCode(std::string_view code);
};

// A client-computed response to a future challenge seed.
struct ProvisionedResponse {
  std::string seed;
  std::string response_hash;
};

std::string ChallengeVerifier(std::string_view seed,
                              std::string_view response_hash);
std::string BackupCodeDigest(std::string_view code);

Json AccountToJson(const AccountRecord& record, const Schema& schema);
AccountRecord AccountFromJson(const Json& json, const Schema& schema);

}  // namespace fpkit

#endif  // FPKIT_SERVICE_ACCOUNT_H_
