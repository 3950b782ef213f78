#ifndef FPKIT_SERVICE_AUTH_SERVICE_H_
#define FPKIT_SERVICE_AUTH_SERVICE_H_

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fpkit/error.h"
#include "fpkit/service/account.h"
#include "fpkit/service/config.h"
#include "fpkit/service/password.h"
#include "fpkit/service/store.h"
#include "fpkit/verify/matching.h"

namespace fpkit {

// An error with the HTTP status it maps to.
class ServiceError : public Error {
 public:
  ServiceError(std::string code, int status, const std::string& message)
      : Error(std::move(code), message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

enum class AuthOutcome { kAccepted, kRejected, kLocked, kRecoveryRequired };

std::string_view OutcomeName(AuthOutcome outcome);

struct AuthDecision {
  AuthOutcome outcome = AuthOutcome::kRejected;
  std::optional<std::string> matched_browser_id;
  size_t match_count = 0;
  size_t challenges_remaining = 0;
};

struct EnrollResult {
  std::string browser_id;
  std::vector<std::string> backup_codes;
  size_t challenges = 0;
  bool challenge_depleted = false;
};

struct IssuedChallenge {
  std::string challenge_id;
  std::string seed;
};

struct AuthRequest {
  std::string account_id;
  std::string password;
  Fingerprint fingerprint;
  std::optional<std::string> challenge_id;
  std::string response_hash;
  // Responses to future seeds, stored on acceptance.
  std::vector<ProvisionedResponse> provision;
};

struct BrowserUpdate {
  std::string browser_id;
  size_t challenges = 0;
};

class AuthService {
 public:
  using Clock = std::function<std::int64_t()>;

  AuthService(const ServiceConfig& config, MatchingConfig matching,
              std::unique_ptr<AccountStore> store, Clock clock = {});

  const Schema& schema() const { return matching_.schema(); }
  const MatchingConfig& matching() const { return matching_; }
  VerificationMode mode() const { return mode_; }
  size_t theta() const { return matching_.theta(); }
  size_t accounts() const { return store_->Count(); }

  // Conflict (409) when the id is taken. Up to R responses are kept.
  EnrollResult Enroll(const std::string& account_id, const std::string& password,
                      const Fingerprint& fingerprint,
                      const std::vector<ProvisionedResponse>& responses);

  // Returns the pending challenge when there is one, else marks the next
  // unused one pending. Unknown accounts and browsers get a stable decoy.
  // recovery_required (409) when the ledger is exhausted.
  IssuedChallenge IssueChallenge(const std::string& account_id,
                                 const std::string& browser_id);

  AuthDecision Authenticate(const AuthRequest& request);

  // The proof is a one-time backup code; it is consumed on success.
  // authentication_failed (401) on a bad proof.
  BrowserUpdate RegisterBrowser(const std::string& account_id,
                                const std::string& proof,
                                const Fingerprint& fingerprint,
                                const std::vector<ProvisionedResponse>& responses);

  // Replaces the browser's fingerprint, clears the lock and the failure
  // counter. When responses are given the unused ledger is retired and
  // replaced. not_found (404) for an unknown browser.
  BrowserUpdate Recover(const std::string& account_id, const std::string& proof,
                        const std::string& browser_id,
                        const Fingerprint& fingerprint,
                        const std::vector<ProvisionedResponse>& responses);

  // Browsers the user agent prefilter keeps for |fingerprint|: those sharing
  // the browser and OS family, or all of them when none does.
  std::vector<const RegisteredBrowser*> RouteCandidates(
      const AccountRecord& record, const Fingerprint& fingerprint) const;

  std::optional<AccountRecord> Find(const std::string& account_id);

 private:
  struct Match {
    const RegisteredBrowser* browser = nullptr;
    size_t count = 0;
  };

  Match BestMatch(const AccountRecord& record,
                  const Fingerprint& fingerprint) const;
  std::string UserAgentFamily(const Fingerprint& fingerprint) const;
  void CheckFingerprint(const Fingerprint& fingerprint) const;
  size_t AppendResponses(RegisteredBrowser* browser,
                         const std::vector<ProvisionedResponse>& responses,
                         AccountRecord* record) const;
  static std::string NewChallengeId(AccountRecord* record);
  IssuedChallenge Decoy(const std::string& account_id,
                        const std::string& browser_id) const;
  std::mutex& StripeFor(const std::string& account_id);
  bool Commit(const AccountRecord& record);
  // Runs |mutate| on a fresh copy under the account lock until the
  // versioned write succeeds. |mutate| returns whether to write. Returns
  // false when the account is missing.
  template <typename F>
  bool Mutate(const std::string& account_id, F&& mutate);

  ServiceConfig config_;
  MatchingConfig matching_;
  VerificationMode mode_;
  std::unique_ptr<AccountStore> store_;
  Clock clock_;
  PasswordHasher hasher_;
  std::string secret_;
  std::optional<size_t> user_agent_index_;
  std::array<std::mutex, 64> stripes_;
};

// Accepts the canonical attribute map, or a collection payload whose
// "attrs" member holds it. Throws SchemaError on missing or unknown names.
Fingerprint FingerprintFromPayload(const Json& payload, const Schema& schema);

std::vector<ProvisionedResponse> ResponsesFromJson(const Json& json);

// Schema from config.schema_path, thresholds from config.matching_path (or
// strict identity), then the theta and mode overrides.
MatchingConfig LoadMatching(const ServiceConfig& config);

}  // namespace fpkit

#endif  // FPKIT_SERVICE_AUTH_SERVICE_H_
