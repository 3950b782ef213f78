#include "fpkit/service/auth_service.h"

#include <chrono>

#include "fpkit/preprocess/environment.h"
#include "fpkit/util/digest.h"

namespace fpkit {
namespace {

constexpr size_t kMaxIdLength = 128;
constexpr size_t kMaxSeedLength = 128;
constexpr size_t kMaxResponseLength = 256;
constexpr int kMaxCommitAttempts = 16;

ServiceError AuthFailed() {
  return ServiceError("authentication_failed", 401, "authentication failed");
}

void CheckId(std::string_view what, std::string_view id) {
  if (id.empty() || id.size() > kMaxIdLength)
    throw ServiceError("bad_request", 400, std::string(what) + " is invalid");
  for (char c : id)
    if (static_cast<unsigned char>(c) < 0x20)
      throw ServiceError("bad_request", 400,
                         std::string(what) + " has control characters");
}

void CheckResponses(const std::vector<ProvisionedResponse>& responses) {
  for (const auto& r : responses) {
    if (r.seed.empty() || r.seed.size() > kMaxSeedLength)
      throw ServiceError("bad_request", 400, "challenge seed is invalid");
    if (r.response_hash.empty() || r.response_hash.size() > kMaxResponseLength)
      throw ServiceError("bad_request", 400, "response hash is invalid");
  }
}

std::int64_t SystemMillis() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::string_view OutcomeName(AuthOutcome outcome) {
  switch (outcome) {
    case AuthOutcome::kAccepted:
      return "accepted";
    case AuthOutcome::kRejected:
      return "rejected";
    case AuthOutcome::kLocked:
      return "locked";
    case AuthOutcome::kRecoveryRequired:
      return "recovery_required";
  }
  return "rejected";
}

AuthService::AuthService(const ServiceConfig& config, MatchingConfig matching,
                         std::unique_ptr<AccountStore> store, Clock clock)
    : config_(config),
      matching_(std::move(matching)),
      mode_(config.mode),
      store_(std::move(store)),
      clock_(clock ? std::move(clock) : Clock(SystemMillis)),
      hasher_(config.argon2_opslimit, config.argon2_memlimit),
      secret_(RandomToken(32)) {
  config_.Validate();
  if (matching_.theta() > matching_.size())
    throw ConfigError("theta exceeds the number of attributes");
  if (auto i = schema().IndexOf(config.user_agent_attribute))
    user_agent_index_ = *i;
}

std::mutex& AuthService::StripeFor(const std::string& account_id) {
  return stripes_[std::hash<std::string>{}(account_id) % stripes_.size()];
}

std::optional<AccountRecord> AuthService::Find(const std::string& account_id) {
  auto stored = store_->Load(account_id);
  if (!stored) return std::nullopt;
  AccountRecord record = AccountFromJson(Json::parse(stored->body), schema());
  record.version = stored->version;
  return record;
}

bool AuthService::Commit(const AccountRecord& record) {
  return store_->Update(record.account_id, record.version,
                        AccountToJson(record, schema()).dump());
}

template <typename F>
bool AuthService::Mutate(const std::string& account_id, F&& mutate) {
  std::lock_guard lock(StripeFor(account_id));
  for (int attempt = 0; attempt < kMaxCommitAttempts; ++attempt) {
    auto record = Find(account_id);
    if (!record) return false;
    if (!mutate(*record) || Commit(*record)) return true;
  }
  throw ServiceError("contention", 503, "account is busy");
}

void AuthService::CheckFingerprint(const Fingerprint& fingerprint) const {
  if (fingerprint.size() != schema().size())
    throw SchemaError("fingerprint has " + std::to_string(fingerprint.size()) +
                      " attributes, schema has " +
                      std::to_string(schema().size()));
}

std::string AuthService::NewChallengeId(AccountRecord* record) {
  return "c" + std::to_string(record->next_serial++) + "-" + RandomToken(8);
}

size_t AuthService::AppendResponses(
    RegisteredBrowser* browser,
    const std::vector<ProvisionedResponse>& responses,
    AccountRecord* record) const {
  size_t added = 0;
  for (const auto& r : responses) {
    if (browser->UnusedChallenges() >= config_.challenges) break;
    if (browser->HasSeed(r.seed)) continue;
    ChallengeEntry entry;
    entry.challenge_id = NewChallengeId(record);
    entry.seed = r.seed;
    entry.verifier = ChallengeVerifier(r.seed, r.response_hash);
    browser->ledger.push_back(std::move(entry));
    ++added;
  }
  return added;
}

EnrollResult AuthService::Enroll(
    const std::string& account_id, const std::string& password,
    const Fingerprint& fingerprint,
    const std::vector<ProvisionedResponse>& responses) {
  CheckId("account_id", account_id);
  if (password.empty())
    throw ServiceError("bad_request", 400, "password is empty");
  CheckFingerprint(fingerprint);
  CheckResponses(responses);

  AccountRecord record;
  record.account_id = account_id;
  record.password_verifier = hasher_.Hash(password);
  RegisteredBrowser browser;
  browser.browser_id = "b-" + RandomToken(8);
  browser.fingerprint = fingerprint;
  browser.last_update_ms = clock_();
  AppendResponses(&browser, responses, &record);

  EnrollResult result;
  result.browser_id = browser.browser_id;
  result.challenges = browser.UnusedChallenges();
  result.challenge_depleted = browser.Depleted();
  record.browsers.push_back(std::move(browser));
  for (size_t i = 0; i < config_.backup_codes; ++i) {
    std::string code = RandomToken(8);
    record.backup_codes.push_back(BackupCodeDigest(code));
    result.backup_codes.push_back(std::move(code));
  }
  if (!store_->Insert(account_id, AccountToJson(record, schema()).dump()))
    throw ServiceError("conflict", 409, "account already exists");
  return result;
}

IssuedChallenge AuthService::Decoy(const std::string& account_id,
                                   const std::string& browser_id) const {
  const std::string key = account_id + '\x1f' + browser_id;
  const std::string id = HexEncode(HmacSha256(secret_, "id:" + key));
  const std::string seed = HexEncode(HmacSha256(secret_, "seed:" + key));
  return {"c" + std::to_string(id[0] % 8) + "-" + id.substr(0, 16),
          seed.substr(0, 32)};
}

IssuedChallenge AuthService::IssueChallenge(const std::string& account_id,
                                            const std::string& browser_id) {
  CheckId("account_id", account_id);
  CheckId("browser_id", browser_id);
  std::optional<IssuedChallenge> issued;
  bool depleted = false;
  bool found = Mutate(account_id, [&](AccountRecord& record) {
    issued.reset();
    depleted = false;
    RegisteredBrowser* browser = record.FindBrowser(browser_id);
    if (browser == nullptr) return false;
    ChallengeEntry* next = nullptr;
    for (auto& c : browser->ledger) {
      if (c.used) continue;
      if (c.pending) {
        next = &c;
        break;
      }
      if (next == nullptr) next = &c;
    }
    if (next == nullptr) {
      depleted = true;
      return false;
    }
    issued = IssuedChallenge{next->challenge_id, next->seed};
    if (next->pending) return false;
    next->pending = true;
    return true;
  });
  if (depleted)
    throw ServiceError("recovery_required", 409,
                       "no unused challenges left; recover the browser");
  if (!found || !issued) return Decoy(account_id, browser_id);
  return *issued;
}

std::string AuthService::UserAgentFamily(const Fingerprint& fingerprint) const {
  if (!user_agent_index_) return {};
  const AttributeValue value = fingerprint[*user_agent_index_];
  if (value.type() != ValueType::kText) return {};
  const EnvironmentClass env = ClassifyEnvironment(value.text());
  return env.browser_family + "/" + env.os_family;
}

std::vector<const RegisteredBrowser*> AuthService::RouteCandidates(
    const AccountRecord& record, const Fingerprint& fingerprint) const {
  std::vector<const RegisteredBrowser*> all;
  std::vector<const RegisteredBrowser*> routed;
  const std::string family = UserAgentFamily(fingerprint);
  for (const auto& b : record.browsers) {
    all.push_back(&b);
    if (!family.empty() && UserAgentFamily(b.fingerprint) == family)
      routed.push_back(&b);
  }
  return routed.empty() ? all : routed;
}

AuthService::Match AuthService::BestMatch(const AccountRecord& record,
                                          const Fingerprint& fingerprint) const {
  Match best;
  for (const RegisteredBrowser* b : RouteCandidates(record, fingerprint)) {
    const size_t count = CountForMode(b->fingerprint, fingerprint, matching_, mode_);
    if (count < matching_.theta()) continue;
    if (best.browser == nullptr || count > best.count ||
        (count == best.count && b->last_update_ms > best.browser->last_update_ms))
      best = {b, count};
  }
  return best;
}

AuthDecision AuthService::Authenticate(const AuthRequest& request) {
  CheckId("account_id", request.account_id);
  CheckFingerprint(request.fingerprint);
  CheckResponses(request.provision);

  for (int attempt = 0; attempt < kMaxCommitAttempts; ++attempt) {
    auto snapshot = Find(request.account_id);
    if (!snapshot) {
      hasher_.VerifyDecoy(request.password);
      return {};
    }
    if (snapshot->locked) return {AuthOutcome::kLocked, std::nullopt, 0, 0};

    // Password and fingerprint checks are pure; they run unlocked against
    // the snapshot and are committed only if the record did not move.
    const bool password_ok =
        hasher_.Verify(snapshot->password_verifier, request.password);
    std::optional<std::string> matched_id;
    size_t match_count = 0;
    if (password_ok) {
      Match m = BestMatch(*snapshot, request.fingerprint);
      if (m.browser) {
        matched_id = m.browser->browser_id;
        match_count = m.count;
      }
    }

    std::lock_guard lock(StripeFor(request.account_id));
    auto record = Find(request.account_id);
    if (!record) return {};
    if (record->version != snapshot->version) continue;

    bool challenge_ok = false;
    bool challenge_owner_matches = false;
    if (request.challenge_id) {
      auto [owner, entry] = record->FindChallenge(*request.challenge_id);
      if (entry != nullptr && !entry->used) {
        challenge_ok = ConstantTimeEquals(
            entry->verifier,
            ChallengeVerifier(entry->seed, request.response_hash));
        challenge_owner_matches = matched_id && owner->browser_id == *matched_id;
        entry->used = true;
        entry->pending = false;
      }
    }

    AuthDecision decision;
    RegisteredBrowser* matched =
        matched_id ? record->FindBrowser(*matched_id) : nullptr;
    if (password_ok && matched != nullptr) {
      if (request.challenge_id) {
        if (challenge_ok && challenge_owner_matches)
          decision.outcome = AuthOutcome::kAccepted;
      } else if (matched->Depleted()) {
        decision.outcome = request.provision.empty()
                               ? AuthOutcome::kRecoveryRequired
                               : AuthOutcome::kAccepted;
      }
    }

    if (decision.outcome == AuthOutcome::kAccepted) {
      matched->fingerprint = request.fingerprint;
      matched->last_update_ms = clock_();
      AppendResponses(matched, request.provision, &*record);
      record->failed_attempts = 0;
      decision.matched_browser_id = matched->browser_id;
      decision.match_count = match_count;
      decision.challenges_remaining = matched->UnusedChallenges();
    } else if (decision.outcome == AuthOutcome::kRejected) {
      ++record->failed_attempts;
      if (record->failed_attempts >= config_.lockout) record->locked = true;
    }
    if (Commit(*record)) return decision;
  }
  throw ServiceError("contention", 503, "account is busy");
}

BrowserUpdate AuthService::RegisterBrowser(
    const std::string& account_id, const std::string& proof,
    const Fingerprint& fingerprint,
    const std::vector<ProvisionedResponse>& responses) {
  CheckId("account_id", account_id);
  CheckFingerprint(fingerprint);
  CheckResponses(responses);
  BrowserUpdate update;
  bool proof_ok = false;
  Mutate(account_id, [&](AccountRecord& record) {
    proof_ok = record.ConsumeBackupCode(proof);
    if (!proof_ok) return false;
    RegisteredBrowser browser;
    browser.browser_id = "b-" + RandomToken(8);
    browser.fingerprint = fingerprint;
    browser.last_update_ms = clock_();
    AppendResponses(&browser, responses, &record);
    update = {browser.browser_id, browser.UnusedChallenges()};
    record.browsers.push_back(std::move(browser));
    return true;
  });
  if (!proof_ok) throw AuthFailed();
  return update;
}

BrowserUpdate AuthService::Recover(
    const std::string& account_id, const std::string& proof,
    const std::string& browser_id, const Fingerprint& fingerprint,
    const std::vector<ProvisionedResponse>& responses) {
  CheckId("account_id", account_id);
  CheckId("browser_id", browser_id);
  CheckFingerprint(fingerprint);
  CheckResponses(responses);
  BrowserUpdate update;
  bool proof_ok = false;
  bool browser_found = false;
  Mutate(account_id, [&](AccountRecord& record) {
    proof_ok = false;
    RegisteredBrowser* browser = record.FindBrowser(browser_id);
    browser_found = browser != nullptr;
    // The code is only spent when the request can succeed.
    if (!browser_found) {
      AccountRecord probe = record;
      proof_ok = probe.ConsumeBackupCode(proof);
      return false;
    }
    proof_ok = record.ConsumeBackupCode(proof);
    if (!proof_ok) return false;
    browser->fingerprint = fingerprint;
    browser->last_update_ms = clock_();
    if (!responses.empty()) {
      for (auto& c : browser->ledger) {
        c.used = true;
        c.pending = false;
      }
      AppendResponses(browser, responses, &record);
    }
    record.failed_attempts = 0;
    record.locked = false;
    update = {browser->browser_id, browser->UnusedChallenges()};
    return true;
  });
  if (!proof_ok) throw AuthFailed();
  if (!browser_found)
    throw ServiceError("not_found", 404, "unknown browser_id");
  return update;
}

Fingerprint FingerprintFromPayload(const Json& payload, const Schema& schema) {
  if (!payload.is_object())
    throw SchemaError("fingerprint payload must be an object");
  const bool wrapped = payload.contains("attrs") && !schema.IndexOf("attrs");
  return AlignToSchema(
      AttributeMapFromJson(wrapped ? payload["attrs"] : payload, schema), schema);
}

std::vector<ProvisionedResponse> ResponsesFromJson(const Json& json) {
  std::vector<ProvisionedResponse> out;
  if (json.is_null()) return out;
  if (!json.is_array())
    throw ServiceError("bad_request", 400, "responses must be an array");
  for (const auto& item : json) {
    if (!item.is_object() || !item.contains("seed") ||
        !item.contains("response_hash") || !item["seed"].is_string() ||
        !item["response_hash"].is_string())
      throw ServiceError("bad_request", 400,
                         "each response needs string seed and response_hash");
    out.push_back({item["seed"].get<std::string>(),
                   item["response_hash"].get<std::string>()});
  }
  return out;
}

MatchingConfig LoadMatching(const ServiceConfig& config) {
  if (config.schema_path.empty()) throw ConfigError("no schema configured");
  Schema schema = ReadSchemaFile(config.schema_path);
  MatchingConfig matching =
      config.matching_path.empty()
          ? MatchingConfig(schema, schema.size())
          : MatchingConfigFromJson(ReadJsonFile(config.matching_path), schema);
  if (config.theta) matching.set_theta(*config.theta);
  if (matching.theta() > matching.size())
    throw ConfigError("theta exceeds the number of attributes");
  return matching;
}

}  // namespace fpkit
