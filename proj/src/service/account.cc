#include "fpkit/service/account.h"

#include <algorithm>

#include "fpkit/util/digest.h"

namespace fpkit {

size_t RegisteredBrowser::UnusedChallenges() const {
  return std::count_if(ledger.begin(), ledger.end(),
                       [](const ChallengeEntry& c) { return !c.used; });
}

bool RegisteredBrowser::HasSeed(std::string_view seed) const {
  return std::any_of(ledger.begin(), ledger.end(),
                     [&](const ChallengeEntry& c) { return c.seed == seed; });
}

RegisteredBrowser* AccountRecord::FindBrowser(std::string_view browser_id) {
  for (auto& b : browsers)
    if (b.browser_id == browser_id) return &b;
  return nullptr;
}

const RegisteredBrowser* AccountRecord::FindBrowser(
    std::string_view browser_id) const {
  return const_cast<AccountRecord*>(this)->FindBrowser(browser_id);
}

std::pair<RegisteredBrowser*, ChallengeEntry*> AccountRecord::FindChallenge(
    std::string_view challenge_id) {
  for (auto& b : browsers)
    for (auto& c : b.ledger)
      if (c.challenge_id == challenge_id) return {&b, &c};
  return {nullptr, nullptr};
}

bool AccountRecord::ConsumeBackupCode(std::string_view code) {
  const std::string digest = BackupCodeDigest(code);
  bool found = false;
  auto keep = backup_codes.begin();
  for (auto it = backup_codes.begin(); it != backup_codes.end(); ++it) {
    // Scan every code so timing does not reveal the position.
    if (!found && ConstantTimeEquals(*it, digest)) {
      found = true;
      continue;
    }
    *keep++ = std::move(*it);
  }
  backup_codes.erase(keep, backup_codes.end());
  return found;
}

std::string ChallengeVerifier(std::string_view seed,
                              std::string_view response_hash) {
  std::string message(seed);
  message += ':';
  message += response_hash;
  return HexEncode(Sha256Of(message));
}

std::string BackupCodeDigest(std::string_view code) {
  return HexEncode(Sha256Of(code));
}

Json AccountToJson(const AccountRecord& record, const Schema& schema) {
  Json browsers = Json::array();
  for (const auto& b : record.browsers) {
    Json ledger = Json::array();
    for (const auto& c : b.ledger)
      ledger.push_back({{"challenge_id", c.challenge_id},
                        {"seed", c.seed},
                        {"verifier", c.verifier},
                        {"used", c.used},
                        {"pending", c.pending}});
    browsers.push_back({{"browser_id", b.browser_id},
                        {"fingerprint", FingerprintToJson(b.fingerprint, schema)},
                        {"last_update_ms", b.last_update_ms},
                        {"ledger", std::move(ledger)}});
  }
  return {{"account_id", record.account_id},
          {"password_verifier", record.password_verifier},
          {"browsers", std::move(browsers)},
          {"backup_codes", record.backup_codes},
          {"failed_attempts", record.failed_attempts},
          {"locked", record.locked},
          {"next_serial", record.next_serial},
          {"version", record.version}};
}

AccountRecord AccountFromJson(const Json& json, const Schema& schema) {
  AccountRecord record;
  record.account_id = json.at("account_id").get<std::string>();
  record.password_verifier = json.at("password_verifier").get<std::string>();
  for (const auto& jb : json.at("browsers")) {
    RegisteredBrowser b;
    b.browser_id = jb.at("browser_id").get<std::string>();
    b.fingerprint = FingerprintFromJson(jb.at("fingerprint"), schema);
    b.last_update_ms = jb.at("last_update_ms").get<std::int64_t>();
    for (const auto& jc : jb.at("ledger")) {
      ChallengeEntry c;
      c.challenge_id = jc.at("challenge_id").get<std::string>();
      c.seed = jc.at("seed").get<std::string>();
      c.verifier = jc.at("verifier").get<std::string>();
      c.used = jc.at("used").get<bool>();
      c.pending = jc.value("pending", false);
      b.ledger.push_back(std::move(c));
    }
    record.browsers.push_back(std::move(b));
  }
  record.backup_codes =
      json.at("backup_codes").get<std::vector<std::string>>();
  record.failed_attempts = json.at("failed_attempts").get<size_t>();
  record.locked = json.at("locked").get<bool>();
  record.next_serial = json.value("next_serial", std::uint64_t{0});
  record.version = json.value("version", std::uint64_t{0});
  return record;
}

}  // namespace fpkit
