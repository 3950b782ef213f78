#include <gtest/gtest.h>
#include <sodium.h>

#include <atomic>
#include <filesystem>
#include <map>
#include <thread>

#include "fpkit/error.h"
#include "fpkit/service/account.h"
#include "fpkit/service/auth_service.h"
#include "fpkit/service/config.h"
#include "fpkit/service/http_server.h"
#include "fpkit/service/store.h"
#include "httplib.h"

namespace fpkit {
namespace {

constexpr char kFirefox[] =
    "Mozilla/5.0 (Windows NT 10.0; Win64; x64; rv:70.0) Gecko/20100101 Firefox/70.0";
constexpr char kChrome[] =
    "Mozilla/5.0 (Macintosh; Intel Mac OS X 10_14_6) AppleWebKit/537.36 Chrome/78.0 "
    "Safari/537.36";

Schema ServiceSchema() {
  return Schema({{"userAgent", AttributeKind::kTextual, false, std::nullopt, true},
                 {"a00", AttributeKind::kCategorical, false, std::nullopt, true},
                 {"a01", AttributeKind::kCategorical, false, std::nullopt, true},
                 {"a02", AttributeKind::kCategorical, false, std::nullopt, true},
                 {"a03", AttributeKind::kCategorical, false, std::nullopt, true}});
}

Fingerprint Fp(const char* ua, const char* a, const char* b, const char* c, const char* d) {
  return {AttributeValue::Text(ua), AttributeValue::Text(a), AttributeValue::Text(b),
          AttributeValue::Text(c), AttributeValue::Text(d)};
}

ServiceConfig TestConfig() {
  ServiceConfig config;
  config.store = ":memory:";
  config.lockout = 3;
  config.challenges = 3;
  config.argon2_opslimit = crypto_pwhash_OPSLIMIT_MIN;
  config.argon2_memlimit = crypto_pwhash_MEMLIMIT_MIN;
  return config;
}

// Client side of the challenge ledger: seeds and their responses.
class Client {
 public:
  std::vector<ProvisionedResponse> Provision(size_t n) {
    std::vector<ProvisionedResponse> out;
    for (size_t i = 0; i < n; ++i) {
      std::string seed = "seed-" + std::to_string(next_++);
      answers_[seed] = "resp-" + seed;
      out.push_back({seed, answers_[seed]});
    }
    return out;
  }
  std::string Answer(const std::string& seed) const {
    auto it = answers_.find(seed);
    return it == answers_.end() ? "unknown" : it->second;
  }

 private:
  int next_ = 0;
  std::map<std::string, std::string> answers_;
};

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override { Reset(TestConfig()); }

  void Reset(const ServiceConfig& config) {
    service_ = std::make_unique<AuthService>(config, MatchingConfig(ServiceSchema(), 4),
                                             OpenAccountStore(":memory:"),
                                             [this] { return ++now_; });
  }

  AuthRequest Request(const Fingerprint& fp, const std::string& browser_id,
                      const std::string& password = "hunter2") {
    IssuedChallenge c = service_->IssueChallenge("alice", browser_id);
    AuthRequest r;
    r.account_id = "alice";
    r.password = password;
    r.fingerprint = fp;
    r.challenge_id = c.challenge_id;
    r.response_hash = client_.Answer(c.seed);
    return r;
  }

  std::unique_ptr<AuthService> service_;
  Client client_;
  std::int64_t now_ = 1000;
  Fingerprint home_ = Fp(kFirefox, "fr", "1920", "utc+1", "x");
};

TEST_F(ServiceTest, EnrollThenAuthenticate) {
  EnrollResult e = service_->Enroll("alice", "hunter2", home_, client_.Provision(3));
  EXPECT_EQ(e.challenges, 3u);
  EXPECT_FALSE(e.challenge_depleted);
  EXPECT_EQ(e.backup_codes.size(), 10u);
  AuthDecision d = service_->Authenticate(Request(home_, e.browser_id));
  EXPECT_EQ(d.outcome, AuthOutcome::kAccepted);
  EXPECT_EQ(d.matched_browser_id, e.browser_id);
  EXPECT_EQ(d.match_count, 5u);
  EXPECT_EQ(d.challenges_remaining, 2u);
}

TEST_F(ServiceTest, EnrollWithoutResponsesIsDepleted) {
  EnrollResult e = service_->Enroll("alice", "hunter2", home_, {});
  EXPECT_TRUE(e.challenge_depleted);
  try {
    service_->IssueChallenge("alice", e.browser_id);
    FAIL() << "expected recovery_required";
  } catch (const ServiceError& err) {
    EXPECT_EQ(err.status(), 409);
    EXPECT_EQ(err.code(), "recovery_required");
  }
  AuthRequest r{"alice", "hunter2", home_, std::nullopt, "", {}};
  EXPECT_EQ(service_->Authenticate(r).outcome, AuthOutcome::kRecoveryRequired);
  r.provision = client_.Provision(2);
  AuthDecision d = service_->Authenticate(r);
  EXPECT_EQ(d.outcome, AuthOutcome::kAccepted);
  EXPECT_EQ(d.challenges_remaining, 2u);
}

TEST_F(ServiceTest, DuplicateEnrollmentConflicts) {
  service_->Enroll("alice", "hunter2", home_, {});
  try {
    service_->Enroll("alice", "other", home_, {});
    FAIL() << "expected conflict";
  } catch (const ServiceError& err) {
    EXPECT_EQ(err.status(), 409);
    EXPECT_EQ(err.code(), "conflict");
  }
  EXPECT_EQ(service_->accounts(), 1u);
}

TEST_F(ServiceTest, ThresholdMinusOneIsRejectedAndCounted) {
  EnrollResult e = service_->Enroll("alice", "hunter2", home_, client_.Provision(3));
  Fingerprint drifted = Fp(kFirefox, "en", "1280", "utc+1", "x");  // 3 of 5
  EXPECT_EQ(service_->Authenticate(Request(drifted, e.browser_id)).outcome,
            AuthOutcome::kRejected);
  EXPECT_EQ(service_->Find("alice")->failed_attempts, 1u);
  Fingerprint close = Fp(kFirefox, "en", "1920", "utc+1", "x");  // 4 of 5
  AuthDecision d = service_->Authenticate(Request(close, e.browser_id));
  EXPECT_EQ(d.outcome, AuthOutcome::kAccepted);
  EXPECT_EQ(service_->Find("alice")->failed_attempts, 0u);
  EXPECT_EQ(service_->Find("alice")->browsers[0].fingerprint, close);
}

TEST_F(ServiceTest, WrongPasswordIsRejected) {
  EnrollResult e = service_->Enroll("alice", "hunter2", home_, client_.Provision(3));
  EXPECT_EQ(service_->Authenticate(Request(home_, e.browser_id, "wrong")).outcome,
            AuthOutcome::kRejected);
}

TEST_F(ServiceTest, ReplayedChallengeIsRejected) {
  EnrollResult e = service_->Enroll("alice", "hunter2", home_, client_.Provision(3));
  AuthRequest r = Request(home_, e.browser_id);
  EXPECT_EQ(service_->Authenticate(r).outcome, AuthOutcome::kAccepted);
  EXPECT_EQ(service_->Authenticate(r).outcome, AuthOutcome::kRejected);
}

TEST_F(ServiceTest, WrongResponseBurnsTheChallenge) {
  EnrollResult e = service_->Enroll("alice", "hunter2", home_, client_.Provision(3));
  AuthRequest r = Request(home_, e.browser_id);
  r.response_hash = "forged";
  EXPECT_EQ(service_->Authenticate(r).outcome, AuthOutcome::kRejected);
  r.response_hash = client_.Answer(service_->Find("alice")->browsers[0].ledger[0].seed);
  EXPECT_EQ(service_->Authenticate(r).outcome, AuthOutcome::kRejected);
  EXPECT_EQ(service_->Find("alice")->browsers[0].UnusedChallenges(), 2u);
}

TEST_F(ServiceTest, PendingChallengeIsReissuedNotBurned) {
  EnrollResult e = service_->Enroll("alice", "hunter2", home_, client_.Provision(3));
  IssuedChallenge a = service_->IssueChallenge("alice", e.browser_id);
  IssuedChallenge b = service_->IssueChallenge("alice", e.browser_id);
  EXPECT_EQ(a.challenge_id, b.challenge_id);
  EXPECT_EQ(service_->Find("alice")->browsers[0].UnusedChallenges(), 3u);
}

TEST_F(ServiceTest, UnknownAccountGetsAStableDecoy) {
  IssuedChallenge a = service_->IssueChallenge("nobody", "b-1");
  IssuedChallenge b = service_->IssueChallenge("nobody", "b-1");
  EXPECT_EQ(a.challenge_id, b.challenge_id);
  EXPECT_EQ(a.seed, b.seed);
  AuthRequest r{"nobody", "pw", home_, a.challenge_id, "x", {}};
  EXPECT_EQ(service_->Authenticate(r).outcome, AuthOutcome::kRejected);
  EXPECT_EQ(service_->accounts(), 0u);
}

TEST_F(ServiceTest, LockoutAfterRepeatedFailures) {
  EnrollResult e = service_->Enroll("alice", "hunter2", home_, client_.Provision(8));
  for (int i = 0; i < 3; ++i)
    EXPECT_EQ(service_->Authenticate(Request(home_, e.browser_id, "bad")).outcome,
              AuthOutcome::kRejected);
  EXPECT_TRUE(service_->Find("alice")->locked);
  AuthRequest r{"alice", "hunter2", home_, std::nullopt, "", client_.Provision(1)};
  EXPECT_EQ(service_->Authenticate(r).outcome, AuthOutcome::kLocked);
}

TEST_F(ServiceTest, RecoveryUnlocksAndReplacesTheLedger) {
  EnrollResult e = service_->Enroll("alice", "hunter2", home_, client_.Provision(8));
  for (int i = 0; i < 3; ++i) service_->Authenticate(Request(home_, e.browser_id, "bad"));
  ASSERT_TRUE(service_->Find("alice")->locked);

  AccountRecord before = *service_->Find("alice");
  EXPECT_THROW(service_->Recover("alice", "not-a-code", e.browser_id, home_, {}),
               ServiceError);
  EXPECT_EQ(service_->Find("alice")->version, before.version);
  try {
    service_->Recover("alice", e.backup_codes[0], "b-missing", home_, {});
    FAIL() << "expected not_found";
  } catch (const ServiceError& err) {
    EXPECT_EQ(err.status(), 404);
  }
  EXPECT_EQ(service_->Find("alice")->backup_codes.size(), 10u);

  Fingerprint moved = Fp(kFirefox, "de", "1366", "utc+2", "y");
  BrowserUpdate u =
      service_->Recover("alice", e.backup_codes[0], e.browser_id, moved, client_.Provision(2));
  EXPECT_EQ(u.challenges, 2u);
  AccountRecord after = *service_->Find("alice");
  EXPECT_FALSE(after.locked);
  EXPECT_EQ(after.failed_attempts, 0u);
  EXPECT_EQ(after.backup_codes.size(), 9u);
  EXPECT_EQ(service_->Authenticate(Request(moved, e.browser_id)).outcome,
            AuthOutcome::kAccepted);
  EXPECT_THROW(service_->Recover("alice", e.backup_codes[0], e.browser_id, moved, {}),
               ServiceError);
}

TEST_F(ServiceTest, RegisterBrowserNeedsAValidCode) {
  EnrollResult e = service_->Enroll("alice", "hunter2", home_, client_.Provision(3));
  Fingerprint laptop = Fp(kChrome, "fr", "1440", "utc+1", "z");
  EXPECT_THROW(service_->RegisterBrowser("alice", "bogus", laptop, {}), ServiceError);
  BrowserUpdate u =
      service_->RegisterBrowser("alice", e.backup_codes[1], laptop, client_.Provision(3));
  EXPECT_NE(u.browser_id, e.browser_id);
  EXPECT_EQ(service_->Find("alice")->browsers.size(), 2u);
  AuthDecision d = service_->Authenticate(Request(laptop, u.browser_id));
  EXPECT_EQ(d.outcome, AuthOutcome::kAccepted);
  EXPECT_EQ(d.matched_browser_id, u.browser_id);
}

TEST_F(ServiceTest, ChallengeMustBelongToTheMatchedBrowser) {
  EnrollResult e = service_->Enroll("alice", "hunter2", home_, client_.Provision(3));
  Fingerprint laptop = Fp(kChrome, "de", "1440", "utc+5", "z");
  BrowserUpdate u =
      service_->RegisterBrowser("alice", e.backup_codes[0], laptop, client_.Provision(3));
  AuthRequest r = Request(home_, u.browser_id);
  EXPECT_EQ(service_->Authenticate(r).outcome, AuthOutcome::kRejected);
}

TEST_F(ServiceTest, UserAgentRoutingPrefersTheSameFamily) {
  EnrollResult e = service_->Enroll("alice", "hunter2", home_, client_.Provision(3));
  Fingerprint laptop = Fp(kChrome, "fr", "1920", "utc+1", "x");
  service_->RegisterBrowser("alice", e.backup_codes[0], laptop, {});
  AccountRecord record = *service_->Find("alice");
  auto routed = service_->RouteCandidates(record, Fp(kChrome, "a", "b", "c", "d"));
  ASSERT_EQ(routed.size(), 1u);
  EXPECT_NE(routed[0]->browser_id, e.browser_id);
  auto fallback = service_->RouteCandidates(record, Fp("curl/7.0", "a", "b", "c", "d"));
  EXPECT_EQ(fallback.size(), 2u);
}

TEST_F(ServiceTest, ConcurrentAuthenticationsCommitEveryFailure) {
  ServiceConfig config = TestConfig();
  config.lockout = 1000;
  Reset(config);
  service_->Enroll("alice", "hunter2", home_, {});
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 5; ++i)
        service_->Authenticate({"alice", "bad", home_, std::nullopt, "", {}});
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(service_->Find("alice")->failed_attempts, 40u);
}

TEST(AccountTest, JsonRoundTrip) {
  Schema schema = ServiceSchema();
  AccountRecord r;
  r.account_id = "alice";
  r.password_verifier = "$argon2id$...";
  r.failed_attempts = 2;
  r.next_serial = 7;
  RegisteredBrowser b;
  b.browser_id = "b-1";
  b.fingerprint = Fp(kFirefox, "fr", "1", "2", "3");
  b.last_update_ms = 42;
  b.ledger.push_back({"c1-abc", "seed", ChallengeVerifier("seed", "r"), false, true});
  r.browsers.push_back(b);
  r.backup_codes.push_back(BackupCodeDigest("code"));
  AccountRecord back = AccountFromJson(AccountToJson(r, schema), schema);
  EXPECT_EQ(AccountToJson(back, schema), AccountToJson(r, schema));
  EXPECT_TRUE(back.ConsumeBackupCode("code"));
  EXPECT_FALSE(back.ConsumeBackupCode("code"));
  EXPECT_EQ(back.browsers[0].UnusedChallenges(), 1u);
}

void ExerciseStore(AccountStore& store) {
  EXPECT_TRUE(store.Insert("a", "one"));
  EXPECT_FALSE(store.Insert("a", "two"));
  auto loaded = store.Load("a");
  ASSERT_TRUE(loaded.has_value());
  EXPECT_EQ(loaded->version, 1u);
  EXPECT_TRUE(store.Update("a", 1, "three"));
  EXPECT_FALSE(store.Update("a", 1, "four"));
  EXPECT_EQ(store.Load("a")->body, "three");
  EXPECT_EQ(store.Load("a")->version, 2u);
  EXPECT_FALSE(store.Load("b").has_value());
  EXPECT_EQ(store.Count(), 1u);
}

TEST(StoreTest, MemoryCompareAndSet) {
  MemoryAccountStore store;
  ExerciseStore(store);
}

TEST(StoreTest, SqliteCompareAndSetPersists) {
  const auto path = std::filesystem::temp_directory_path() /
                    ("fpkit-store-" + RandomToken(6) + ".db");
  {
    SqliteAccountStore store(path.string());
    ExerciseStore(store);
  }
  {
    SqliteAccountStore reopened(path.string());
    EXPECT_EQ(reopened.Load("a")->body, "three");
  }
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + "-wal");
  std::filesystem::remove(path.string() + "-shm");
}

TEST(ServiceConfigTest, EnvironmentOverridesAndValidation) {
  std::map<std::string, std::string> env = {
      {"FPKIT_PORT", "9090"}, {"FPKIT_THETA", "200"}, {"FPKIT_MODE", "advanced"}};
  ServiceConfig config;
  ApplyEnvironment(&config, [&](const char* name) -> const char* {
    auto it = env.find(name);
    return it == env.end() ? nullptr : it->second.c_str();
  });
  EXPECT_EQ(config.port, 9090);
  EXPECT_EQ(config.theta, 200u);
  EXPECT_EQ(config.mode, VerificationMode::kAdvanced);
  env["FPKIT_PORT"] = "http";
  EXPECT_THROW(ApplyEnvironment(&config, [&](const char* name) -> const char* {
                 auto it = env.find(name);
                 return it == env.end() ? nullptr : it->second.c_str();
               }),
               ConfigError);
  ServiceConfig bad;
  bad.lockout = 0;
  EXPECT_THROW(bad.Validate(), ConfigError);
  ServiceConfig round = ServiceConfigFromJson(ServiceConfigToJson(config));
  EXPECT_EQ(ServiceConfigToJson(round), ServiceConfigToJson(config));
}

TEST(PayloadTest, AcceptsMapOrCollectionEnvelope) {
  Schema schema = ServiceSchema();
  Json attrs = {{"userAgent", kFirefox}, {"a00", "fr"}, {"a01", "1"}, {"a02", "2"},
                {"a03", {{"flag", "timeout"}}}};
  Fingerprint direct = FingerprintFromPayload(attrs, schema);
  EXPECT_EQ(direct[4], AttributeValue::Flag(ErrorFlag::kTimeout));
  EXPECT_EQ(FingerprintFromPayload(Json{{"attrs", attrs}}, schema), direct);
  attrs.erase("a00");
  EXPECT_THROW(FingerprintFromPayload(attrs, schema), SchemaError);
}

TEST(HttpTest, RoundTripOverLoopback) {
  ServiceConfig config = TestConfig();
  AuthService service(config, MatchingConfig(ServiceSchema(), 5),
                      OpenAccountStore(":memory:"));
  HttpServer server(&service, "");
  const int port = server.Bind("127.0.0.1", 0);
  std::thread runner([&] { server.Run(); });
  httplib::Client http("127.0.0.1", port);

  Json attrs = {{"userAgent", kFirefox}, {"a00", "fr"}, {"a01", "1"}, {"a02", "2"},
                {"a03", "3"}};
  Json enroll = {{"account_id", "bob"},
                 {"password", "pw"},
                 {"fingerprint", attrs},
                 {"responses", {{{"seed", "s1"}, {"response_hash", "r1"}}}}};
  auto res = http.Post("/api/enroll", enroll.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  const std::string browser_id = Json::parse(res->body)["browser_id"];
  EXPECT_EQ(http.Post("/api/enroll", enroll.dump(), "application/json")->status, 409);

  auto ch = http.Post("/api/challenge",
                      Json{{"account_id", "bob"}, {"browser_id", browser_id}}.dump(),
                      "application/json");
  ASSERT_TRUE(ch);
  Json c = Json::parse(ch->body);
  EXPECT_EQ(c["seed"], "s1");
  Json auth = {{"account_id", "bob"},
               {"password", "pw"},
               {"fingerprint", attrs},
               {"challenge_id", c["challenge_id"]},
               {"response_hash", "r1"}};
  auto ok = http.Post("/api/authenticate", auth.dump(), "application/json");
  ASSERT_TRUE(ok);
  EXPECT_EQ(ok->status, 200);
  EXPECT_EQ(Json::parse(ok->body)["outcome"], "accepted");
  auto replay = http.Post("/api/authenticate", auth.dump(), "application/json");
  EXPECT_EQ(replay->status, 401);
  EXPECT_EQ(http.Post("/api/authenticate", "{", "application/json")->status, 400);
  EXPECT_EQ(http.Get("/api/health")->status, 200);

  server.Stop();
  runner.join();
}

}  // namespace
}  // namespace fpkit
