// Prints one PASS/FAIL line per acceptance criterion. Exits nonzero when
// any criterion fails.

#include <sodium.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "fpkit/attack/attack.h"
#include "fpkit/metrics/distinctiveness.h"
#include "fpkit/metrics/entropy.h"
#include "fpkit/metrics/stability.h"
#include "fpkit/model/io.h"
#include "fpkit/preprocess/deduplication.h"
#include "fpkit/preprocess/pipeline.h"
#include "fpkit/preprocess/uid_resync.h"
#include "fpkit/service/auth_service.h"
#include "fpkit/service/http_server.h"
#include "fpkit/synth/calibrate.h"
#include "fpkit/synth/generator.h"
#include "fpkit/verify/evaluation.h"
#include "fpkit/verify/matching.h"
#include "httplib.h"
#include "test_data.h"

namespace fpkit {
namespace {

using testing::CategoricalSchema;
using testing::MakeEntry;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome Fail(const std::string& detail) { return {false, detail}; }

std::string Format(const char* fmt, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

Outcome MaxEntropyAnchor() {
  const double h = MaxEntropy(4'145'408);
  return {std::fabs(h - 21.983) <= 0.001, Format("H_M=%.4f bits", h)};
}

std::string Jsonl(const Dataset& ds) {
  std::ostringstream out;
  WriteJsonl(out, ds);
  return out.str();
}

Outcome DedupGolden() {
  Schema schema = CategoricalSchema(1);
  Dataset input(schema, {MakeEntry("b", 1, {"f1"}), MakeEntry("b", 2, {"f2"}),
                         MakeEntry("b", 3, {"f2"}), MakeEntry("b", 4, {"f1"})});
  Dataset expected(schema, {MakeEntry("b", 1, {"f1"}), MakeEntry("b", 2, {"f2"}),
                            MakeEntry("b", 4, {"f1"})});
  const std::string got = Jsonl(Deduplicate(input));
  if (got != Jsonl(expected)) return Fail("output differs:\n" + got);
  return {true, "3 entries kept, t3 dropped"};
}

Outcome OracleEquivalence() {
  std::mt19937_64 rng(2024);
  size_t checks = 0;
  for (int run = 0; run < 200; ++run) {
    const size_t browsers = 20 + rng() % 981;
    Dataset ds = testing::SmallDataset(browsers, rng());
    const std::int64_t origin = ds[0].ts_ms - ds[0].ts_ms % kMillisPerDay;
    if (UnicityRate(ds) != testing::OracleUnicity(ds))
      return Fail("unicity, run " + std::to_string(run));
    for (const PartitionStats& p : TimePartitionedStats(ds, origin)) {
      auto oracle = testing::OracleSnapshot(ds, p.day, origin);
      if (TakeSnapshot(ds, p.day, origin).latest != oracle)
        return Fail("snapshot, run " + std::to_string(run));
      auto sets = testing::OracleAnonymitySets(oracle);
      if (p.histogram != sets) return Fail("anonymity sets, run " + std::to_string(run));
      if (p.unicity != UnicityRate(AnonymityHistogram(sets.begin(), sets.end())))
        return Fail("snapshot unicity, run " + std::to_string(run));
      ++checks;
    }
    const TimeRange range = run % 2 ? TimeRange::All() : TimeRange::Days(0, 7);
    if (ConsecutivePairs(ds, range) != testing::OracleConsecutivePairs(ds, range))
      return Fail("consecutive pairs, run " + std::to_string(run));
    StabilityCurve curve = ComputeStabilityCurve(ds, 10);
    auto oracle = testing::OracleStability(ds, 10);
    for (const StabilityBucket& b : curve.buckets) {
      const testing::OracleBucket& o = oracle[b.day];
      if (b.pairs != o.pairs || b.excluded != o.excluded ||
          b.average_similarity.has_value() != o.average_similarity.has_value() ||
          (b.average_similarity &&
           std::fabs(*b.average_similarity - *o.average_similarity) > 1e-12))
        return Fail("stability curve, run " + std::to_string(run));
    }
  }
  return {true, "200 datasets, " + std::to_string(checks) + " daily snapshots"};
}

// 50 attributes over 10^4 browsers: independent attributes of varied
// cardinality, some functions of others, and one constant.
Dataset EntropyDataset() {
  constexpr size_t kAttributes = 50;
  constexpr size_t kRows = 10'000;
  Schema schema = CategoricalSchema(kAttributes);
  std::mt19937_64 rng(5);
  std::vector<Entry> entries;
  entries.reserve(kRows);
  for (size_t r = 0; r < kRows; ++r) {
    Entry e;
    e.uid = "u" + std::to_string(r);
    e.ts_ms = 1;
    e.ip_hash = "ip";
    std::vector<size_t> raw(kAttributes);
    for (size_t a = 0; a < kAttributes; ++a) {
      const size_t cardinality = 1 + (a * 7) % 60;
      if (a == 0) raw[a] = 0;
      else if (a % 5 == 0) raw[a] = raw[a - 1] % 3;
      else raw[a] = static_cast<size_t>(std::pow(rng() % 1000 / 1000.0, 2) * cardinality);
      e.fingerprint.push_back(AttributeValue::Text(std::to_string(raw[a])));
    }
    entries.push_back(std::move(e));
  }
  return Dataset(schema, std::move(entries));
}

Outcome EntropyProperties() {
  Dataset ds = EntropyDataset();
  std::vector<AttributeEntropy> h = AttributeEntropies(ds);
  const double max = MaxEntropy(ds.size());
  for (const AttributeEntropy& a : h) {
    const double bound =
        std::min(1.0, std::log2(static_cast<double>(a.distinct_values)) / max);
    if (!a.normalized_entropy || *a.normalized_entropy < 0 ||
        *a.normalized_entropy > bound + 1e-12)
      return Fail("normalized entropy bound broken for " + a.name);
  }
  NceMatrix m = ConditionalEntropyMatrix(ds);
  for (size_t k = 0; k < m.attribute_count; ++k) {
    for (size_t i = 0; i < m.attribute_count; ++i) {
      if (m.Bits(k, i) > h[i].entropy_bits + 1e-9) return Fail("H(aj|ai) > H(aj)");
      if (k == i && *m.Normalized(k, i) != 0.0) return Fail("NCE(a|a) != 0");
    }
    // a00 is constant.
    if (std::fabs(*m.Normalized(0, k) - *h[k].normalized_entropy) > 1e-12)
      return Fail("NCE given a constant differs from Hn for " + h[k].name);
  }
  return {true, "50 attributes x 10000 fingerprints"};
}

Outcome VerificationConsistency() {
  Dataset ds = testing::SmallDataset(1000, 77);
  const Schema& schema = ds.schema();
  std::vector<AttributeThreshold> loose;
  for (const auto& a : schema.attributes())
    loose.push_back({DistanceFamily::kEdit, a.dynamic ? 0.0 : 1.0});
  MatchingConfig tolerant(schema, loose, 0);
  MatchingConfig strict(schema, 0);
  std::mt19937_64 rng(13);
  CountedSample sample;
  size_t strictly_more = 0;
  for (int i = 0; i < 100'000; ++i) {
    const Fingerprint& f = ds[rng() % ds.size()].fingerprint;
    const Fingerprint& g = ds[rng() % ds.size()].fingerprint;
    const size_t identical = CountIdentical(f, g);
    const size_t matching = CountMatching(f, g, tolerant);
    if (matching < identical) return Fail("count_matching < count_identical");
    if (CountMatching(f, g, strict) != identical)
      return Fail("all-zero thresholds differ from identity");
    strictly_more += matching > identical;
    (i % 2 ? sample.same : sample.different).push_back(static_cast<std::uint32_t>(matching));
  }
  ErrorCurve curve =
      ComputeErrorCurve(std::span<const CountedSample>(&sample, 1), schema.size());
  for (size_t t = 1; t < curve.fmr.size(); ++t) {
    if (curve.fmr[t] > curve.fmr[t - 1]) return Fail("FMR increases in theta");
    if (curve.fnmr[t] < curve.fnmr[t - 1]) return Fail("FNMR decreases in theta");
  }
  return {true, "100000 pairs, " + std::to_string(strictly_more) + " with extra matches"};
}

Outcome CalibratedEqualError() {
  CalibrationTargets targets;
  CalibrationResult calibrated = Calibrate(targets, StandardConfig(47'000, 1));
  const GeneratorConfig& config = calibrated.config;
  PipelineOptions options;
  options.cleaning.window = WindowForDays(config.start_ms, config.days);
  Dataset ds = Preprocess(Generate(config), options).dataset;
  std::vector<MonthSample> samples = BuildComparisonSets(ds, 6, 1);
  size_t pairs = 0;
  for (const auto& s : samples) pairs += s.same.size() + s.different.size();
  MatchingConfig strict(ds.schema(), ds.schema().size());
  ErrorCurve curve = ComputeErrorCurve(ds, samples, strict, VerificationMode::kSimple);
  EqualError eer = EqualErrorRate(curve);
  const bool ok = eer.rate <= 0.01 && eer.theta >= 225 && eer.theta <= 240;
  return {ok, Format("EER=%.3f%% theta=%.0f pairs=%.0f", eer.rate * 100,
                     static_cast<double>(eer.theta), static_cast<double>(pairs))};
}

Outcome Resynchronization() {
  Schema schema = CategoricalSchema(1);
  Dataset merged = ResynchronizeUids(
      Dataset(schema, {MakeEntry("u2", 1, {"f"}), MakeEntry("u2", 2, {"f"}),
                       MakeEntry("u1", 3, {"f"}), MakeEntry("u1", 4, {"f"})}));
  if (merged.BrowserCount() != 1 || merged[0].uid != "u1")
    return Fail("non-interleaved group not merged");
  Dataset interleaved(schema, {MakeEntry("u1", 1, {"f"}), MakeEntry("u2", 2, {"f"}),
                               MakeEntry("u1", 3, {"f"})});
  if (Jsonl(ResynchronizeUids(interleaved)) != Jsonl(interleaved))
    return Fail("interleaved group rewritten");
  GeneratorConfig config = testing::SmallConfig(500, 3);
  for (auto& a : config.attributes) a.change_probability = 0.0;
  config.oscillation_probability = 0.0;
  config.cookie_churn_probability = 0.25;
  Dataset raw = Generate(config);
  const size_t recovered = ResynchronizeUids(raw).BrowserCount();
  if (recovered != config.browser_count)
    return Fail("recovered " + std::to_string(recovered) + " browsers of " +
                std::to_string(config.browser_count));
  return {true, std::to_string(raw.BrowserCount()) + " UIDs -> " +
                    std::to_string(recovered) + " browsers"};
}

Outcome AttackOracle() {
  constexpr size_t kAttempts = 8;
  ValueDomain domain;
  for (int a = 0; a < 3; ++a) {
    domain.values.emplace_back();
    for (int v = 0; v < 4; ++v)
      domain.values.back().push_back(AttributeValue::Text(std::to_string(v)));
  }
  MatchingConfig strict(CategoricalSchema(3), 3);
  std::mt19937_64 rng(99);
  std::vector<Fingerprint> targets;
  for (int i = 0; i < 1000; ++i) targets.push_back(domain.At(rng() % domain.Size()));

  // Exact single-draw hit probability per target by enumerating the domain.
  double expected = 0.0;
  for (const Fingerprint& t : targets) {
    size_t hits = 0;
    for (std::uint64_t i = 0; i < domain.Size(); ++i)
      hits += Verdict(t, domain.At(i), strict, VerificationMode::kSimple);
    const double q = static_cast<double>(hits) / static_cast<double>(domain.Size());
    expected += 1.0 - std::pow(1.0 - q, kAttempts);
  }
  expected /= static_cast<double>(targets.size());
  AttackPolicy policy;
  policy.attempts = kAttempts;
  policy.seed = 7;
  AttackReport brute = BruteForce(targets, domain, policy, strict, VerificationMode::kSimple);
  const double sigma = std::sqrt(expected * (1 - expected) / targets.size());
  if (std::fabs(brute.Rate() - expected) > 3 * sigma)
    return Fail(Format("brute force %.4f vs %.4f", brute.Rate(), expected));

  // Dictionary: one entry per browser, skewed frequencies.
  std::vector<Entry> entries;
  for (int i = 0; i < 1000; ++i) {
    const auto v = static_cast<std::uint64_t>(std::pow(rng() % 1000 / 1000.0, 3) * 64);
    Entry e;
    e.uid = "u" + std::to_string(i);
    e.ts_ms = 1;
    e.ip_hash = "ip";
    e.fingerprint = domain.At(v);
    entries.push_back(std::move(e));
  }
  Dataset ds(CategoricalSchema(3), std::move(entries));
  FingerprintDistribution dist = FingerprintDistribution::FromDataset(ds);
  std::map<std::string, size_t> counts;
  for (const Entry& e : ds.entries()) ++counts[e.hash.ToHex()];
  std::vector<size_t> sorted;
  for (const auto& [hash, n] : counts) sorted.push_back(n);
  std::sort(sorted.rbegin(), sorted.rend());
  for (size_t k : {1, 3, 10}) {
    size_t mass = 0;
    for (size_t i = 0; i < std::min(k, sorted.size()); ++i) mass += sorted[i];
    AttackPolicy dict;
    dict.strategy = AttackStrategy::kDictionary;
    dict.attempts = k;
    AttackReport r = DictionaryAttack(LatestFingerprints(ds), dist, dict, strict,
                                      VerificationMode::kSimple);
    if (r.impersonated != mass)
      return Fail("dictionary top-" + std::to_string(k) + " differs from its mass");
  }
  return {true, Format("brute %.4f vs exact %.4f (sigma %.4f)", brute.Rate(), expected,
                       sigma)};
}

Outcome ServiceEndToEnd() {
  const Schema schema = CategoricalSchema(10);
  ServiceConfig config;
  config.store = ":memory:";
  config.lockout = 3;
  config.challenges = 8;
  config.argon2_opslimit = crypto_pwhash_OPSLIMIT_MIN;
  config.argon2_memlimit = crypto_pwhash_MEMLIMIT_MIN;
  AuthService service(config, MatchingConfig(schema, 8), OpenAccountStore(":memory:"));
  HttpServer server(&service, "");
  const int port = server.Bind("127.0.0.1", 0);
  std::thread runner([&] { server.Run(); });
  httplib::Client http("127.0.0.1", port);
  http.set_read_timeout(10);

  auto attrs = [&](int changed) {
    Json j;
    for (size_t i = 0; i < schema.size(); ++i)
      j[schema[i].name] = static_cast<int>(i) < changed ? "new" : "v" + std::to_string(i);
    return j;
  };
  Json responses = Json::array();
  for (int i = 0; i < 8; ++i)
    responses.push_back({{"seed", "s" + std::to_string(i)},
                         {"response_hash", "r" + std::to_string(i)}});
  auto post = [&](const std::string& path, const Json& body) -> std::pair<int, Json> {
    auto res = http.Post(path, body.dump(), "application/json");
    if (!res) return {0, Json()};
    return {res->status, Json::parse(res->body, nullptr, false)};
  };
  auto challenge = [&](const std::string& browser) {
    return post("/api/challenge", {{"account_id", "carol"}, {"browser_id", browser}}).second;
  };
  auto authenticate = [&](const Json& c, const Json& fp, const std::string& pw) {
    std::string seed = c.value("seed", "");
    return post("/api/authenticate", {{"account_id", "carol"},
                                      {"password", pw},
                                      {"fingerprint", fp},
                                      {"challenge_id", c.value("challenge_id", "")},
                                      {"response_hash", "r" + seed.substr(1)}});
  };

  std::string failure;
  auto [enroll_status, enrolled] = post(
      "/api/enroll",
      {{"account_id", "carol"}, {"password", "pw"}, {"fingerprint", attrs(0)},
       {"responses", responses}});
  const std::string browser = enrolled.value("browser_id", "");
  Json c1 = challenge(browser);
  auto [s1, accepted] = authenticate(c1, attrs(1), "pw");
  Json c2 = challenge(browser);
  auto [s_replay, replay] = authenticate(c1, attrs(1), "pw");
  // The stored fingerprint is now attrs(1); attrs(4) keeps 7 of 10.
  auto [s_theta, theta_miss] = authenticate(c2, attrs(4), "pw");
  int s_locked = 0;
  for (int i = 0; i < 2; ++i) authenticate(challenge(browser), attrs(0), "wrong");
  s_locked = post("/api/authenticate", {{"account_id", "carol"},
                                        {"password", "pw"},
                                        {"fingerprint", attrs(0)},
                                        {"challenge_id", "c0-0"},
                                        {"response_hash", "x"}})
                 .first;
  const Json codes = enrolled.value("backup_codes", Json::array());
  const std::string code = codes.empty() ? "" : codes[0].get<std::string>();
  auto [s_recover, recovered] =
      post("/api/recover", {{"account_id", "carol"},
                            {"recovery_proof", code},
                            {"browser_id", browser},
                            {"fingerprint", attrs(5)}});
  Json c3 = challenge(browser);
  auto [s_after, after] = authenticate(c3, attrs(5), "pw");

  server.Stop();
  runner.join();

  if (enroll_status != 201) failure = "enroll returned " + std::to_string(enroll_status);
  else if (s1 != 200) failure = "authenticate returned " + std::to_string(s1);
  else if (c2.value("challenge_id", "") == c1.value("challenge_id", ""))
    failure = "challenge not rotated";
  else if (s_replay != 401) failure = "replay returned " + std::to_string(s_replay);
  else if (s_theta != 401) failure = "theta-1 returned " + std::to_string(s_theta);
  else if (s_locked != 423) failure = "lockout returned " + std::to_string(s_locked);
  else if (s_recover != 200) failure = "recover returned " + std::to_string(s_recover);
  else if (s_after != 200) failure = "post-recovery login returned " + std::to_string(s_after);
  if (!failure.empty()) return Fail(failure);
  return {true, "enroll, rotate, replay, theta-1, lockout, recover"};
}

struct Criterion {
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace fpkit

int main() {
  using namespace fpkit;
  const std::vector<Criterion> criteria = {
      {"max-entropy anchor", 1, MaxEntropyAnchor},
      {"dedup golden case", 1, DedupGolden},
      {"oracle equivalence", 60, OracleEquivalence},
      {"entropy properties", 30, EntropyProperties},
      {"verification consistency", 60, VerificationConsistency},
      {"calibrated equal error rate", 120, CalibratedEqualError},
      {"uid resynchronization", 5, Resynchronization},
      {"attack oracle", 30, AttackOracle},
      {"service end to end", 30, ServiceEndToEnd},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (outcome.pass && seconds > c.budget_s) {
      outcome.pass = false;
      outcome.detail += Format(" (over the %.0f s budget)", c.budget_s);
    }
    failures += !outcome.pass;
    std::printf("%s %s [%.2fs] %s\n", outcome.pass ? "PASS" : "FAIL", c.name, seconds,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
