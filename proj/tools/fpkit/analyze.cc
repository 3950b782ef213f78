#include <cmath>
#include <iostream>
#include <limits>
#include <fstream>
#include <memory>
#include <sstream>

#include "commands.h"
#include "fpkit/error.h"
#include "fpkit/metrics/distinctiveness.h"
#include "fpkit/metrics/entropy.h"
#include "fpkit/metrics/practicality.h"
#include "fpkit/metrics/stability.h"
#include "fpkit/preprocess/pipeline.h"
#include "fpkit/verify/evaluation.h"
#include "fpkit/verify/matching.h"

namespace fpkit::cli {
namespace {

Json Optional(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

struct DataArgs {
  std::string schema;
  std::string input;
  std::string output;
};

void AddDataArgs(CLI::App* cmd, DataArgs* args) {
  cmd->add_option("--schema", args->schema, "Schema sidecar (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--in", args->input, "Dataset (JSON Lines)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args->output, "Output path (default stdout)");
}

Json HistogramJson(const AnonymityHistogram& histogram) {
  Json out = Json::object();
  for (const auto& [size, count] : histogram) out[std::to_string(size)] = count;
  return out;
}

std::string NceCsv(const NceMatrix& m, const Schema& schema) {
  std::ostringstream out;
  out << "known,inferred,conditional_bits,normalized\n";
  for (size_t k = 0; k < m.attribute_count; ++k)
    for (size_t j = 0; j < m.attribute_count; ++j) {
      if (k == j || m.IsExcluded(k, j)) continue;
      out << schema[k].name << ',' << schema[j].name << ',' << m.Bits(k, j)
          << ',';
      if (auto n = m.Normalized(k, j)) out << *n;
      out << '\n';
    }
  return out.str();
}

Json GroupJson(const PracticalityGroup& g) {
  auto dist = [](const Distribution& d) {
    Json p = Json::object();
    for (const auto& [q, v] : d.percentiles) {
      std::ostringstream key;
      key << q;
      p[key.str()] = v;
    }
    return Json{{"count", d.count}, {"mean", Optional(d.mean)}, {"percentiles", p}};
  };
  return {{"size_bytes", dist(g.size_bytes)},
          {"time_ms", dist(g.time_ms)},
          {"time_outliers", g.time_outliers},
          {"size_outliers", g.size_outliers},
          {"missing_time", g.missing_time}};
}

MatchingConfig LoadMatchingFor(const Schema& schema, const std::string& path,
                               std::optional<size_t> theta) {
  MatchingConfig config = path.empty()
                              ? MatchingConfig(schema, schema.size())
                              : MatchingConfigFromJson(ReadJsonFile(path), schema);
  if (theta) config.set_theta(*theta);
  return config;
}

}  // namespace

void AddPreprocess(CLI::App& app) {
  struct Args {
    DataArgs data;
    bool legacy = false;
    std::string ip_key;
    std::string robots;
    std::string rules;
    std::string report;
    std::string schema_out;
    std::optional<std::int64_t> window_start;
    std::optional<std::int64_t> window_end;
    std::optional<int> days;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand(
      "preprocess", "Clean, resynchronize UIDs, deduplicate, extract");
  AddDataArgs(cmd, &args->data);
  cmd->add_flag("--legacy", args->legacy, "Input is semicolon-separated");
  cmd->add_option("--ip-key", args->ip_key, "HMAC key for raw IP fields");
  cmd->add_option("--robots", args->robots, "Robot keyword list")
      ->check(CLI::ExistingFile);
  cmd->add_option("--rules", args->rules, "Extraction rules (JSON)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--window-start", args->window_start,
                  "Collection window start (ms)");
  cmd->add_option("--window-end", args->window_end,
                  "Collection window end (ms, inclusive)");
  cmd->add_option("--days", args->days,
                  "Window length in days from --window-start")
      ->excludes("--window-end");
  cmd->add_option("--report", args->report, "Write the step report here");
  cmd->add_option("--schema-out", args->schema_out,
                  "Write the output schema (with extracted attributes)");
  cmd->callback([args] {
    const Schema schema = ReadSchemaFile(args->data.schema);
    std::ifstream in(args->data.input);
    LoadResult loaded;
    if (args->legacy) {
      loaded = LoadLegacy(in, schema);
    } else {
      IngestOptions ingest;
      if (!args->ip_key.empty()) ingest.ip_hmac_key = args->ip_key;
      loaded = LoadJsonl(in, schema, ingest);
    }
    PipelineOptions options;
    options.cleaning.malformed_records = loaded.malformed;
    if (!args->robots.empty())
      options.cleaning.robots = RobotList::ReadFile(args->robots);
    options.cleaning.window = {std::numeric_limits<std::int64_t>::min(),
                               std::numeric_limits<std::int64_t>::max()};
    if (args->window_start) options.cleaning.window.start_ms = *args->window_start;
    if (args->window_end) options.cleaning.window.end_ms = *args->window_end;
    if (args->days) {
      if (!args->window_start)
        throw ArgumentError("--days needs --window-start");
      options.cleaning.window = WindowForDays(*args->window_start, *args->days);
    }
    if (options.cleaning.window.start_ms > options.cleaning.window.end_ms)
      throw ArgumentError("window start is after window end");
    if (!args->rules.empty())
      options.rules = ReadExtractionRulesFile(args->rules);
    PipelineResult result = Preprocess(std::move(loaded.dataset), options);
    if (args->data.output.empty() || args->data.output == "-") {
      WriteJsonl(std::cout, result.dataset);
    } else {
      WriteJsonlFile(args->data.output, result.dataset);
    }
    if (!args->report.empty()) EmitJson(result.ReportJson(), args->report);
    if (!args->schema_out.empty())
      WriteSchemaFile(result.dataset.schema(), args->schema_out);
  });
}

void AddMetrics(CLI::App& app) {
  auto* metrics = app.add_subcommand("metrics", "Dataset metrics");
  metrics->require_subcommand(1);

  {
    struct Args {
      DataArgs data;
      std::optional<std::int64_t> origin_ms;
      bool partition_days = false;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = metrics->add_subcommand(
        "anonymity", "Anonymity sets and unicity per day");
    AddDataArgs(cmd, &args->data);
    cmd->add_option("--origin-ms", args->origin_ms,
                    "Day origin (default: midnight UTC of the first entry)");
    cmd->add_flag("--partition-days", args->partition_days,
                  "Report every daily snapshot");
    cmd->callback([args] {
      Dataset ds = LoadDataset(args->data.schema, args->data.input);
      const std::int64_t origin = args->origin_ms.value_or(DefaultDayOrigin(ds));
      std::vector<PartitionStats> stats = TimePartitionedStats(ds, origin);
      Json out = {{"day_origin_ms", origin},
                  {"unicity", Optional(UnicityRate(ds))}};
      if (!stats.empty()) {
        out["final_snapshot"] = {
            {"day", stats.back().day},
            {"browsers", stats.back().browsers},
            {"unicity", Optional(stats.back().unicity)},
            {"anonymity_sets", HistogramJson(stats.back().histogram)}};
      }
      if (args->partition_days) {
        Json days = Json::array();
        for (const auto& p : stats)
          days.push_back({{"day", p.day},
                          {"browsers", p.browsers},
                          {"unicity", Optional(p.unicity)},
                          {"anonymity_sets", HistogramJson(p.histogram)}});
        out["days"] = std::move(days);
      }
      EmitJson(out, args->data.output);
    });
  }

  {
    struct Args {
      DataArgs data;
      size_t min_pairs = 10;
      std::optional<double> max_gap_days;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = metrics->add_subcommand(
        "stability", "Average similarity of consecutive fingerprints by gap");
    AddDataArgs(cmd, &args->data);
    cmd->add_option("--min-pairs", args->min_pairs, "Smallest reported bucket");
    cmd->add_option("--max-gap-days", args->max_gap_days, "Ignore longer gaps");
    cmd->callback([args] {
      Dataset ds = LoadDataset(args->data.schema, args->data.input);
      std::optional<std::int64_t> max_gap;
      if (args->max_gap_days)
        max_gap = static_cast<std::int64_t>(*args->max_gap_days * kMillisPerDay);
      StabilityCurve curve = ComputeStabilityCurve(ds, args->min_pairs, max_gap);
      Json buckets = Json::array();
      for (const auto& b : curve.buckets)
        buckets.push_back({{"day", b.day},
                           {"pairs", b.pairs},
                           {"average_similarity", Optional(b.average_similarity)},
                           {"excluded", b.excluded}});
      EmitJson({{"attributes", curve.attribute_count},
                {"min_pairs", curve.min_pairs},
                {"buckets", buckets}},
               args->data.output);
    });
  }

  {
    auto args = std::make_shared<DataArgs>();
    auto* cmd = metrics->add_subcommand("entropy", "Attribute entropy");
    AddDataArgs(cmd, args.get());
    cmd->callback([args] {
      Dataset ds = LoadDataset(args->schema, args->input);
      Json attrs = Json::array();
      for (const auto& a : AttributeEntropies(ds))
        attrs.push_back({{"name", a.name},
                         {"distinct_values", a.distinct_values},
                         {"entropy_bits", a.entropy_bits},
                         {"normalized_entropy", Optional(a.normalized_entropy)}});
      EmitJson({{"fingerprints", ds.size()},
                {"max_entropy_bits", ds.empty() ? 0.0 : MaxEntropy(ds.size())},
                {"attributes", attrs}},
               args->output);
    });
  }

  {
    struct Args {
      DataArgs data;
      bool csv = false;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = metrics->add_subcommand(
        "nce", "Normalized conditional entropy between attributes");
    AddDataArgs(cmd, &args->data);
    cmd->add_flag("--csv", args->csv, "Full matrix as CSV");
    cmd->callback([args] {
      Dataset ds = LoadDataset(args->data.schema, args->data.input);
      NceMatrix m = ConditionalEntropyMatrix(ds);
      if (args->csv) {
        EmitText(NceCsv(m, ds.schema()), args->data.output);
        return;
      }
      Json summaries = Json::array();
      for (const auto& s : m.summaries)
        summaries.push_back({{"name", s.name},
                             {"min", Optional(s.min)},
                             {"avg", Optional(s.avg)},
                             {"max", Optional(s.max)}});
      EmitJson({{"fingerprints", m.fingerprint_count},
                {"max_entropy_bits", m.max_entropy},
                {"attributes", summaries}},
               args->data.output);
    });
  }

  {
    struct Args {
      DataArgs data;
      bool csv = false;
      double cap_s = kDefaultOutlierCapMs / 1000.0;
      std::string user_agent = "userAgent";
    };
    auto args = std::make_shared<Args>();
    auto* cmd = metrics->add_subcommand(
        "practicality", "Sameness rate, size and collection time");
    AddDataArgs(cmd, &args->data);
    cmd->add_flag("--csv", args->csv, "Per-attribute statistics as CSV");
    cmd->add_option("--outlier-cap-s", args->cap_s,
                    "Fingerprints collected slower than this are outliers");
    cmd->add_option("--user-agent", args->user_agent, "User agent attribute");
    cmd->callback([args] {
      Dataset ds = LoadDataset(args->data.schema, args->data.input);
      const auto cap_ms = static_cast<std::int64_t>(std::llround(args->cap_s * 1000));
      if (args->csv) {
        NceMatrix m = ConditionalEntropyMatrix(ds);
        std::ostringstream out;
        WriteAttributeStatsCsv(out, ComputeAttributeStats(ds, cap_ms, &m));
        EmitText(out.str(), args->data.output);
        return;
      }
      FingerprintPracticality p =
          ComputeFingerprintPracticality(ds, cap_ms, args->user_agent);
      Json devices = Json::object();
      for (const auto& [name, group] : p.by_device) devices[name] = GroupJson(group);
      Json attrs = Json::array();
      for (const auto& a : AttributePracticalities(ds, cap_ms))
        attrs.push_back({{"name", a.name},
                         {"sameness_rate", Optional(a.sameness_rate)},
                         {"median_size", a.median_size},
                         {"median_time_ms", a.median_time_ms
                                                ? Json(*a.median_time_ms)
                                                : Json(nullptr)}});
      EmitJson({{"outlier_cap_ms", p.outlier_cap_ms},
                {"overall", GroupJson(p.overall)},
                {"by_device", devices},
                {"attributes", attrs}},
               args->data.output);
    });
  }
}

void AddVerify(CLI::App& app) {
  auto* verify = app.add_subcommand("verify", "Fingerprint verification");
  verify->require_subcommand(1);

  {
    struct Args {
      DataArgs data;
      std::string matching;
      std::string mode = "simple";
      int months = 6;
      std::uint64_t seed = 0;
      bool curve = false;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = verify->add_subcommand(
        "eval", "FMR, FNMR and equal error rate over monthly comparison sets");
    AddDataArgs(cmd, &args->data);
    cmd->add_option("--matching", args->matching, "Thresholds (JSON)");
    cmd->add_option("--mode", args->mode, "simple or advanced");
    cmd->add_option("--months", args->months, "Months sampled");
    cmd->add_option("--seed", args->seed, "Sampling seed");
    cmd->add_flag("--curve", args->curve, "Include the full FMR/FNMR curve");
    cmd->callback([args] {
      Dataset ds = LoadDataset(args->data.schema, args->data.input);
      MatchingConfig config =
          LoadMatchingFor(ds.schema(), args->matching, std::nullopt);
      auto samples = BuildComparisonSets(ds, args->months, args->seed);
      ErrorCurve curve =
          ComputeErrorCurve(ds, samples, config, ParseMode(args->mode));
      EqualError eer = EqualErrorRate(curve);
      size_t same = 0, different = 0;
      for (const auto& s : samples) {
        same += s.same.size();
        different += s.different.size();
      }
      Json out = {{"mode", args->mode},
                  {"months_used", curve.months_used},
                  {"same_pairs", same},
                  {"different_pairs", different},
                  {"eer", eer.rate},
                  {"theta", eer.theta},
                  {"fmr", eer.fmr},
                  {"fnmr", eer.fnmr}};
      if (args->curve) out["curve"] = {{"fmr", curve.fmr}, {"fnmr", curve.fnmr}};
      EmitJson(out, args->data.output);
    });
  }

  {
    struct Args {
      DataArgs data;
      int months = 6;
      std::uint64_t seed = 0;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = verify->add_subcommand(
        "learn", "Learn per-attribute thresholds and the global threshold");
    AddDataArgs(cmd, &args->data);
    cmd->add_option("--months", args->months, "Months sampled");
    cmd->add_option("--seed", args->seed, "Sampling seed");
    cmd->callback([args] {
      Dataset ds = LoadDataset(args->data.schema, args->data.input);
      auto samples = BuildComparisonSets(ds, args->months, args->seed);
      LearnResult learned = LearnThresholds(ds, samples);
      Json out = MatchingConfigToJson(learned.config);
      out["equal_error"] = {{"rate", learned.equal_error.rate},
                            {"theta", learned.equal_error.theta}};
      out["degenerate"] = learned.degenerate;
      EmitJson(out, args->data.output);
    });
  }

  {
    struct Args {
      std::string schema;
      std::string matching;
      std::string stored;
      std::string presented;
      std::string mode = "simple";
      std::optional<size_t> theta;
    };
    auto args = std::make_shared<Args>();
    auto* cmd = verify->add_subcommand(
        "check", "Compare a presented fingerprint with a stored one");
    cmd->add_option("--schema", args->schema, "Schema sidecar")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--matching,--config", args->matching, "Thresholds (JSON)");
    cmd->add_option("--stored", args->stored, "Stored attribute map (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--presented", args->presented, "Presented attribute map (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--mode", args->mode, "simple or advanced");
    cmd->add_option("--theta", args->theta, "Global threshold override");
    cmd->callback([args] {
      const Schema schema = ReadSchemaFile(args->schema);
      MatchingConfig config = LoadMatchingFor(schema, args->matching, args->theta);
      const VerificationMode mode = ParseMode(args->mode);
      Fingerprint stored = FingerprintFromJson(ReadJsonFile(args->stored), schema);
      Fingerprint presented =
          FingerprintFromJson(ReadJsonFile(args->presented), schema);
      EmitJson({{"identical", CountIdentical(stored, presented)},
                {"matching", CountMatching(stored, presented, config)},
                {"theta", config.theta()},
                {"mode", args->mode},
                {"accepted", Verdict(stored, presented, config, mode)}},
               "");
    });
  }
}

}  // namespace fpkit::cli
