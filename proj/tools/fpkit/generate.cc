#include <iostream>
#include <memory>

#include "commands.h"
#include "fpkit/attack/attack.h"
#include "fpkit/synth/calibrate.h"
#include "fpkit/synth/generator.h"
#include "fpkit/verify/matching.h"

namespace fpkit::cli {

void AddSynth(CLI::App& app) {
  struct Args {
    std::string config;
    size_t browsers = 1000;
    std::optional<std::uint64_t> seed;
    std::string output;
    std::string schema_out;
    std::string report;
    bool dump_config = false;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
  cmd->add_option("--config", args->config, "Generator config (JSON)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--browsers", args->browsers,
                  "Browsers for the standard config");
  cmd->add_option("--seed", args->seed, "Seed override");
  cmd->add_option("--out", args->output, "Dataset path (default stdout)");
  cmd->add_option("--schema-out", args->schema_out, "Write the schema here");
  cmd->add_option("--report", args->report, "Write the generation report here");
  cmd->add_flag("--dump-config", args->dump_config,
                "Print the effective config and exit");
  cmd->callback([args] {
    GeneratorConfig config;
    if (args->config.empty()) {
      config = StandardConfig(args->browsers, args->seed.value_or(0));
    } else {
      config = GeneratorConfigFromJson(ReadJsonFile(args->config));
      if (args->seed) config.seed = *args->seed;
    }
    config.Validate();
    if (args->dump_config) {
      EmitJson(GeneratorConfigToJson(config), args->output);
      return;
    }
    GenerationReport report;
    Dataset ds = Generate(config, &report);
    if (args->output.empty() || args->output == "-") {
      WriteJsonl(std::cout, ds);
    } else {
      WriteJsonlFile(args->output, ds);
    }
    if (!args->schema_out.empty()) WriteSchemaFile(ds.schema(), args->schema_out);
    if (!args->report.empty()) EmitJson(report.ToJson(), args->report);
  });
}

void AddCalibrate(CLI::App& app) {
  struct Args {
    std::string targets;
    std::string base;
    size_t browsers = 47000;
    std::uint64_t seed = 0;
    std::string output;
    std::string report;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand(
      "calibrate", "Fit the generator to target class statistics");
  cmd->add_option("--targets", args->targets, "Calibration targets (JSON)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--base", args->base, "Starting generator config (JSON)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--browsers", args->browsers, "Browsers in the fitted config");
  cmd->add_option("--seed", args->seed, "Seed");
  cmd->add_option("--out", args->output, "Fitted config path (default stdout)");
  cmd->add_option("--report", args->report, "Write moments and residuals here");
  cmd->callback([args] {
    CalibrationTargets targets;
    if (!args->targets.empty())
      targets = CalibrationTargets::FromJson(ReadJsonFile(args->targets));
    GeneratorConfig base =
        args->base.empty() ? StandardConfig(args->browsers, args->seed)
                           : GeneratorConfigFromJson(ReadJsonFile(args->base));
    CalibrationResult result = Calibrate(targets, std::move(base));
    EmitJson(GeneratorConfigToJson(result.config), args->output);
    if (!args->report.empty()) EmitJson(result.ToJson(), args->report);
  });
}

void AddAttack(CLI::App& app) {
  struct Args {
    std::string schema;
    std::string input;
    std::string dictionary;
    std::string matching;
    std::string strategy = "brute";
    std::string mode = "simple";
    size_t attempts = 1;
    std::uint64_t seed = 0;
    bool exhaustive = false;
    std::optional<size_t> theta;
    std::string output;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand(
      "attack", "Impersonation attempts against the latest fingerprints");
  cmd->add_option("--schema", args->schema, "Schema sidecar")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--in,--targets", args->input, "Target dataset (JSON Lines)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--dictionary", args->dictionary,
                  "Dataset the attacker learns from (default: targets)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--matching,--verifier", args->matching,
                  "Verifier thresholds (JSON)");
  cmd->add_option("--strategy", args->strategy, "brute or dictionary");
  cmd->add_option("--mode", args->mode, "simple or advanced");
  cmd->add_option("--attempts", args->attempts, "Attempts per target");
  cmd->add_option("--seed", args->seed, "Seed");
  cmd->add_flag("--exhaustive", args->exhaustive,
                "Brute force walks the domain in order");
  cmd->add_option("--theta", args->theta, "Global threshold override");
  cmd->add_option("--out", args->output, "Report path (default stdout)");
  cmd->callback([args] {
    Dataset targets = LoadDataset(args->schema, args->input);
    Dataset knowledge = args->dictionary.empty()
                            ? targets
                            : LoadDataset(args->schema, args->dictionary);
    MatchingConfig verifier =
        args->matching.empty()
            ? MatchingConfig(targets.schema(), targets.schema().size())
            : MatchingConfigFromJson(ReadJsonFile(args->matching),
                                     targets.schema());
    if (args->theta) verifier.set_theta(*args->theta);
    AttackPolicy policy;
    policy.strategy = ParseStrategy(args->strategy);
    policy.attempts = args->attempts;
    policy.seed = args->seed;
    policy.exhaustive = args->exhaustive;
    policy.Validate();
    const VerificationMode mode = ParseMode(args->mode);
    std::vector<Fingerprint> latest = LatestFingerprints(targets);
    AttackReport report =
        policy.strategy == AttackStrategy::kBruteForce
            ? BruteForce(latest, DomainFromDataset(knowledge), policy, verifier,
                         mode)
            : DictionaryAttack(latest,
                               FingerprintDistribution::FromDataset(knowledge),
                               policy, verifier, mode);
    EmitJson(report.ToJson(), args->output);
  });
}

}  // namespace fpkit::cli
