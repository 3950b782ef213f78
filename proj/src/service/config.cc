#include "fpkit/service/config.h"

#include <charconv>
#include <sodium.h>

#include "fpkit/error.h"

namespace fpkit {
namespace {

template <typename T>
T ParseNumber(const char* name, std::string_view text) {
  T value{};
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size())
    throw ConfigError(std::string(name) + ": not a number: " + std::string(text));
  return value;
}

template <typename T>
void Read(const Json& json, const char* key, T* out) {
  auto it = json.find(key);
  if (it == json.end() || it->is_null()) return;
  try {
    *out = it->get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("service config field ") + key + ": " +
                      e.what());
  }
}

}  // namespace

void ServiceConfig::Validate() const {
  if (port < 0 || port > 65535) throw ConfigError("port out of range");
  if (lockout == 0) throw ConfigError("lockout limit must be positive");
  if (bind.empty()) throw ConfigError("bind address is empty");
  if (store.empty()) throw ConfigError("store path is empty");
  if (argon2_opslimit < crypto_pwhash_OPSLIMIT_MIN ||
      argon2_opslimit > crypto_pwhash_OPSLIMIT_MAX)
    throw ConfigError("argon2 opslimit out of range");
  if (argon2_memlimit < crypto_pwhash_MEMLIMIT_MIN ||
      argon2_memlimit > crypto_pwhash_MEMLIMIT_MAX)
    throw ConfigError("argon2 memlimit out of range");
}

ServiceConfig ServiceConfigFromJson(const Json& json) {
  if (!json.is_object()) throw ConfigError("service config must be an object");
  ServiceConfig config;
  Read(json, "bind", &config.bind);
  Read(json, "port", &config.port);
  if (json.contains("theta") && !json["theta"].is_null()) {
    size_t theta = 0;
    Read(json, "theta", &theta);
    config.theta = theta;
  }
  if (json.contains("mode"))
    config.mode = ParseMode(json["mode"].get<std::string>());
  Read(json, "lockout", &config.lockout);
  Read(json, "challenges", &config.challenges);
  Read(json, "backup_codes", &config.backup_codes);
  Read(json, "store", &config.store);
  Read(json, "static_dir", &config.static_dir);
  Read(json, "schema", &config.schema_path);
  Read(json, "matching", &config.matching_path);
  Read(json, "user_agent_attribute", &config.user_agent_attribute);
  Read(json, "argon2_opslimit", &config.argon2_opslimit);
  Read(json, "argon2_memlimit", &config.argon2_memlimit);
  return config;
}

Json ServiceConfigToJson(const ServiceConfig& config) {
  Json json = {{"bind", config.bind},
               {"port", config.port},
               {"theta", nullptr},
               {"mode", ModeName(config.mode)},
               {"lockout", config.lockout},
               {"challenges", config.challenges},
               {"backup_codes", config.backup_codes},
               {"store", config.store},
               {"static_dir", config.static_dir},
               {"schema", config.schema_path},
               {"matching", config.matching_path},
               {"user_agent_attribute", config.user_agent_attribute},
               {"argon2_opslimit", config.argon2_opslimit},
               {"argon2_memlimit", config.argon2_memlimit}};
  if (config.theta) json["theta"] = *config.theta;
  return json;
}

void ApplyEnvironment(ServiceConfig* config, const EnvLookup& lookup) {
  auto get = [&](const char* name) -> std::optional<std::string_view> {
    const char* value = lookup(name);
    if (value == nullptr || *value == '\0') return std::nullopt;
    return std::string_view(value);
  };
  if (auto v = get("FPKIT_BIND")) config->bind = *v;
  if (auto v = get("FPKIT_PORT")) config->port = ParseNumber<int>("FPKIT_PORT", *v);
  if (auto v = get("FPKIT_THETA"))
    config->theta = ParseNumber<size_t>("FPKIT_THETA", *v);
  if (auto v = get("FPKIT_MODE")) config->mode = ParseMode(*v);
  if (auto v = get("FPKIT_LOCKOUT"))
    config->lockout = ParseNumber<size_t>("FPKIT_LOCKOUT", *v);
  if (auto v = get("FPKIT_CHALLENGES"))
    config->challenges = ParseNumber<size_t>("FPKIT_CHALLENGES", *v);
  if (auto v = get("FPKIT_STORE")) config->store = *v;
  if (auto v = get("FPKIT_STATIC_DIR")) config->static_dir = *v;
}

ServiceConfig LoadServiceConfig(const std::optional<std::string>& path) {
  ServiceConfig config;
  if (path) config = ServiceConfigFromJson(ReadJsonFile(*path));
  ApplyEnvironment(&config);
  config.Validate();
  return config;
}

}  // namespace fpkit
