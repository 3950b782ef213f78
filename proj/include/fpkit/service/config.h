#ifndef FPKIT_SERVICE_CONFIG_H_
#define FPKIT_SERVICE_CONFIG_H_

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>

#include "fpkit/model/io.h"
#include "fpkit/verify/matching.h"

namespace fpkit {

struct ServiceConfig {
  std::string bind = "127.0.0.1";
  int port = 8080;
  // Global threshold. Unset means: take it from the matching file, or
  // require every attribute to match when there is none.
  std::optional<size_t> theta;
  VerificationMode mode = VerificationMode::kSimple;
  size_t lockout = 16;
  size_t challenges = 8;
  size_t backup_codes = 10;
  // SQLite database path, or ":memory:" for a process-local store.
  std::string store = "fpkit-accounts.db";
  std::string static_dir;
  std::string schema_path;
  std::string matching_path;
  std::string user_agent_attribute = "userAgent";
  std::uint64_t argon2_opslimit = 2;
  size_t argon2_memlimit = 64u << 20;

  // Throws ConfigError on an inconsistent setting.
  void Validate() const;
};

ServiceConfig ServiceConfigFromJson(const Json& json);
Json ServiceConfigToJson(const ServiceConfig& config);

using EnvLookup = std::function<const char*(const char*)>;

// Applies FPKIT_BIND, FPKIT_PORT, FPKIT_THETA, FPKIT_MODE, FPKIT_LOCKOUT,
// FPKIT_CHALLENGES, FPKIT_STORE and FPKIT_STATIC_DIR. Throws ConfigError on
// a malformed value.
void ApplyEnvironment(ServiceConfig* config,
                      const EnvLookup& lookup = [](const char* name) {
                        return static_cast<const char*>(std::getenv(name));
                      });

// File (optional) then environment, then validation.
ServiceConfig LoadServiceConfig(const std::optional<std::string>& path);

}  // namespace fpkit

#endif  // FPKIT_SERVICE_CONFIG_H_
