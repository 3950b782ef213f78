#include <csignal>
#include <iostream>
#include <memory>

#include "commands.h"
#include "fpkit/service/http_server.h"

namespace fpkit::cli {
namespace {

HttpServer* g_server = nullptr;

void HandleSignal(int) {
  if (g_server) g_server->Stop();
}

}  // namespace

void AddServe(CLI::App& app) {
  struct Args {
    std::string config;
    std::string schema;
    std::string matching;
    std::string static_dir;
    std::string store;
    std::optional<int> port;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("serve", "Run the authentication service");
  cmd->add_option("--config", args->config, "Service config (JSON)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--schema", args->schema, "Schema sidecar");
  cmd->add_option("--matching", args->matching, "Verifier thresholds (JSON)");
  cmd->add_option("--static", args->static_dir, "Directory of static pages");
  cmd->add_option("--store", args->store, "Account database");
  cmd->add_option("--port", args->port, "Port (0 picks a free one)");
  cmd->callback([args] {
    std::optional<std::string> path;
    if (!args->config.empty()) path = args->config;
    ServiceConfig config = LoadServiceConfig(path);
    if (!args->schema.empty()) config.schema_path = args->schema;
    if (!args->matching.empty()) config.matching_path = args->matching;
    if (!args->static_dir.empty()) config.static_dir = args->static_dir;
    if (!args->store.empty()) config.store = args->store;
    if (args->port) config.port = *args->port;
    config.Validate();

    AuthService service(config, LoadMatching(config),
                        OpenAccountStore(config.store));
    HttpServer server(&service, config.static_dir);
    const int port = server.Bind(config.bind, config.port);
    std::cout << "listening on " << config.bind << ":" << port << " (theta "
              << service.theta() << "/" << service.schema().size() << ", "
              << ModeName(service.mode()) << ")" << std::endl;
    g_server = &server;
    std::signal(SIGINT, HandleSignal);
    std::signal(SIGTERM, HandleSignal);
    server.Run();
    g_server = nullptr;
  });
}

}  // namespace fpkit::cli
