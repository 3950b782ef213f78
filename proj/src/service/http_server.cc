#include "fpkit/service/http_server.h"

#include <httplib.h>

#include <filesystem>
#include <functional>

namespace fpkit {
namespace {

void Reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void ReplyError(httplib::Response& res, int status, const std::string& code,
                const std::string& message) {
  Reply(res, status, {{"error", code}, {"message", message}});
}

const Json& Require(const Json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null())
    throw ServiceError("bad_request", 400, std::string("missing field ") + key);
  return *it;
}

std::string RequireString(const Json& body, const char* key) {
  const Json& v = Require(body, key);
  if (!v.is_string())
    throw ServiceError("bad_request", 400, std::string(key) + " must be a string");
  return v.get<std::string>();
}

std::optional<std::string> OptionalString(const Json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_string())
    throw ServiceError("bad_request", 400, std::string(key) + " must be a string");
  return it->get<std::string>();
}

Json ResponsesField(const Json& body) {
  auto it = body.find("responses");
  return it == body.end() ? Json() : *it;
}

using Handler = std::function<void(const Json&, httplib::Response&)>;

httplib::Server::Handler JsonEndpoint(Handler handler) {
  return [handler = std::move(handler)](const httplib::Request& req,
                                        httplib::Response& res) {
    try {
      Json body = Json::parse(req.body);
      if (!body.is_object())
        throw ServiceError("bad_request", 400, "body must be a JSON object");
      handler(body, res);
    } catch (const Json::exception& e) {
      ReplyError(res, 400, "bad_request", e.what());
    } catch (const ServiceError& e) {
      // Authentication failures carry no detail.
      ReplyError(res, e.status(), e.code(),
                 e.status() == 401 ? "authentication failed" : e.what());
    } catch (const SchemaError& e) {
      ReplyError(res, 400, e.code(), e.what());
    } catch (const ParseError& e) {
      ReplyError(res, 400, e.code(), e.what());
    } catch (const std::exception& e) {
      ReplyError(res, 500, "internal_error", "internal error");
    }
  };
}

}  // namespace

HttpServer::HttpServer(AuthService* service, const std::string& static_dir)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  Routes();
  if (!static_dir.empty()) {
    if (!std::filesystem::is_directory(static_dir))
      throw ConfigError("static directory not found: " + static_dir);
    server_->set_mount_point("/", static_dir);
  }
}

HttpServer::~HttpServer() = default;

void HttpServer::Routes() {
  AuthService* svc = service_;

  server_->Get("/api/health", [svc](const httplib::Request&,
                                    httplib::Response& res) {
    Reply(res, 200,
          {{"status", "ok"},
           {"attributes", svc->schema().size()},
           {"theta", svc->theta()},
           {"mode", ModeName(svc->mode())}});
  });

  server_->Get("/api/schema", [svc](const httplib::Request&,
                                    httplib::Response& res) {
    Reply(res, 200, SchemaToJson(svc->schema()));
  });

  server_->Post("/api/enroll", JsonEndpoint([svc](const Json& body,
                                                  httplib::Response& res) {
    const std::string account_id = RequireString(body, "account_id");
    EnrollResult r = svc->Enroll(
        account_id, RequireString(body, "password"),
        FingerprintFromPayload(Require(body, "fingerprint"), svc->schema()),
        ResponsesFromJson(ResponsesField(body)));
    Reply(res, 201,
          {{"account_id", account_id},
           {"browser_id", r.browser_id},
           {"backup_codes", r.backup_codes},
           {"challenges", r.challenges},
           {"challenge_depleted", r.challenge_depleted}});
  }));

  server_->Post("/api/challenge", JsonEndpoint([svc](const Json& body,
                                                     httplib::Response& res) {
    IssuedChallenge c = svc->IssueChallenge(RequireString(body, "account_id"),
                                            RequireString(body, "browser_id"));
    Reply(res, 200, {{"challenge_id", c.challenge_id}, {"seed", c.seed}});
  }));

  server_->Post("/api/authenticate", JsonEndpoint([svc](const Json& body,
                                                        httplib::Response& res) {
    const Json& payload = Require(body, "fingerprint");
    AuthRequest request;
    request.account_id = RequireString(body, "account_id");
    request.password = RequireString(body, "password");
    request.fingerprint = FingerprintFromPayload(payload, svc->schema());
    request.challenge_id = OptionalString(body, "challenge_id");
    auto response_hash = OptionalString(body, "response_hash");
    // A collection payload may carry the challenge fields itself.
    if (payload.contains("attrs")) {
      if (!request.challenge_id)
        request.challenge_id = OptionalString(payload, "challenge_id");
      if (!response_hash) response_hash = OptionalString(payload, "response_hash");
    }
    request.response_hash = response_hash.value_or("");
    request.provision = ResponsesFromJson(ResponsesField(body));

    AuthDecision d = svc->Authenticate(request);
    switch (d.outcome) {
      case AuthOutcome::kAccepted:
        Reply(res, 200,
              {{"outcome", OutcomeName(d.outcome)},
               {"browser_id", *d.matched_browser_id},
               {"match_count", d.match_count},
               {"theta", svc->theta()},
               {"challenges_remaining", d.challenges_remaining},
               {"token", RandomToken(16)}});
        break;
      case AuthOutcome::kRejected:
        Reply(res, 401, {{"outcome", OutcomeName(d.outcome)},
                         {"error", "authentication_failed"}});
        break;
      case AuthOutcome::kLocked:
        Reply(res, 423, {{"outcome", OutcomeName(d.outcome)}, {"error", "locked"}});
        break;
      case AuthOutcome::kRecoveryRequired:
        Reply(res, 409, {{"outcome", OutcomeName(d.outcome)},
                         {"error", "recovery_required"}});
        break;
    }
  }));

  server_->Post("/api/browser/register", JsonEndpoint([svc](const Json& body,
                                                            httplib::Response& res) {
    BrowserUpdate u = svc->RegisterBrowser(
        RequireString(body, "account_id"), RequireString(body, "proof"),
        FingerprintFromPayload(Require(body, "fingerprint"), svc->schema()),
        ResponsesFromJson(ResponsesField(body)));
    Reply(res, 201, {{"browser_id", u.browser_id}, {"challenges", u.challenges}});
  }));

  server_->Post("/api/recover", JsonEndpoint([svc](const Json& body,
                                                   httplib::Response& res) {
    BrowserUpdate u = svc->Recover(
        RequireString(body, "account_id"), RequireString(body, "recovery_proof"),
        RequireString(body, "browser_id"),
        FingerprintFromPayload(Require(body, "fingerprint"), svc->schema()),
        ResponsesFromJson(ResponsesField(body)));
    Reply(res, 200, {{"browser_id", u.browser_id},
                     {"challenges", u.challenges},
                     {"locked", false}});
  }));
}

int HttpServer::Bind(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host)
                              : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0)
    throw Error("bind_failed",
                "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::Run() { server_->listen_after_bind(); }

void HttpServer::Stop() { server_->stop(); }

}  // namespace fpkit
