#ifndef FPKIT_SERVICE_HTTP_SERVER_H_
#define FPKIT_SERVICE_HTTP_SERVER_H_

#include <memory>
#include <string>

#include "fpkit/service/auth_service.h"

namespace httplib {
class Server;
}

namespace fpkit {

// JSON API over an AuthService, plus static pages from |static_dir| when
// it is set.
class HttpServer {
 public:
  HttpServer(AuthService* service, const std::string& static_dir);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws
  // Error("bind_failed") otherwise.
  int Bind(const std::string& host, int port);
  // Blocks until Stop().
  void Run();
  void Stop();

 private:
  void Routes();

  AuthService* service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace fpkit

#endif  // FPKIT_SERVICE_HTTP_SERVER_H_
