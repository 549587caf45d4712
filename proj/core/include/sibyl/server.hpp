#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "sibyl/api.hpp"

namespace sibyl {

inline constexpr int kDefaultPort = 8090;

struct ServerOptions {
  std::string host = "0.0.0.0";
  int port = kDefaultPort;  // 0 binds an ephemeral port
  std::string cors_origin = "*";
  std::optional<std::filesystem::path> ui_dir;  // static assets served at /
};

// HTTP/1.1 front end over handle_request().
class Server {
 public:
  Server(std::shared_ptr<const AppState> state, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds the socket; returns the bound port. Throws std::runtime_error if
  // binding fails.
  int bind();
  // Blocks serving requests until stop() is called from another thread.
  void listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sibyl
