#include "sibyl/server.hpp"

#include <stdexcept>

#include "httplib.h"

namespace sibyl {

struct Server::Impl {
  std::shared_ptr<const AppState> state;
  ServerOptions options;
  httplib::Server http;
  int port = -1;
};

namespace {

void answer(const AppState& state, const httplib::Request& req, httplib::Response& res) {
  QueryParams params(req.params.begin(), req.params.end());
  const ApiResponse out = handle_request(state, req.method, req.path, params, req.body);
  res.status = out.status;
  res.set_content(out.body.dump(), "application/json; charset=utf-8");
}

}  // namespace

Server::Server(std::shared_ptr<const AppState> state, ServerOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->state = std::move(state);
  impl_->options = std::move(options);
  auto& http = impl_->http;
  const std::string origin = impl_->options.cors_origin;

  http.set_default_headers({{"Access-Control-Allow-Origin", origin},
                            {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                            {"Access-Control-Allow-Headers", "Content-Type"}});

  const AppState* state_ptr = impl_->state.get();
  auto handler = [state_ptr](const httplib::Request& req, httplib::Response& res) {
    answer(*state_ptr, req, res);
  };
  http.Get(R"(/api/v1/.*)", handler);
  http.Post(R"(/api/v1/.*)", handler);
  http.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });

  if (impl_->options.ui_dir) {
    http.set_mount_point("/", impl_->options.ui_dir->string());
  }
}

Server::~Server() { stop(); }

int Server::bind() {
  auto& opts = impl_->options;
  if (opts.port == 0) {
    impl_->port = impl_->http.bind_to_any_port(opts.host);
  } else {
    impl_->port = impl_->http.bind_to_port(opts.host, opts.port) ? opts.port : -1;
  }
  if (impl_->port < 0) {
    throw std::runtime_error("cannot bind " + opts.host + ":" + std::to_string(opts.port));
  }
  return impl_->port;
}

void Server::listen() {
  if (impl_->port < 0) bind();
  impl_->http.listen_after_bind();
}

void Server::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

bool Server::running() const { return impl_->http.is_running(); }

}  // namespace sibyl
