// Copyright 2026 The FloodSight Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <httplib.h>

#include "floodsight/error.hpp"
#include "floodsight/service.hpp"

namespace floodsight::service {

namespace {

constexpr std::size_t kMaxBodyBytes = 1 << 20;

}  // namespace

struct HttpServer::Impl {
  explicit Impl(const Service& s) : service(s) {}
  const Service& service;
  httplib::Server server;
  bool bound = false;
};

HttpServer::HttpServer(const Service& service)
    : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  srv.set_payload_max_length(kMaxBodyBytes);
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  const auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const std::multimap<std::string, std::string> query(req.params.begin(), req.params.end());
    const HttpResult r = impl_->service.handle(req.method, req.path, query, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  srv.Get(".*", route);
  srv.Post(".*", route);
  srv.Put(".*", route);
  srv.Delete(".*", route);
  srv.Patch(".*", route);
  srv.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                               std::exception_ptr) {
    res.status = 500;
    res.set_content(R"({"error":"internal_error","message":"unhandled exception"})",
                    "application/json");
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  auto& srv = impl_->server;
  int bound = port;
  if (port == 0) {
    bound = srv.bind_to_any_port(host);
  } else if (!srv.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  impl_->bound = true;
  return bound;
}

void HttpServer::listen() {
  if (!impl_->bound) throw ArgumentError("http server: bind() before listen()");
  if (!impl_->server.listen_after_bind()) throw IoError("http server stopped with an error");
}

void HttpServer::stop() { impl_->server.stop(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace floodsight::service
