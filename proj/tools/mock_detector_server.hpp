// Copyright 2026 The facedim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// In-process HTTP stand-in for the face detection service. Serves a
// configurable canned response on POST /detect and records what it received.

#include <chrono>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "httplib.h"

namespace facedim::testing {

class MockDetector {
 public:
  struct Response {
    int status = 200;
    std::string body = "[]";
    std::string content_type = "application/json";
    std::chrono::milliseconds delay{0};
  };

  struct Received {
    int requests = 0;
    std::string content_type;
    std::string authorization;
    std::string body;
  };

  explicit MockDetector(int port = 0, const std::string& host = "127.0.0.1") {
    server_.Post("/detect", [this](const httplib::Request& req, httplib::Response& res) {
      Response r;
      {
        std::lock_guard lock(mu_);
        ++received_.requests;
        received_.content_type = req.get_header_value("Content-Type");
        received_.authorization = req.get_header_value("Authorization");
        received_.body = req.body;
        r = response_;
      }
      if (r.delay.count() > 0) std::this_thread::sleep_for(r.delay);
      res.status = r.status;
      res.set_content(r.body, r.content_type);
    });
    port_ = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (port_ <= 0) throw std::runtime_error("mock detector cannot bind to " + host);
    host_ = host;
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockDetector() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  MockDetector(const MockDetector&) = delete;
  MockDetector& operator=(const MockDetector&) = delete;

  void set_response(Response r) {
    std::lock_guard lock(mu_);
    response_ = std::move(r);
  }

  Received received() const {
    std::lock_guard lock(mu_);
    return received_;
  }

  int port() const noexcept { return port_; }
  std::string url() const { return "http://" + host_ + ":" + std::to_string(port_) + "/detect"; }

  /// Blocks until the server is stopped from another thread.
  void wait() {
    if (thread_.joinable()) thread_.join();
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  mutable std::mutex mu_;
  Response response_;
  Received received_;
  std::string host_;
  int port_ = 0;
};

}  // namespace facedim::testing
