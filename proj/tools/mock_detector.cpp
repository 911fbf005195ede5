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

// Serves a fixed detector response on POST /detect until interrupted.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mock_detector_server.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mock face detection service"};
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string body = "[]";
  std::string body_file;
  int status = 200;
  int delay_ms = 0;
  app.add_option("--port", port, "Port to listen on")->capture_default_str();
  app.add_option("--host", host, "Address to bind")->capture_default_str();
  app.add_option("--body", body, "Response body")->capture_default_str();
  app.add_option("--body-file", body_file, "Read the response body from a file")->check(CLI::ExistingFile);
  app.add_option("--status", status, "HTTP status code")->capture_default_str();
  app.add_option("--delay-ms", delay_ms, "Delay before responding")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  if (!body_file.empty()) {
    std::ifstream in(body_file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    body = ss.str();
  }
  try {
    facedim::testing::MockDetector server(port, host);
    server.set_response({status, body, "application/json", std::chrono::milliseconds(delay_ms)});
    std::cout << "listening on " << server.url() << std::endl;
    server.wait();
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}
