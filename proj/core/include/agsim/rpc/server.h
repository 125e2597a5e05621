/*
 * Copyright 2026 The agsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef AGSIM_RPC_SERVER_H_
#define AGSIM_RPC_SERVER_H_

#include <atomic>
#include <cstdint>
#include <list>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "agsim/rpc/dispatcher.h"
#include "agsim/rpc/protocol.h"

namespace agsim::rpc {

// TCP front end: one listening socket per port kind, one thread per
// connection. Responses on a connection are written in request order.
class Server {
 public:
  // With `ephemeral`, each port kind binds an OS-chosen free port instead of
  // base_port + offset (used by tests).
  Server(const Dispatcher* dispatcher, EndpointConfig config, bool ephemeral = false);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Throws BindError naming the port that could not be bound.
  void Start();
  void Stop();

  std::uint16_t port(PortKind kind) const { return ports_[static_cast<int>(kind)]; }
  const EndpointConfig& config() const { return config_; }

 private:
  struct Connection {
    int fd = -1;
    std::thread thread;
    std::atomic<bool> done{false};
  };

  void AcceptLoop(PortKind kind, int listen_fd);
  void Serve(Connection* conn, PortKind kind);
  void ReapFinished();

  const Dispatcher* dispatcher_;
  EndpointConfig config_;
  bool ephemeral_;
  std::atomic<bool> stop_{false};
  int listen_fds_[3] = {-1, -1, -1};
  std::uint16_t ports_[3] = {0, 0, 0};
  std::vector<std::thread> acceptors_;
  std::mutex connections_mutex_;
  std::list<Connection> connections_;
};

// Blocking client holding one connection to one port.
class Client {
 public:
  // Throws Error("connection refused ... port N") on failure.
  static Client Connect(const std::string& host, std::uint16_t port, double timeout_s = 5.0);

  Client(Client&& other) noexcept;
  Client& operator=(Client&& other) noexcept;
  ~Client();

  // Sends the envelope and waits for its response.
  Response Call(const Envelope& env);
  // Assigns the next id from a per-client counter.
  Response Call(std::string vehicle_type, std::string vehicle_id, std::string method,
                nlohmann::json params = nlohmann::json::object());

  void SendBytes(std::string_view bytes);
  // Next decoded response; throws Error on timeout or a closed connection.
  Response ReadResponse();

 private:
  explicit Client(int fd, double timeout_s) : fd_(fd), timeout_s_(timeout_s) {}

  int fd_ = -1;
  double timeout_s_ = 5.0;
  std::uint64_t next_id_ = 1;
  FrameDecoder decoder_;
};

}  // namespace agsim::rpc

#endif  // AGSIM_RPC_SERVER_H_
