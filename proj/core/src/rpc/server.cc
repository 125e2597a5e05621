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

#include "agsim/rpc/server.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

#include "agsim/error.h"

namespace agsim::rpc {
namespace {

constexpr int kPollMs = 100;

void SetNoDelay(int fd) {
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

bool SendAll(int fd, std::string_view bytes) {
  while (!bytes.empty()) {
    const ssize_t n = ::send(fd, bytes.data(), bytes.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

int BindListener(const std::string& host, std::uint16_t port, std::uint16_t* bound) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw BindError(std::string("socket() failed: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw BindError("invalid listen address '" + host + "'");
  }
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 || ::listen(fd, 64) != 0) {
    const std::string reason = std::strerror(errno);
    ::close(fd);
    throw BindError("cannot bind " + host + ":" + std::to_string(port) + ": " + reason);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  *bound = ntohs(addr.sin_port);
  return fd;
}

}  // namespace

Server::Server(const Dispatcher* dispatcher, EndpointConfig config, bool ephemeral)
    : dispatcher_(dispatcher), config_(std::move(config)), ephemeral_(ephemeral) {}

Server::~Server() { Stop(); }

void Server::Start() {
  const PortKind kinds[3] = {PortKind::kMultirotor, PortKind::kCar, PortKind::kWorld};
  try {
    for (const PortKind kind : kinds) {
      const int i = static_cast<int>(kind);
      listen_fds_[i] =
          BindListener(config_.host, ephemeral_ ? 0 : config_.Port(kind), &ports_[i]);
    }
  } catch (...) {
    for (int& fd : listen_fds_) {
      if (fd >= 0) ::close(fd);
      fd = -1;
    }
    throw;
  }
  stop_ = false;
  for (const PortKind kind : kinds) {
    acceptors_.emplace_back(&Server::AcceptLoop, this, kind, listen_fds_[static_cast<int>(kind)]);
  }
}

void Server::Stop() {
  stop_ = true;
  for (auto& t : acceptors_) {
    if (t.joinable()) t.join();
  }
  acceptors_.clear();
  for (int& fd : listen_fds_) {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
  std::lock_guard lock(connections_mutex_);
  for (auto& conn : connections_) {
    ::shutdown(conn.fd, SHUT_RDWR);
  }
  for (auto& conn : connections_) {
    if (conn.thread.joinable()) conn.thread.join();
    ::close(conn.fd);
  }
  connections_.clear();
}

void Server::ReapFinished() {
  std::lock_guard lock(connections_mutex_);
  for (auto it = connections_.begin(); it != connections_.end();) {
    if (it->done) {
      it->thread.join();
      ::close(it->fd);
      it = connections_.erase(it);
    } else {
      ++it;
    }
  }
}

void Server::AcceptLoop(PortKind kind, int listen_fd) {
  while (!stop_) {
    pollfd pfd{listen_fd, POLLIN, 0};
    if (::poll(&pfd, 1, kPollMs) <= 0) {
      ReapFinished();
      continue;
    }
    const int fd = ::accept(listen_fd, nullptr, nullptr);
    if (fd < 0) continue;
    SetNoDelay(fd);
    std::lock_guard lock(connections_mutex_);
    Connection& conn = connections_.emplace_back();
    conn.fd = fd;
    conn.thread = std::thread(&Server::Serve, this, &conn, kind);
  }
}

void Server::Serve(Connection* conn, PortKind kind) {
  FrameDecoder decoder;
  char buffer[64 * 1024];
  while (!stop_) {
    pollfd pfd{conn->fd, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, kPollMs);
    if (ready == 0) continue;
    if (ready < 0 && errno == EINTR) continue;
    const ssize_t n = ready > 0 ? ::recv(conn->fd, buffer, sizeof(buffer), 0) : -1;
    if (n <= 0) break;
    decoder.Feed(std::string_view(buffer, static_cast<std::size_t>(n)));
    try {
      bool alive = true;
      while (alive) {
        const auto frame = decoder.NextFrame();
        if (!frame) break;
        alive = SendAll(conn->fd, dispatcher_->HandleBody(*frame, kind));
      }
      if (!alive) break;
    } catch (const FrameTooLarge& e) {
      // The stream cannot be resynchronized after an oversized prefix.
      SendAll(conn->fd, EncodeResponse(Response::Fail(0, codes::kFrameTooLarge, e.what())));
      break;
    }
  }
  ::shutdown(conn->fd, SHUT_RDWR);
  conn->done = true;
}

Client Client::Connect(const std::string& host, std::uint16_t port, double timeout_s) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw Error(std::string("socket() failed: ") + std::strerror(errno));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw Error("invalid address '" + host + "'");
  }
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    const std::string reason = std::strerror(errno);
    ::close(fd);
    throw Error("connection refused by " + host + " port " + std::to_string(port) + ": " + reason);
  }
  SetNoDelay(fd);
  return Client(fd, timeout_s);
}

Client::Client(Client&& other) noexcept
    : fd_(other.fd_),
      timeout_s_(other.timeout_s_),
      next_id_(other.next_id_),
      decoder_(std::move(other.decoder_)) {
  other.fd_ = -1;
}

Client& Client::operator=(Client&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = other.fd_;
    timeout_s_ = other.timeout_s_;
    next_id_ = other.next_id_;
    decoder_ = std::move(other.decoder_);
    other.fd_ = -1;
  }
  return *this;
}

Client::~Client() {
  if (fd_ >= 0) ::close(fd_);
}

void Client::SendBytes(std::string_view bytes) {
  if (!SendAll(fd_, bytes)) throw Error("send failed: connection closed");
}

Response Client::ReadResponse() {
  using Clock = std::chrono::steady_clock;
  const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                           std::chrono::duration<double>(timeout_s_));
  char buffer[64 * 1024];
  while (true) {
    if (auto frame = decoder_.NextFrame()) return DecodeResponse(*frame);
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (left.count() <= 0) throw Error("timed out waiting for a response");
    pollfd pfd{fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) continue;
    const ssize_t n = ::recv(fd_, buffer, sizeof(buffer), 0);
    if (n <= 0) throw Error("connection closed by server");
    decoder_.Feed(std::string_view(buffer, static_cast<std::size_t>(n)));
  }
}

Response Client::Call(const Envelope& env) {
  SendBytes(EncodeEnvelope(env));
  return ReadResponse();
}

Response Client::Call(std::string vehicle_type, std::string vehicle_id, std::string method,
                      nlohmann::json params) {
  Envelope env{next_id_++, std::move(vehicle_type), std::move(vehicle_id), std::move(method),
               std::move(params)};
  return Call(env);
}

}  // namespace agsim::rpc
