// Copyright 2026 The pianobench Authors
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

// Environment server. A Session owns one environment and turns request lines
// into reply lines; Server runs one session per TCP connection, and
// serve_stream runs a single session over a stream pair (stdio).

#ifndef PIANOBENCH_SERVICE_HPP_
#define PIANOBENCH_SERVICE_HPP_

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <istream>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "pianobench/env.hpp"
#include "pianobench/protocol.hpp"
#include "pianobench/songs.hpp"
#include "pianobench/trajectory.hpp"

namespace pianobench {

// State shared by every session of a server. Only the episode counter and
// the log sink are mutable, and both are synchronized.
struct ServiceContext {
  EnvConfig config;
  std::shared_ptr<const SongLibrary> library;
  TrajectoryWriter* sink = nullptr;
  std::atomic<std::int64_t> next_episode{0};

  ServiceContext(EnvConfig env, std::shared_ptr<const SongLibrary> songs,
                 TrajectoryWriter* log = nullptr)
      : config(std::move(env)), library(std::move(songs)), sink(log) {
    config.validate();
    if (!library) throw std::invalid_argument("ServiceContext: null song library");
  }
};

class Session {
 public:
  explicit Session(ServiceContext& context) : context_(context) {}

  // Exactly one reply per request line.
  std::string handle(std::string_view line) {
    auto message = parse_message(line);
    if (!message) return error_message(error_code::kBadMessage, "expected 'kind key=value ...'").str();
    try {
      if (message->kind == "handshake") return handshake(*message).str();
      if (message->kind == "reset") return reset(*message).str();
      if (message->kind == "step") return step(*message).str();
      if (message->kind == "close") {
        closed_ = true;
        return Message{"close", {}}.str();
      }
      return error_message(error_code::kUnknownKind, "unknown message kind '" + message->kind + "'")
          .str();
    } catch (const std::invalid_argument& e) {
      return error_message(error_code::kBadMessage, e.what()).str();
    }
  }

  bool closed() const { return closed_; }
  const Environment* environment() const { return env_ ? &*env_ : nullptr; }

 private:
  Message handshake(const Message& request) {
    if (request.fields.has("version")) {
      const int version = request.fields.get_int<int>("version");
      if (version != kProtocolVersion) {
        return error_message(error_code::kVersionMismatch,
                             "server speaks version " + std::to_string(kProtocolVersion) +
                                 ", client asked for " + std::to_string(version));
      }
    }
    const EnvConfig& config = context_.config;
    std::string active;
    for (int d = 0; d < kActionDim; ++d) {
      if (!config.hands.mask.active(d)) continue;
      if (!active.empty()) active.push_back(',');
      active += std::to_string(d);
    }
    Message reply{"handshake", {}};
    reply.fields.set("version", kProtocolVersion)
        .set("obs_dim", observation_dim(config.lookahead))
        .set("action_dim", kActionDim)
        .set("action_low", -1.0)
        .set("action_high", 1.0)
        .set("dt", config.dt_control)
        .set("dt_physics", config.dt_physics)
        .set("lookahead", config.lookahead)
        .set("discount", config.discount)
        .set("active_dims", active)
        .set("songs", context_.library->joined_names());
    return reply;
  }

  Message reset(const Message& request) {
    const std::string& song = request.fields.at("song");
    if (!context_.library->contains(song)) {
      return error_message(error_code::kUnknownSong, "unknown song '" + song + "'; available: " +
                                                         context_.library->joined_names());
    }
    seed_ = request.fields.has("seed") ? request.fields.get_int<std::uint64_t>("seed") : 0;
    env_.emplace(context_.config, context_.library->get(song));
    song_ = song;
    step_ = 0;
    episode_ = context_.next_episode.fetch_add(1);
    observation_ = env_->observe().flatten();
    Message reply{"reset", {}};
    reply.fields.set("obs", std::span<const double>(observation_))
        .set("frames", env_->num_frames())
        .set("episode", episode_);
    return reply;
  }

  Message step(const Message& request) {
    if (!env_) return error_message(error_code::kNotReset, "send reset before step");
    if (env_->done()) return error_message(error_code::kEpisodeDone, "episode finished; send reset");
    const std::vector<double> action = request.fields.get_vector("action");
    if (action.size() != static_cast<std::size_t>(kActionDim)) {
      return error_message(error_code::kBadActionLength,
                           "expected " + std::to_string(kActionDim) + " values, got " +
                               std::to_string(action.size()));
    }
    for (double a : action) {
      if (!std::isfinite(a)) return error_message(error_code::kBadValue, "action has a non-finite value");
    }
    const StepResult result = env_->step(action);
    if (context_.sink) {
      TrajectoryRecord record;
      record.episode = episode_;
      record.song = song_;
      record.seed = seed_;
      record.step = step_;
      record.observation = observation_;
      record.action = action;
      record.played = result.info.played;
      record.reward = result.reward;
      record.done = result.done;
      context_.sink->write(record);
    }
    ++step_;
    observation_ = result.observation.flatten();

    Message reply{"step", {}};
    reply.fields.set("obs", std::span<const double>(observation_))
        .set("r_key", result.reward.r_key)
        .set("r_finger", result.reward.r_finger)
        .set("r_energy", result.reward.r_energy)
        .set("r_total", result.reward.r_total)
        .set("done", result.done)
        .set("t", env_->time())
        .set("frame", result.info.frame)
        .set("precision", result.info.precision)
        .set("recall", result.info.recall)
        .set("f1", result.info.f1)
        .set("sum_key", result.info.totals.key)
        .set("sum_finger", result.info.totals.finger)
        .set("sum_energy", result.info.totals.energy)
        .set("sum_total", result.info.totals.total)
        .set("played", format_key_list(result.info.played));
    return reply;
  }

  ServiceContext& context_;
  std::optional<Environment> env_;
  std::string song_;
  std::uint64_t seed_ = 0;
  std::int64_t episode_ = -1;
  std::int64_t step_ = 0;
  std::vector<double> observation_;
  bool closed_ = false;
};

// Runs one session until `close` or end of input.
inline void serve_stream(std::istream& in, std::ostream& out, ServiceContext& context) {
  Session session(context);
  std::string line;
  while (!session.closed() && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out << session.handle(line) << '\n';
    out.flush();
  }
}

namespace net_detail {

class LineSocket {
 public:
  explicit LineSocket(int fd) : fd_(fd) {}
  ~LineSocket() { close(); }
  LineSocket(const LineSocket&) = delete;
  LineSocket& operator=(const LineSocket&) = delete;

  // False on EOF or error.
  bool read_line(std::string& line) {
    for (;;) {
      const auto newline = buffer_.find('\n');
      if (newline != std::string::npos) {
        line = buffer_.substr(0, newline);
        buffer_.erase(0, newline + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
      }
      char chunk[4096];
      const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) return false;
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  bool write_line(const std::string& line) {
    const std::string data = line + "\n";
    std::size_t sent = 0;
    while (sent < data.size()) {
      const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) return false;
      sent += static_cast<std::size_t>(n);
    }
    return true;
  }

  void shutdown() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  }

  void close() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

  int fd() const { return fd_; }

 private:
  int fd_;
  std::string buffer_;
};

inline sockaddr_in resolve(const std::string& host, int port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* info = nullptr;
  const int rc = ::getaddrinfo(host.c_str(), nullptr, &hints, &info);
  if (rc != 0 || !info) {
    throw std::runtime_error("cannot resolve '" + host + "': " + ::gai_strerror(rc));
  }
  sockaddr_in addr = *reinterpret_cast<sockaddr_in*>(info->ai_addr);
  ::freeaddrinfo(info);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  return addr;
}

inline std::runtime_error socket_error(const std::string& what) {
  return std::runtime_error(what + ": " + std::strerror(errno));
}

}  // namespace net_detail

class Server {
 public:
  explicit Server(ServiceContext& context) : context_(context) {}
  ~Server() { stop(); }
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and starts accepting; port 0 picks a free port. Returns the port.
  int listen(const std::string& host, int port) {
    if (listen_fd_ >= 0) throw std::logic_error("server already listening");
    const sockaddr_in addr = net_detail::resolve(host, port);
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw net_detail::socket_error("socket");
    const int on = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &on, sizeof(on));
    if (::bind(listen_fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) < 0 ||
        ::listen(listen_fd_, 16) < 0) {
      const auto error = net_detail::socket_error("bind " + host + ":" + std::to_string(port));
      ::close(listen_fd_);
      listen_fd_ = -1;
      throw error;
    }
    sockaddr_in bound{};
    socklen_t length = sizeof(bound);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &length);
    port_ = ntohs(bound.sin_port);
    running_ = true;
    acceptor_ = std::thread([this] { accept_loop(); });
    return port_;
  }

  // Blocks until stop() is called from another thread.
  void wait() {
    if (acceptor_.joinable()) acceptor_.join();
  }

  void stop() {
    if (!running_.exchange(false)) {
      wait();
      return;
    }
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
    wait();
    std::list<Connection> connections;
    {
      std::lock_guard lock(mutex_);
      for (auto& c : connections_) c.socket->shutdown();
      connections.swap(connections_);
    }
    for (auto& c : connections) {
      if (c.thread.joinable()) c.thread.join();
    }
  }

  int port() const { return port_; }

 private:
  struct Connection {
    std::shared_ptr<net_detail::LineSocket> socket;
    std::thread thread;
  };

  void accept_loop() {
    while (running_) {
      const int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) {
        if (errno == EINTR) continue;
        return;
      }
      auto socket = std::make_shared<net_detail::LineSocket>(fd);
      std::lock_guard lock(mutex_);
      if (!running_) return;  // socket closes with the shared_ptr
      connections_.push_back({socket, std::thread([this, socket] { run_session(*socket); })});
    }
  }

  // The environment lives on this stack frame and dies with the transport.
  void run_session(net_detail::LineSocket& socket) {
    Session session(context_);
    std::string line;
    while (!session.closed() && socket.read_line(line)) {
      if (line.empty()) continue;
      if (!socket.write_line(session.handle(line))) break;
    }
    socket.shutdown();
  }

  ServiceContext& context_;
  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::mutex mutex_;
  std::list<Connection> connections_;
};

// Minimal blocking client, used by tests and the samples.
class Client {
 public:
  Client(const std::string& host, int port) {
    const sockaddr_in addr = net_detail::resolve(host, port);
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw net_detail::socket_error("socket");
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) < 0) {
      const auto error = net_detail::socket_error("connect " + host + ":" + std::to_string(port));
      ::close(fd);
      throw error;
    }
    socket_ = std::make_unique<net_detail::LineSocket>(fd);
  }

  std::string request(const std::string& line) {
    if (!socket_->write_line(line)) throw std::runtime_error("connection lost while sending");
    std::string reply;
    if (!socket_->read_line(reply)) throw std::runtime_error("connection closed by server");
    return reply;
  }

  Message call(const Message& message) {
    auto reply = parse_message(request(message.str()));
    if (!reply) throw std::runtime_error("malformed reply from server");
    return *reply;
  }

 private:
  std::unique_ptr<net_detail::LineSocket> socket_;
};

}  // namespace pianobench

#endif  // PIANOBENCH_SERVICE_HPP_
