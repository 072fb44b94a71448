#pragma once

#include <atomic>
#include <cstdint>
#include <list>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "gapflow/rsu/advisor.hpp"
#include "gapflow/rsu/codec.hpp"

namespace gapflow::rsu {

/// Transport or protocol failure seen by a client.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by request_gaps when the service answers with an error frame.
class ServiceError : public std::runtime_error {
 public:
  explicit ServiceError(ErrorMessage error)
      : std::runtime_error(error.code + ": " + error.detail), error_(std::move(error)) {}
  const ErrorMessage& error() const { return error_; }

 private:
  ErrorMessage error_;
};

class Client {
 public:
  virtual ~Client() = default;
  /// Sends one message and waits for the reply.
  virtual Message exchange(const Message& message) = 0;

  /// Throws ServiceError on an error reply and TransportError if the reply is
  /// not a response for the same platoon.
  GapResponse request_gaps(const GapRequest& request);
};

/// Same code path as the socket transport (encode, decode, handle, encode,
/// decode) without the network.
class InProcessClient : public Client {
 public:
  explicit InProcessClient(Handler handler) : handler_(std::move(handler)) {}
  Message exchange(const Message& message) override;

 private:
  Handler handler_;
};

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

/// Parses "host:port" (IPv4 dotted quad or "localhost").
Endpoint parse_endpoint(const std::string& text);

/// Blocking TCP client over one connection.
class TcpClient : public Client {
 public:
  explicit TcpClient(const Endpoint& endpoint);
  ~TcpClient() override;
  TcpClient(const TcpClient&) = delete;
  TcpClient& operator=(const TcpClient&) = delete;

  Message exchange(const Message& message) override;
  /// Writes raw bytes and reads one reply frame (protocol tests).
  Message exchange_raw(const std::string& bytes);
  /// Writes raw bytes without waiting for a reply.
  void send_raw(const std::string& bytes);

 private:
  Message read_frame();
  int fd_ = -1;
  std::string buffer_;
};

/// Thread-per-connection TCP service. Frames on one connection are answered
/// in order. Malformed frames get an error frame and the connection stays
/// open; a connection that drops mid-frame is closed without affecting others.
class TcpServer {
 public:
  TcpServer(Handler handler, const Endpoint& endpoint);
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  /// Port actually bound (useful with port 0).
  std::uint16_t port() const { return port_; }
  std::uint64_t requests_served() const { return served_.load(); }
  void stop();

 private:
  void accept_loop();
  void serve_connection(int fd);

  Handler handler_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{true};
  std::atomic<std::uint64_t> served_{0};
  std::thread acceptor_;
  std::mutex mutex_;
  std::list<std::thread> workers_;
  std::list<int> connections_;
};

}  // namespace gapflow::rsu
