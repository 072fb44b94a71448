#include "gapflow/rsu/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

namespace gapflow::rsu {

namespace {

void write_all(int fd, const std::string& bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("send failed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

// Appends whatever is available; returns false on orderly shutdown.
bool read_some(int fd, std::string& buffer) {
  char chunk[4096];
  for (;;) {
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n > 0) {
      buffer.append(chunk, static_cast<std::size_t>(n));
      return true;
    }
    if (n == 0) return false;
    if (errno != EINTR) return false;
  }
}

ErrorMessage codec_error_reply(const CodecError& e) {
  switch (e.kind()) {
    case CodecError::Kind::incomplete_frame: return ErrorMessage{-1, "incomplete_frame", e.what()};
    case CodecError::Kind::unsupported_type: return ErrorMessage{-1, "unsupported_type", e.what()};
    case CodecError::Kind::decode_error: break;
  }
  return ErrorMessage{-1, "decode_error", e.what()};
}

}  // namespace

GapResponse Client::request_gaps(const GapRequest& request) {
  Message reply = exchange(request);
  if (auto* err = std::get_if<ErrorMessage>(&reply)) throw ServiceError(*err);
  auto* response = std::get_if<GapResponse>(&reply);
  if (!response) throw TransportError("reply is not a gap response");
  if (response->platoon_id != request.platoon_id) {
    throw TransportError("reply is for platoon " + std::to_string(response->platoon_id));
  }
  return std::move(*response);
}

Message InProcessClient::exchange(const Message& message) {
  const Message received = decode_message(encode_message(message));
  return decode_message(encode_message(handler_(received)));
}

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw std::invalid_argument("endpoint must be host:port");
  Endpoint e;
  e.host = text.substr(0, colon);
  if (e.host == "localhost" || e.host.empty()) e.host = "127.0.0.1";
  const std::string port = text.substr(colon + 1);
  std::size_t used = 0;
  unsigned long p = 0;
  try {
    p = std::stoul(port, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != port.size() || port.empty() || p > 65535) {
    throw std::invalid_argument("invalid port in endpoint '" + text + "'");
  }
  e.port = static_cast<std::uint16_t>(p);
  in_addr probe{};
  if (::inet_pton(AF_INET, e.host.c_str(), &probe) != 1) {
    throw std::invalid_argument("invalid IPv4 address in endpoint '" + text + "'");
  }
  return e;
}

TcpClient::TcpClient(const Endpoint& endpoint) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw TransportError("socket failed");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(endpoint.port);
  ::inet_pton(AF_INET, endpoint.host.c_str(), &addr.sin_addr);
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const std::string reason = std::strerror(errno);
    ::close(fd_);
    fd_ = -1;
    throw TransportError("connect failed: " + reason);
  }
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

TcpClient::~TcpClient() {
  if (fd_ >= 0) ::close(fd_);
}

Message TcpClient::exchange(const Message& message) { return exchange_raw(encode_message(message)); }

Message TcpClient::exchange_raw(const std::string& bytes) {
  send_raw(bytes);
  return read_frame();
}

void TcpClient::send_raw(const std::string& bytes) { write_all(fd_, bytes); }

Message TcpClient::read_frame() {
  for (;;) {
    if (const auto size = frame_size(buffer_); size && buffer_.size() >= *size) {
      const std::string frame = buffer_.substr(0, *size);
      buffer_.erase(0, *size);
      return decode_message(frame);
    }
    if (!read_some(fd_, buffer_)) throw TransportError("connection closed mid-frame");
  }
}

TcpServer::TcpServer(Handler handler, const Endpoint& endpoint) : handler_(std::move(handler)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw TransportError("socket failed");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(endpoint.port);
  if (::inet_pton(AF_INET, endpoint.host.c_str(), &addr.sin_addr) != 1 ||
      ::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listen_fd_, 16) != 0) {
    const std::string reason = std::strerror(errno);
    ::close(listen_fd_);
    throw TransportError("cannot listen on " + endpoint.host + ":" +
                         std::to_string(endpoint.port) + ": " + reason);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  acceptor_ = std::thread([this] { accept_loop(); });
}

TcpServer::~TcpServer() { stop(); }

void TcpServer::stop() {
  if (!running_.exchange(false)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  if (acceptor_.joinable()) acceptor_.join();
  std::list<std::thread> workers;
  {
    std::lock_guard lock(mutex_);
    for (const int fd : connections_) ::shutdown(fd, SHUT_RDWR);
    workers.swap(workers_);
  }
  for (auto& w : workers) w.join();
}

void TcpServer::accept_loop() {
  while (running_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      return;
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    std::lock_guard lock(mutex_);
    if (!running_) {
      ::close(fd);
      return;
    }
    connections_.push_back(fd);
    workers_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void TcpServer::serve_connection(int fd) {
  std::string buffer;
  try {
    while (running_) {
      std::optional<std::size_t> size;
      try {
        size = frame_size(buffer);
      } catch (const CodecError& e) {
        // Declared length is unusable; the stream cannot be resynchronized.
        write_all(fd, encode_message(codec_error_reply(e)));
        break;
      }
      if (!size || buffer.size() < *size) {
        if (!read_some(fd, buffer)) break;
        continue;
      }
      const std::string frame = buffer.substr(0, *size);
      buffer.erase(0, *size);
      Message reply;
      try {
        reply = handler_(decode_message(frame));
        ++served_;
      } catch (const CodecError& e) {
        reply = codec_error_reply(e);
      } catch (const std::exception& e) {
        reply = ErrorMessage{-1, "internal_error", e.what()};
      }
      write_all(fd, encode_message(reply));
    }
  } catch (const TransportError&) {
    // Peer went away while we were replying.
  }
  std::lock_guard lock(mutex_);
  connections_.remove(fd);
  ::close(fd);
}

}  // namespace gapflow::rsu
