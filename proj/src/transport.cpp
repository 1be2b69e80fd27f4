#include "hsfe/transport.hpp"

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
#include <thread>

#include "hsfe/errors.hpp"

namespace hsfe {

namespace {

std::string sys_error(const std::string& what) { return what + ": " + std::strerror(errno); }

void write_all(int fd, const std::uint8_t* p, std::size_t n) {
  while (n > 0) {
    ssize_t w = ::send(fd, p, n, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw TransportError(sys_error("send failed"));
    }
    p += w;
    n -= static_cast<std::size_t>(w);
  }
}

void read_all(int fd, std::uint8_t* p, std::size_t n) {
  while (n > 0) {
    ssize_t r = ::recv(fd, p, n, 0);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw TransportError(sys_error("recv failed"));
    }
    if (r == 0) throw TransportError("peer closed the connection");
    p += r;
    n -= static_cast<std::size_t>(r);
  }
}

sockaddr_in resolve(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (int rc = getaddrinfo(host.c_str(), nullptr, &hints, &res); rc != 0 || !res)
    throw TransportError("cannot resolve " + host + ": " + gai_strerror(rc));
  sockaddr_in addr = *reinterpret_cast<sockaddr_in*>(res->ai_addr);
  freeaddrinfo(res);
  addr.sin_port = htons(port);
  return addr;
}

void set_nodelay(int fd) {
  int one = 1;
  setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

}  // namespace

TcpChannel::TcpChannel(int fd) : fd_(fd) { set_nodelay(fd_); }
TcpChannel::~TcpChannel() { ::close(fd_); }

void TcpChannel::send(ByteView frame) {
  write_all(fd_, frame.data(), frame.size());
  sent_ += frame.size();
}

Bytes TcpChannel::recv() {
  std::uint8_t hdr[4];
  read_all(fd_, hdr, 4);
  std::uint32_t len = (std::uint32_t(hdr[0]) << 24) | (std::uint32_t(hdr[1]) << 16) | (std::uint32_t(hdr[2]) << 8) | hdr[3];
  Bytes frame(4 + std::size_t(len));
  std::memcpy(frame.data(), hdr, 4);
  read_all(fd_, frame.data() + 4, len);
  received_ += frame.size();
  return frame;
}

std::unique_ptr<TcpChannel> TcpChannel::connect(const std::string& host, std::uint16_t port, int timeout_ms) {
  sockaddr_in addr = resolve(host, port);
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  for (;;) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw TransportError(sys_error("socket failed"));
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0) return std::make_unique<TcpChannel>(fd);
    int err = errno;
    ::close(fd);
    if (std::chrono::steady_clock::now() > deadline)
      throw TransportError("cannot connect to " + host + ":" + std::to_string(port) + ": " + std::strerror(err));
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw TransportError(sys_error("socket failed"));
  int one = 1;
  setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr = resolve(host, port);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 1) != 0) {
    std::string msg = sys_error("cannot listen on " + host + ":" + std::to_string(port));
    ::close(fd_);
    throw TransportError(msg);
  }
  socklen_t len = sizeof addr;
  getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() { ::close(fd_); }

std::unique_ptr<TcpChannel> TcpListener::accept(int timeout_ms) {
  pollfd p{fd_, POLLIN, 0};
  int rc = ::poll(&p, 1, timeout_ms);
  if (rc == 0) throw TransportError("no peer connected within " + std::to_string(timeout_ms) + " ms");
  if (rc < 0) throw TransportError(sys_error("poll failed"));
  int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) throw TransportError(sys_error("accept failed"));
  return std::make_unique<TcpChannel>(fd);
}

std::pair<std::string, std::uint16_t> parse_peer(const std::string& s) {
  auto colon = s.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == s.size()) throw ConfigError("peer must be host:port, got '" + s + "'");
  unsigned long port = 0;
  try {
    port = std::stoul(s.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("bad port in '" + s + "'");
  }
  if (port == 0 || port > 65535) throw ConfigError("bad port in '" + s + "'");
  return {s.substr(0, colon), static_cast<std::uint16_t>(port)};
}

}  // namespace hsfe
