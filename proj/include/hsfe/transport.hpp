#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "hsfe/protocol.hpp"

namespace hsfe {

// Frames over a TCP stream. Each frame already starts with its length.
class TcpChannel final : public Channel {
 public:
  explicit TcpChannel(int fd);
  ~TcpChannel() override;
  TcpChannel(const TcpChannel&) = delete;
  TcpChannel& operator=(const TcpChannel&) = delete;

  void send(ByteView frame) override;
  Bytes recv() override;
  std::size_t bytes_sent() const { return sent_; }
  std::size_t bytes_received() const { return received_; }

  // Retries until the peer listens or the timeout passes.
  static std::unique_ptr<TcpChannel> connect(const std::string& host, std::uint16_t port, int timeout_ms = 10000);

 private:
  int fd_;
  std::size_t sent_ = 0, received_ = 0;
};

class TcpListener {
 public:
  // Port 0 picks a free port.
  explicit TcpListener(const std::string& host = "127.0.0.1", std::uint16_t port = 0);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  std::unique_ptr<TcpChannel> accept(int timeout_ms = 30000);

 private:
  int fd_;
  std::uint16_t port_;
};

// host:port
std::pair<std::string, std::uint16_t> parse_peer(const std::string& s);

}  // namespace hsfe
