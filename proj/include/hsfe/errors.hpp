#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hsfe {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CircuitError : public Error {
 public:
  CircuitError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class GarblingError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

// AEAD tag mismatch: tampering or wrong key.
class AuthenticationError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class TransportError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class EnclaveError : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public EnclaveError {
 public:
  using EnclaveError::EnclaveError;
};

// Wraps a failure in round j of a partitioned run.
class RoundError : public Error {
 public:
  RoundError(std::size_t round, const std::string& what)
      : Error("round " + std::to_string(round) + ": " + what), round_(round) {}
  std::size_t round() const { return round_; }

 private:
  std::size_t round_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hsfe
