#pragma once

// Backdoor into the enclave for tests only. Production code must not include
// this header; a unit test scans the sources to enforce that.

#include "hsfe/enclave.hpp"

namespace hsfe {

class EnclaveTestAccess {
 public:
  static const SymKey& key(const Enclave& e) { return *e.key_; }
  static EnclaveState& state(Enclave& e) { return e.state_; }
  static Bytes snapshot(const Enclave& e) { return e.state_.snapshot(); }
};

}  // namespace hsfe
