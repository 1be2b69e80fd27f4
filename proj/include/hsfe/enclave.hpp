#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "hsfe/bytes.hpp"
#include "hsfe/random.hpp"
#include "hsfe/symenc.hpp"
#include "hsfe/trace.hpp"

namespace hsfe {

inline constexpr std::size_t kDefaultEnclaveBudget = std::size_t(128) << 20;

// Something a round function keeps between odd rounds.
class StateObject {
 public:
  virtual ~StateObject() = default;
  virtual std::size_t memory_bytes() const = 0;
  // Canonical encoding of the logical contents, for equality checks.
  virtual Bytes snapshot() const = 0;
};

// Oracle state st: named objects plus a memory counter. Installing an object
// that would push the counter over the budget throws BudgetExceeded and
// leaves the state as it was.
class EnclaveState {
 public:
  explicit EnclaveState(std::size_t budget = kDefaultEnclaveBudget, std::uint64_t seed = 0);
  EnclaveState(std::size_t budget, std::unique_ptr<RandomSource> rng);

  template <class T>
  T* find(const std::string& name) {
    auto it = objects_.find(name);
    return it == objects_.end() ? nullptr : dynamic_cast<T*>(it->second.get());
  }
  template <class T>
  T& install(const std::string& name, std::unique_ptr<T> obj) {
    T& ref = *obj;
    put(name, std::move(obj));
    return ref;
  }
  void erase(const std::string& name);
  // Throws BudgetExceeded unless `bytes` more would fit.
  void reserve_transient(std::size_t bytes) const;

  std::size_t used() const;
  std::size_t budget() const { return budget_; }
  RandomSource& rng() { return *rng_; }
  TraceRecorder* trace() const { return trace_; }
  void set_trace(TraceRecorder* t) { trace_ = t; }
  Bytes snapshot() const;

 private:
  void put(const std::string& name, std::unique_ptr<StateObject> obj);
  std::size_t budget_;
  std::unique_ptr<RandomSource> rng_;
  std::map<std::string, std::unique_ptr<StateObject>> objects_;
  TraceRecorder* trace_ = nullptr;
};

// Odd-round function: (u, v, st) -> (y_alice, y_bob, st'), mutating st in place.
struct RoundOutput {
  Bytes alice, bob;
};
using RoundFn = std::function<RoundOutput(ByteView u, ByteView v, EnclaveState& st)>;

// Which outputs leave the oracle: Alice's in the clear, Bob's encrypted under K.
enum class ReplyMode : std::uint8_t { Alice = 0, Bob = 1, Both = 2 };

struct OracleQuery {
  std::string fn;
  Bytes alice_input;
  Bytes bob_ciphertext;
  std::uint32_t round = 0;
};

struct OracleReply {
  Bytes alice;       // empty unless the mode includes Alice
  Bytes bob_cipher;  // empty unless the mode includes Bob
};

// Simulated enclave: holds K and st, reachable only through query. Not safe
// for concurrent queries.
class Enclave {
 public:
  explicit Enclave(std::size_t budget = kDefaultEnclaveBudget, std::uint64_t seed = 0);
  Enclave(std::size_t budget, std::unique_ptr<RandomSource> rng);
  ~Enclave();
  Enclave(const Enclave&) = delete;
  Enclave& operator=(const Enclave&) = delete;

  void provision(const SymKey& k);
  bool provisioned() const { return key_.has_value(); }
  void register_round_fn(const std::string& id, RoundFn fn);
  bool has_round_fn(const std::string& id) const { return fns_.count(id) > 0; }

  // Decrypts Bob's input (AuthenticationError on failure, nothing changes),
  // runs the function on the state and returns what the mode releases.
  OracleReply query(const OracleQuery& q, ReplyMode mode);

  void set_trace(TraceRecorder* t) { state_.set_trace(t); }
  std::size_t memory_used() const { return state_.used(); }

 private:
  friend class EnclaveTestAccess;
  std::optional<SymKey> key_;
  EnclaveState state_;
  std::map<std::string, RoundFn> fns_;
};

}  // namespace hsfe
