#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hsfe/bytes.hpp"
#include "hsfe/circuit.hpp"
#include "hsfe/enclave.hpp"
#include "hsfe/random.hpp"

namespace hsfe {

enum class Role : std::uint8_t { Alice = 0, Bob = 1 };
std::string_view role_name(Role r);

// Round input u = a[j] || y0[j-1] (v likewise for Bob). Both parts are
// length-prefixed so the round function can take them apart.
Bytes concat_input(ByteView own, ByteView prev);
std::pair<ByteView, ByteView> split_input(ByteView u);

// Stateful round, run by the enclave. Outputs the mode does not release are
// dropped, so the function seen by the executor is fn followed by the release.
struct OddRound {
  std::string id;
  RoundFn fn;
  ReplyMode release = ReplyMode::Alice;
};

// Stateless round, run as a garbled circuit. `plain` computes the circuit's
// output bits directly and is what the reference executor uses; the live
// protocol evaluates `circuit` instead. `output` turns the output bits into
// the receiving party's round output, given that party's own round input.
struct EvenRound {
  std::string id;
  std::shared_ptr<const Circuit> circuit;
  std::function<BitVec(ByteView u)> alice_bits;
  std::function<BitVec(ByteView v)> bob_bits;
  std::function<BitVec(ByteView u, ByteView v)> plain;
  std::function<Bytes(const BitVec& y, ByteView own)> output;
  Role to = Role::Alice;
};

using RoundSpec = std::variant<OddRound, EvenRound>;
inline bool is_odd(const RoundSpec& r) { return std::holds_alternative<OddRound>(r); }

using Splitter = std::function<std::vector<Bytes>(ByteView input, RandomSource& rng)>;

struct PartitionScheme {
  std::string name;
  std::vector<RoundSpec> rounds;
  Splitter split_a, split_b;

  std::size_t length() const { return rounds.size(); }
  // Rounds alternate between odd and even; every round is complete; the last
  // round releases output to one party only. Throws ConfigError.
  void validate() const;
  // Party receiving the final output.
  Role final_party() const;
};

struct ExecResult {
  std::vector<Bytes> a, b, y0, y1;  // index j-1 holds round j
  Bytes final_alice() const { return y0.empty() ? Bytes{} : y0.back(); }
  Bytes final_bob() const { return y1.empty() ? Bytes{} : y1.back(); }
};

// Splitter coins come from Drbg(seed, "spa") and Drbg(seed, "spb"), the
// same streams the live protocol uses.
std::vector<Bytes> split_alice(const PartitionScheme& p, ByteView a, std::uint64_t seed);
std::vector<Bytes> split_bob(const PartitionScheme& p, ByteView b, std::uint64_t seed);

// Plain execution of the scheme: splits the inputs, feeds each round the
// concatenation of its share and the previous output, threads st through the
// odd rounds. Failures are rethrown as RoundError.
ExecResult exec_reference(const PartitionScheme& p, ByteView a, ByteView b, std::uint64_t seed, EnclaveState& st);
ExecResult exec_reference(const PartitionScheme& p, ByteView a, ByteView b, std::uint64_t seed);

// Runs one round on given inputs.
RoundOutput run_round_plain(const RoundSpec& r, ByteView u, ByteView v, EnclaveState& st);

using PlainFunction = std::function<RoundOutput(ByteView a, ByteView b)>;
using InputSampler = std::function<std::pair<Bytes, Bytes>(RandomSource& rng)>;

struct CorrectnessReport {
  bool pass = true;
  std::size_t trials = 0;
  std::optional<std::size_t> failing_trial;
  Bytes a, b;
  RoundOutput expected, got;
  std::string error;
};

CorrectnessReport check_correct(const PartitionScheme& p, const PlainFunction& f, const InputSampler& sample, std::size_t trials,
                                std::uint64_t seed);

// One odd round computing f with the state passed through untouched.
PartitionScheme make_identity(PlainFunction f, ReplyMode release = ReplyMode::Alice, std::string id = "identity");

}  // namespace hsfe
