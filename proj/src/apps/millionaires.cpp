#include "hsfe/apps/millionaires.hpp"

#include <map>
#include <mutex>

#include "hsfe/branchfree.hpp"
#include "hsfe/circuit_builder.hpp"
#include "hsfe/errors.hpp"

namespace hsfe {

std::size_t millionaires_input_bytes(std::uint32_t n_bits) { return (std::size_t(n_bits) + 7) / 8; }

void check_millionaires_input(std::uint32_t n_bits, ByteView x) {
  if (n_bits == 0) throw ConfigError("millionaires width must be positive");
  if (x.size() != millionaires_input_bytes(n_bits))
    throw ConfigError("millionaires input must be " + std::to_string(millionaires_input_bytes(n_bits)) + " bytes, got " + std::to_string(x.size()));
  const unsigned spare = static_cast<unsigned>(x.size() * 8 - n_bits);
  if (spare && (x[0] >> (8 - spare)) != 0) throw ConfigError("millionaires input exceeds " + std::to_string(n_bits) + " bits");
}

namespace {

// Big-endian byte strings of equal length. Every byte is visited whatever
// the values are.
std::uint8_t greater_hardened(ByteView a, ByteView b) {
  std::uint64_t gt = 0, decided = 0;
  // hardened:begin millionaires compare
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::uint64_t x = a[i], y = b[i];
    std::uint64_t here = bf_lt(y, x);
    gt = bf_select(decided, gt, here);
    decided = decided | (bf_eq(x, y) ^ 1);
  }
  // hardened:end
  return static_cast<std::uint8_t>(gt);
}

std::uint8_t greater_naive(ByteView a, ByteView b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] > b[i];
  return 0;
}

BitVec msb_bits(std::uint32_t n_bits, ByteView x) {
  BitVec all = unpack_bits(x, x.size() * 8);
  return BitVec(all.end() - n_bits, all.end());
}

}  // namespace

Bytes millionaires_plain(std::uint32_t n_bits, ByteView a, ByteView b) {
  check_millionaires_input(n_bits, a);
  check_millionaires_input(n_bits, b);
  return Bytes{greater_naive(a, b)};
}

std::shared_ptr<const Circuit> millionaires_circuit(std::uint32_t n_bits) {
  static std::mutex mu;
  static std::map<std::uint32_t, std::shared_ptr<const Circuit>> cache;
  std::lock_guard lock(mu);
  auto& c = cache[n_bits];
  if (!c) c = std::make_shared<const Circuit>(gen_millionaires(n_bits));
  return c;
}

PartitionScheme build_millionaires(std::uint32_t n_bits, Mode mode) {
  if (n_bits == 0) throw ConfigError("millionaires width must be positive");
  std::string name = "millionaires-" + std::string(mode_name(mode)) + "-" + std::to_string(n_bits);
  PartitionScheme p;
  switch (mode) {
    case Mode::Naive:
    case Mode::Sgx: {
      bool hardened = mode == Mode::Sgx;
      p = sgx_scheme(name,
                     [n_bits, hardened](ByteView u, ByteView v, EnclaveState&) {
                       auto [a, pa] = split_input(u);
                       auto [b, pb] = split_input(v);
                       check_millionaires_input(n_bits, a);
                       check_millionaires_input(n_bits, b);
                       return RoundOutput{Bytes{hardened ? greater_hardened(a, b) : greater_naive(a, b)}, {}};
                     },
                     ReplyMode::Alice);
      break;
    }
    case Mode::Gc: {
      EvenRound r;
      r.circuit = millionaires_circuit(n_bits);
      r.alice_bits = [n_bits](ByteView u) {
        auto a = split_input(u).first;
        check_millionaires_input(n_bits, a);
        return msb_bits(n_bits, a);
      };
      r.bob_bits = [n_bits](ByteView v) {
        auto b = split_input(v).first;
        check_millionaires_input(n_bits, b);
        return msb_bits(n_bits, b);
      };
      r.plain = [](ByteView u, ByteView v) { return BitVec{greater_naive(split_input(u).first, split_input(v).first)}; };
      r.output = [](const BitVec& y, ByteView) { return Bytes{y.at(0)}; };
      r.to = Role::Alice;
      p = gc_scheme(name, std::move(r));
      break;
    }
    case Mode::Hybrid: throw ConfigError("millionaires has no hybrid split; use sgx or gc");
  }
  return p;
}

Bytes random_millionaires_input(std::uint32_t n_bits, RandomSource& rng) {
  Bytes x = rng.bytes(millionaires_input_bytes(n_bits));
  const unsigned spare = static_cast<unsigned>(x.size() * 8 - n_bits);
  if (spare) x[0] &= static_cast<std::uint8_t>(0xff >> spare);
  return x;
}

}  // namespace hsfe
