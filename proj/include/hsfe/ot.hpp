#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "hsfe/bytes.hpp"
#include "hsfe/random.hpp"

namespace hsfe {

// 1-out-of-2 oblivious transfer of a batch of equal-length string pairs, the
// Diffie-Hellman "simplest OT" over P-256. Three messages:
//   OT1 sender -> receiver   A = aG                         (33 bytes)
//   OT2 receiver -> sender   u32 n, B_j = b_jG or A + b_jG  (n * 33 bytes)
//   OT3 sender -> receiver   u32 n, u32 L, e0_j, e1_j       (n * 2L bytes)
// Pads are SHA-256 expansions of (j, A, B_j, shared point).
inline constexpr std::size_t kOtMaxPayload = 64;
inline constexpr std::size_t kOtPointBytes = 33;

using OtPairs = std::vector<std::pair<Bytes, Bytes>>;

class OtSender {
 public:
  explicit OtSender(RandomSource& rng);
  ~OtSender();
  OtSender(const OtSender&) = delete;
  OtSender& operator=(const OtSender&) = delete;

  Bytes first_message();
  Bytes answer(ByteView ot2, const OtPairs& pairs);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class OtReceiver {
 public:
  OtReceiver(BitVec choices, RandomSource& rng);
  ~OtReceiver();
  OtReceiver(const OtReceiver&) = delete;
  OtReceiver& operator=(const OtReceiver&) = delete;

  Bytes respond(ByteView ot1);
  std::vector<Bytes> finish(ByteView ot3);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Throws ProtocolError unless every pair has equal lengths of at most
// kOtMaxPayload bytes.
void check_ot_pairs(const OtPairs& pairs);

// Payload sizes of the three messages (without framing).
std::size_t ot_message_bytes(std::size_t n, std::size_t payload_len);

}  // namespace hsfe
