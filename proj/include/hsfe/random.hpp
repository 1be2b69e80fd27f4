#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string_view>

#include "hsfe/bytes.hpp"

namespace hsfe {

// Source of coins. Every randomized algorithm in the library draws through
// this interface so runs can be seeded, recorded and replayed.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  Bytes bytes(std::size_t n);
  std::uint64_t next_u64();
  bool next_bit();
  // Uniform in [0, bound). bound must be nonzero.
  std::uint64_t uniform(std::uint64_t bound);
};

// AES-128-CTR keystream keyed by SHA-256(seed || label).
class Drbg final : public RandomSource {
 public:
  explicit Drbg(std::uint64_t seed, std::string_view label = "");
  explicit Drbg(ByteView seed_material);
  ~Drbg() override;
  Drbg(Drbg&&) noexcept;
  Drbg& operator=(Drbg&&) noexcept;
  Drbg(const Drbg&) = delete;
  Drbg& operator=(const Drbg&) = delete;

  void fill(std::span<std::uint8_t> out) override;

  // Independent child stream; does not consume coins from this stream.
  Drbg fork(std::string_view label) const;

 private:
  void init(ByteView material);
  std::array<std::uint8_t, 32> material_{};
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Pass-through source that logs every byte drawn, so a protocol step's coins
// can be written into its transcript.
class RecordingSource final : public RandomSource {
 public:
  explicit RecordingSource(RandomSource& inner) : inner_(inner) {}
  void fill(std::span<std::uint8_t> out) override;
  Bytes take();  // returns and clears the log

 private:
  RandomSource& inner_;
  Bytes log_;
};

// Serves previously logged coins; throws when exhausted.
class ReplaySource final : public RandomSource {
 public:
  ReplaySource() = default;
  explicit ReplaySource(Bytes coins) : coins_(std::move(coins)) {}
  void load(Bytes coins) {
    coins_ = std::move(coins);
    pos_ = 0;
  }
  void fill(std::span<std::uint8_t> out) override;
  bool exhausted() const { return pos_ == coins_.size(); }

 private:
  Bytes coins_;
  std::size_t pos_ = 0;
};

}  // namespace hsfe
