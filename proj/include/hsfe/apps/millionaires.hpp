#pragma once

#include <cstdint>
#include <memory>

#include "hsfe/apps/common.hpp"

namespace hsfe {

// Inputs are n-bit unsigned integers as big-endian byte strings of
// ceil(n/8) bytes whose unused top bits are zero. Alice learns one byte:
// 1 when a > b, 0 otherwise (ties give 0).
std::size_t millionaires_input_bytes(std::uint32_t n_bits);
void check_millionaires_input(std::uint32_t n_bits, ByteView x);
Bytes millionaires_plain(std::uint32_t n_bits, ByteView a, ByteView b);

// Mode::Naive and Mode::Sgx give one enclave round, Mode::Gc one garbled
// round. There is no hybrid split of this function.
PartitionScheme build_millionaires(std::uint32_t n_bits, Mode mode);
std::shared_ptr<const Circuit> millionaires_circuit(std::uint32_t n_bits);

Bytes random_millionaires_input(std::uint32_t n_bits, RandomSource& rng);

}  // namespace hsfe
