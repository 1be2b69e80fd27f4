#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hsfe/oram.hpp"
#include "hsfe/partition.hpp"
#include "hsfe/protocol.hpp"

namespace hsfe {

// naive: one enclave round, unhardened code and an unblinded store.
// sgx: one enclave round, hardened.  hybrid: the two-round split.
// gc: one garbled-circuit round.
enum class Mode { Naive, Sgx, Hybrid, Gc };
Mode parse_mode(std::string_view s);
std::string_view mode_name(Mode m);

struct AppOptions {
  Mode mode = Mode::Hybrid;
  StoreKind store = StoreKind::Tree;  // database only; naive mode always uses the unblinded store
};

// key=value lines; '#' starts a comment. Throws ConfigError naming the line.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(std::string_view text);
KeyValues load_key_values(const std::string& path);
std::string read_text_file(const std::string& path);
std::uint64_t kv_uint(const KeyValues& kv, const std::string& key, std::uint64_t fallback);
double kv_double(const KeyValues& kv, const std::string& key, double fallback);

// Registers every odd round of the scheme that the enclave does not know yet.
void register_round_fns(Enclave& e, const PartitionScheme& p);

// u32 count followed by u64 words.
Bytes encode_words(const std::vector<std::uint64_t>& v);
std::vector<std::uint64_t> decode_words(ByteView b);

// Bit helpers for circuit inputs: each word LSB first, words in order.
void push_word_bits(BitVec& out, std::uint64_t v, std::uint32_t width);
std::uint64_t read_word_bits(const BitVec& in, std::size_t& off, std::uint32_t width);

// Structural channel checks every hybrid transcript must pass: odd rounds
// carry only ciphertext frames, Bob sends only CTX1 in odd rounds and only
// OT2/GC_Y in even rounds. Returns one message per violation.
std::vector<std::string> channel_violations(const PartitionScheme& p, const Transcript& t);

// Bob's plaintext round inputs v = b[j] || y1[j-1] of the odd rounds,
// recovered with the key in Bob's record.
std::vector<std::pair<std::uint32_t, Bytes>> odd_round_plaintexts(const Transcript& t);

// Every frame payload and oracle input that does not contain `needle`.
// Returns the places that do.
std::vector<std::string> needle_violations(const Transcript& t, ByteView needle);

}  // namespace hsfe
