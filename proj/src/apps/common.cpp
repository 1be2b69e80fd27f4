#include "hsfe/apps/common.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "hsfe/codec.hpp"
#include "hsfe/errors.hpp"
#include "hsfe/symenc.hpp"

namespace hsfe {

Mode parse_mode(std::string_view s) {
  if (s == "naive" || s == "naive-sgx") return Mode::Naive;
  if (s == "sgx") return Mode::Sgx;
  if (s == "hybrid") return Mode::Hybrid;
  if (s == "gc") return Mode::Gc;
  throw ConfigError("unknown mode '" + std::string(s) + "' (naive, sgx, hybrid, gc)");
}

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Naive: return "naive";
    case Mode::Sgx: return "sgx";
    case Mode::Hybrid: return "hybrid";
    case Mode::Gc: return "gc";
  }
  return "?";
}

namespace {
std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}
}  // namespace

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    std::string key = trim(std::string_view(t).substr(0, eq)), value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(key, value).second) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
  }
  return kv;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

KeyValues load_key_values(const std::string& path) {
  try {
    return parse_key_values(read_text_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::uint64_t kv_uint(const KeyValues& kv, const std::string& key, std::uint64_t fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  std::uint64_t v = 0;
  const auto& s = it->second;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("'" + key + "' must be a non-negative integer, got '" + s + "'");
  return v;
}

double kv_double(const KeyValues& kv, const std::string& key, double fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    std::size_t used = 0;
    double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' must be a number, got '" + it->second + "'");
  }
}

void register_round_fns(Enclave& e, const PartitionScheme& p) {
  for (const auto& r : p.rounds)
    if (const auto* o = std::get_if<OddRound>(&r); o && !e.has_round_fn(o->id)) e.register_round_fn(o->id, o->fn);
}

Bytes encode_words(const std::vector<std::uint64_t>& v) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(v.size()));
  for (auto x : v) w.u64(x);
  return std::move(w).bytes();
}

std::vector<std::uint64_t> decode_words(ByteView b) {
  Reader r(b);
  std::uint32_t n = r.u32();
  if (r.remaining() != std::size_t(n) * 8) throw ProtocolError("word list has the wrong length");
  std::vector<std::uint64_t> v(n);
  for (auto& x : v) x = r.u64();
  return v;
}

void push_word_bits(BitVec& out, std::uint64_t v, std::uint32_t width) {
  for (std::uint32_t i = 0; i < width; ++i) out.push_back(static_cast<std::uint8_t>((v >> i) & 1));
}

std::uint64_t read_word_bits(const BitVec& in, std::size_t& off, std::uint32_t width) {
  if (off + width > in.size()) throw ProtocolError("circuit output shorter than expected");
  std::uint64_t v = 0;
  for (std::uint32_t i = 0; i < width; ++i) v |= std::uint64_t(in[off + i] & 1) << i;
  off += width;
  return v;
}

std::vector<std::string> channel_violations(const PartitionScheme& p, const Transcript& t) {
  std::vector<std::string> out;
  for (const auto& f : t.messages) {
    std::string where = "frame " + std::to_string(f.seq) + " (" + frame_kind_name(f.kind) + ", round " + std::to_string(f.round) + ")";
    if (f.round == 0 || f.round > p.length()) {
      out.push_back(where + ": round out of range");
      continue;
    }
    bool odd = is_odd(p.rounds[f.round - 1]);
    if (odd && !is_ciphertext_frame(f.kind)) out.push_back(where + ": plaintext frame in an enclave round");
    if (odd && f.from == Role::Bob && f.kind != FrameKind::Ctx1) out.push_back(where + ": Bob sent something other than CTX1");
    if (!odd && f.from == Role::Bob && f.kind != FrameKind::Ot2 && f.kind != FrameKind::GcY)
      out.push_back(where + ": Bob sent something other than OT2 or GC_Y");
    if (!odd && is_ciphertext_frame(f.kind)) out.push_back(where + ": ciphertext frame in a garbled round");
  }
  return out;
}

std::vector<std::pair<std::uint32_t, Bytes>> odd_round_plaintexts(const Transcript& t) {
  if (t.bob.long_term.size() != 16) throw ProtocolError("transcript lacks Bob's key");
  SymKey key;
  std::copy(t.bob.long_term.begin(), t.bob.long_term.end(), key.bytes.begin());
  std::vector<std::pair<std::uint32_t, Bytes>> out;
  for (const auto& f : t.messages) {
    if (f.kind != FrameKind::Ctx1) continue;
    auto m = dec(key, *f.payload, f.round, Direction::ToEnclave);
    if (!m) throw AuthenticationError("CTX1 of round " + std::to_string(f.round) + " does not decrypt");
    out.emplace_back(f.round, std::move(*m));
  }
  return out;
}

std::vector<std::string> needle_violations(const Transcript& t, ByteView needle) {
  std::vector<std::string> out;
  if (needle.empty()) return out;
  for (const auto& f : t.messages)
    if (contains(*f.payload, needle)) out.push_back("frame " + std::to_string(f.seq) + " (" + frame_kind_name(f.kind) + ") holds a sensitive value");
  for (const auto& c : t.oracle)
    if (contains(c.alice_input, needle) || contains(c.reply.alice, needle))
      out.push_back("oracle call of round " + std::to_string(c.round) + " holds a sensitive value");
  return out;
}

}  // namespace hsfe
