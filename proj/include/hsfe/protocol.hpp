#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hsfe/bytes.hpp"
#include "hsfe/enclave.hpp"
#include "hsfe/partition.hpp"
#include "hsfe/symenc.hpp"

namespace hsfe {

// Four ASCII bytes on the wire.
enum class FrameKind : std::uint32_t {
  Ot1 = 0x4f543120,   // "OT1 "
  Ot2 = 0x4f543220,   // "OT2 "
  Ot3 = 0x4f543320,   // "OT3 "
  GcF = 0x47435f46,   // "GC_F" garbled tables
  GcA = 0x47435f41,   // "GC_A" Alice's input tokens
  GcD = 0x47435f44,   // "GC_D" decoding information
  GcY = 0x47435f59,   // "GC_Y" output tokens
  Ctx1 = 0x43545831,  // "CTX1" Bob's ciphertext for the enclave
  Ctx2 = 0x43545832,  // "CTX2" enclave ciphertext relayed to Bob
};
std::string frame_kind_name(FrameKind k);
bool is_ciphertext_frame(FrameKind k);
bool is_ot_frame(FrameKind k);

// Wire layout: u32 length of the rest, u32 seq, u32 round, kind, payload. The
// sequence number counts all frames of the run, so both parties agree on the
// message order without a shared clock.
inline constexpr std::size_t kFrameHeaderBytes = 16;

struct Frame {
  std::uint32_t seq = 0;
  std::uint32_t round = 0;
  FrameKind kind = FrameKind::Ot1;
  Role from = Role::Alice;
  std::shared_ptr<const Bytes> payload;

  std::size_t wire_bytes() const { return kFrameHeaderBytes + payload->size(); }
};
Bytes encode_frame(const Frame& f);
// Parses one complete frame; `from` is supplied by the transport.
Frame decode_frame(ByteView in, Role from);

struct OracleCall {
  std::uint32_t round = 0;
  std::string fn;
  ReplyMode mode = ReplyMode::Alice;
  Bytes alice_input, bob_ciphertext;
  OracleReply reply;
};

struct Activation {
  std::int64_t input_seq = -1;  // -1 for the first activation
  Bytes coins;
};

struct PartyRecord {
  Bytes input;
  Bytes long_term;  // K for Bob, nothing for Alice
  std::vector<Activation> steps;
  Bytes output;
  bool present = false;
};

// Full record of a run: public parameters, every message in order, every
// oracle interaction, and each party's inputs, coins and output.
struct Transcript {
  std::string scheme;
  std::uint16_t k = 128;
  std::uint64_t seed = 0;
  std::vector<Frame> messages;
  std::vector<OracleCall> oracle;
  PartyRecord alice, bob;

  Bytes serialize() const;
  static Transcript parse(ByteView in);
  std::size_t wire_bytes() const;
};

// What one party saw: its own record, the frames it received and, for Alice,
// the oracle interactions.
struct View {
  Role role = Role::Alice;
  PartyRecord record;
  std::vector<Frame> received;
  std::vector<OracleCall> oracle;
  Bytes serialize() const;
};
View view_of(const Transcript& t, Role r);

// Alice's access to the oracle.
class OracleAccess {
 public:
  virtual ~OracleAccess() = default;
  virtual OracleReply query(const OracleQuery& q, ReplyMode mode) = 0;
};

struct RunStats {
  std::size_t bytes_on_wire = 0;
  std::size_t gc_table_rows = 0;
  std::size_t ot_count = 0;
};

struct RunOptions {
  unsigned k = 128;
  std::uint64_t seed = 0;
  // In-process only: may replace a frame's payload before delivery.
  std::function<std::optional<Bytes>(const Frame&)> tamper;
};

struct RunResult {
  Bytes y0, y1;
  Transcript transcript;
  RunStats stats;
};

// The even-odd composer: round j runs the odd protocol (Bob encrypts his
// share, Alice queries the oracle, outputs released per the round's mode) or
// the even protocol (Alice garbles, Bob gets his tokens by OT and evaluates,
// the output party decodes). Both parties run in this thread. The oracle must
// be provisioned with `key` and have every odd round's function registered.
RunResult run_inprocess(const PartitionScheme& p, ByteView a, ByteView b, const SymKey& key, Enclave& oracle, const RunOptions& opt);

// Re-runs a transcript's parties with the logged coins and oracle replies and
// checks every message and output matches. Throws ProtocolError on the first
// difference.
void replay(const PartitionScheme& p, const Transcript& t);

// One side of a run over a byte channel.
class Channel {
 public:
  virtual ~Channel() = default;
  virtual void send(ByteView frame) = 0;
  virtual Bytes recv() = 0;  // one complete frame
};

struct PartyResult {
  Bytes output;
  Transcript partial;  // message log plus this party's record (and the oracle log for Alice)
  RunStats stats;
};

// Runs one party to completion. Alice passes the oracle and no key; Bob
// passes the key and no oracle.
PartyResult run_party(Role role, const PartitionScheme& p, ByteView input, const SymKey* key, Enclave* oracle, Channel& ch,
                      const RunOptions& opt);

// Combines the two halves of a run; the message logs must agree.
Transcript merge_transcripts(const Transcript& alice_part, const Transcript& bob_part);

// Schemes of one round, for running a single protocol on its own.
PartitionScheme gc_scheme(std::string id, EvenRound round);
PartitionScheme sgx_scheme(std::string id, RoundFn fn, ReplyMode release);

}  // namespace hsfe
