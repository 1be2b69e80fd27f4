#include "hsfe/protocol.hpp"

#include <deque>
#include <map>
#include <mutex>

#include "hsfe/codec.hpp"
#include "hsfe/errors.hpp"
#include "hsfe/garbling.hpp"
#include "hsfe/ot.hpp"

namespace hsfe {

std::string frame_kind_name(FrameKind k) {
  auto v = static_cast<std::uint32_t>(k);
  std::string s{char(v >> 24), char(v >> 16), char(v >> 8), char(v)};
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

bool is_ciphertext_frame(FrameKind k) { return k == FrameKind::Ctx1 || k == FrameKind::Ctx2; }
bool is_ot_frame(FrameKind k) { return k == FrameKind::Ot1 || k == FrameKind::Ot2 || k == FrameKind::Ot3; }

namespace {

bool known_kind(std::uint32_t v) {
  switch (static_cast<FrameKind>(v)) {
    case FrameKind::Ot1:
    case FrameKind::Ot2:
    case FrameKind::Ot3:
    case FrameKind::GcF:
    case FrameKind::GcA:
    case FrameKind::GcD:
    case FrameKind::GcY:
    case FrameKind::Ctx1:
    case FrameKind::Ctx2: return true;
  }
  return false;
}

Role other(Role r) { return r == Role::Alice ? Role::Bob : Role::Alice; }

}  // namespace

Bytes encode_frame(const Frame& f) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(12 + f.payload->size())).u32(f.seq).u32(f.round).u32(static_cast<std::uint32_t>(f.kind));
  w.raw(*f.payload);
  return std::move(w).bytes();
}

Frame decode_frame(ByteView in, Role from) {
  Reader r(in);
  std::uint32_t len = r.u32();
  if (len < 12 || len != r.remaining()) throw TransportError("frame length field does not match the frame");
  Frame f;
  f.seq = r.u32();
  f.round = r.u32();
  std::uint32_t kind = r.u32();
  if (!known_kind(kind)) throw ProtocolError("unknown frame kind");
  f.kind = static_cast<FrameKind>(kind);
  f.from = from;
  ByteView p = r.raw(r.remaining());
  f.payload = std::make_shared<const Bytes>(p.begin(), p.end());
  return f;
}

// ---------------------------------------------------------------- transcript

namespace {

void write_record(Writer& w, const PartyRecord& p) {
  w.u8(p.present ? 1 : 0).blob(p.input).blob(p.long_term);
  w.u32(static_cast<std::uint32_t>(p.steps.size()));
  for (const auto& s : p.steps) w.u64(static_cast<std::uint64_t>(s.input_seq)).blob(s.coins);
  w.blob(p.output);
}

PartyRecord read_record(Reader& r) {
  PartyRecord p;
  p.present = r.u8() != 0;
  ByteView in = r.blob(), lt = r.blob();
  p.input.assign(in.begin(), in.end());
  p.long_term.assign(lt.begin(), lt.end());
  std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    Activation a;
    a.input_seq = static_cast<std::int64_t>(r.u64());
    ByteView c = r.blob();
    a.coins.assign(c.begin(), c.end());
    p.steps.push_back(std::move(a));
  }
  ByteView out = r.blob();
  p.output.assign(out.begin(), out.end());
  return p;
}

void write_frame(Writer& w, const Frame& f) {
  w.u32(f.seq).u32(f.round).u32(static_cast<std::uint32_t>(f.kind)).u8(static_cast<std::uint8_t>(f.from)).blob(*f.payload);
}

Frame read_frame(Reader& r) {
  Frame f;
  f.seq = r.u32();
  f.round = r.u32();
  std::uint32_t kind = r.u32();
  if (!known_kind(kind)) throw ProtocolError("transcript holds an unknown frame kind");
  f.kind = static_cast<FrameKind>(kind);
  f.from = r.u8() ? Role::Bob : Role::Alice;
  ByteView p = r.blob();
  f.payload = std::make_shared<const Bytes>(p.begin(), p.end());
  return f;
}

void write_call(Writer& w, const OracleCall& c) {
  w.u32(c.round).str(c.fn).u8(static_cast<std::uint8_t>(c.mode)).blob(c.alice_input).blob(c.bob_ciphertext);
  w.blob(c.reply.alice).blob(c.reply.bob_cipher);
}

OracleCall read_call(Reader& r) {
  OracleCall c;
  c.round = r.u32();
  c.fn = r.str();
  c.mode = static_cast<ReplyMode>(r.u8());
  auto take = [&](Bytes& out) {
    ByteView v = r.blob();
    out.assign(v.begin(), v.end());
  };
  take(c.alice_input);
  take(c.bob_ciphertext);
  take(c.reply.alice);
  take(c.reply.bob_cipher);
  return c;
}

}  // namespace

Bytes Transcript::serialize() const {
  Writer w;
  w.raw(to_bytes("HTR1")).str(scheme).u16(k).u64(seed);
  w.u32(static_cast<std::uint32_t>(messages.size()));
  for (const auto& f : messages) write_frame(w, f);
  w.u32(static_cast<std::uint32_t>(oracle.size()));
  for (const auto& c : oracle) write_call(w, c);
  write_record(w, alice);
  write_record(w, bob);
  return std::move(w).bytes();
}

Transcript Transcript::parse(ByteView in) {
  Reader r(in);
  if (to_string(r.raw(4)) != "HTR1") throw ProtocolError("not a transcript");
  Transcript t;
  t.scheme = r.str();
  t.k = r.u16();
  t.seed = r.u64();
  std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) t.messages.push_back(read_frame(r));
  n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) t.oracle.push_back(read_call(r));
  t.alice = read_record(r);
  t.bob = read_record(r);
  r.expect_done();
  return t;
}

std::size_t Transcript::wire_bytes() const {
  std::size_t n = 0;
  for (const auto& f : messages) n += f.wire_bytes();
  return n;
}

View view_of(const Transcript& t, Role r) {
  View v;
  v.role = r;
  v.record = r == Role::Alice ? t.alice : t.bob;
  for (const auto& f : t.messages)
    if (f.from != r) v.received.push_back(f);
  if (r == Role::Alice) v.oracle = t.oracle;
  return v;
}

Bytes View::serialize() const {
  Writer w;
  w.raw(to_bytes("HVW1")).u8(static_cast<std::uint8_t>(role));
  write_record(w, record);
  w.u32(static_cast<std::uint32_t>(received.size()));
  for (const auto& f : received) write_frame(w, f);
  w.u32(static_cast<std::uint32_t>(oracle.size()));
  for (const auto& c : oracle) write_call(w, c);
  return std::move(w).bytes();
}

// ---------------------------------------------------------------- parties

namespace {

// Hashing a large circuit costs real time, so digests are kept per circuit.
Digest digest_of(const std::shared_ptr<const Circuit>& c) {
  static std::mutex mu;
  static std::map<const Circuit*, std::pair<std::weak_ptr<const Circuit>, Digest>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(c.get());
  if (it != cache.end() && it->second.first.lock() == c) return it->second.second;
  for (auto i = cache.begin(); i != cache.end();) i = i->second.first.expired() ? cache.erase(i) : std::next(i);
  Digest d = circuit_digest(*c);
  cache[c.get()] = {c, d};
  return d;
}

struct Io {
  Role role;
  std::uint32_t round;
  unsigned k;
  RandomSource& coins;
  OracleAccess* oracle;
  std::vector<OracleCall>* oracle_log;
  RunStats& stats;
  struct Pending {
    FrameKind kind;
    std::uint32_t round;
    Bytes payload;
  };
  std::vector<Pending> out;

  void send(FrameKind kind, Bytes payload) { out.push_back({kind, round, std::move(payload)}); }
};

class SubProtocol {
 public:
  virtual ~SubProtocol() = default;
  virtual void start(Io& io) = 0;
  virtual void on_frame(const Frame& f, Io& io) = 0;
  bool done = false;
  Bytes output;

 protected:
  static void expect(const Frame& f, FrameKind k) {
    if (f.kind != k) throw ProtocolError("expected " + frame_kind_name(k) + ", got " + frame_kind_name(f.kind));
  }
};

BitVec checked_bits(const BitVec& bits, std::uint32_t want, const char* who) {
  if (bits.size() != want)
    throw ProtocolError(std::string(who) + " input has " + std::to_string(bits.size()) + " bits, the circuit takes " + std::to_string(want));
  return bits;
}

// Alice's side of the garbled-circuit round.
class GcGarbler final : public SubProtocol {
 public:
  GcGarbler(const EvenRound& r, Bytes u) : r_(r), u_(std::move(u)) {}

  void start(Io& io) override {
    const Circuit& c = *r_.circuit;
    BitVec a = checked_bits(r_.alice_bits(u_), c.alice_bits, "Alice's");
    Garbling g = garble(r_.circuit, io.k, io.coins, nullptr, digest_of(r_.circuit));
    io.stats.gc_table_rows += g.F.table_rows();
    io.send(FrameKind::GcF, serialize_garbled(g.F));
    g.F.tables = Bytes();
    io.send(FrameKind::GcA, serialize_tokens(encode_a(g.e, a), io.k));
    if (r_.to == Role::Bob) io.send(FrameKind::GcD, serialize_decoding(g.d));
    sender_ = std::make_unique<OtSender>(io.coins);
    io.send(FrameKind::Ot1, sender_->first_message());
    pairs_.reserve(c.bob_bits);
    for (std::uint32_t i = 0; i < c.bob_bits; ++i) {
      const auto& [x0, x1] = g.e.pairs[c.alice_bits + i];
      Bytes t0, t1;
      write_token(t0, x0, io.k);
      write_token(t1, x1, io.k);
      pairs_.emplace_back(std::move(t0), std::move(t1));
    }
    d_ = std::move(g.d);
  }

  void on_frame(const Frame& f, Io& io) override {
    if (!answered_) {
      expect(f, FrameKind::Ot2);
      io.send(FrameKind::Ot3, sender_->answer(*f.payload, pairs_));
      answered_ = true;
      pairs_.clear();
      if (r_.to == Role::Bob) done = true;
      return;
    }
    expect(f, FrameKind::GcY);
    auto y = decode(d_, deserialize_tokens(*f.payload, io.k));
    if (!y) throw GarblingError("output tokens did not decode");
    output = r_.output(*y, u_);
    done = true;
  }

 private:
  const EvenRound& r_;
  Bytes u_;
  std::unique_ptr<OtSender> sender_;
  OtPairs pairs_;
  DecodingInfo d_;
  bool answered_ = false;
};

// Bob's side of the garbled-circuit round.
class GcEvaluator final : public SubProtocol {
 public:
  GcEvaluator(const EvenRound& r, Bytes v) : r_(r), v_(std::move(v)) {}

  void start(Io&) override { bits_ = checked_bits(r_.bob_bits(v_), r_.circuit->bob_bits, "Bob's"); }

  void on_frame(const Frame& f, Io& io) override {
    switch (stage_++) {
      case 0:
        expect(f, FrameKind::GcF);
        F_ = deserialize_garbled(*f.payload, r_.circuit, digest_of(r_.circuit));
        if (F_.k != io.k) throw ProtocolError("garbled circuit uses a different security parameter");
        return;
      case 1:
        expect(f, FrameKind::GcA);
        X_ = deserialize_tokens(*f.payload, io.k);
        if (X_.size() != r_.circuit->alice_bits) throw ProtocolError("wrong number of Alice tokens");
        return;
      case 2:
        if (r_.to == Role::Bob) {
          expect(f, FrameKind::GcD);
          d_ = deserialize_decoding(*f.payload);
          return;
        }
        ++stage_;
        [[fallthrough]];
      case 3:
        expect(f, FrameKind::Ot1);
        receiver_ = std::make_unique<OtReceiver>(bits_, io.coins);
        io.stats.ot_count += bits_.size();
        io.send(FrameKind::Ot2, receiver_->respond(*f.payload));
        return;
      case 4: {
        expect(f, FrameKind::Ot3);
        auto got = receiver_->finish(*f.payload);
        for (const auto& t : got) X_.push_back(read_token(t, io.k));
        GarbledOutput Y = evaluate(F_, X_);
        F_ = GarbledCircuit();
        X_.clear();
        if (r_.to == Role::Bob) {
          auto y = decode(d_, Y);
          if (!y) throw GarblingError("output tokens did not decode");
          output = r_.output(*y, v_);
        } else {
          io.send(FrameKind::GcY, serialize_tokens(Y, io.k));
        }
        done = true;
        return;
      }
    }
    throw ProtocolError("unexpected frame after the garbled-circuit round finished");
  }

 private:
  const EvenRound& r_;
  Bytes v_;
  BitVec bits_;
  int stage_ = 0;
  GarbledCircuit F_;
  GarbledInput X_;
  DecodingInfo d_;
  std::unique_ptr<OtReceiver> receiver_;
};

// Alice's side of the enclave round.
class SgxAlice final : public SubProtocol {
 public:
  SgxAlice(const OddRound& r, Bytes u) : r_(r), u_(std::move(u)) {}
  void start(Io&) override {}
  void on_frame(const Frame& f, Io& io) override {
    expect(f, FrameKind::Ctx1);
    if (!io.oracle) throw ProtocolError("no oracle available to this party");
    OracleCall call{io.round, r_.id, r_.release, u_, *f.payload, {}};
    call.reply = io.oracle->query(OracleQuery{r_.id, u_, *f.payload, io.round}, r_.release);
    output = call.reply.alice;
    if (r_.release != ReplyMode::Alice) io.send(FrameKind::Ctx2, call.reply.bob_cipher);
    io.oracle_log->push_back(std::move(call));
    done = true;
  }

 private:
  const OddRound& r_;
  Bytes u_;
};

// Bob's side of the enclave round.
class SgxBob final : public SubProtocol {
 public:
  SgxBob(const OddRound& r, Bytes v, const SymKey& key) : r_(r), v_(std::move(v)), key_(key) {}
  void start(Io& io) override {
    io.send(FrameKind::Ctx1, enc(key_, v_, io.coins, io.round, Direction::ToEnclave));
    v_.clear();
    if (r_.release == ReplyMode::Alice) done = true;
  }
  void on_frame(const Frame& f, Io& io) override {
    expect(f, FrameKind::Ctx2);
    auto y = dec(key_, *f.payload, io.round, Direction::FromEnclave);
    if (!y) throw AuthenticationError("Bob rejected the relayed enclave output in round " + std::to_string(io.round));
    output = std::move(*y);
    done = true;
  }

 private:
  const OddRound& r_;
  Bytes v_;
  const SymKey& key_;
};

// One party of the composed protocol.
class HybridParty {
 public:
  HybridParty(Role role, const PartitionScheme& p, ByteView input, const SymKey* key, unsigned k, std::uint64_t seed)
      : role_(role), p_(p), key_(key ? std::optional<SymKey>(*key) : std::nullopt), k_(k) {
    if (role == Role::Bob && !key) throw ProtocolError("Bob needs the shared key");
    shares_ = role == Role::Alice ? split_alice(p, input, seed) : split_bob(p, input, seed);
  }

  bool halted() const { return j_ >= p_.length(); }
  const Bytes& output() const { return prev_; }

  std::vector<Frame> activate(const Frame* in, RandomSource& coins, OracleAccess* oracle, std::vector<OracleCall>& log, RunStats& stats) {
    Io io{role_, static_cast<std::uint32_t>(j_ + 1), k_, coins, oracle, &log, stats, {}};
    try {
      if (!in) {
        if (started_) throw ProtocolError("party started twice");
        started_ = true;
        begin_round(io);
      } else {
        if (halted()) throw ProtocolError(std::string(role_name(role_)) + " received a frame after halting");
        if (in->seq != seen_) throw ProtocolError("frame out of sequence: got " + std::to_string(in->seq) + ", expected " + std::to_string(seen_));
        if (in->round != j_ + 1) throw ProtocolError("frame for round " + std::to_string(in->round) + " arrived in round " + std::to_string(j_ + 1));
        ++seen_;
        cur_->on_frame(*in, io);
      }
      while (!halted() && cur_->done) {
        prev_ = std::move(cur_->output);
        cur_.reset();
        if (++j_ < p_.length()) {
          io.round = static_cast<std::uint32_t>(j_ + 1);
          begin_round(io);
        }
      }
    } catch (const RoundError&) {
      throw;
    } catch (const AuthenticationError& e) {
      // Kept as its own type: a rejected ciphertext is the expected outcome of tampering.
      throw AuthenticationError("round " + std::to_string(j_ + 1) + ": " + role_name(role_).data() + ": " + e.what());
    } catch (const std::exception& e) {
      throw RoundError(j_ + 1, std::string(role_name(role_)) + ": " + e.what());
    }
    std::vector<Frame> out;
    for (auto& pf : io.out) {
      Frame f;
      f.seq = seen_++;
      f.round = pf.round;
      f.kind = pf.kind;
      f.from = role_;
      f.payload = std::make_shared<const Bytes>(std::move(pf.payload));
      stats.bytes_on_wire += f.wire_bytes();
      out.push_back(std::move(f));
    }
    return out;
  }

 private:
  void begin_round(Io& io) {
    const auto& spec = p_.rounds[j_];
    Bytes own = concat_input(shares_[j_], prev_);
    if (const auto* o = std::get_if<OddRound>(&spec)) {
      if (role_ == Role::Alice)
        cur_ = std::make_unique<SgxAlice>(*o, std::move(own));
      else
        cur_ = std::make_unique<SgxBob>(*o, std::move(own), *key_);
    } else {
      const auto& e = std::get<EvenRound>(spec);
      if (role_ == Role::Alice)
        cur_ = std::make_unique<GcGarbler>(e, std::move(own));
      else
        cur_ = std::make_unique<GcEvaluator>(e, std::move(own));
    }
    cur_->start(io);
  }

  Role role_;
  const PartitionScheme& p_;
  std::optional<SymKey> key_;
  unsigned k_;
  std::vector<Bytes> shares_;
  Bytes prev_;
  std::unique_ptr<SubProtocol> cur_;
  std::size_t j_ = 0;
  std::uint32_t seen_ = 0;
  bool started_ = false;
};

class EnclaveOracle final : public OracleAccess {
 public:
  explicit EnclaveOracle(Enclave& e) : e_(e) {}
  OracleReply query(const OracleQuery& q, ReplyMode mode) override { return e_.query(q, mode); }

 private:
  Enclave& e_;
};

// Answers from a transcript, insisting each query is the logged one.
class LoggedOracle final : public OracleAccess {
 public:
  explicit LoggedOracle(const std::vector<OracleCall>& log) : log_(log) {}
  OracleReply query(const OracleQuery& q, ReplyMode mode) override {
    if (i_ >= log_.size()) throw ProtocolError("replay: more oracle queries than logged");
    const auto& c = log_[i_++];
    if (c.fn != q.fn || c.round != q.round || c.mode != mode || c.alice_input != q.alice_input || c.bob_ciphertext != q.bob_ciphertext)
      throw ProtocolError("replay: oracle query " + std::to_string(i_) + " differs from the logged one");
    return c.reply;
  }

 private:
  const std::vector<OracleCall>& log_;
  std::size_t i_ = 0;
};

// Supplies each activation's coins and reports what was drawn.
class CoinFeed {
 public:
  virtual ~CoinFeed() = default;
  virtual RandomSource& begin(Role r, std::int64_t input_seq) = 0;
  virtual Bytes end(Role r) = 0;
};

class LiveCoins final : public CoinFeed {
 public:
  explicit LiveCoins(std::uint64_t seed)
      : drbg_{Drbg(seed, "alice"), Drbg(seed, "bob")}, rec_{RecordingSource(drbg_[0]), RecordingSource(drbg_[1])} {}
  RandomSource& begin(Role r, std::int64_t) override { return rec_[int(r)]; }
  Bytes end(Role r) override { return rec_[int(r)].take(); }

 private:
  Drbg drbg_[2];
  RecordingSource rec_[2];
};

class ReplayCoins final : public CoinFeed {
 public:
  explicit ReplayCoins(const Transcript& t) : rec_{&t.alice, &t.bob} {}
  RandomSource& begin(Role r, std::int64_t input_seq) override {
    auto& i = next_[int(r)];
    const auto& steps = rec_[int(r)]->steps;
    if (i >= steps.size() || steps[i].input_seq != input_seq) throw ProtocolError("replay: activation order differs from the log");
    src_[int(r)].load(steps[i].coins);
    ++i;
    return src_[int(r)];
  }
  Bytes end(Role r) override {
    if (!src_[int(r)].exhausted()) throw ProtocolError("replay: party drew fewer coins than logged");
    return rec_[int(r)]->steps[next_[int(r)] - 1].coins;
  }

 private:
  const PartyRecord* rec_[2];
  ReplaySource src_[2];
  std::size_t next_[2] = {0, 0};
};

// Runs both parties in this thread, delivering frames in the order sent.
void drive(HybridParty& alice, HybridParty& bob, CoinFeed& coins, OracleAccess& oracle, Transcript& t, RunStats& stats,
           const std::function<std::optional<Bytes>(const Frame&)>& tamper) {
  std::deque<Frame> q;
  auto act = [&](Role r, const Frame* in) {
    HybridParty& p = r == Role::Alice ? alice : bob;
    std::int64_t seq = in ? std::int64_t(in->seq) : -1;
    RandomSource& src = coins.begin(r, seq);
    auto out = p.activate(in, src, r == Role::Alice ? &oracle : nullptr, t.oracle, stats);
    (r == Role::Alice ? t.alice : t.bob).steps.push_back({seq, coins.end(r)});
    for (auto& f : out) q.push_back(std::move(f));
  };
  act(Role::Alice, nullptr);
  act(Role::Bob, nullptr);
  while (!q.empty()) {
    Frame f = std::move(q.front());
    q.pop_front();
    if (tamper)
      if (auto repl = tamper(f)) f.payload = std::make_shared<const Bytes>(std::move(*repl));
    t.messages.push_back(f);
    act(other(f.from), &t.messages.back());
  }
  if (!alice.halted() || !bob.halted()) throw ProtocolError("run ended with a party still waiting for a message");
}

PartyRecord initial_record(ByteView input, const SymKey* key) {
  PartyRecord r;
  r.present = true;
  r.input.assign(input.begin(), input.end());
  if (key) r.long_term.assign(key->bytes.begin(), key->bytes.end());
  return r;
}

}  // namespace

RunResult run_inprocess(const PartitionScheme& p, ByteView a, ByteView b, const SymKey& key, Enclave& oracle, const RunOptions& opt) {
  p.validate();
  RunResult res;
  Transcript& t = res.transcript;
  t.scheme = p.name;
  t.k = static_cast<std::uint16_t>(opt.k);
  t.seed = opt.seed;
  t.alice = initial_record(a, nullptr);
  t.bob = initial_record(b, &key);
  HybridParty alice(Role::Alice, p, a, nullptr, opt.k, opt.seed);
  HybridParty bob(Role::Bob, p, b, &key, opt.k, opt.seed);
  LiveCoins coins(opt.seed);
  EnclaveOracle eo(oracle);
  drive(alice, bob, coins, eo, t, res.stats, opt.tamper);
  t.alice.output = res.y0 = alice.output();
  t.bob.output = res.y1 = bob.output();
  return res;
}

void replay(const PartitionScheme& p, const Transcript& t) {
  if (!t.alice.present || !t.bob.present) throw ProtocolError("replay needs a complete transcript");
  if (t.bob.long_term.size() != 16) throw ProtocolError("replay: transcript lacks Bob's key");
  SymKey key;
  std::copy(t.bob.long_term.begin(), t.bob.long_term.end(), key.bytes.begin());
  Transcript again;
  again.scheme = t.scheme;
  again.k = t.k;
  again.seed = t.seed;
  again.alice = initial_record(t.alice.input, nullptr);
  again.bob = initial_record(t.bob.input, &key);
  HybridParty alice(Role::Alice, p, t.alice.input, nullptr, t.k, t.seed);
  HybridParty bob(Role::Bob, p, t.bob.input, &key, t.k, t.seed);
  ReplayCoins coins(t);
  LoggedOracle oracle(t.oracle);
  RunStats stats;
  try {
    drive(alice, bob, coins, oracle, again, stats, nullptr);
  } catch (const RoundError& e) {
    throw ProtocolError(std::string("replay: ") + e.what());
  }
  again.alice.output = alice.output();
  again.bob.output = bob.output();
  if (again.messages.size() != t.messages.size()) throw ProtocolError("replay: message count differs");
  for (std::size_t i = 0; i < t.messages.size(); ++i) {
    const auto &x = again.messages[i], &y = t.messages[i];
    if (x.seq != y.seq || x.round != y.round || x.kind != y.kind || x.from != y.from || *x.payload != *y.payload)
      throw ProtocolError("replay: message " + std::to_string(i) + " differs");
  }
  if (again.alice.output != t.alice.output || again.bob.output != t.bob.output) throw ProtocolError("replay: outputs differ");
  if (again.serialize() != t.serialize()) throw ProtocolError("replay: transcript differs");
}

PartyResult run_party(Role role, const PartitionScheme& p, ByteView input, const SymKey* key, Enclave* oracle, Channel& ch,
                      const RunOptions& opt) {
  p.validate();
  if (role == Role::Alice && (!oracle || key)) throw ProtocolError("Alice runs with the oracle and without the key");
  if (role == Role::Bob && (oracle || !key)) throw ProtocolError("Bob runs with the key and without the oracle");
  PartyResult res;
  Transcript& t = res.partial;
  t.scheme = p.name;
  t.k = static_cast<std::uint16_t>(opt.k);
  t.seed = opt.seed;
  PartyRecord& me = role == Role::Alice ? t.alice : t.bob;
  me = initial_record(input, key);
  HybridParty party(role, p, input, key, opt.k, opt.seed);
  Drbg drbg(opt.seed, role == Role::Alice ? "alice" : "bob");
  RecordingSource rec(drbg);
  std::optional<EnclaveOracle> eo;
  if (oracle) eo.emplace(*oracle);
  auto act = [&](const Frame* in) {
    auto out = party.activate(in, rec, eo ? &*eo : nullptr, t.oracle, res.stats);
    me.steps.push_back({in ? std::int64_t(in->seq) : -1, rec.take()});
    for (auto& f : out) {
      ch.send(encode_frame(f));
      t.messages.push_back(std::move(f));
    }
  };
  act(nullptr);
  while (!party.halted()) {
    Frame f = decode_frame(ch.recv(), other(role));
    res.stats.bytes_on_wire += f.wire_bytes();
    t.messages.push_back(std::move(f));
    act(&t.messages.back());
  }
  me.output = res.output = party.output();
  return res;
}

Transcript merge_transcripts(const Transcript& a, const Transcript& b) {
  if (!a.alice.present || !b.bob.present) throw ProtocolError("merge needs Alice's and Bob's halves");
  if (a.scheme != b.scheme || a.k != b.k || a.seed != b.seed) throw ProtocolError("transcript halves come from different runs");
  if (a.messages.size() != b.messages.size()) throw ProtocolError("transcript halves disagree on the message count");
  for (std::size_t i = 0; i < a.messages.size(); ++i) {
    const auto &x = a.messages[i], &y = b.messages[i];
    if (x.seq != y.seq || x.round != y.round || x.kind != y.kind || x.from != y.from || *x.payload != *y.payload)
      throw ProtocolError("transcript halves disagree on message " + std::to_string(i));
  }
  Transcript t = a;
  t.bob = b.bob;
  return t;
}

namespace {
std::vector<Bytes> one_share(ByteView x, RandomSource&) { return {Bytes(x.begin(), x.end())}; }
}  // namespace

PartitionScheme gc_scheme(std::string id, EvenRound round) {
  PartitionScheme p;
  p.name = id;
  round.id = std::move(id);
  p.rounds.push_back(std::move(round));
  p.split_a = one_share;
  p.split_b = one_share;
  return p;
}

PartitionScheme sgx_scheme(std::string id, RoundFn fn, ReplyMode release) {
  PartitionScheme p;
  p.name = id;
  p.rounds.push_back(OddRound{std::move(id), std::move(fn), release});
  p.split_a = one_share;
  p.split_b = one_share;
  return p;
}

}  // namespace hsfe
