#include <gtest/gtest.h>

#include <algorithm>
#include <thread>

#include "hsfe/apps/common.hpp"
#include "hsfe/apps/millionaires.hpp"
#include "hsfe/circuit_builder.hpp"
#include "hsfe/codec.hpp"
#include "hsfe/errors.hpp"
#include "hsfe/protocol.hpp"
#include "hsfe/transport.hpp"

using namespace hsfe;

namespace {

struct Party {
  SymKey key;
  Enclave oracle;
  Party(const PartitionScheme& p, std::uint64_t seed) : oracle(kDefaultEnclaveBudget, seed) {
    Drbg rng(seed, "key");
    key = keygen(rng);
    oracle.provision(key);
    register_round_fns(oracle, p);
  }
  RunResult run(const PartitionScheme& p, ByteView a, ByteView b, std::uint64_t seed, RunOptions opt = {}) {
    opt.seed = seed;
    return run_inprocess(p, a, b, key, oracle, opt);
  }
};

std::uint64_t word_of(ByteView b) {
  Reader r(b);
  return r.u64();
}

Bytes word_bytes(std::uint64_t v) {
  Writer w;
  w.u64(v);
  return std::move(w).bytes();
}

// Table of 64-bit words held by the enclave between rounds.
struct Table final : StateObject {
  std::vector<std::uint64_t> v;
  std::size_t memory_bytes() const override { return v.size() * 8; }
  Bytes snapshot() const override { return encode_words(v); }
};

// Alice's share is the table, Bob's an index; Bob learns the entry.
PartitionScheme sgx_select() {
  return sgx_scheme("select-sgx",
                    [](ByteView u, ByteView v, EnclaveState&) {
                      auto table = decode_words(split_input(u).first);
                      std::uint64_t i = word_of(split_input(v).first);
                      return RoundOutput{{}, word_bytes(i < table.size() ? table[i] : 0)};
                    },
                    ReplyMode::Bob);
}

// Same function as a garbled circuit, output to Bob.
PartitionScheme gc_select(std::uint32_t n) {
  EvenRound r;
  r.circuit = std::make_shared<const Circuit>(gen_select(n, 64, 1));
  r.alice_bits = [](ByteView u) {
    BitVec bits;
    for (auto w : decode_words(split_input(u).first)) push_word_bits(bits, w, 64);
    return bits;
  };
  r.bob_bits = [n](ByteView v) {
    BitVec bits;
    push_word_bits(bits, word_of(split_input(v).first), bits_for(n - 1));
    return bits;
  };
  r.plain = [n](ByteView u, ByteView v) {
    auto t = decode_words(split_input(u).first);
    std::uint64_t i = word_of(split_input(v).first);
    return u64_to_bits_lsb(i < n ? t[i] : 0, 64);
  };
  r.output = [](const BitVec& y, ByteView) { return word_bytes(bits_to_u64_lsb(y)); };
  r.to = Role::Bob;
  return gc_scheme("select-gc", std::move(r));
}

PartitionScheme gc_and() {
  Circuit c;
  c.alice_bits = 1;
  c.bob_bits = 1;
  c.gates.push_back(Gate{GateKind::AND, 0, 1, 2});
  c.wire_count = 3;
  c.outputs = {2};
  EvenRound r;
  r.circuit = std::make_shared<const Circuit>(c);
  r.alice_bits = [](ByteView u) { return BitVec{split_input(u).first[0]}; };
  r.bob_bits = [](ByteView v) { return BitVec{split_input(v).first[0]}; };
  r.plain = [](ByteView u, ByteView v) { return BitVec{std::uint8_t(split_input(u).first[0] & split_input(v).first[0])}; };
  r.output = [](const BitVec& y, ByteView) { return Bytes{y[0]}; };
  r.to = Role::Bob;
  return gc_scheme("and", std::move(r));
}

// Two odd rounds around an even one: load the table, select in a circuit
// that reads the enclave's answer, then echo the result to Alice.
PartitionScheme three_rounds() {
  PartitionScheme p;
  p.name = "three";
  p.rounds.push_back(OddRound{"load",
                              [](ByteView u, ByteView v, EnclaveState& st) {
                                auto& t = st.install("t", std::make_unique<Table>());
                                t.v = decode_words(split_input(u).first);
                                std::uint64_t i = word_of(split_input(v).first);
                                return RoundOutput{word_bytes(t.v.size()), word_bytes(t.v[i % t.v.size()])};
                              },
                              ReplyMode::Both});
  auto inner = std::get<EvenRound>(gc_and().rounds[0]);
  inner.id = "and";
  inner.alice_bits = [](ByteView u) { return BitVec{std::uint8_t(split_input(u).first[0] & 1)}; };
  inner.bob_bits = [](ByteView v) { return BitVec{std::uint8_t(word_of(split_input(v).second) & 1)}; };
  inner.plain = [](ByteView u, ByteView v) {
    return BitVec{std::uint8_t(split_input(u).first[0] & word_of(split_input(v).second) & 1)};
  };
  inner.to = Role::Bob;
  p.rounds.push_back(inner);
  p.rounds.push_back(OddRound{"finish",
                              [](ByteView, ByteView v, EnclaveState& st) {
                                auto [own, prev] = split_input(v);
                                Bytes y = word_bytes(st.find<Table>("t")->v.back());
                                append(y, prev);
                                return RoundOutput{y, {}};
                              },
                              ReplyMode::Alice});
  p.split_a = [](ByteView a, RandomSource&) { return std::vector<Bytes>{Bytes(a.begin(), a.end()), Bytes{1}, {}}; };
  p.split_b = [](ByteView b, RandomSource&) { return std::vector<Bytes>{Bytes(b.begin(), b.end()), {}, {}}; };
  return p;
}

Bytes byte_of(std::uint8_t x) { return Bytes{x}; }

}  // namespace

TEST(Protocol, SgxEchoReleasesToAlice) {
  auto p = sgx_scheme("echo", [](ByteView, ByteView v, EnclaveState&) { return RoundOutput{Bytes(split_input(v).first.begin(), split_input(v).first.end()), {}}; },
                      ReplyMode::Alice);
  Party s(p, 1);
  Bytes b = to_bytes("bob's secret");
  auto r = s.run(p, {}, b, 1);
  EXPECT_EQ(r.y0, b);
  EXPECT_TRUE(r.y1.empty());
}

TEST(Protocol, MillionairesGarbled) {
  auto p = build_millionaires(8, Mode::Gc);
  Party s(p, 2);
  auto r = s.run(p, byte_of(200), byte_of(100), 2);
  EXPECT_EQ(r.y0, byte_of(1));
  r = s.run(p, byte_of(100), byte_of(200), 3);
  EXPECT_EQ(r.y0, byte_of(0));
  r = s.run(p, byte_of(77), byte_of(77), 4);
  EXPECT_EQ(r.y0, byte_of(0));
  EXPECT_GT(r.stats.gc_table_rows, 0u);
  EXPECT_EQ(r.stats.ot_count, 8u);
}

TEST(Protocol, AndTruthTable) {
  auto p = gc_and();
  Party s(p, 3);
  for (std::uint8_t x = 0; x < 2; ++x)
    for (std::uint8_t y = 0; y < 2; ++y) {
      auto r = s.run(p, byte_of(x), byte_of(y), 10 + 2 * x + y);
      EXPECT_EQ(r.y1, byte_of(x & y)) << int(x) << int(y);
      EXPECT_TRUE(r.y0.empty());
    }
}

TEST(Protocol, SelectAgreesAcrossBackends) {
  Bytes table = encode_words({10, 20, 30, 40});
  auto g = gc_select(4);
  auto e = sgx_select();
  Party sg(g, 4), se(e, 4);
  for (std::uint64_t i = 0; i < 4; ++i) {
    auto rg = sg.run(g, table, word_bytes(i), 20 + i);
    auto re = se.run(e, table, word_bytes(i), 20 + i);
    EXPECT_EQ(word_of(rg.y1), 10 * (i + 1));
    EXPECT_EQ(rg.y1, re.y1);
    EXPECT_TRUE(rg.y0.empty());
    EXPECT_TRUE(re.y0.empty());
  }
}

TEST(Protocol, BobsInputNeverOnTheWire) {
  Drbg rng(5);
  for (int t = 0; t < 3; ++t) {
    Bytes a = random_millionaires_input(128, rng), b = random_millionaires_input(128, rng);
    for (Mode m : {Mode::Gc, Mode::Sgx}) {
      auto p = build_millionaires(128, m);
      Party s(p, 5 + t);
      auto r = s.run(p, a, b, 5 + t);
      EXPECT_EQ(r.y0, millionaires_plain(128, a, b));
      for (const auto& f : r.transcript.messages) EXPECT_FALSE(contains(*f.payload, b)) << frame_kind_name(f.kind);
    }
  }
}

TEST(Protocol, TamperedEnclaveReplyIsRejected) {
  auto p = sgx_select();
  Party s(p, 6);
  RunOptions opt;
  opt.tamper = [](const Frame& f) -> std::optional<Bytes> {
    if (f.kind != FrameKind::Ctx2) return std::nullopt;
    Bytes c = *f.payload;
    c[c.size() / 2] ^= 0x01;
    return c;
  };
  EXPECT_THROW(s.run(p, encode_words({10, 20, 30}), word_bytes(1), 6, opt), AuthenticationError);
  auto clean = s.run(p, encode_words({10, 20, 30}), word_bytes(1), 7);
  EXPECT_EQ(word_of(clean.y1), 20u);
}

TEST(Protocol, TamperedBobCiphertextIsRejected) {
  auto p = sgx_select();
  Party s(p, 6);
  RunOptions opt;
  opt.tamper = [](const Frame& f) -> std::optional<Bytes> {
    if (f.kind != FrameKind::Ctx1) return std::nullopt;
    Bytes c = *f.payload;
    c.back() ^= 0x80;
    return c;
  };
  EXPECT_THROW(s.run(p, encode_words({10, 20}), word_bytes(0), 8, opt), AuthenticationError);
}

TEST(Protocol, EmptyOutputRoundtrips) {
  auto p = sgx_scheme("empty", [](ByteView, ByteView, EnclaveState&) { return RoundOutput{}; }, ReplyMode::Bob);
  Party s(p, 9);
  auto r = s.run(p, to_bytes("a"), to_bytes("b"), 9);
  EXPECT_TRUE(r.y0.empty());
  EXPECT_TRUE(r.y1.empty());
}

TEST(Protocol, MixedRoundsCompose) {
  auto p = three_rounds();
  Party s(p, 10);
  for (std::uint64_t i = 0; i < 4; ++i) {
    Bytes a = encode_words({3, 6, 9, 12 + i});
    auto r = s.run(p, a, word_bytes(i), 30 + i);
    auto ref = exec_reference(p, a, word_bytes(i), 30 + i);
    EXPECT_EQ(r.y0, ref.final_alice());
    EXPECT_EQ(r.y1, ref.final_bob());
    Bytes want = word_bytes(12 + i);
    want.push_back(((3 * (i + 1) + (i == 3 ? i : 0)) & 1));
    EXPECT_EQ(r.y0, want) << i;
  }
}

TEST(Protocol, ReplayReproducesTheRun) {
  auto p = three_rounds();
  Party s(p, 11);
  auto r = s.run(p, encode_words({1, 2, 3}), word_bytes(2), 11);
  EXPECT_NO_THROW(replay(p, r.transcript));

  auto bad = r.transcript;
  auto& f = bad.messages[bad.messages.size() / 2];
  Bytes c = *f.payload;
  c[0] ^= 1;
  f.payload = std::make_shared<const Bytes>(c);
  EXPECT_THROW(replay(p, bad), ProtocolError);

  auto bad_out = r.transcript;
  bad_out.alice.output.push_back(0);
  EXPECT_THROW(replay(p, bad_out), ProtocolError);

  auto bad_coins = r.transcript;
  for (auto& st : bad_coins.bob.steps)
    if (!st.coins.empty()) st.coins[0] ^= 1;
  EXPECT_THROW(replay(p, bad_coins), ProtocolError);
}

TEST(Protocol, TranscriptSerializationRoundtrips) {
  auto p = three_rounds();
  Party s(p, 12);
  auto r = s.run(p, encode_words({5, 6}), word_bytes(1), 12);
  Bytes ser = r.transcript.serialize();
  Transcript back = Transcript::parse(ser);
  EXPECT_EQ(back.serialize(), ser);
  EXPECT_NO_THROW(replay(p, back));
  EXPECT_EQ(back.wire_bytes(), r.stats.bytes_on_wire);
  ser.pop_back();
  EXPECT_ANY_THROW(Transcript::parse(ser));
}

TEST(Protocol, ViewsSplitTheMessageLog) {
  auto p = three_rounds();
  Party s(p, 13);
  Bytes b = word_bytes(0x5eed5eed5eed5eedull);
  auto r = s.run(p, encode_words({7, 8, 9}), b, 13);
  View va = view_of(r.transcript, Role::Alice), vb = view_of(r.transcript, Role::Bob);
  EXPECT_EQ(va.received.size() + vb.received.size(), r.transcript.messages.size());
  for (const auto& f : va.received) EXPECT_EQ(f.from, Role::Bob);
  for (const auto& f : vb.received) EXPECT_EQ(f.from, Role::Alice);
  EXPECT_TRUE(vb.oracle.empty());
  EXPECT_EQ(va.oracle.size(), 2u);

  Bytes sa = va.serialize();
  Bytes key(s.key.bytes.begin(), s.key.bytes.end());
  EXPECT_FALSE(contains(sa, key));
  EXPECT_FALSE(contains(sa, b));
  EXPECT_TRUE(contains(vb.serialize(), key));
}

TEST(Protocol, TcpRunMatchesInProcess) {
  auto p = three_rounds();
  Bytes a = encode_words({4, 5, 6, 7}), b = word_bytes(3);
  Party s(p, 14);
  auto local = s.run(p, a, b, 14);

  Party s2(p, 14);
  RunOptions opt;
  opt.seed = 14;
  TcpListener listener;
  PartyResult bob_res;
  std::exception_ptr bob_err;
  std::thread bob([&] {
    try {
      auto ch = TcpChannel::connect("127.0.0.1", listener.port());
      bob_res = run_party(Role::Bob, p, b, &s2.key, nullptr, *ch, opt);
    } catch (...) {
      bob_err = std::current_exception();
    }
  });
  auto ch = listener.accept();
  auto alice_res = run_party(Role::Alice, p, a, nullptr, &s2.oracle, *ch, opt);
  bob.join();
  if (bob_err) std::rethrow_exception(bob_err);

  EXPECT_EQ(alice_res.output, local.y0);
  EXPECT_EQ(bob_res.output, local.y1);
  Transcript merged = merge_transcripts(alice_res.partial, bob_res.partial);
  EXPECT_EQ(merged.serialize(), local.transcript.serialize());
  // Either side sees every byte on the link.
  EXPECT_EQ(alice_res.stats.bytes_on_wire, local.stats.bytes_on_wire);
  EXPECT_EQ(bob_res.stats.bytes_on_wire, local.stats.bytes_on_wire);
}

TEST(Protocol, PartiesRefuseTheWrongSecrets) {
  auto p = sgx_select();
  Party s(p, 15);
  struct Null final : Channel {
    void send(ByteView) override {}
    Bytes recv() override { throw TransportError("closed"); }
  } ch;
  EXPECT_THROW(run_party(Role::Alice, p, {}, &s.key, &s.oracle, ch, {}), ProtocolError);
  EXPECT_THROW(run_party(Role::Bob, p, {}, &s.key, &s.oracle, ch, {}), ProtocolError);
}
