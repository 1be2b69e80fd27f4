#include "hsfe/partition.hpp"

#include "hsfe/codec.hpp"
#include "hsfe/errors.hpp"

namespace hsfe {

std::string_view role_name(Role r) { return r == Role::Alice ? "alice" : "bob"; }

Bytes concat_input(ByteView own, ByteView prev) {
  Writer w;
  w.blob(own).blob(prev);
  return std::move(w).bytes();
}

std::pair<ByteView, ByteView> split_input(ByteView u) {
  Reader r(u);
  ByteView own = r.blob();
  ByteView prev = r.blob();
  r.expect_done();
  return {own, prev};
}

void PartitionScheme::validate() const {
  if (rounds.empty()) throw ConfigError("scheme '" + name + "' has no rounds");
  if (!split_a || !split_b) throw ConfigError("scheme '" + name + "' lacks a splitter");
  for (std::size_t j = 0; j < rounds.size(); ++j) {
    if (j > 0 && is_odd(rounds[j]) == is_odd(rounds[j - 1]))
      throw ConfigError("scheme '" + name + "': rounds " + std::to_string(j) + " and " + std::to_string(j + 1) + " are both " +
                        (is_odd(rounds[j]) ? "odd" : "even"));
    if (const auto* o = std::get_if<OddRound>(&rounds[j])) {
      if (o->id.empty() || !o->fn) throw ConfigError("scheme '" + name + "': odd round " + std::to_string(j + 1) + " incomplete");
    } else {
      const auto& e = std::get<EvenRound>(rounds[j]);
      if (!e.circuit || !e.alice_bits || !e.bob_bits || !e.plain || !e.output)
        throw ConfigError("scheme '" + name + "': even round " + std::to_string(j + 1) + " incomplete");
    }
  }
  if (const auto* o = std::get_if<OddRound>(&rounds.back()); o && o->release == ReplyMode::Both)
    throw ConfigError("scheme '" + name + "': final outputs for both parties are not supported");
}

Role PartitionScheme::final_party() const {
  const auto& r = rounds.back();
  if (const auto* o = std::get_if<OddRound>(&r)) return o->release == ReplyMode::Bob ? Role::Bob : Role::Alice;
  return std::get<EvenRound>(r).to;
}

namespace {
std::vector<Bytes> run_splitter(const PartitionScheme& p, const Splitter& s, ByteView in, std::uint64_t seed, std::string_view label) {
  Drbg rng(seed, label);
  auto v = s(in, rng);
  if (v.size() != p.length())
    throw ConfigError("splitter of '" + p.name + "' returned " + std::to_string(v.size()) + " shares for " + std::to_string(p.length()) + " rounds");
  return v;
}
}  // namespace

std::vector<Bytes> split_alice(const PartitionScheme& p, ByteView a, std::uint64_t seed) { return run_splitter(p, p.split_a, a, seed, "spa"); }
std::vector<Bytes> split_bob(const PartitionScheme& p, ByteView b, std::uint64_t seed) { return run_splitter(p, p.split_b, b, seed, "spb"); }

RoundOutput run_round_plain(const RoundSpec& r, ByteView u, ByteView v, EnclaveState& st) {
  if (const auto* o = std::get_if<OddRound>(&r)) {
    RoundOutput y = o->fn(u, v, st);
    if (o->release == ReplyMode::Bob) y.alice.clear();
    if (o->release == ReplyMode::Alice) y.bob.clear();
    return y;
  }
  const auto& e = std::get<EvenRound>(r);
  BitVec bits = e.plain(u, v);
  RoundOutput y;
  (e.to == Role::Alice ? y.alice : y.bob) = e.output(bits, e.to == Role::Alice ? u : v);
  return y;
}

ExecResult exec_reference(const PartitionScheme& p, ByteView a, ByteView b, std::uint64_t seed, EnclaveState& st) {
  p.validate();
  ExecResult res;
  res.a = split_alice(p, a, seed);
  res.b = split_bob(p, b, seed);
  for (std::size_t j = 0; j < p.length(); ++j) {
    ByteView prev0 = j ? ByteView(res.y0[j - 1]) : ByteView();
    ByteView prev1 = j ? ByteView(res.y1[j - 1]) : ByteView();
    Bytes u = concat_input(res.a[j], prev0);
    Bytes v = concat_input(res.b[j], prev1);
    try {
      RoundOutput y = run_round_plain(p.rounds[j], u, v, st);
      res.y0.push_back(std::move(y.alice));
      res.y1.push_back(std::move(y.bob));
    } catch (const RoundError&) {
      throw;
    } catch (const std::exception& ex) {
      throw RoundError(j + 1, ex.what());
    }
  }
  return res;
}

ExecResult exec_reference(const PartitionScheme& p, ByteView a, ByteView b, std::uint64_t seed) {
  EnclaveState st(kDefaultEnclaveBudget, seed);
  return exec_reference(p, a, b, seed, st);
}

CorrectnessReport check_correct(const PartitionScheme& p, const PlainFunction& f, const InputSampler& sample, std::size_t trials,
                                std::uint64_t seed) {
  CorrectnessReport rep;
  Drbg rng(seed, "check-correct");
  for (std::size_t t = 0; t < trials; ++t) {
    auto [a, b] = sample(rng);
    rep.trials = t + 1;
    RoundOutput want = f(a, b);
    RoundOutput got;
    std::string err;
    try {
      auto res = exec_reference(p, a, b, seed + t);
      got = {res.final_alice(), res.final_bob()};
    } catch (const std::exception& ex) {
      err = ex.what();
    }
    if (!err.empty() || got.alice != want.alice || got.bob != want.bob) {
      rep.pass = false;
      rep.failing_trial = t;
      rep.a = std::move(a);
      rep.b = std::move(b);
      rep.expected = std::move(want);
      rep.got = std::move(got);
      rep.error = std::move(err);
      return rep;
    }
  }
  return rep;
}

PartitionScheme make_identity(PlainFunction f, ReplyMode release, std::string id) {
  PartitionScheme p;
  p.name = id;
  p.rounds.push_back(OddRound{id, [f](ByteView u, ByteView v, EnclaveState&) {
                                auto [a, pa] = split_input(u);
                                auto [b, pb] = split_input(v);
                                return f(a, b);
                              },
                              release});
  p.split_a = [](ByteView a, RandomSource&) { return std::vector<Bytes>{Bytes(a.begin(), a.end())}; };
  p.split_b = [](ByteView b, RandomSource&) { return std::vector<Bytes>{Bytes(b.begin(), b.end())}; };
  return p;
}

}  // namespace hsfe
