#include "hsfe/enclave.hpp"

#include "hsfe/codec.hpp"
#include "hsfe/errors.hpp"

namespace hsfe {

EnclaveState::EnclaveState(std::size_t budget, std::uint64_t seed)
    : EnclaveState(budget, std::make_unique<Drbg>(seed, "enclave")) {}

EnclaveState::EnclaveState(std::size_t budget, std::unique_ptr<RandomSource> rng) : budget_(budget), rng_(std::move(rng)) {}

std::size_t EnclaveState::used() const {
  std::size_t n = 0;
  for (const auto& [name, obj] : objects_) n += name.size() + obj->memory_bytes();
  return n;
}

void EnclaveState::reserve_transient(std::size_t bytes) const {
  if (used() + bytes > budget_)
    throw BudgetExceeded("enclave memory budget of " + std::to_string(budget_) + " bytes exceeded (" +
                         std::to_string(used()) + " in use, " + std::to_string(bytes) + " requested)");
}

void EnclaveState::put(const std::string& name, std::unique_ptr<StateObject> obj) {
  std::size_t replaced = 0;
  if (auto it = objects_.find(name); it != objects_.end()) replaced = name.size() + it->second->memory_bytes();
  std::size_t after = used() - replaced + name.size() + obj->memory_bytes();
  if (after > budget_)
    throw BudgetExceeded("enclave memory budget of " + std::to_string(budget_) + " bytes exceeded by '" + name + "'");
  objects_[name] = std::move(obj);
}

void EnclaveState::erase(const std::string& name) { objects_.erase(name); }

Bytes EnclaveState::snapshot() const {
  Writer w;
  w.u32(static_cast<std::uint32_t>(objects_.size()));
  for (const auto& [name, obj] : objects_) w.blob(to_bytes(name)).blob(obj->snapshot());
  return std::move(w).bytes();
}

Enclave::Enclave(std::size_t budget, std::uint64_t seed) : state_(budget, seed) {}
Enclave::Enclave(std::size_t budget, std::unique_ptr<RandomSource> rng) : state_(budget, std::move(rng)) {}
Enclave::~Enclave() = default;

void Enclave::provision(const SymKey& k) {
  if (key_) throw EnclaveError("enclave already provisioned");
  key_ = k;
}

void Enclave::register_round_fn(const std::string& id, RoundFn fn) {
  if (fns_.count(id)) throw EnclaveError("round function '" + id + "' already registered");
  if (!fn) throw EnclaveError("round function '" + id + "' is empty");
  fns_.emplace(id, std::move(fn));
}

OracleReply Enclave::query(const OracleQuery& q, ReplyMode mode) {
  if (!key_) throw EnclaveError("enclave queried before provisioning");
  auto it = fns_.find(q.fn);
  if (it == fns_.end()) throw EnclaveError("unknown round function '" + q.fn + "'");
  auto v = dec(*key_, q.bob_ciphertext, q.round, Direction::ToEnclave);
  if (!v) throw AuthenticationError("enclave rejected Bob's ciphertext in round " + std::to_string(q.round));
  state_.reserve_transient(q.alice_input.size() + v->size());
  RoundOutput y = it->second(q.alice_input, *v, state_);
  OracleReply r;
  if (mode != ReplyMode::Bob) r.alice = std::move(y.alice);
  if (mode != ReplyMode::Alice) r.bob_cipher = enc(*key_, y.bob, state_.rng(), q.round, Direction::FromEnclave);
  return r;
}

}  // namespace hsfe
