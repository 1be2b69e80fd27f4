#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "hsfe/apps/common.hpp"

namespace hsfe {

enum class QueryKind : std::uint8_t { Select = 0, Set = 1 };

struct DbQuery {
  QueryKind kind = QueryKind::Select;
  std::uint64_t index = 0;
  std::uint64_t value = 0;  // sets only
  bool sensitive = false;
};

// Entries are 64-bit words. The number of sensitive queries is public: it
// fixes the size of the garbled round.
struct DatabaseConfig {
  std::uint32_t entries = 0;
  std::uint32_t queries = 0;
  std::uint32_t sensitive = 0;
};
// Rounds queries * fraction to the nearest integer.
DatabaseConfig database_config(std::uint32_t entries, std::uint32_t queries, double sensitive_fraction = 0.05);

struct DatabaseInstance {
  std::vector<std::uint64_t> db;
  std::vector<DbQuery> queries;
};

// Alice's input is the table, Bob's the query list.
Bytes encode_table(const std::vector<std::uint64_t>& db);
std::vector<std::uint64_t> decode_table(ByteView b);
Bytes encode_queries(const std::vector<DbQuery>& q);
std::vector<DbQuery> decode_queries(ByteView b);

// Indices in range, sizes as configured. Throws ConfigError.
void check_database_inputs(const DatabaseConfig& cfg, const std::vector<std::uint64_t>& db, const std::vector<DbQuery>& q);

// The function every database scheme computes: non-sensitive queries run
// first, in order, then the sensitive ones, in order. Bob receives one word
// per query in his original order: the entry for a select, 0 for a set.
// Alice has no output.
std::vector<std::uint64_t> database_plain(std::vector<std::uint64_t> db, const std::vector<DbQuery>& q);
// Bob's final output, decoded.
std::vector<std::uint64_t> decode_answers(ByteView y);

// Mode::Hybrid: round 1 (enclave) loads the table and runs the non-sensitive
// queries, releasing the table snapshot to Alice and the answers to Bob;
// round 2 (garbled, output to Bob) runs the sensitive queries on the
// snapshot. Naive and Sgx run everything in one enclave round, Gc in one
// garbled round.
PartitionScheme build_database_scheme(const DatabaseConfig& cfg, const AppOptions& opt);

DatabaseInstance random_database_instance(const DatabaseConfig& cfg, RandomSource& rng, double set_fraction = 0.2);

// Config file keys: entry_count, query_count, sensitive_fraction or
// sensitive_count, seed, and optionally query_file. A query file holds one
// query per line: "select <index> [sensitive]" or "set <index> <value>
// [sensitive]". Without one, queries are drawn from the seed.
struct DatabaseSetup {
  DatabaseConfig cfg;
  DatabaseInstance instance;
};
DatabaseSetup load_database_setup(const std::string& path);
std::vector<DbQuery> parse_query_file(std::string_view text);

// Routing discipline for a hybrid transcript: odd rounds saw exactly the
// non-sensitive queries, and no sensitive query appears in any frame.
std::vector<std::string> database_routing_violations(const PartitionScheme& p, const Transcript& t,
                                                     const std::vector<DbQuery>& queries);

}  // namespace hsfe
