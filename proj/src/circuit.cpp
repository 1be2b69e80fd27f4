#include "hsfe/circuit.hpp"

#include <charconv>
#include <sstream>

#include "hsfe/codec.hpp"
#include "hsfe/errors.hpp"

namespace hsfe {

std::string_view gate_kind_name(GateKind k) {
  switch (k) {
    case GateKind::XOR: return "XOR";
    case GateKind::AND: return "AND";
    case GateKind::OR: return "OR";
    case GateKind::NOT: return "NOT";
    case GateKind::CONST: return "CONST";
  }
  return "?";
}

std::size_t Circuit::count(GateKind k) const {
  std::size_t n = 0;
  for (const auto& g : gates) n += g.kind == k;
  return n;
}

std::size_t Circuit::nonlinear_count() const {
  std::size_t n = 0;
  for (const auto& g : gates) n += g.kind == GateKind::AND || g.kind == GateKind::OR;
  return n;
}

void Circuit::validate() const {
  if (std::uint64_t(alice_bits) + bob_bits > wire_count)
    throw CircuitError("more input wires than wires");
  std::vector<std::uint8_t> defined(wire_count, 0);
  for (std::uint32_t i = 0; i < input_count(); ++i) defined[i] = 1;
  auto need = [&](std::uint32_t w, std::size_t gi) {
    if (w >= wire_count) throw CircuitError("gate " + std::to_string(gi) + " references wire " + std::to_string(w) + " beyond wire count");
    if (!defined[w]) throw CircuitError("gate " + std::to_string(gi) + " reads wire " + std::to_string(w) + " before it is defined");
  };
  for (std::size_t gi = 0; gi < gates.size(); ++gi) {
    const Gate& g = gates[gi];
    switch (g.kind) {
      case GateKind::XOR:
      case GateKind::AND:
      case GateKind::OR:
        need(g.in0, gi);
        need(g.in1, gi);
        break;
      case GateKind::NOT: need(g.in0, gi); break;
      case GateKind::CONST:
        if (g.in0 > 1) throw CircuitError("CONST value must be 0 or 1");
        break;
    }
    if (g.out >= wire_count) throw CircuitError("gate " + std::to_string(gi) + " output beyond wire count");
    if (defined[g.out]) throw CircuitError("wire " + std::to_string(g.out) + " defined twice");
    defined[g.out] = 1;
  }
  for (auto w : outputs) {
    if (w >= wire_count || !defined[w]) throw CircuitError("output wire " + std::to_string(w) + " is never defined");
  }
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::uint32_t parse_u32(std::string_view s, std::size_t line) {
  std::uint32_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw CircuitError("expected a number, got '" + std::string(s) + "'", line);
  return v;
}

}  // namespace

Circuit parse_circuit(std::string_view text) {
  Circuit c;
  bool have_header = false;
  std::vector<std::uint8_t> defined;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tok = split_ws(line);
    if (tok.empty()) continue;

    if (!have_header) {
      if (tok.size() != 8 || tok[0] != "wires" || tok[2] != "inA" || tok[4] != "inB" || tok[6] != "out")
        throw CircuitError("expected header 'wires N inA l inB r out w1,w2,...'", lineno);
      c.wire_count = parse_u32(tok[1], lineno);
      c.alice_bits = parse_u32(tok[3], lineno);
      c.bob_bits = parse_u32(tok[5], lineno);
      std::string_view outs = tok[7];
      std::size_t p = 0;
      while (p <= outs.size()) {
        std::size_t comma = outs.find(',', p);
        if (comma == std::string_view::npos) comma = outs.size();
        c.outputs.push_back(parse_u32(outs.substr(p, comma - p), lineno));
        p = comma + 1;
      }
      if (std::uint64_t(c.alice_bits) + c.bob_bits > c.wire_count) throw CircuitError("more input wires than wires", lineno);
      defined.assign(c.wire_count, 0);
      for (std::uint32_t i = 0; i < c.input_count(); ++i) defined[i] = 1;
      have_header = true;
      continue;
    }

    Gate g;
    std::string_view kind = tok[0];
    std::size_t expect;
    if (kind == "XOR") g.kind = GateKind::XOR, expect = 4;
    else if (kind == "AND") g.kind = GateKind::AND, expect = 4;
    else if (kind == "OR") g.kind = GateKind::OR, expect = 4;
    else if (kind == "NOT") g.kind = GateKind::NOT, expect = 3;
    else if (kind == "CONST") g.kind = GateKind::CONST, expect = 3;
    else throw CircuitError("unknown gate kind '" + std::string(kind) + "'", lineno);
    if (tok.size() != expect) throw CircuitError("wrong operand count for " + std::string(kind), lineno);
    g.in0 = parse_u32(tok[1], lineno);
    if (expect == 4) {
      g.in1 = parse_u32(tok[2], lineno);
      g.out = parse_u32(tok[3], lineno);
    } else {
      g.out = parse_u32(tok[2], lineno);
    }
    if (g.kind == GateKind::CONST && g.in0 > 1) throw CircuitError("CONST value must be 0 or 1", lineno);
    auto need = [&](std::uint32_t w) {
      if (w >= c.wire_count) throw CircuitError("wire " + std::to_string(w) + " beyond wire count " + std::to_string(c.wire_count), lineno);
      if (!defined[w]) throw CircuitError("wire " + std::to_string(w) + " read before it is defined", lineno);
    };
    if (g.kind != GateKind::CONST) need(g.in0);
    if (expect == 4) need(g.in1);
    if (g.out >= c.wire_count) throw CircuitError("wire " + std::to_string(g.out) + " beyond wire count " + std::to_string(c.wire_count), lineno);
    if (defined[g.out]) throw CircuitError("wire " + std::to_string(g.out) + " defined twice", lineno);
    defined[g.out] = 1;
    c.gates.push_back(g);
  }
  if (!have_header) throw CircuitError("empty circuit file");
  c.validate();
  return c;
}

std::string serialize_circuit(const Circuit& c) {
  std::ostringstream os;
  os << "wires " << c.wire_count << " inA " << c.alice_bits << " inB " << c.bob_bits << " out ";
  for (std::size_t i = 0; i < c.outputs.size(); ++i) os << (i ? "," : "") << c.outputs[i];
  os << '\n';
  for (const auto& g : c.gates) {
    os << gate_kind_name(g.kind) << ' ' << g.in0;
    if (g.kind == GateKind::XOR || g.kind == GateKind::AND || g.kind == GateKind::OR) os << ' ' << g.in1;
    os << ' ' << g.out << '\n';
  }
  return os.str();
}

Digest circuit_digest(const Circuit& c) {
  Writer w;
  w.u32(c.wire_count).u32(c.alice_bits).u32(c.bob_bits).u32(static_cast<std::uint32_t>(c.outputs.size()));
  for (auto o : c.outputs) w.u32(o);
  Sha256Stream h;
  h.update(w.bytes());
  Bytes buf;
  buf.reserve(13 * 4096);
  for (const auto& g : c.gates) {
    std::uint8_t rec[13] = {static_cast<std::uint8_t>(g.kind)};
    for (int i = 0; i < 4; ++i) {
      rec[1 + i] = static_cast<std::uint8_t>(g.in0 >> (24 - 8 * i));
      rec[5 + i] = static_cast<std::uint8_t>(g.in1 >> (24 - 8 * i));
      rec[9 + i] = static_cast<std::uint8_t>(g.out >> (24 - 8 * i));
    }
    buf.insert(buf.end(), rec, rec + 13);
    if (buf.size() >= 13 * 4096) {
      h.update(buf);
      buf.clear();
    }
  }
  h.update(buf);
  return h.finish();
}

BitVec eval_plain(const Circuit& c, std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != c.alice_bits) throw CircuitError("eval_plain: Alice input has " + std::to_string(a.size()) + " bits, expected " + std::to_string(c.alice_bits));
  if (b.size() != c.bob_bits) throw CircuitError("eval_plain: Bob input has " + std::to_string(b.size()) + " bits, expected " + std::to_string(c.bob_bits));
  // 0/1 = value, 2 = undefined
  std::vector<std::uint8_t> w(c.wire_count, 2);
  for (std::size_t i = 0; i < a.size(); ++i) w[i] = a[i] & 1;
  for (std::size_t i = 0; i < b.size(); ++i) w[c.alice_bits + i] = b[i] & 1;
  auto rd = [&](std::uint32_t id) {
    std::uint8_t v = w[id];
    if (v > 1) throw CircuitError("eval_plain read undefined wire " + std::to_string(id));
    return v;
  };
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::XOR: w[g.out] = rd(g.in0) ^ rd(g.in1); break;
      case GateKind::AND: w[g.out] = rd(g.in0) & rd(g.in1); break;
      case GateKind::OR: w[g.out] = rd(g.in0) | rd(g.in1); break;
      case GateKind::NOT: w[g.out] = rd(g.in0) ^ 1; break;
      case GateKind::CONST: w[g.out] = static_cast<std::uint8_t>(g.in0 & 1); break;
    }
  }
  BitVec out;
  out.reserve(c.outputs.size());
  for (auto o : c.outputs) out.push_back(rd(o));
  return out;
}

}  // namespace hsfe
