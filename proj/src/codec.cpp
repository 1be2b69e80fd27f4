#include "hsfe/codec.hpp"

namespace hsfe {

Writer& Writer::u8(std::uint8_t v) {
  out_.push_back(v);
  return *this;
}

Writer& Writer::u16(std::uint16_t v) {
  out_.push_back(static_cast<std::uint8_t>(v >> 8));
  out_.push_back(static_cast<std::uint8_t>(v));
  return *this;
}

Writer& Writer::u32(std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  return *this;
}

Writer& Writer::u64(std::uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  return *this;
}

Writer& Writer::raw(ByteView b) {
  out_.insert(out_.end(), b.begin(), b.end());
  return *this;
}

Writer& Writer::blob(ByteView b) {
  if (b.size() > 0xffffffffu) throw Error("blob too large");
  u32(static_cast<std::uint32_t>(b.size()));
  return raw(b);
}

void Reader::need(std::size_t n) const {
  if (in_.size() - pos_ < n) throw ProtocolError("truncated record");
}

std::uint8_t Reader::u8() {
  need(1);
  return in_[pos_++];
}

std::uint16_t Reader::u16() {
  need(2);
  std::uint16_t v = static_cast<std::uint16_t>(in_[pos_] << 8 | in_[pos_ + 1]);
  pos_ += 2;
  return v;
}

std::uint32_t Reader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = v << 8 | in_[pos_ + i];
  pos_ += 4;
  return v;
}

std::uint64_t Reader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = v << 8 | in_[pos_ + i];
  pos_ += 8;
  return v;
}

ByteView Reader::raw(std::size_t n) {
  need(n);
  ByteView v = in_.subspan(pos_, n);
  pos_ += n;
  return v;
}

ByteView Reader::blob() { return raw(u32()); }

std::string Reader::str() { return to_string(blob()); }

void Reader::expect_done() const {
  if (!done()) throw ProtocolError("trailing bytes in record");
}

}  // namespace hsfe
