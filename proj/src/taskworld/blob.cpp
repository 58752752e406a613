#include "vlasteer/error.hpp"
#include "vlasteer/taskworld.hpp"

namespace vlasteer {
namespace {

constexpr std::uint32_t kMagic = 0x42545356;  // "VSTB" read little-endian
constexpr std::uint16_t kVersion = 1;
constexpr std::uint16_t kNone16 = 0xffff;
constexpr std::uint8_t kUnset8 = 0xff;

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void str(const std::string& s) {
    if (s.size() > kNone16) throw InvalidArgument("snapshot: name too long");
    u16(static_cast<std::uint16_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  void flag(const std::optional<bool>& f) { u8(f ? static_cast<std::uint8_t>(*f) : kUnset8); }
  StateBlob take() { return std::move(out_); }

 private:
  StateBlob out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint64_t uint(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(uint(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(uint(2)); }
  std::string str() {
    const std::size_t n = u16();
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::optional<bool> flag() {
    const std::uint8_t v = u8();
    if (v == kUnset8) return std::nullopt;
    if (v > 1) throw BlobError("blob: invalid flag byte");
    return v == 1;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw BlobError("blob: truncated");
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

// Field order: magic u32, version u16, width u16, height u16, tick u64,
// gripper x u16, y u16, held u16 (0xffff = none), fixture count u16, then per
// fixture: id u16, kind u8, x u16, y u16, open u8, active u8 (0xff = unset),
// name; object count u16, then per object: id u16, x u16, y u16,
// container u16 (0xffff = none), name. Names are u16 length + bytes.
StateBlob snapshot(const WorldState& s) {
  Writer w;
  w.u32(kMagic);
  w.u16(kVersion);
  w.u16(static_cast<std::uint16_t>(s.grid_width));
  w.u16(static_cast<std::uint16_t>(s.grid_height));
  w.u64(s.tick);
  w.u16(static_cast<std::uint16_t>(s.gripper.pos.x));
  w.u16(static_cast<std::uint16_t>(s.gripper.pos.y));
  w.u16(s.gripper.held ? *s.gripper.held : kNone16);
  w.u16(static_cast<std::uint16_t>(s.fixtures.size()));
  for (const auto& f : s.fixtures) {
    w.u16(f.id);
    w.u8(static_cast<std::uint8_t>(f.kind));
    w.u16(static_cast<std::uint16_t>(f.pos.x));
    w.u16(static_cast<std::uint16_t>(f.pos.y));
    w.flag(f.open);
    w.flag(f.active);
    w.str(f.name);
  }
  w.u16(static_cast<std::uint16_t>(s.objects.size()));
  for (const auto& o : s.objects) {
    w.u16(o.id);
    w.u16(static_cast<std::uint16_t>(o.pos.x));
    w.u16(static_cast<std::uint16_t>(o.pos.y));
    w.u16(o.container ? *o.container : kNone16);
    w.str(o.name);
  }
  return w.take();
}

WorldState restore(std::span<const std::uint8_t> blob) {
  Reader r(blob);
  if (r.uint(4) != kMagic) throw BlobError("blob: bad magic");
  if (r.u16() != kVersion) throw BlobError("blob: unsupported version");
  WorldState s;
  s.grid_width = r.u16();
  s.grid_height = r.u16();
  s.tick = r.uint(8);
  s.gripper.pos = {r.u16(), r.u16()};
  if (auto held = r.u16(); held != kNone16) s.gripper.held = held;
  const std::size_t nf = r.u16();
  for (std::size_t i = 0; i < nf; ++i) {
    Fixture f;
    f.id = r.u16();
    const std::uint8_t kind = r.u8();
    if (kind > static_cast<std::uint8_t>(FixtureKind::microwave)) throw BlobError("blob: bad fixture kind");
    f.kind = static_cast<FixtureKind>(kind);
    f.pos = {r.u16(), r.u16()};
    f.open = r.flag();
    f.active = r.flag();
    f.name = r.str();
    s.fixtures.push_back(std::move(f));
  }
  const std::size_t no = r.u16();
  for (std::size_t i = 0; i < no; ++i) {
    Object o;
    o.id = r.u16();
    o.pos = {r.u16(), r.u16()};
    if (auto c = r.u16(); c != kNone16) o.container = c;
    o.name = r.str();
    s.objects.push_back(std::move(o));
  }
  if (!r.done()) throw BlobError("blob: trailing bytes");
  if (auto bad = check_invariants(s); !bad.empty()) throw BlobError("blob: invalid state: " + bad.front());
  return s;
}

std::uint64_t state_hash(const WorldState& state) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : snapshot(state)) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace vlasteer
