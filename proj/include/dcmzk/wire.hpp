#pragma once

// Protocol messages and their byte encoding.
//
// Frame: 4-byte big-endian length L, then L bytes: 1-byte tag + payload.
// Permutation: 2-byte big-endian degree, then one 2-byte big-endian image
// per point (0-indexed). Parallel composition bundles k items into one
// message: a Commit payload is k permutations back to back, a Challenge is
// k bytes, a Response is k (x, y) pairs. An atomic exchange is k = 1.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dcmzk/digest.hpp"
#include "dcmzk/errors.hpp"
#include "dcmzk/permutation.hpp"

namespace dcmzk {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::size_t kMaxPayload = std::size_t{1} << 20;

enum class Tag : std::uint8_t {
  commit = 1,
  challenge = 2,
  response = 3,
  verdict = 4,
  probe = 5,
  answer = 6,
};

struct Commit {
  std::vector<Permutation> t;
  friend bool operator==(const Commit&, const Commit&) = default;
};

// 0 means b = 0; any other byte is the b != 0 branch.
struct Challenge {
  std::vector<std::uint8_t> b;
  friend bool operator==(const Challenge&, const Challenge&) = default;
};

struct Response {
  std::vector<std::pair<Permutation, Permutation>> xy;
  friend bool operator==(const Response&, const Response&) = default;
};

struct Verdict {
  bool accept = false;
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct Probe {
  Permutation t;
  friend bool operator==(const Probe&, const Probe&) = default;
};

struct Answer {
  std::uint8_t a = 0;
  friend bool operator==(const Answer&, const Answer&) = default;
};

// Anything that does not decode: unknown tag, bad length, non-bijective
// images, or a payload over kMaxPayload (payload then dropped).
struct Malformed {
  std::uint8_t tag = 0;
  Bytes payload;
  bool oversize = false;
  friend bool operator==(const Malformed&, const Malformed&) = default;
};

using Message = std::variant<Commit, Challenge, Response, Verdict, Probe, Answer, Malformed>;

// A received frame body (tag + payload) as delivered by a channel.
struct Frame {
  Bytes body;
  bool oversize = false;
  friend bool operator==(const Frame&, const Frame&) = default;
};

namespace wire {

inline void put_u16(Bytes& out, std::size_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_perm(Bytes& out, const Permutation& p) {
  put_u16(out, p.degree());
  for (Point x : p.images()) put_u16(out, x);
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}
  bool done() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }

  bool u16(std::size_t& v) {
    if (remaining() < 2) return false;
    v = static_cast<std::size_t>(data_[pos_]) << 8 | data_[pos_ + 1];
    pos_ += 2;
    return true;
  }

  bool u8(std::uint8_t& v) {
    if (remaining() < 1) return false;
    v = data_[pos_++];
    return true;
  }

  bool perm(std::optional<Permutation>& out) {
    std::size_t degree = 0;
    if (!u16(degree) || degree == 0 || remaining() < 2 * degree) return false;
    std::vector<Point> images(degree);
    for (auto& x : images) {
      std::size_t v = 0;
      u16(v);
      x = static_cast<Point>(v);
    }
    if (!Permutation::is_bijection(images)) return false;
    out.emplace(std::move(images));
    return true;
  }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace wire

inline std::uint8_t tag_of(const Message& m) {
  struct Visitor {
    std::uint8_t operator()(const Commit&) const { return 1; }
    std::uint8_t operator()(const Challenge&) const { return 2; }
    std::uint8_t operator()(const Response&) const { return 3; }
    std::uint8_t operator()(const Verdict&) const { return 4; }
    std::uint8_t operator()(const Probe&) const { return 5; }
    std::uint8_t operator()(const Answer&) const { return 6; }
    std::uint8_t operator()(const Malformed& m) const { return m.tag; }
  };
  return std::visit(Visitor{}, m);
}

// Tag byte followed by payload.
inline Bytes encode_body(const Message& m) {
  Bytes out{tag_of(m)};
  struct Visitor {
    Bytes& out;
    void operator()(const Commit& c) const {
      for (const auto& t : c.t) wire::put_perm(out, t);
    }
    void operator()(const Challenge& c) const { out.insert(out.end(), c.b.begin(), c.b.end()); }
    void operator()(const Response& r) const {
      for (const auto& [x, y] : r.xy) {
        wire::put_perm(out, x);
        wire::put_perm(out, y);
      }
    }
    void operator()(const Verdict& v) const { out.push_back(v.accept ? 1 : 0); }
    void operator()(const Probe& p) const { wire::put_perm(out, p.t); }
    void operator()(const Answer& a) const { out.push_back(a.a); }
    void operator()(const Malformed& m) const { out.insert(out.end(), m.payload.begin(), m.payload.end()); }
  };
  std::visit(Visitor{out}, m);
  return out;
}

// Length-prefixed frame as it appears on the wire.
inline Bytes encode_frame(const Message& m) {
  const Bytes body = encode_body(m);
  Bytes out;
  out.reserve(body.size() + 4);
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(body.size() >> (8 * i)));
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

inline Message decode(const Frame& frame) {
  const auto& body = frame.body;
  if (body.empty()) return Malformed{};
  const std::uint8_t tag = body[0];
  const std::span<const std::uint8_t> payload(body.data() + 1, body.size() - 1);
  Malformed bad{tag, Bytes(payload.begin(), payload.end()), frame.oversize};
  if (frame.oversize || payload.size() > kMaxPayload) {
    bad.payload.clear();
    bad.oversize = true;
    return bad;
  }
  wire::Reader in(payload);
  switch (static_cast<Tag>(tag)) {
    case Tag::commit: {
      Commit c;
      while (!in.done()) {
        std::optional<Permutation> p;
        if (!in.perm(p)) return bad;
        c.t.push_back(std::move(*p));
      }
      if (c.t.empty()) return bad;
      return c;
    }
    case Tag::challenge:
      if (payload.empty()) return bad;
      return Challenge{Bytes(payload.begin(), payload.end())};
    case Tag::response: {
      Response r;
      while (!in.done()) {
        std::optional<Permutation> x, y;
        if (!in.perm(x) || !in.perm(y)) return bad;
        r.xy.emplace_back(std::move(*x), std::move(*y));
      }
      if (r.xy.empty()) return bad;
      return r;
    }
    case Tag::verdict:
      if (payload.size() != 1 || payload[0] > 1) return bad;
      return Verdict{payload[0] == 1};
    case Tag::probe: {
      std::optional<Permutation> p;
      if (!in.perm(p) || !in.done()) return bad;
      return Probe{std::move(*p)};
    }
    case Tag::answer:
      if (payload.size() != 1) return bad;
      return Answer{payload[0]};
  }
  return bad;
}

inline Message decode_body(std::span<const std::uint8_t> body) { return decode(Frame{Bytes(body.begin(), body.end())}); }

// Inverse of encode_frame for a complete frame.
inline Message decode_frame(std::span<const std::uint8_t> frame) {
  if (frame.size() < 4) throw ParseError("frame shorter than its length prefix");
  std::size_t len = 0;
  for (int i = 0; i < 4; ++i) len = len << 8 | frame[static_cast<std::size_t>(i)];
  if (len != frame.size() - 4) throw ParseError("frame length prefix does not match its size");
  return decode_body(frame.subspan(4));
}

inline std::string tag_name(std::uint8_t tag) {
  switch (tag) {
    case 1: return "COMMIT";
    case 2: return "CHALLENGE";
    case 3: return "RESPONSE";
    case 4: return "VERDICT";
    case 5: return "PROBE";
    case 6: return "ANSWER";
    default: return "UNKNOWN";
  }
}

// Human-readable rendering, 1-indexed permutations.
inline std::string describe(const Message& m) {
  struct Visitor {
    std::string operator()(const Commit& c) const {
      std::string s = "t=";
      for (std::size_t i = 0; i < c.t.size(); ++i) s += (i ? "; [" : "[") + to_string(c.t[i]) + "]";
      return s;
    }
    std::string operator()(const Challenge& c) const {
      std::string s = "b=";
      for (std::size_t i = 0; i < c.b.size(); ++i) s += (i ? "," : "") + std::to_string(c.b[i]);
      return s;
    }
    std::string operator()(const Response& r) const {
      std::string s;
      for (std::size_t i = 0; i < r.xy.size(); ++i)
        s += (i ? "; " : "") + std::string("x=[") + to_string(r.xy[i].first) + "] y=[" + to_string(r.xy[i].second) + "]";
      return s;
    }
    std::string operator()(const Verdict& v) const { return v.accept ? "ACCEPT" : "REJECT"; }
    std::string operator()(const Probe& p) const { return "t=[" + to_string(p.t) + "]"; }
    std::string operator()(const Answer& a) const { return "a=" + std::to_string(a.a); }
    std::string operator()(const Malformed& m) const {
      return std::string("malformed") + (m.oversize ? " (oversize)" : "") + " tag=" + std::to_string(m.tag);
    }
  };
  return std::visit(Visitor{}, m);
}

}  // namespace dcmzk
