#pragma once

// Permutations of {0, ..., m-1} stored as image arrays.
//
// Product convention: (p * q)(x) = p(q(x)), i.e. q is applied first.
// Text form is 1-indexed: "2 3 1" is the 3-cycle 0->1->2->0.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dcmzk/errors.hpp"

namespace dcmzk {

using Point = std::uint32_t;

// Wire format stores degree and images in two bytes each.
inline constexpr std::size_t kMaxDegree = 65535;

class Permutation {
 public:
  Permutation() : images_{0} {}

  explicit Permutation(std::vector<Point> images) : images_(std::move(images)) {
    if (!is_bijection(images_)) throw PreconditionError("image list is not a permutation");
  }

  static Permutation identity(std::size_t degree) {
    if (degree == 0 || degree > kMaxDegree)
      throw PreconditionError("degree out of range: " + std::to_string(degree));
    Permutation p;
    p.images_.resize(degree);
    std::iota(p.images_.begin(), p.images_.end(), Point{0});
    return p;
  }

  // Product of disjoint-or-not cycles, applied right to left.
  static Permutation from_cycles(std::size_t degree, const std::vector<std::vector<Point>>& cycles) {
    Permutation result = identity(degree);
    for (auto it = cycles.rbegin(); it != cycles.rend(); ++it) {
      Permutation c = identity(degree);
      const auto& cyc = *it;
      std::vector<bool> seen(degree, false);
      for (std::size_t i = 0; i < cyc.size(); ++i) {
        if (cyc[i] >= degree) throw PreconditionError("cycle point out of range");
        if (seen[cyc[i]]) throw PreconditionError("cycle repeats a point");
        seen[cyc[i]] = true;
        c.images_[cyc[i]] = cyc[(i + 1) % cyc.size()];
      }
      result = c * result;
    }
    return result;
  }

  static bool is_bijection(const std::vector<Point>& images) {
    if (images.empty() || images.size() > kMaxDegree) return false;
    std::vector<bool> hit(images.size(), false);
    for (Point x : images) {
      if (x >= images.size() || hit[x]) return false;
      hit[x] = true;
    }
    return true;
  }

  std::size_t degree() const noexcept { return images_.size(); }
  Point operator()(Point x) const { return images_[x]; }
  Point operator[](Point x) const { return images_[x]; }
  const std::vector<Point>& images() const noexcept { return images_; }

  bool is_identity() const noexcept {
    for (std::size_t i = 0; i < images_.size(); ++i)
      if (images_[i] != i) return false;
    return true;
  }

  // (*this * q)(x) = (*this)(q(x))
  Permutation operator*(const Permutation& q) const {
    if (degree() != q.degree()) throw DegreeMismatch(degree(), q.degree());
    Permutation r;
    r.images_.resize(degree());
    for (std::size_t i = 0; i < degree(); ++i) r.images_[i] = images_[q.images_[i]];
    return r;
  }

  Permutation inverse() const {
    Permutation r;
    r.images_.resize(degree());
    for (std::size_t i = 0; i < degree(); ++i) r.images_[images_[i]] = static_cast<Point>(i);
    return r;
  }

  // Smallest moved point, if any.
  std::optional<Point> first_moved() const noexcept {
    for (std::size_t i = 0; i < images_.size(); ++i)
      if (images_[i] != i) return static_cast<Point>(i);
    return std::nullopt;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  // Lexicographic on image arrays.
  friend auto operator<=>(const Permutation& a, const Permutation& b) {
    return a.images_ <=> b.images_;
  }

 private:
  std::vector<Point> images_;
};

inline Permutation compose(const Permutation& p, const Permutation& q) { return p * q; }
inline Permutation inverse(const Permutation& p) { return p.inverse(); }

struct PermutationHash {
  std::size_t operator()(const Permutation& p) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (Point x : p.images()) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return h;
  }
};

// 1-indexed image list, space separated.
inline std::string to_string(const Permutation& p) {
  std::string out;
  for (std::size_t i = 0; i < p.degree(); ++i) {
    if (i) out += ' ';
    out += std::to_string(p(static_cast<Point>(i)) + 1);
  }
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline std::size_t parse_count(std::string_view tok, std::string_view what) {
  std::size_t value = 0;
  if (tok.empty()) throw ParseError("empty " + std::string(what));
  for (char c : tok) {
    if (c < '0' || c > '9') throw ParseError("bad " + std::string(what) + ": '" + std::string(tok) + "'");
    value = value * 10 + static_cast<std::size_t>(c - '0');
    if (value > (std::size_t{1} << 40)) throw ParseError(std::string(what) + " too large");
  }
  return value;
}

}  // namespace detail

// Parses either an image list "2 3 1" or cycle notation "(1 2 3)(4 5)".
// Cycle notation requires the degree; image lists must match it when given.
inline Permutation parse_permutation(std::string_view text, std::optional<std::size_t> degree = {}) {
  text = detail::trim(text);
  if (text.empty()) throw ParseError("empty permutation");
  if (text.front() == '(') {
    if (!degree) throw ParseError("cycle notation needs a known degree");
    std::vector<std::vector<Point>> cycles;
    std::size_t pos = 0;
    while (pos < text.size()) {
      if (text[pos] == ' ' || text[pos] == '\t') {
        ++pos;
        continue;
      }
      if (text[pos] != '(') throw ParseError("expected '(' in cycle notation");
      const auto close = text.find(')', pos);
      if (close == std::string_view::npos) throw ParseError("unterminated cycle");
      std::string inner(text.substr(pos + 1, close - pos - 1));
      std::replace(inner.begin(), inner.end(), ',', ' ');
      std::vector<Point> cyc;
      for (const auto& tok : detail::split_ws(inner)) {
        const auto v = detail::parse_count(tok, "cycle point");
        if (v == 0 || v > *degree) throw ParseError("cycle point out of range: " + tok);
        cyc.push_back(static_cast<Point>(v - 1));
      }
      if (!cyc.empty()) cycles.push_back(std::move(cyc));
      pos = close + 1;
    }
    try {
      return Permutation::from_cycles(*degree, cycles);
    } catch (const PreconditionError& e) {
      throw ParseError(e.what());
    }
  }
  std::vector<Point> images;
  for (const auto& tok : detail::split_ws(text)) {
    const auto v = detail::parse_count(tok, "image");
    if (v == 0) throw ParseError("images are 1-indexed; got 0");
    images.push_back(static_cast<Point>(v - 1));
  }
  if (degree && images.size() != *degree)
    throw ParseError("expected " + std::to_string(*degree) + " images, got " +
                     std::to_string(images.size()));
  if (!Permutation::is_bijection(images)) throw ParseError("not a permutation: " + std::string(text));
  return Permutation(std::move(images));
}

}  // namespace dcmzk
