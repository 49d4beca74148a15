#pragma once

// Double coset membership instances (s, G, H): is s in GH?
//
// Deciding and factoring are brute force over the smaller of the two
// groups, which is all a desk-scale prover needs.

#include <algorithm>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dcmzk/digest.hpp"
#include "dcmzk/errors.hpp"
#include "dcmzk/group.hpp"
#include "dcmzk/permutation.hpp"

namespace dcmzk {

inline constexpr std::size_t kDefaultCap = 100'000;

struct DcmInstance {
  Permutation s;
  GeneratorSet g_group;
  GeneratorSet h_group;

  DcmInstance(Permutation s_, GeneratorSet g, GeneratorSet h)
      : s(std::move(s_)), g_group(std::move(g)), h_group(std::move(h)) {
    if (g_group.degree() != s.degree()) throw DegreeMismatch(s.degree(), g_group.degree());
    if (h_group.degree() != s.degree()) throw DegreeMismatch(s.degree(), h_group.degree());
  }

  std::size_t degree() const noexcept { return s.degree(); }
  friend bool operator==(const DcmInstance&, const DcmInstance&) = default;
};

struct Factorization {
  Permutation g0;
  Permutation h0;
  friend bool operator==(const Factorization&, const Factorization&) = default;
};

// An instance together with the BSGS of both groups; immutable and cheap to
// share across sessions.
class PreparedInstance {
 public:
  explicit PreparedInstance(DcmInstance inst)
      : inst_(std::move(inst)),
        g_(schreier_sims(inst_.g_group)),
        h_(schreier_sims(inst_.h_group)),
        cache_(std::make_shared<Cache>()) {}

  const DcmInstance& instance() const noexcept { return inst_; }
  const Permutation& s() const noexcept { return inst_.s; }
  const Bsgs& g() const noexcept { return g_; }
  const Bsgs& h() const noexcept { return h_; }
  std::size_t degree() const noexcept { return inst_.degree(); }

  bool g_is_smaller() const { return g_.order() <= h_.order(); }

  // Sorted elements of the smaller group, computed once.
  const std::vector<Permutation>& smaller_elements(std::size_t cap) const {
    const auto& small = g_is_smaller() ? g_ : h_;
    if (small.order() > cap) throw OrderExceedsCap(small.order(), cap);
    std::call_once(cache_->once, [&] { cache_->elements = small.enumerate(cap); });
    return cache_->elements;
  }

 private:
  struct Cache {
    std::once_flag once;
    std::vector<Permutation> elements;
  };

  DcmInstance inst_;
  Bsgs g_;
  Bsgs h_;
  std::shared_ptr<Cache> cache_;
};

// (sigma, tau, G, H) -> (tau^-1 sigma, tau^-1 G tau, H). The result is a YES
// instance iff sigma is in G tau H.
inline DcmInstance normalize(const Permutation& sigma, const Permutation& tau, const GeneratorSet& g_group,
                             const GeneratorSet& h_group) {
  if (sigma.degree() != tau.degree()) throw DegreeMismatch(sigma.degree(), tau.degree());
  if (g_group.degree() != sigma.degree()) throw DegreeMismatch(sigma.degree(), g_group.degree());
  if (h_group.degree() != sigma.degree()) throw DegreeMismatch(sigma.degree(), h_group.degree());
  const Permutation tau_inv = tau.inverse();
  std::vector<Permutation> conj;
  conj.reserve(g_group.generators().size());
  for (const auto& g : g_group.generators()) conj.push_back(tau_inv * g * tau);
  return DcmInstance(tau_inv * sigma, GeneratorSet(g_group.degree(), std::move(conj)), h_group);
}

// Every g in G with g^-1 t in H, via the smaller group. Sorted.
inline std::vector<Permutation> left_factors(const PreparedInstance& p, const Permutation& t, std::size_t cap) {
  if (t.degree() != p.degree()) throw DegreeMismatch(p.degree(), t.degree());
  std::vector<Permutation> out;
  if (p.g_is_smaller()) {
    for (const auto& g : p.smaller_elements(cap))
      if (p.h().contains(g.inverse() * t)) out.push_back(g);
  } else {
    for (const auto& h : p.smaller_elements(cap)) {
      Permutation g = t * h.inverse();
      if (p.g().contains(g)) out.push_back(std::move(g));
    }
    std::sort(out.begin(), out.end());
  }
  return out;
}

// Is t in GH?
inline bool in_product(const PreparedInstance& p, const Permutation& t, std::size_t cap = kDefaultCap) {
  if (t.degree() != p.degree()) throw DegreeMismatch(p.degree(), t.degree());
  if (p.g_is_smaller()) {
    for (const auto& g : p.smaller_elements(cap))
      if (p.h().contains(g.inverse() * t)) return true;
  } else {
    for (const auto& h : p.smaller_elements(cap))
      if (p.g().contains(t * h.inverse())) return true;
  }
  return false;
}

inline bool dcm_decide(const PreparedInstance& p, std::size_t cap = kDefaultCap) {
  return in_product(p, p.s(), cap);
}

inline bool dcm_decide(const DcmInstance& inst, std::size_t cap = kDefaultCap) {
  return dcm_decide(PreparedInstance(inst), cap);
}

// Lexicographically least g0 in G with g0^-1 s in H, and h0 = g0^-1 s.
inline Factorization dcm_factorize(const PreparedInstance& p, std::size_t cap = kDefaultCap) {
  const auto factors = left_factors(p, p.s(), cap);
  if (factors.empty()) throw NotInDoubleCoset();
  return {factors.front(), factors.front().inverse() * p.s()};
}

inline Factorization dcm_factorize(const DcmInstance& inst, std::size_t cap = kDefaultCap) {
  return dcm_factorize(PreparedInstance(inst), cap);
}

using Representation = std::pair<Permutation, Permutation>;

// R(t) = {(g,h) : gh = t} or, with_s, R_s(t) = {(g,h) : gsh = t}.
// Exhaustive over G, sorted.
inline std::vector<Representation> representations(const PreparedInstance& p, const Permutation& t, bool with_s,
                                                   std::size_t cap = kDefaultCap) {
  if (t.degree() != p.degree()) throw DegreeMismatch(p.degree(), t.degree());
  std::vector<Representation> out;
  for (auto& g : p.g().enumerate(cap)) {
    const Permutation left = with_s ? g * p.s() : g;
    Permutation h = left.inverse() * t;
    if (p.h().contains(h)) out.emplace_back(std::move(g), std::move(h));
  }
  return out;
}

// alpha(g,h) = (g g0, h0 h) maps R_s(t) bijectively onto R(t).
inline bool alpha_bijection_check(const PreparedInstance& p, const Factorization& fact, const Permutation& t,
                                  std::size_t cap = kDefaultCap) {
  const auto from = representations(p, t, true, cap);
  const auto to = representations(p, t, false, cap);
  if (from.size() != to.size()) return false;
  std::set<Representation> image;
  for (const auto& [g, h] : from) {
    Representation r{g * fact.g0, fact.h0 * h};
    if (!std::binary_search(to.begin(), to.end(), r)) return false;
    image.insert(std::move(r));
  }
  return image.size() == to.size();
}

// Instance file:
//   degree <m>
//   s: <perm>
//   [tau: <perm>]      (4-tuple form, normalized on load)
//   G:
//   <generator lines>
//   H:
//   <generator lines>
// terminated by a blank line or end of input.
inline DcmInstance parse_instance(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::optional<std::size_t> degree;
  std::optional<Permutation> s, tau;
  std::vector<Permutation> g_gens, h_gens;
  enum class Block { header, g, h } block = Block::header;
  bool seen_g = false, seen_h = false, any_content = false;
  while (std::getline(in, raw)) {
    const auto line = detail::trim(raw);
    if (line.empty()) {
      if (any_content && seen_h) break;
      continue;
    }
    if (line.front() == '#') continue;
    any_content = true;
    if (!degree) {
      const auto toks = detail::split_ws(line);
      if (toks.size() != 2 || toks[0] != "degree") throw ParseError("expected 'degree <m>' first");
      degree = detail::parse_count(toks[1], "degree");
      if (*degree == 0 || *degree > kMaxDegree) throw ParseError("degree out of range");
      continue;
    }
    if (line.rfind("s:", 0) == 0) {
      if (s) throw ParseError("duplicate 's:' line");
      s = parse_permutation(line.substr(2), degree);
      continue;
    }
    if (line.rfind("tau:", 0) == 0) {
      if (tau) throw ParseError("duplicate 'tau:' line");
      tau = parse_permutation(line.substr(4), degree);
      continue;
    }
    if (line == "G:") {
      if (seen_g) throw ParseError("duplicate 'G:' block");
      seen_g = true;
      block = Block::g;
      continue;
    }
    if (line == "H:") {
      if (seen_h) throw ParseError("duplicate 'H:' block");
      seen_h = true;
      block = Block::h;
      continue;
    }
    switch (block) {
      case Block::g: g_gens.push_back(parse_permutation(line, degree)); break;
      case Block::h: h_gens.push_back(parse_permutation(line, degree)); break;
      case Block::header: throw ParseError("unexpected line: " + std::string(line));
    }
  }
  if (!degree) throw ParseError("missing 'degree' line");
  if (!s) throw ParseError("missing 's:' line");
  if (!seen_g || !seen_h) throw ParseError("missing 'G:' or 'H:' block");
  GeneratorSet g(*degree, std::move(g_gens)), h(*degree, std::move(h_gens));
  if (tau) return normalize(*s, *tau, g, h);
  return DcmInstance(std::move(*s), std::move(g), std::move(h));
}

inline std::string format_instance(const DcmInstance& inst) {
  std::string out = "degree " + std::to_string(inst.degree()) + "\n";
  out += "s: " + to_string(inst.s) + "\n";
  out += "G:\n";
  for (const auto& g : inst.g_group.generators()) out += to_string(g) + "\n";
  out += "H:\n";
  for (const auto& h : inst.h_group.generators()) out += to_string(h) + "\n";
  out += "\n";
  return out;
}

// SHA-256 of the canonical instance file bytes.
inline Digest256 instance_digest(const DcmInstance& inst) { return sha256(format_instance(inst)); }

}  // namespace dcmzk
