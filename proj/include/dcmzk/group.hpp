#pragma once

// Generator-defined permutation groups and a deterministic Schreier-Sims
// construction of a base and strong generating set (BSGS).
//
// Base points are always the smallest point moved by the generator that
// forces a new level, so the BSGS, the enumeration order and every
// transcript derived from sampling are reproducible.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "dcmzk/errors.hpp"
#include "dcmzk/permutation.hpp"
#include "dcmzk/random.hpp"

namespace dcmzk {

class GeneratorSet {
 public:
  explicit GeneratorSet(std::size_t degree = 1, std::vector<Permutation> generators = {})
      : degree_(degree), generators_(std::move(generators)) {
    if (degree_ == 0 || degree_ > kMaxDegree) throw PreconditionError("degree out of range");
    for (const auto& g : generators_)
      if (g.degree() != degree_) throw DegreeMismatch(degree_, g.degree());
  }

  std::size_t degree() const noexcept { return degree_; }
  const std::vector<Permutation>& generators() const noexcept { return generators_; }
  bool empty() const noexcept { return generators_.empty(); }

  friend bool operator==(const GeneratorSet&, const GeneratorSet&) = default;

 private:
  std::size_t degree_;
  std::vector<Permutation> generators_;
};

class Bsgs {
 public:
  // One stabilizer-chain level: base point, its orbit under the level's
  // stabilizer (sorted), and coset representatives u with u(base) = orbit[i].
  struct Level {
    Point base;
    std::vector<Point> orbit;
    std::vector<Permutation> representatives;
    std::vector<std::int32_t> slot;  // point -> index into orbit, -1 if absent

    const Permutation* representative_for(Point beta) const {
      const auto i = slot[beta];
      return i < 0 ? nullptr : &representatives[static_cast<std::size_t>(i)];
    }
  };

  std::size_t degree() const noexcept { return degree_; }
  const std::vector<Level>& levels() const noexcept { return levels_; }
  const std::vector<Permutation>& strong_generators() const noexcept { return strong_; }
  const BigInt& order() const noexcept { return order_; }

  std::vector<Point> base() const {
    std::vector<Point> b;
    for (const auto& l : levels_) b.push_back(l.base);
    return b;
  }

  // Strips p through the chain. Returns the residue and the level where
  // sifting stopped (levels().size() if it went through every level).
  std::pair<Permutation, std::size_t> sift(Permutation p, std::size_t from_level = 0) const {
    for (std::size_t i = from_level; i < levels_.size(); ++i) {
      const auto* u = levels_[i].representative_for(p(levels_[i].base));
      if (!u) return {std::move(p), i};
      p = u->inverse() * p;
    }
    return {std::move(p), levels_.size()};
  }

  bool contains(const Permutation& p) const {
    if (p.degree() != degree_) throw DegreeMismatch(degree_, p.degree());
    auto [residue, level] = sift(p);
    return level == levels_.size() && residue.is_identity();
  }

  // Product of one independently uniform representative per level,
  // u_1 * u_2 * ... * u_k. Each element arises from exactly one tuple.
  Permutation uniform_sample(RandomSource& rng) const {
    Permutation g = Permutation::identity(degree_);
    for (const auto& level : levels_) {
      const auto i = rng.below(level.orbit.size());
      g = g * level.representatives[i];
    }
    return g;
  }

  // Element for a given tuple of transversal indices (one per level).
  Permutation element_at(const std::vector<std::size_t>& indices) const {
    if (indices.size() != levels_.size()) throw PreconditionError("index tuple length differs from base length");
    Permutation g = Permutation::identity(degree_);
    for (std::size_t i = 0; i < levels_.size(); ++i) g = g * levels_[i].representatives.at(indices[i]);
    return g;
  }

  // Every element, sorted lexicographically by image array.
  std::vector<Permutation> enumerate(std::size_t cap) const {
    if (order_ > cap) throw OrderExceedsCap(order_, cap);
    std::vector<Permutation> out{Permutation::identity(degree_)};
    for (auto it = levels_.rbegin(); it != levels_.rend(); ++it) {
      std::vector<Permutation> next;
      next.reserve(out.size() * it->representatives.size());
      for (const auto& u : it->representatives)
        for (const auto& g : out) next.push_back(u * g);
      out = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  friend Bsgs schreier_sims(const GeneratorSet& gens);

 private:
  std::size_t degree_ = 1;
  std::vector<Level> levels_;
  std::vector<Permutation> strong_;
  BigInt order_ = 1;
};

namespace detail {

// Generators among `strong` fixing base[0..level-1].
inline std::vector<const Permutation*> level_generators(const std::vector<Permutation>& strong,
                                                        const std::vector<Point>& base, std::size_t level) {
  std::vector<const Permutation*> out;
  for (const auto& s : strong) {
    bool fixes = true;
    for (std::size_t j = 0; j < level && fixes; ++j) fixes = s(base[j]) == base[j];
    if (fixes) out.push_back(&s);
  }
  return out;
}

inline Bsgs::Level build_level(std::size_t degree, Point base_point,
                               const std::vector<const Permutation*>& gens) {
  Bsgs::Level level;
  level.base = base_point;
  std::vector<std::optional<Permutation>> reps(degree);
  reps[base_point] = Permutation::identity(degree);
  std::vector<Point> queue{base_point};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Point beta = queue[head];
    for (const auto* x : gens) {
      const Point gamma = (*x)(beta);
      if (!reps[gamma]) {
        reps[gamma] = *x * *reps[beta];
        queue.push_back(gamma);
      }
    }
  }
  std::sort(queue.begin(), queue.end());
  level.orbit = queue;
  level.slot.assign(degree, -1);
  for (std::size_t i = 0; i < queue.size(); ++i) {
    level.slot[queue[i]] = static_cast<std::int32_t>(i);
    level.representatives.push_back(std::move(*reps[queue[i]]));
  }
  return level;
}

}  // namespace detail

// Deterministic Schreier-Sims: every Schreier generator of every level is
// sifted through the levels below it; a non-trivial residue becomes a new
// strong generator and the affected levels are rebuilt.
inline Bsgs schreier_sims(const GeneratorSet& gens) {
  Bsgs bsgs;
  bsgs.degree_ = gens.degree();
  const std::size_t degree = gens.degree();

  std::vector<Point> base;
  std::vector<Permutation> strong;
  {
    std::unordered_set<Permutation, PermutationHash> seen;
    for (const auto& g : gens.generators())
      if (!g.is_identity() && seen.insert(g).second) strong.push_back(g);
  }
  auto extend_base_for = [&](const Permutation& g) {
    bool fixes_all = true;
    for (Point b : base) fixes_all = fixes_all && g(b) == b;
    if (fixes_all) base.push_back(*g.first_moved());
  };
  for (const auto& s : strong) extend_base_for(s);

  std::vector<Bsgs::Level> levels;
  auto rebuild_from = [&](std::size_t first) {
    levels.resize(first);
    for (std::size_t i = first; i < base.size(); ++i)
      levels.push_back(detail::build_level(degree, base[i], detail::level_generators(strong, base, i)));
  };
  rebuild_from(0);

  auto sift_from = [&](Permutation p, std::size_t from) -> std::pair<Permutation, std::size_t> {
    for (std::size_t i = from; i < levels.size(); ++i) {
      const auto* u = levels[i].representative_for(p(levels[i].base));
      if (!u) return {std::move(p), i};
      p = u->inverse() * p;
    }
    return {std::move(p), levels.size()};
  };

  std::size_t i = base.size();
  while (i > 0) {
    const std::size_t level = i - 1;
    bool added = false;
    const auto gens_here = detail::level_generators(strong, base, level);
    const auto& lv = levels[level];
    for (std::size_t oi = 0; oi < lv.orbit.size() && !added; ++oi) {
      const Point beta = lv.orbit[oi];
      const Permutation& u_beta = lv.representatives[oi];
      for (const auto* x : gens_here) {
        const Point gamma = (*x)(beta);
        const Permutation xu = *x * u_beta;
        const Permutation& u_gamma = *lv.representative_for(gamma);
        if (xu == u_gamma) continue;  // tree edge, trivial Schreier generator
        Permutation schreier = u_gamma.inverse() * xu;
        auto [residue, stop] = sift_from(std::move(schreier), level + 1);
        if (stop == levels.size() && residue.is_identity()) continue;
        if (stop == levels.size()) base.push_back(*residue.first_moved());
        strong.push_back(std::move(residue));
        rebuild_from(level + 1);
        i = stop + 1;
        added = true;
        break;
      }
    }
    if (!added) --i;
  }

  bsgs.levels_ = std::move(levels);
  bsgs.strong_ = std::move(strong);
  for (const auto& l : bsgs.levels_) bsgs.order_ *= l.orbit.size();
  return bsgs;
}

inline bool contains(const Bsgs& bsgs, const Permutation& p) { return bsgs.contains(p); }

inline Permutation uniform_sample(const Bsgs& bsgs, RandomSource& rng) { return bsgs.uniform_sample(rng); }

inline std::vector<Permutation> enumerate(const Bsgs& bsgs, std::size_t cap) { return bsgs.enumerate(cap); }

// G n H by enumerating the smaller group and filtering by membership in
// the other. Returns the full element list as generators.
inline GeneratorSet intersect_bruteforce(const Bsgs& g, const Bsgs& h, std::size_t cap) {
  if (g.degree() != h.degree()) throw DegreeMismatch(g.degree(), h.degree());
  const bool g_smaller = g.order() <= h.order();
  const Bsgs& small = g_smaller ? g : h;
  const Bsgs& other = g_smaller ? h : g;
  std::vector<Permutation> common;
  for (auto& x : small.enumerate(cap))
    if (other.contains(x)) common.push_back(std::move(x));
  return GeneratorSet(g.degree(), std::move(common));
}

// Text form: "degree <m>" then one permutation per line (image list or
// cycle notation). Blank lines and lines starting with '#' are skipped.
inline GeneratorSet parse_group(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::optional<std::size_t> degree;
  std::vector<Permutation> gens;
  while (std::getline(in, line)) {
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!degree) {
      const auto toks = detail::split_ws(t);
      if (toks.size() != 2 || toks[0] != "degree") throw ParseError("expected 'degree <m>'");
      degree = detail::parse_count(toks[1], "degree");
      if (*degree == 0 || *degree > kMaxDegree) throw ParseError("degree out of range");
      continue;
    }
    gens.push_back(parse_permutation(t, degree));
  }
  if (!degree) throw ParseError("missing 'degree' line");
  return GeneratorSet(*degree, std::move(gens));
}

inline std::string format_group(const GeneratorSet& g) {
  std::string out = "degree " + std::to_string(g.degree()) + "\n";
  for (const auto& p : g.generators()) out += to_string(p) + "\n";
  return out;
}

}  // namespace dcmzk
