#pragma once

// Exhaustive enumeration of a randomized computation's coins by replay.
//
// The computation draws every coin through ChoiceScript::choose(arity).
// Each run follows the recorded path and extends it lazily with branch 0;
// after the run the path is advanced like an odometer. A leaf's probability
// is the product of 1/arity over its path, so the result is the exact
// output distribution. Paths longer than the depth limit are cut and their
// mass is reported under the empty outcome key.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dcmzk/random.hpp"
#include "dcmzk/stats.hpp"

namespace dcmzk {

struct EnumerationLimits {
  std::size_t max_depth = 256;
  std::size_t max_leaves = 2'000'000;
};

// Key under which truncated mass is reported. Canonical outcomes are
// never empty.
inline const std::string kTruncatedOutcome{};

class ChoiceScript {
 public:
  struct DepthExceeded {};

  explicit ChoiceScript(std::size_t max_depth) : max_depth_(max_depth) {}

  std::uint64_t choose(std::uint64_t arity) {
    if (arity == 0) throw PreconditionError("choice with no branches");
    if (pos_ == path_.size()) {
      if (path_.size() >= max_depth_) throw DepthExceeded{};
      path_.push_back({0, arity});
    } else if (path_[pos_].arity != arity) {
      throw Error("nondeterministic replay: branch arity changed");
    }
    return path_[pos_++].value;
  }

  // Probability of the path walked in the current run.
  Rational weight() const {
    BigInt denominator = 1;
    for (std::size_t i = 0; i < pos_; ++i) denominator *= path_[i].arity;
    return Rational(1) / Rational(denominator);
  }

  // Moves to the next unexplored path; false when the tree is exhausted.
  bool advance() {
    path_.resize(pos_);
    while (!path_.empty()) {
      auto& last = path_.back();
      if (last.value + 1 < last.arity) {
        ++last.value;
        pos_ = 0;
        return true;
      }
      path_.pop_back();
    }
    pos_ = 0;
    return false;
  }

 private:
  struct Choice {
    std::uint64_t value;
    std::uint64_t arity;
  };
  std::vector<Choice> path_;
  std::size_t pos_ = 0;
  std::size_t max_depth_;
};

// RandomSource whose coins come from a ChoiceScript. In index mode a uniform
// index is a single n-way choice (exact because `below` is exactly uniform);
// in bit mode it goes through the rejection loop on individual bits, so the
// consumed bit record is the real one.
class EnumeratedSource final : public RandomSource {
 public:
  enum class Mode { bits, indices };

  EnumeratedSource(ChoiceScript& script, Mode mode) : script_(&script), mode_(mode) {}

  std::uint64_t below(std::uint64_t n) override {
    if (mode_ == Mode::bits) return RandomSource::below(n);
    if (n == 0) throw PreconditionError("below(0)");
    return script_->choose(n);
  }

 protected:
  bool next_bit() override { return script_->choose(2) != 0; }

 private:
  ChoiceScript* script_;
  Mode mode_;
};

class EnumeratedStreams final : public RandomStreams {
 public:
  EnumeratedStreams(ChoiceScript& script, EnumeratedSource::Mode mode) : script_(&script), mode_(mode) {}

  RandomSource& stream(std::size_t index) override {
    while (streams_.size() <= index) streams_.push_back(std::make_unique<EnumeratedSource>(*script_, mode_));
    return *streams_[index];
  }

 private:
  ChoiceScript* script_;
  EnumeratedSource::Mode mode_;
  std::vector<std::unique_ptr<EnumeratedSource>> streams_;
};

// Runs `run` once per coin path and accumulates its outcome keys.
inline ExactDistribution enumerate_outcomes(const std::function<std::string(ChoiceScript&)>& run,
                                            const EnumerationLimits& limits = {}) {
  ExactDistribution dist;
  ChoiceScript script(limits.max_depth);
  std::size_t leaves = 0;
  do {
    if (++leaves > limits.max_leaves)
      throw StateSpaceTooLarge("coin enumeration exceeded " + std::to_string(limits.max_leaves) + " paths");
    try {
      const std::string outcome = run(script);
      dist.add(outcome, script.weight());
    } catch (const ChoiceScript::DepthExceeded&) {
      dist.add(kTruncatedOutcome, script.weight());
    }
  } while (script.advance());
  return dist;
}

}  // namespace dcmzk
