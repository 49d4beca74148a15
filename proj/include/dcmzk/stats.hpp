#pragma once

// Exact and empirical distributions over canonical outcome byte strings.
// Everything that claims "identical distributions" is checked with exact
// rationals; floating point only appears in the chi-square and Monte Carlo
// paths.

#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "dcmzk/digest.hpp"
#include "dcmzk/errors.hpp"

namespace dcmzk {

using Rational = boost::multiprecision::cpp_rational;

inline std::string to_fraction(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

class ExactDistribution {
 public:
  using Map = std::map<std::string, Rational>;

  void add(const std::string& outcome, const Rational& probability) {
    if (probability == 0) return;
    auto& slot = outcomes_[outcome];
    slot += probability;
    if (slot == 0) outcomes_.erase(outcome);
  }

  Rational probability(const std::string& outcome) const {
    const auto it = outcomes_.find(outcome);
    return it == outcomes_.end() ? Rational(0) : it->second;
  }

  Rational total() const {
    Rational sum = 0;
    for (const auto& [_, p] : outcomes_) sum += p;
    return sum;
  }

  const Map& outcomes() const noexcept { return outcomes_; }
  std::size_t size() const noexcept { return outcomes_.size(); }

  friend bool operator==(const ExactDistribution&, const ExactDistribution&) = default;

 private:
  Map outcomes_;
};

// Half the L1 distance, exactly.
inline Rational tv_distance(const ExactDistribution& p, const ExactDistribution& q) {
  Rational sum = 0;
  auto pi = p.outcomes().begin();
  auto qi = q.outcomes().begin();
  while (pi != p.outcomes().end() || qi != q.outcomes().end()) {
    if (qi == q.outcomes().end() || (pi != p.outcomes().end() && pi->first < qi->first)) {
      sum += abs(pi->second);
      ++pi;
    } else if (pi == p.outcomes().end() || qi->first < pi->first) {
      sum += abs(qi->second);
      ++qi;
    } else {
      sum += abs(pi->second - qi->second);
      ++pi;
      ++qi;
    }
  }
  return sum / 2;
}

struct EmpiricalSample {
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;

  void add(const std::string& outcome, std::uint64_t n = 1) {
    counts[outcome] += n;
    total += n;
  }

  void merge(const EmpiricalSample& other) {
    for (const auto& [k, n] : other.counts) add(k, n);
  }

  double frequency(const std::string& outcome) const {
    const auto it = counts.find(outcome);
    return it == counts.end() || total == 0 ? 0.0
                                            : static_cast<double>(it->second) / static_cast<double>(total);
  }
};

// Plug-in TV distance between an empirical sample and an exact law.
inline double empirical_tv(const EmpiricalSample& sample, const ExactDistribution& exact) {
  double sum = 0;
  for (const auto& [k, p] : exact.outcomes())
    sum += std::abs(sample.frequency(k) - static_cast<double>(p));
  for (const auto& [k, n] : sample.counts)
    if (!exact.outcomes().count(k)) sum += sample.frequency(k);
  return sum / 2;
}

// Plug-in TV distance between two empirical samples.
inline double empirical_tv(const EmpiricalSample& a, const EmpiricalSample& b) {
  double sum = 0;
  for (const auto& [k, _] : a.counts) sum += std::abs(a.frequency(k) - b.frequency(k));
  for (const auto& [k, _] : b.counts)
    if (!a.counts.count(k)) sum += b.frequency(k);
  return sum / 2;
}

// Largest |freq - p| / sigma over the support, sigma = sqrt(p(1-p)/N).
// Outcomes outside the support count as infinitely far.
inline double max_standardized_deviation(const EmpiricalSample& sample, const ExactDistribution& exact) {
  double worst = 0;
  const double n = static_cast<double>(sample.total);
  for (const auto& [k, pr] : exact.outcomes()) {
    const double p = static_cast<double>(pr);
    const double sigma = std::sqrt(p * (1 - p) / n);
    const double dev = std::abs(sample.frequency(k) - p);
    if (sigma == 0) {
      if (dev > 0) return INFINITY;
      continue;
    }
    worst = std::max(worst, dev / sigma);
  }
  for (const auto& [k, _] : sample.counts)
    if (!exact.outcomes().count(k)) return INFINITY;
  return worst;
}

struct ChiSquareResult {
  double statistic = 0;
  double critical = 0;
  std::size_t degrees_of_freedom = 0;
  bool rejected = false;
};

// Pearson test against the uniform law on `cells` cells. Cells absent from
// the sample count as zero observations.
inline ChiSquareResult chi_square_uniform(const EmpiricalSample& sample, std::size_t cells,
                                          double significance = 0.001) {
  if (cells < 2) throw PreconditionError("chi-square needs at least two cells");
  if (sample.counts.size() > cells) throw PreconditionError("sample has more outcomes than cells");
  const double expected = static_cast<double>(sample.total) / static_cast<double>(cells);
  if (expected < 5) throw PreconditionError("insufficient sample: expected count per cell below 5");
  ChiSquareResult r;
  for (const auto& [_, n] : sample.counts) {
    const double d = static_cast<double>(n) - expected;
    r.statistic += d * d / expected;
  }
  r.statistic += static_cast<double>(cells - sample.counts.size()) * expected;
  r.degrees_of_freedom = cells - 1;
  boost::math::chi_squared dist(static_cast<double>(r.degrees_of_freedom));
  r.critical = boost::math::quantile(boost::math::complement(dist, significance));
  r.rejected = r.statistic > r.critical;
  return r;
}

struct AcceptanceRate {
  std::uint64_t accepted = 0;
  std::uint64_t trials = 0;
  double rate = 0;
  double half_width = 0;  // 3 sigma

  bool within(double expected) const { return std::abs(rate - expected) <= half_width_for(expected); }
  // 3 sigma of the binomial at the expected rate; used when p-hat may be 0.
  double half_width_for(double expected) const {
    return 3 * std::sqrt(expected * (1 - expected) / static_cast<double>(trials));
  }
};

inline AcceptanceRate acceptance_rate(const std::function<bool(std::uint64_t trial)>& session,
                                      std::uint64_t trials) {
  if (trials == 0) throw PreconditionError("acceptance_rate needs at least one trial");
  AcceptanceRate r;
  r.trials = trials;
  for (std::uint64_t i = 0; i < trials; ++i)
    if (session(i)) ++r.accepted;
  r.rate = static_cast<double>(r.accepted) / static_cast<double>(trials);
  r.half_width = 3 * std::sqrt(r.rate * (1 - r.rate) / static_cast<double>(trials));
  return r;
}

// Table of outcome key (hex), exact fraction and optional empirical
// frequency, followed by the summary line "TV=<num>/<den>" when a second
// distribution is given.
inline std::string distribution_report(const ExactDistribution& p, const ExactDistribution* q = nullptr) {
  std::ostringstream out;
  std::map<std::string, std::pair<Rational, Rational>> rows;
  for (const auto& [k, v] : p.outcomes()) rows[k].first = v;
  if (q)
    for (const auto& [k, v] : q->outcomes()) rows[k].second = v;
  for (const auto& [k, v] : rows) {
    out << (k.empty() ? std::string("<truncated>")
                      : to_hex(std::span(reinterpret_cast<const std::uint8_t*>(k.data()), k.size())))
        << ' ' << to_fraction(v.first);
    if (q) out << ' ' << to_fraction(v.second);
    out << '\n';
  }
  if (q) out << "TV=" << to_fraction(tv_distance(p, *q)) << '\n';
  return out.str();
}

}  // namespace dcmzk
