#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcmzk/permutation.hpp"
#include "dcmzk/random.hpp"
#include "dcmzk/wire.hpp"

namespace dcmzk {

// What the verifier sees: the prefix of its random string it actually
// scanned, and every prover message in order. Verifier messages are left
// out; they are computable from the rest.
struct View {
  Bits consumed_randomness;
  std::vector<Message> prover_messages;

  // Distribution key: 4-byte big-endian bit count, the bits packed MSB
  // first, then each prover message as a length-prefixed wire frame.
  std::string canonical() const {
    std::string out;
    const auto n = consumed_randomness.size();
    for (int i = 3; i >= 0; --i) out += static_cast<char>((n >> (8 * i)) & 0xff);
    std::uint8_t acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      acc = static_cast<std::uint8_t>(acc << 1 | consumed_randomness[i]);
      if (i % 8 == 7) {
        out += static_cast<char>(acc);
        acc = 0;
      }
    }
    if (n % 8) out += static_cast<char>(acc << (8 - n % 8));
    for (const auto& m : prover_messages) {
      const auto frame = encode_frame(m);
      out.append(reinterpret_cast<const char*>(frame.data()), frame.size());
    }
    return out;
  }

  friend bool operator==(const View&, const View&) = default;
};

inline std::string bits_to_string(const Bits& bits) {
  std::string s;
  for (bool b : bits) s += b ? '1' : '0';
  return s;
}

inline std::string describe(const View& v) {
  std::string out = "r' = " + (v.consumed_randomness.empty() ? std::string("(empty)") : bits_to_string(v.consumed_randomness)) + "\n";
  for (const auto& m : v.prover_messages) out += tag_name(tag_of(m)) + " " + describe(m) + "\n";
  return out;
}

// One completed atomic execution as seen by a sequential verifier: the
// commitment and the opened pair.
struct StageRecord {
  Permutation t;
  Permutation g;
  Permutation h;
  friend bool operator==(const StageRecord&, const StageRecord&) = default;
};

}  // namespace dcmzk
