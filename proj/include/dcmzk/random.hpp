#pragma once

// Randomness with exact consumed-bit accounting.
//
// Every party reads its random string through a RandomSource. Bits are
// recorded as they are read, so the prefix a party actually scanned is
// always available. Uniform indices are drawn with fixed-width rejection:
// for a range n, read bit_width(n-1) bits and retry while the value is >= n.
// Rejected draws stay in the consumed record.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>

#include "dcmzk/digest.hpp"
#include "dcmzk/errors.hpp"

namespace dcmzk {

using Bits = std::vector<bool>;

class RandomSource {
 public:
  virtual ~RandomSource() = default;

  // Reads `count` bits (<= 64), first bit read is most significant.
  std::uint64_t bits(unsigned count) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < count; ++i) {
      const bool b = next_bit();
      consumed_.push_back(b);
      v = v << 1 | static_cast<std::uint64_t>(b);
    }
    return v;
  }

  bool bit() { return bits(1) != 0; }

  // Uniform on [0, n).
  virtual std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw PreconditionError("below(0)");
    if (n == 1) return 0;
    const auto width = static_cast<unsigned>(std::bit_width(n - 1));
    for (;;) {
      const auto v = bits(width);
      if (v < n) return v;
    }
  }

  const Bits& consumed() const noexcept { return consumed_; }
  std::size_t consumed_count() const noexcept { return consumed_.size(); }

 protected:
  virtual bool next_bit() = 0;

 private:
  Bits consumed_;
};

using Seed = std::array<std::uint8_t, 32>;

// Party seed from a master seed and a party tag ("prover", "verifier", ...).
inline Seed derive_seed(std::uint64_t master, std::string_view party) {
  std::string material = "dcmzk-seed/";
  for (int i = 7; i >= 0; --i) material += static_cast<char>((master >> (8 * i)) & 0xff);
  material += '/';
  material += party;
  return sha256(material);
}

inline Seed derive_seed(const Seed& parent, std::string_view label, std::uint64_t index) {
  std::string material = "dcmzk-sub/";
  material.append(reinterpret_cast<const char*>(parent.data()), parent.size());
  material += label;
  for (int i = 7; i >= 0; --i) material += static_cast<char>((index >> (8 * i)) & 0xff);
  return sha256(material);
}

inline std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

// ChaCha20 keystream keyed by SHA-256(party seed, "stream", index).
class ChaChaSource final : public RandomSource {
 public:
  ChaChaSource(const Seed& party_seed, std::uint64_t stream_index)
      : key_(derive_seed(party_seed, "stream", stream_index)), ctx_(EVP_CIPHER_CTX_new()) {
    if (!ctx_) throw Error("EVP_CIPHER_CTX_new failed");
    std::uint8_t iv[16] = {};
    if (EVP_EncryptInit_ex(ctx_, cipher(), nullptr, key_.data(), iv) != 1)
      throw Error("ChaCha20 init failed");
  }
  ChaChaSource(const ChaChaSource&) = delete;
  ChaChaSource& operator=(const ChaChaSource&) = delete;
  ~ChaChaSource() override { EVP_CIPHER_CTX_free(ctx_); }

 protected:
  bool next_bit() override {
    if (bit_pos_ == 0) {
      if (byte_pos_ == buffer_.size()) refill();
      current_ = buffer_[byte_pos_++];
      bit_pos_ = 8;
    }
    --bit_pos_;
    return (current_ >> bit_pos_) & 1u;
  }

 private:
  // Fetched once; an implicit fetch per stream dominates setup cost.
  static const EVP_CIPHER* cipher() {
    static const EVP_CIPHER* c = [] {
      const EVP_CIPHER* fetched = EVP_CIPHER_fetch(nullptr, "ChaCha20", nullptr);
      return fetched ? fetched : EVP_chacha20();
    }();
    return c;
  }

  void refill() {
    static const std::array<std::uint8_t, 64> zeros{};
    int out_len = 0;
    if (EVP_EncryptUpdate(ctx_, buffer_.data(), &out_len, zeros.data(),
                          static_cast<int>(zeros.size())) != 1 ||
        out_len != static_cast<int>(buffer_.size()))
      throw Error("ChaCha20 keystream failed");
    byte_pos_ = 0;
  }

  Seed key_;
  EVP_CIPHER_CTX* ctx_;
  std::array<std::uint8_t, 64> buffer_{};
  std::size_t byte_pos_ = 64;
  std::uint8_t current_ = 0;
  unsigned bit_pos_ = 0;
};

// Indexed family of independent streams for one party; stream i serves
// repetition i of a composed protocol.
class RandomStreams {
 public:
  virtual ~RandomStreams() = default;
  virtual RandomSource& stream(std::size_t index) = 0;

  // Concatenation of consumed bits of streams 0..count-1.
  Bits consumed_prefix(std::size_t count) {
    Bits out;
    for (std::size_t i = 0; i < count; ++i) {
      const auto& c = stream(i).consumed();
      out.insert(out.end(), c.begin(), c.end());
    }
    return out;
  }
};

class SeededStreams final : public RandomStreams {
 public:
  explicit SeededStreams(const Seed& seed) : seed_(seed) {}
  const Seed& seed() const noexcept { return seed_; }

  RandomSource& stream(std::size_t index) override {
    auto& slot = streams_[index];
    if (!slot) slot = std::make_unique<ChaChaSource>(seed_, index);
    return *slot;
  }

 private:
  Seed seed_;
  std::map<std::size_t, std::unique_ptr<ChaChaSource>> streams_;
};

// Reads of a fixed random tape r, tracking the longest prefix scanned.
class RandomTape {
 public:
  // Tape drawn lazily from a source, up to `bound` bits.
  RandomTape(RandomSource& source, std::size_t bound) : source_(&source), bound_(bound) {}
  // Fully materialized tape.
  explicit RandomTape(Bits bits) : bits_(std::move(bits)), bound_(bits_.size()) {}

  bool bit(std::size_t pos) {
    if (pos >= bound_) throw PreconditionError("read past the verifier randomness bound");
    while (bits_.size() <= pos) bits_.push_back(source_->bit());
    if (pos + 1 > used_) used_ = pos + 1;
    return bits_[pos];
  }

  std::size_t bound() const noexcept { return bound_; }
  std::size_t used() const noexcept { return used_; }
  void set_used(std::size_t used) noexcept { used_ = used; }
  Bits used_prefix() const { return Bits(bits_.begin(), bits_.begin() + static_cast<long>(used_)); }

 private:
  RandomSource* source_ = nullptr;
  Bits bits_;
  std::size_t bound_ = 0;
  std::size_t used_ = 0;
};

}  // namespace dcmzk
