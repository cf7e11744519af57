#pragma once

// Packed bit vector with LSB-first addressing: bit i of word w is global
// position 64*w + i. Bare-bones on purpose; the quantizer and codec layers
// define what the bits mean.

#include <bit>
#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace wfl {

class BitVec {
  public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : size_(n), words_((n + 63) / 64, 0) {}

    std::size_t size() const { return size_; }

    bool get(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }
    void set(std::size_t i, bool v) {
        std::uint64_t mask = 1ull << (i & 63);
        if (v)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }
    void flip(std::size_t i) { words_[i >> 6] ^= 1ull << (i & 63); }

    const std::vector<std::uint64_t>& words() const { return words_; }
    std::vector<std::uint64_t>& words() { return words_; }

    bool operator==(const BitVec& o) const {
        return size_ == o.size_ && words_ == o.words_;
    }

    std::size_t hamming_distance(const BitVec& o) const {
        if (size_ != o.size_)
            throw std::invalid_argument("BitVec: length mismatch");
        std::size_t d = 0;
        for (std::size_t w = 0; w < words_.size(); ++w)
            d += std::popcount(words_[w] ^ o.words_[w]);
        return d;
    }

    std::size_t count_ones() const {
        std::size_t c = 0;
        for (std::uint64_t w : words_) c += std::popcount(w);
        return c;
    }

  private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace wfl
