#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace bmf {

/// Fixed-length bit vector packed into 64-bit words, MSB-first within each
/// word. Pad bits beyond size() are kept at zero by every operation, so
/// whole-word comparisons and popcounts are valid without masking.
class PackedBits {
public:
    using word_type = std::uint64_t;
    static constexpr std::size_t word_bits = 64;

    PackedBits() = default;

    explicit PackedBits(std::size_t len) : len_(len), words_((len + word_bits - 1) / word_bits, 0) {}

    static PackedBits ones(std::size_t len) {
        PackedBits v(len);
        for (auto& w : v.words_) w = ~word_type{0};
        v.mask_pad();
        return v;
    }

    /// Adopts raw words (MSB-first layout); pad bits are forced to zero.
    static PackedBits from_words(std::size_t len, std::vector<word_type> words) {
        if (words.size() != (len + word_bits - 1) / word_bits)
            throw std::invalid_argument("PackedBits: word count mismatch");
        PackedBits v;
        v.len_ = len;
        v.words_ = std::move(words);
        v.mask_pad();
        return v;
    }

    std::size_t size() const { return len_; }
    bool empty() const { return len_ == 0; }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (63 - (i & 63))) & 1u; }

    void set(std::size_t i, bool value) {
        const word_type m = word_type{1} << (63 - (i & 63));
        if (value)
            words_[i >> 6] |= m;
        else
            words_[i >> 6] &= ~m;
    }

    void flip(std::size_t i) { words_[i >> 6] ^= word_type{1} << (63 - (i & 63)); }

    void clear() { std::fill(words_.begin(), words_.end(), word_type{0}); }

    /// Number of set bits.
    std::size_t weight() const {
        std::size_t c = 0;
        for (word_type w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    bool any() const {
        for (word_type w : words_)
            if (w) return true;
        return false;
    }

    PackedBits& operator^=(const PackedBits& o) {
        require_same_length(o);
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] ^= o.words_[k];
        return *this;
    }

    PackedBits& operator&=(const PackedBits& o) {
        require_same_length(o);
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
        return *this;
    }

    /// this &= ~o, bit-wise difference of supports.
    PackedBits& and_not(const PackedBits& o) {
        require_same_length(o);
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= ~o.words_[k];
        mask_pad();
        return *this;
    }

    friend PackedBits operator^(PackedBits a, const PackedBits& b) { return a ^= b; }
    friend PackedBits operator&(PackedBits a, const PackedBits& b) { return a &= b; }

    bool operator==(const PackedBits&) const = default;

    std::span<const word_type> words() const { return words_; }

    /// Calls fn(i) for every set bit, in increasing position order.
    template <typename Fn>
    void for_each_set(Fn&& fn) const {
        for (std::size_t k = 0; k < words_.size(); ++k) {
            word_type w = words_[k];
            while (w) {
                const int lead = std::countl_zero(w);
                fn(k * word_bits + static_cast<std::size_t>(lead));
                w &= ~(word_type{1} << (63 - lead));
            }
        }
    }

    /// True when all bits past size() are zero. Every mutator maintains this.
    bool pad_clear() const {
        if (len_ % word_bits == 0) return true;
        if (words_.empty()) return true;
        const word_type pad = ~word_type{0} >> (len_ % word_bits);
        return (words_.back() & pad) == 0;
    }

private:
    void require_same_length(const PackedBits& o) const {
        if (len_ != o.len_) throw std::invalid_argument("PackedBits: length mismatch");
    }

    void mask_pad() {
        if (len_ % word_bits != 0 && !words_.empty()) words_.back() &= ~(~word_type{0} >> (len_ % word_bits));
    }

    std::size_t len_ = 0;
    std::vector<word_type> words_;

    friend std::size_t int_dot(const PackedBits&, const PackedBits&);
    friend int mod2_dot(const PackedBits&, const PackedBits&);
    friend bool bool_dot(const PackedBits&, const PackedBits&);
    friend std::size_t hamming(const PackedBits&, const PackedBits&);
};

/// Standard integer inner product of 0/1 vectors: |supp(x) ∩ supp(y)|.
inline std::size_t int_dot(const PackedBits& x, const PackedBits& y) {
    x.require_same_length(y);
    std::size_t c = 0;
    for (std::size_t k = 0; k < x.words_.size(); ++k)
        c += static_cast<std::size_t>(std::popcount(x.words_[k] & y.words_[k]));
    return c;
}

/// Inner product over GF(2): parity of the support overlap.
inline int mod2_dot(const PackedBits& x, const PackedBits& y) {
    x.require_same_length(y);
    PackedBits::word_type acc = 0;
    for (std::size_t k = 0; k < x.words_.size(); ++k) acc ^= x.words_[k] & y.words_[k];
    return std::popcount(acc) & 1;
}

/// Boolean inner product: 1 when the supports overlap at all. Early exit.
inline bool bool_dot(const PackedBits& x, const PackedBits& y) {
    x.require_same_length(y);
    for (std::size_t k = 0; k < x.words_.size(); ++k)
        if (x.words_[k] & y.words_[k]) return true;
    return false;
}

/// weight(x ^ y) without materializing the xor.
inline std::size_t hamming(const PackedBits& x, const PackedBits& y) {
    x.require_same_length(y);
    std::size_t c = 0;
    for (std::size_t k = 0; k < x.words_.size(); ++k)
        c += static_cast<std::size_t>(std::popcount(x.words_[k] ^ y.words_[k]));
    return c;
}

}  // namespace bmf
