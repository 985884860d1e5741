#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bmf/bin_matrix.hpp"

namespace bmf {

struct EncodeParams {
    /// Cap on toggle iterations per sample; defaults to the atom count.
    std::optional<std::size_t> h_max;
    /// Stop once the residual weight falls below this.
    std::size_t w_max = 1;
};

namespace detail {

/// Test hook: receives the state after every committed toggle.
struct BmpObserver {
    virtual ~BmpObserver() = default;
    virtual void on_toggle(std::size_t atom, const PackedBits& coeffs, const PackedBits& residual,
                           std::span<const std::int64_t> correlation) = 0;
};

struct BmpOutcome {
    PackedBits coeffs;
    PackedBits residual;
    std::size_t toggles = 0;
};

BmpOutcome bmp_run(const PackedBits& x, const BinMatrix& D, const BinMatrix& gram,
                   std::span<const std::size_t> atom_weights, const PackedBits& a0,
                   const EncodeParams& params, BmpObserver* observer);

}  // namespace detail

/// Greedy coefficient update for one sample: repeatedly toggles the atom with
/// the best association accuracy |g_k| / weight(atom k), committing a toggle
/// only when it strictly lowers the residual weight. The correlation vector
/// g = Dᵀr is maintained exactly across toggles.
///
/// gram must be mod2_gram(D) and atom_weights the column weights of D.
PackedBits bmp_encode(const PackedBits& x, const BinMatrix& D, const BinMatrix& gram,
                      std::span<const std::size_t> atom_weights, const PackedBits& a0,
                      const EncodeParams& params);

struct EncodeResult {
    BinMatrix coefficients;  // one column per sample
    BinMatrix residual;      // data ^ (dictionary ⊗ coefficients)
};

/// Encodes every column of X against D, warm-starting each sample from the
/// matching column of A_init. The Gramm matrix and atom weights are computed
/// once and shared. Columns are independent; the result does not depend on
/// thread count.
EncodeResult encode_all(const BinMatrix& X, const BinMatrix& D, const BinMatrix& A_init,
                        const EncodeParams& params, unsigned threads = 1);

}  // namespace bmf
