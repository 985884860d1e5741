#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bmf/packed_bits.hpp"

namespace bmf {

/// Binary matrix packed by column: cols() vectors of rows() bits each.
/// Column storage is the source of truth; a row-packed view and per-column
/// weights are derived lazily and dropped on mutation (a single-column xor
/// patches the weight cache in place instead).
///
/// Reads of a fully materialized matrix are safe from several threads at
/// once; row_view() and col_weights() fill caches and therefore count as
/// mutation until they have been called once. There is no internal locking.
class BinMatrix {
public:
    BinMatrix() = default;

    BinMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), col_(cols, PackedBits(rows)) {}

    static BinMatrix from_columns(std::size_t rows, std::vector<PackedBits> cols);
    static BinMatrix from_rows(std::size_t cols, const std::vector<PackedBits>& rows);

    /// Diagonal pattern: bit (i, i) set for i < min(rows, cols).
    static BinMatrix identity_pattern(std::size_t rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    const PackedBits& col(std::size_t j) const { return col_[j]; }
    bool get(std::size_t i, std::size_t j) const { return col_[j].get(i); }

    void set(std::size_t i, std::size_t j, bool value);
    void set_col(std::size_t j, PackedBits column);
    void xor_col(std::size_t j, const PackedBits& mask);
    void clear();

    std::size_t col_weight(std::size_t j) const { return col_[j].weight(); }
    std::size_t weight() const;

    /// Per-column weights, cached. Kept in sync by xor_col, rebuilt on demand
    /// after any other mutation.
    const std::vector<std::size_t>& col_weights() const;

    /// Per-row weights, computed by accumulating over columns.
    std::vector<std::size_t> row_weights() const;

    /// Row-packed view: rows() vectors of cols() bits. Built on first use.
    const std::vector<PackedBits>& row_view() const;

    BinMatrix transposed() const;

    bool operator==(const BinMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && col_ == o.col_; }
    bool operator!=(const BinMatrix& o) const { return !(*this == o); }

    /// Recomputes everything the caches claim and checks pad bits; test hook.
    bool check_invariants() const;

private:
    void invalidate() const {
        rows_cache_.reset();
        col_weight_cache_.reset();
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<PackedBits> col_;
    mutable std::optional<std::vector<PackedBits>> rows_cache_;
    mutable std::optional<std::vector<std::size_t>> col_weight_cache_;
};

/// XOR of the columns of M selected by the set bits of a (GF(2) mat-vec).
PackedBits mod2_matvec(const BinMatrix& M, const PackedBits& a);

/// GF(2) product, column by column: result col j = M ⊗ (col j of A).
BinMatrix mod2_multiply(const BinMatrix& M, const BinMatrix& A);

/// Gramm matrix over GF(2): bit (k, l) is the parity of |supp(col k) ∩ supp(col l)|.
BinMatrix mod2_gram(const BinMatrix& D);

}  // namespace bmf
