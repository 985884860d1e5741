#include "bmf/bin_matrix.hpp"

#include <stdexcept>

namespace bmf {

BinMatrix BinMatrix::from_columns(std::size_t rows, std::vector<PackedBits> cols) {
    for (const auto& c : cols)
        if (c.size() != rows) throw std::invalid_argument("BinMatrix: column length mismatch");
    BinMatrix m;
    m.rows_ = rows;
    m.cols_ = cols.size();
    m.col_ = std::move(cols);
    return m;
}

BinMatrix BinMatrix::from_rows(std::size_t cols, const std::vector<PackedBits>& rows) {
    BinMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw std::invalid_argument("BinMatrix: row length mismatch");
        rows[i].for_each_set([&](std::size_t j) { m.col_[j].set(i, true); });
    }
    return m;
}

BinMatrix BinMatrix::identity_pattern(std::size_t rows, std::size_t cols) {
    BinMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows && i < cols; ++i) m.col_[i].set(i, true);
    return m;
}

void BinMatrix::set(std::size_t i, std::size_t j, bool value) {
    col_[j].set(i, value);
    invalidate();
}

void BinMatrix::set_col(std::size_t j, PackedBits column) {
    if (column.size() != rows_) throw std::invalid_argument("BinMatrix: column length mismatch");
    col_[j] = std::move(column);
    invalidate();
}

void BinMatrix::xor_col(std::size_t j, const PackedBits& mask) {
    if (col_weight_cache_) {
        // patch instead of rebuild: the xor changes the weight by
        // weight(mask) - 2 * |supp(col) ∩ supp(mask)|
        const std::size_t overlap = int_dot(col_[j], mask);
        (*col_weight_cache_)[j] += mask.weight();
        (*col_weight_cache_)[j] -= 2 * overlap;
    }
    col_[j] ^= mask;
    rows_cache_.reset();
}

void BinMatrix::clear() {
    for (auto& c : col_) c.clear();
    invalidate();
}

std::size_t BinMatrix::weight() const {
    std::size_t total = 0;
    for (const auto& c : col_) total += c.weight();
    return total;
}

const std::vector<std::size_t>& BinMatrix::col_weights() const {
    if (!col_weight_cache_) {
        std::vector<std::size_t> w(cols_);
        for (std::size_t j = 0; j < cols_; ++j) w[j] = col_[j].weight();
        col_weight_cache_ = std::move(w);
    }
    return *col_weight_cache_;
}

std::vector<std::size_t> BinMatrix::row_weights() const {
    std::vector<std::size_t> w(rows_, 0);
    for (const auto& c : col_) c.for_each_set([&](std::size_t i) { ++w[i]; });
    return w;
}

const std::vector<PackedBits>& BinMatrix::row_view() const {
    if (!rows_cache_) {
        std::vector<PackedBits> rows(rows_, PackedBits(cols_));
        for (std::size_t j = 0; j < cols_; ++j) col_[j].for_each_set([&](std::size_t i) { rows[i].set(j, true); });
        rows_cache_ = std::move(rows);
    }
    return *rows_cache_;
}

BinMatrix BinMatrix::transposed() const {
    BinMatrix t(cols_, rows_);
    for (std::size_t j = 0; j < cols_; ++j) col_[j].for_each_set([&](std::size_t i) { t.col_[i].set(j, true); });
    return t;
}

bool BinMatrix::check_invariants() const {
    for (const auto& c : col_) {
        if (c.size() != rows_) return false;
        if (!c.pad_clear()) return false;
    }
    if (col_weight_cache_) {
        if (col_weight_cache_->size() != cols_) return false;
        for (std::size_t j = 0; j < cols_; ++j)
            if ((*col_weight_cache_)[j] != col_[j].weight()) return false;
    }
    if (rows_cache_) {
        if (rows_cache_->size() != rows_) return false;
        for (std::size_t i = 0; i < rows_; ++i) {
            if ((*rows_cache_)[i].size() != cols_) return false;
            if (!(*rows_cache_)[i].pad_clear()) return false;
            for (std::size_t j = 0; j < cols_; ++j)
                if ((*rows_cache_)[i].get(j) != col_[j].get(i)) return false;
        }
    }
    return true;
}

PackedBits mod2_matvec(const BinMatrix& M, const PackedBits& a) {
    if (a.size() != M.cols()) throw std::invalid_argument("mod2_matvec: length mismatch");
    PackedBits out(M.rows());
    a.for_each_set([&](std::size_t k) { out ^= M.col(k); });
    return out;
}

BinMatrix mod2_multiply(const BinMatrix& M, const BinMatrix& A) {
    if (A.rows() != M.cols()) throw std::invalid_argument("mod2_multiply: dimension mismatch");
    std::vector<PackedBits> cols;
    cols.reserve(A.cols());
    for (std::size_t j = 0; j < A.cols(); ++j) cols.push_back(mod2_matvec(M, A.col(j)));
    return BinMatrix::from_columns(M.rows(), std::move(cols));
}

BinMatrix mod2_gram(const BinMatrix& D) {
    const std::size_t p = D.cols();
    BinMatrix g(p, p);
    for (std::size_t k = 0; k < p; ++k) {
        for (std::size_t l = k; l < p; ++l) {
            if (mod2_dot(D.col(k), D.col(l))) {
                g.set(l, k, true);
                if (l != k) g.set(k, l, true);
            }
        }
    }
    return g;
}

}  // namespace bmf
