#include "bmf/mdl.hpp"

#include <bit>
#include <chrono>
#include <stdexcept>

#include "bmf/kprox.hpp"

namespace bmf {

namespace {

std::uint64_t ceil_log2_u64(std::uint64_t x) {
    // x >= 1
    return static_cast<std::uint64_t>(std::bit_width(x - 1));
}

// Unsigned big integer, little-endian 64-bit limbs, value >= 1. Only what
// the running-binomial evaluation needs.
class BigUint {
public:
    explicit BigUint(std::uint64_t v) : limbs_{v} {}

    void mul_small(std::uint64_t x) {
        unsigned __int128 carry = 0;
        for (auto& limb : limbs_) {
            const unsigned __int128 t = static_cast<unsigned __int128>(limb) * x + carry;
            limb = static_cast<std::uint64_t>(t);
            carry = t >> 64;
        }
        while (carry) {
            limbs_.push_back(static_cast<std::uint64_t>(carry));
            carry >>= 64;
        }
    }

    // Exact division by a small divisor (no remainder by construction).
    void div_small(std::uint64_t x) {
        unsigned __int128 rem = 0;
        for (std::size_t k = limbs_.size(); k-- > 0;) {
            const unsigned __int128 cur = (rem << 64) | limbs_[k];
            limbs_[k] = static_cast<std::uint64_t>(cur / x);
            rem = cur % x;
        }
        while (limbs_.size() > 1 && limbs_.back() == 0) limbs_.pop_back();
    }

    std::uint64_t ceil_log2() const {
        const std::size_t top = limbs_.size() - 1;
        const std::uint64_t bits = 64 * top + std::bit_width(limbs_[top]);
        bool pow2 = std::has_single_bit(limbs_[top]);
        for (std::size_t k = 0; pow2 && k < top; ++k) pow2 = limbs_[k] == 0;
        return pow2 ? bits - 1 : bits;
    }

private:
    std::vector<std::uint64_t> limbs_;
};

std::uint64_t ceil_log2_binomial(std::size_t n, std::size_t r) {
    if (r > n - r) r = n - r;
    if (r == 0) return 0;
    if (n <= 64) {
        unsigned __int128 c = 1;
        for (std::size_t i = 1; i <= r; ++i) {
            c *= n - r + i;
            c /= i;
        }
        return ceil_log2_u64(static_cast<std::uint64_t>(c));
    }
    BigUint c(1);
    for (std::size_t i = 1; i <= r; ++i) {
        c.mul_small(n - r + i);
        c.div_small(i);
    }
    return c.ceil_log2();
}

// All ceil(log2 binomial(n, r)) for r = 0..n, from the running product
// C(n, r+1) = C(n, r) (n - r) / (r + 1).
std::vector<std::uint64_t> ceil_log2_binomial_table(std::size_t n) {
    std::vector<std::uint64_t> table(n + 1);
    BigUint c(1);
    table[0] = 0;
    for (std::size_t r = 0; r + 1 <= n; ++r) {
        c.mul_small(n - r);
        c.div_small(r + 1);
        table[r + 1] = c.ceil_log2();
    }
    return table;
}

}  // namespace

std::uint64_t enum_codelength(std::size_t n, std::size_t r) {
    if (n < 1) throw std::invalid_argument("enum_codelength: length must be >= 1");
    if (r > n) throw std::invalid_argument("enum_codelength: weight exceeds length");
    return ceil_log2_u64(n) + ceil_log2_binomial(n, r);
}

CodelengthReport model_codelength(const BinMatrix& D, const BinMatrix& A, const BinMatrix& E) {
    CodelengthReport report;
    const std::size_t n = E.cols();

    if (E.rows() > 0 && n > 0) {
        const auto table = ceil_log2_binomial_table(n);
        const std::uint64_t header = ceil_log2_u64(n);
        for (std::size_t w : E.row_weights()) report.resid_bits += header + table[w];
        for (std::size_t w : A.row_weights()) report.coef_bits += header + table[w];
    }
    if (D.cols() > 0 && D.rows() > 0) {
        const auto table = ceil_log2_binomial_table(D.rows());
        const std::uint64_t header = ceil_log2_u64(D.rows());
        for (std::size_t k = 0; k < D.cols(); ++k) report.dict_bits += header + table[D.col_weight(k)];
    }

    report.total_bits = report.dict_bits + report.coef_bits + report.resid_bits;
    report.bits_per_sample = n > 0 ? static_cast<double>(report.total_bits) / static_cast<double>(n) : 0.0;
    return report;
}

Rank1 extract_rank1(const BinMatrix& residual) {
    const std::size_t n = residual.cols();
    std::size_t heaviest = 0;
    std::size_t best_weight = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t w = residual.col_weight(j);
        if (w > best_weight) {
            best_weight = w;
            heaviest = j;
        }
    }
    PackedBits u0 = n > 0 ? residual.col(heaviest) : PackedBits(residual.rows());
    PackedBits v0(n);
    const std::size_t u0_weight = u0.weight();
    for (std::size_t j = 0; j < n; ++j)
        if (2 * int_dot(residual.col(j), u0) > u0_weight) v0.set(j, true);
    return proximus_rank1(residual, u0, v0);
}

SelectResult forward_select(const BinMatrix& X, const SelectParams& params) {
    if (params.p0 < 1) throw std::invalid_argument("forward_select: p0 must be >= 1");

    SelectResult result;
    auto step_start = std::chrono::steady_clock::now();
    auto finish_step = [&step_start] {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - step_start).count();
        step_start = now;
        return s;
    };

    const BinMatrix D0 = initial_dictionary(X, params.p0, params.learn);
    Model current = learn(X, D0, params.learn);
    result.all_learns_converged = current.converged;
    CodelengthReport current_len =
        model_codelength(current.dictionary, current.coefficients, current.residual);
    result.trajectory.push_back({params.p0, current_len, finish_step()});

    for (;;) {
        const Rank1 ext = extract_rank1(current.residual);
        const std::size_t p = current.dictionary.cols();

        BinMatrix D(X.rows(), p + 1);
        BinMatrix A(p + 1, X.cols());
        for (std::size_t k = 0; k < p; ++k) D.set_col(k, current.dictionary.col(k));
        D.set_col(p, ext.u);
        for (std::size_t j = 0; j < X.cols(); ++j) {
            PackedBits col(p + 1);
            current.coefficients.col(j).for_each_set([&](std::size_t k) { col.set(k, true); });
            if (ext.v.get(j)) col.set(p, true);
            A.set_col(j, std::move(col));
        }

        Model next = learn(X, D, A, params.learn);
        result.all_learns_converged = result.all_learns_converged && next.converged;
        const CodelengthReport next_len =
            model_codelength(next.dictionary, next.coefficients, next.residual);
        result.trajectory.push_back({p + 1, next_len, finish_step()});

        if (next_len.total_bits >= current_len.total_bits) break;
        current = std::move(next);
        current_len = next_len;
    }

    result.model = std::move(current);
    result.codelength = current_len;
    return result;
}

}  // namespace bmf
