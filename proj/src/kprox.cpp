#include "bmf/kprox.hpp"

#include <stdexcept>

namespace bmf {

namespace {

bool outer_product_equal(const PackedBits& u1, const PackedBits& v1, const PackedBits& u2,
                         const PackedBits& v2) {
    const bool zero1 = !u1.any() || !v1.any();
    const bool zero2 = !u2.any() || !v2.any();
    if (zero1 || zero2) return zero1 && zero2;
    return u1 == u2 && v1 == v2;
}

std::size_t rank1_misfit(const BinMatrix& X, const PackedBits& u, const PackedBits& v) {
    std::size_t cost = 0;
    for (std::size_t j = 0; j < X.cols(); ++j)
        cost += v.get(j) ? hamming(X.col(j), u) : X.col(j).weight();
    return cost;
}

}  // namespace

Rank1 proximus_rank1(const BinMatrix& X, const PackedBits& u0, const PackedBits& v0) {
    if (u0.size() != X.rows() || v0.size() != X.cols())
        throw std::invalid_argument("proximus_rank1: factor length mismatch");
    const std::size_t m = X.rows();
    const std::size_t n = X.cols();

    Rank1 cur{u0, v0};
    // Termination is exact; the round cap only guards against regressions.
    const std::size_t max_rounds = m + n;
    for (std::size_t round = 0; round < max_rounds; ++round) {
        const Rank1 prev = cur;

        // Row majorities against v, accumulated column-wise.
        const std::size_t v_weight = cur.v.weight();
        std::vector<std::size_t> row_overlap(m, 0);
        cur.v.for_each_set([&](std::size_t j) {
            X.col(j).for_each_set([&](std::size_t i) { ++row_overlap[i]; });
        });
        PackedBits u(m);
        for (std::size_t i = 0; i < m; ++i)
            if (2 * row_overlap[i] > v_weight) u.set(i, true);
        cur.u = std::move(u);

        const std::size_t u_weight = cur.u.weight();
        PackedBits v(n);
        for (std::size_t j = 0; j < n; ++j)
            if (2 * int_dot(X.col(j), cur.u) > u_weight) v.set(j, true);
        cur.v = std::move(v);

        if (outer_product_equal(prev.u, prev.v, cur.u, cur.v)) break;
    }
    return cur;
}

bool kprox_update_atom(BinMatrix& D, BinMatrix& A, BinMatrix& E, std::size_t atom) {
    if (atom >= D.cols()) throw std::out_of_range("kprox_update_atom: atom index out of range");
    const std::size_t m = D.rows();

    std::vector<std::size_t> users;
    for (std::size_t j = 0; j < A.cols(); ++j)
        if (A.get(atom, j)) users.push_back(j);
    if (users.empty()) return false;

    const PackedBits u0 = D.col(atom);

    // Residual over the usage set with this atom's contribution restored.
    std::vector<PackedBits> restored;
    restored.reserve(users.size());
    for (std::size_t j : users) restored.push_back(E.col(j) ^ u0);
    const BinMatrix R = BinMatrix::from_columns(m, std::move(restored));

    const PackedBits v0 = PackedBits::ones(users.size());
    const Rank1 fit = proximus_rank1(R, u0, v0);
    if (fit.u == u0 && fit.v == v0) return false;

    // Equal-cost fixed points are accepted; anything worse is not.
    if (rank1_misfit(R, fit.u, fit.v) > rank1_misfit(R, u0, v0)) return false;

    const PackedBits zero(m);
    for (std::size_t t = 0; t < users.size(); ++t) {
        const std::size_t j = users[t];
        const bool used = fit.v.get(t);
        A.set(atom, j, used);
        E.set_col(j, R.col(t) ^ (used ? fit.u : zero));
    }
    D.set_col(atom, fit.u);
    return true;
}

std::size_t kprox_update(BinMatrix& D, BinMatrix& A, BinMatrix& E) {
    std::size_t changed = 0;
    for (std::size_t r = 0; r < D.cols(); ++r)
        if (kprox_update_atom(D, A, E, r)) ++changed;
    return changed;
}

}  // namespace bmf
