#include "bmf/mob.hpp"

#include <stdexcept>

namespace bmf {

bool mob_update_atom(BinMatrix& D, const BinMatrix& A, BinMatrix& E, std::size_t atom) {
    if (atom >= D.cols()) throw std::out_of_range("mob_update_atom: atom index out of range");
    const std::size_t m = D.rows();
    const std::size_t n = A.cols();

    std::vector<std::size_t> users;
    for (std::size_t j = 0; j < n; ++j)
        if (A.get(atom, j)) users.push_back(j);
    if (users.empty()) return false;

    const PackedBits& old_atom = D.col(atom);

    // Per-row counts of the restored residual (atom contribution removed).
    std::vector<std::size_t> ones(m, 0);
    PackedBits restored(m);
    for (std::size_t j : users) {
        restored = E.col(j);
        restored ^= old_atom;
        restored.for_each_set([&](std::size_t i) { ++ones[i]; });
    }

    PackedBits next(m);
    for (std::size_t i = 0; i < m; ++i)
        if (2 * ones[i] > users.size()) next.set(i, true);

    if (next == old_atom) return false;

    const PackedBits patch = next ^ old_atom;
    for (std::size_t j : users) E.xor_col(j, patch);
    D.set_col(atom, std::move(next));
    return true;
}

std::size_t mob_update(BinMatrix& D, const BinMatrix& A, BinMatrix& E) {
    std::size_t changed = 0;
    for (std::size_t r = 0; r < D.cols(); ++r)
        if (mob_update_atom(D, A, E, r)) ++changed;
    return changed;
}

}  // namespace bmf
