#pragma once

#include "bmf/bin_matrix.hpp"

namespace bmf {

/// Refits one atom by majority vote over the columns that use it: with the
/// atom's own contribution removed from those residual columns, bit i of the
/// new atom is set iff more than half of them have bit i set (exact halves
/// go to 0). E is patched in place so E = X ^ (D ⊗ A) keeps holding.
/// Returns true when the atom changed. Atoms with no users are left alone.
bool mob_update_atom(BinMatrix& D, const BinMatrix& A, BinMatrix& E, std::size_t atom);

/// One sweep of mob_update_atom over all atoms in index order. The total
/// residual weight never increases. Returns the number of changed atoms.
std::size_t mob_update(BinMatrix& D, const BinMatrix& A, BinMatrix& E);

}  // namespace bmf
