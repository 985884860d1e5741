#pragma once

#include "bmf/bin_matrix.hpp"

namespace bmf {

struct Rank1 {
    PackedBits u;  // length rows(X)
    PackedBits v;  // length cols(X)
};

/// Alternating majority iteration for a rank-one fit of X:
///   u_i <- 1( <row i, v> > weight(v)/2 ),  v_j <- 1( <col j, u> > weight(u)/2 ),
/// exact halves going to 0, until the outer product u vᵀ stops changing
/// (two iterates with a zero factor compare equal). The misfit weight
/// h(X ^ u vᵀ) is non-increasing and the result is optimal within any single
/// bit flip of u or of v.
Rank1 proximus_rank1(const BinMatrix& X, const PackedBits& u0, const PackedBits& v0);

/// Rank-one refit of one atom and its coefficient row, restricted to the
/// columns that use the atom. The refit is seeded at the incumbent pair and
/// only written back when it does not increase the misfit on those columns;
/// E is patched to stay consistent. Unlike the majority-vote update this may
/// clear coefficients, so an atom can lose users here (never gain them).
bool kprox_update_atom(BinMatrix& D, BinMatrix& A, BinMatrix& E, std::size_t atom);

/// One sweep over all atoms in index order; total residual weight never
/// increases. Returns the number of atoms whose pair changed.
std::size_t kprox_update(BinMatrix& D, BinMatrix& A, BinMatrix& E);

}  // namespace bmf
