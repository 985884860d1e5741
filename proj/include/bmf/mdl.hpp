#pragma once

#include <cstdint>
#include <vector>

#include "bmf/kprox.hpp"
#include "bmf/learner.hpp"

namespace bmf {

struct CodelengthReport {
    std::uint64_t dict_bits = 0;   // sum over dictionary columns
    std::uint64_t coef_bits = 0;   // sum over coefficient rows
    std::uint64_t resid_bits = 0;  // sum over residual rows
    std::uint64_t total_bits = 0;
    double bits_per_sample = 0.0;
};

/// Enumerative code for a binary string of length n and weight r: the weight
/// costs ceil(log2 n) bits and the index among all length-n weight-r strings
/// costs ceil(log2 binomial(n, r)). Evaluated in exact integer arithmetic for
/// every n, so the ceilings never flip.
std::uint64_t enum_codelength(std::size_t n, std::size_t r);

/// Total description length of (D, A, E): one enumerative code per column of
/// D and per row of A and E.
CodelengthReport model_codelength(const BinMatrix& D, const BinMatrix& A, const BinMatrix& E);

struct SelectParams {
    std::size_t p0 = 1;  // order of the first model
    LearnParams learn{};
};

struct SelectStep {
    std::size_t atoms = 0;
    CodelengthReport codelength{};
    double seconds = 0.0;
};

struct SelectResult {
    Model model;
    CodelengthReport codelength{};
    std::vector<SelectStep> trajectory;
    /// True when every inner learn stopped on the exact fixed-point test.
    bool all_learns_converged = true;
};

/// Extraction step used to grow the model: a rank-one fit of the residual,
/// seeded with the heaviest residual column and the set of columns whose
/// overlap with it clears the majority threshold.
Rank1 extract_rank1(const BinMatrix& residual);

/// Grows the model one atom at a time from order p0, re-learning after each
/// extension with the previous factors as the starting point, and stops the
/// first time the total codelength fails to drop. Returns the last model
/// that improved, with the full (atoms, codelength, seconds) trajectory.
SelectResult forward_select(const BinMatrix& X, const SelectParams& params);

}  // namespace bmf
