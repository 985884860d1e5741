#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "bmf/encoder.hpp"

namespace bmf {

enum class Method { mob, kprox };

const char* to_string(Method method);
Method method_from_string(const std::string& name);

enum class InitKind { bernoulli, samples };

struct LearnParams {
    Method method = Method::mob;
    EncodeParams encode{};
    std::size_t max_outer_iter = 100;
    std::uint64_t seed = 0;
    InitKind init = InitKind::samples;
    double theta = 0.5;
    /// Re-seed atoms that no sample uses from a random nonzero residual
    /// column after each dictionary update. Off by default because it can
    /// keep the iteration from reaching an exact fixed point.
    bool revive_dead_atoms = false;
    unsigned threads = 1;
};

struct Model {
    BinMatrix dictionary;    // rows x atoms
    BinMatrix coefficients;  // atoms x samples
    BinMatrix residual;      // data ^ (dictionary ⊗ coefficients)
    std::size_t residual_weight = 0;
    std::size_t outer_iters = 0;
    /// True when the loop stopped because dictionary and coefficients were
    /// bit-identical across an iteration, false when the cap stopped it.
    bool converged = false;
};

struct LearnIterStats {
    std::size_t iter = 0;
    std::size_t residual_after_encode = 0;
    std::size_t residual_weight = 0;
    std::size_t changed_bits_dict = 0;
    std::size_t changed_bits_coef = 0;
    double seconds = 0.0;
};

using LearnObserver = std::function<void(const LearnIterStats&)>;

/// Dictionary of independent Bernoulli(theta) bits; theta must be in (0,1).
BinMatrix init_bernoulli(std::size_t rows, std::size_t atoms, double theta, std::uint64_t seed);

/// Dictionary of `atoms` distinct columns drawn from X without replacement.
BinMatrix init_samples(const BinMatrix& X, std::size_t atoms, std::uint64_t seed);

/// Builds the initial dictionary named by params.init.
BinMatrix initial_dictionary(const BinMatrix& X, std::size_t atoms, const LearnParams& params);

/// Alternates the greedy coefficient update with the chosen dictionary
/// update until neither the dictionary nor the coefficients change across a
/// full iteration, or max_outer_iter is hit. The residual weight is
/// non-increasing over the whole trajectory. Coefficients warm-start from
/// the previous iteration (from A0 on the first one).
Model learn(const BinMatrix& X, const BinMatrix& D0, const BinMatrix& A0, const LearnParams& params,
            const LearnObserver& observer = {});

/// Same, with coefficients starting at zero.
Model learn(const BinMatrix& X, const BinMatrix& D0, const LearnParams& params,
            const LearnObserver& observer = {});

}  // namespace bmf
