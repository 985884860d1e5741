#include "bmf/learner.hpp"

#include <chrono>
#include <stdexcept>

#include "bmf/kprox.hpp"
#include "bmf/mob.hpp"
#include "bmf/rng.hpp"

namespace bmf {

namespace {

std::size_t changed_bits(const BinMatrix& a, const BinMatrix& b) {
    std::size_t total = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) total += hamming(a.col(j), b.col(j));
    return total;
}

void revive_dead_atoms(BinMatrix& D, const BinMatrix& A, const BinMatrix& E, rng::Engine& gen) {
    std::vector<std::size_t> nonzero_cols;
    for (std::size_t j = 0; j < E.cols(); ++j)
        if (E.col(j).any()) nonzero_cols.push_back(j);
    if (nonzero_cols.empty()) return;
    for (std::size_t r = 0; r < D.cols(); ++r) {
        bool used = false;
        for (std::size_t j = 0; j < A.cols() && !used; ++j) used = A.get(r, j);
        if (used) continue;
        const std::size_t pick = nonzero_cols[rng::uniform_below(gen, nonzero_cols.size())];
        D.set_col(r, E.col(pick));
    }
}

}  // namespace

const char* to_string(Method method) {
    return method == Method::mob ? "mob" : "kprox";
}

Method method_from_string(const std::string& name) {
    if (name == "mob") return Method::mob;
    if (name == "kprox") return Method::kprox;
    throw std::invalid_argument("unknown method: " + name);
}

BinMatrix init_bernoulli(std::size_t rows, std::size_t atoms, double theta, std::uint64_t seed) {
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("init_bernoulli: theta must be in (0,1)");
    rng::Engine gen(seed);
    BinMatrix D(rows, atoms);
    for (std::size_t k = 0; k < atoms; ++k) {
        PackedBits col(rows);
        for (std::size_t i = 0; i < rows; ++i)
            if (rng::bernoulli(gen, theta)) col.set(i, true);
        D.set_col(k, std::move(col));
    }
    return D;
}

BinMatrix init_samples(const BinMatrix& X, std::size_t atoms, std::uint64_t seed) {
    if (atoms > X.cols()) throw std::invalid_argument("init_samples: more atoms than samples");
    rng::Engine gen(seed);
    const auto picks = rng::sample_without_replacement(gen, X.cols(), atoms);
    std::vector<PackedBits> cols;
    cols.reserve(atoms);
    for (std::size_t j : picks) cols.push_back(X.col(j));
    return BinMatrix::from_columns(X.rows(), std::move(cols));
}

BinMatrix initial_dictionary(const BinMatrix& X, std::size_t atoms, const LearnParams& params) {
    switch (params.init) {
        case InitKind::bernoulli:
            return init_bernoulli(X.rows(), atoms, params.theta, params.seed);
        case InitKind::samples:
            return init_samples(X, atoms, params.seed);
    }
    throw std::invalid_argument("initial_dictionary: unknown init kind");
}

Model learn(const BinMatrix& X, const BinMatrix& D0, const BinMatrix& A0, const LearnParams& params,
            const LearnObserver& observer) {
    if (D0.rows() != X.rows()) throw std::invalid_argument("learn: dictionary row count mismatch");
    if (A0.rows() != D0.cols() || A0.cols() != X.cols())
        throw std::invalid_argument("learn: coefficient dimension mismatch");
    if (params.max_outer_iter < 1) throw std::invalid_argument("learn: max_outer_iter must be >= 1");

    rng::Engine revive_gen(params.seed);

    Model model;
    model.dictionary = D0;
    model.coefficients = A0;

    for (std::size_t iter = 1; iter <= params.max_outer_iter; ++iter) {
        const auto t0 = std::chrono::steady_clock::now();
        const BinMatrix prev_dict = model.dictionary;
        const BinMatrix prev_coef = model.coefficients;

        auto enc = encode_all(X, model.dictionary, model.coefficients, params.encode, params.threads);
        model.coefficients = std::move(enc.coefficients);
        model.residual = std::move(enc.residual);
        const std::size_t after_encode = model.residual.weight();

        switch (params.method) {
            case Method::mob:
                mob_update(model.dictionary, model.coefficients, model.residual);
                break;
            case Method::kprox:
                kprox_update(model.dictionary, model.coefficients, model.residual);
                break;
        }
        if (params.revive_dead_atoms)
            revive_dead_atoms(model.dictionary, model.coefficients, model.residual, revive_gen);

        model.residual_weight = model.residual.weight();
        model.outer_iters = iter;
        model.converged = model.dictionary == prev_dict && model.coefficients == prev_coef;

        if (observer) {
            LearnIterStats stats;
            stats.iter = iter;
            stats.residual_after_encode = after_encode;
            stats.residual_weight = model.residual_weight;
            stats.changed_bits_dict = changed_bits(model.dictionary, prev_dict);
            stats.changed_bits_coef = changed_bits(model.coefficients, prev_coef);
            stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            observer(stats);
        }
        if (model.converged) break;
    }
    return model;
}

Model learn(const BinMatrix& X, const BinMatrix& D0, const LearnParams& params,
            const LearnObserver& observer) {
    return learn(X, D0, BinMatrix(D0.cols(), X.cols()), params, observer);
}

}  // namespace bmf
