#include "bmf/encoder.hpp"

#include <cassert>
#include <stdexcept>

#include "parallel_for.hpp"

namespace bmf {

namespace detail {

namespace {

// Best atom by association accuracy |g_l| / w_l, zero-weight atoms excluded,
// ties broken toward the lowest index. Compared by integer cross products.
std::optional<std::size_t> select_atom(std::span<const std::int64_t> g,
                                       std::span<const std::size_t> atom_weights) {
    std::optional<std::size_t> best;
    std::int64_t best_num = 0;
    std::int64_t best_den = 1;
    for (std::size_t l = 0; l < g.size(); ++l) {
        if (atom_weights[l] == 0) continue;
        const std::int64_t num = g[l] < 0 ? -g[l] : g[l];
        const std::int64_t den = static_cast<std::int64_t>(atom_weights[l]);
        if (!best || num * best_den > best_num * den) {
            best = l;
            best_num = num;
            best_den = den;
        }
    }
    return best;
}

}  // namespace

BmpOutcome bmp_run(const PackedBits& x, const BinMatrix& D, const BinMatrix& gram,
                   std::span<const std::size_t> atom_weights, const PackedBits& a0,
                   const EncodeParams& params, BmpObserver* observer) {
    const std::size_t p = D.cols();
    if (x.size() != D.rows()) throw std::invalid_argument("bmp_encode: sample length mismatch");
    if (a0.size() != p) throw std::invalid_argument("bmp_encode: coefficient length mismatch");
    if (atom_weights.size() != p || gram.rows() != p || gram.cols() != p)
        throw std::invalid_argument("bmp_encode: gram/atom_weights dimension mismatch");
    assert([&] {
        for (std::size_t l = 0; l < p; ++l)
            if (atom_weights[l] != D.col(l).weight()) return false;
        return true;
    }());

    BmpOutcome out;
    out.coeffs = a0;
    out.residual = x ^ mod2_matvec(D, a0);

    std::vector<std::int64_t> g(p);
    for (std::size_t l = 0; l < p; ++l) g[l] = static_cast<std::int64_t>(int_dot(D.col(l), out.residual));

    const std::size_t h_max = params.h_max.value_or(p);
    std::size_t residual_weight = out.residual.weight();

    while (residual_weight >= params.w_max && out.toggles < h_max) {
        const auto pick = select_atom(g, atom_weights);
        if (!pick) break;
        const std::size_t k = *pick;
        if (g[k] == 0) break;

        const PackedBits& atom = D.col(k);
        const std::size_t toggled_weight = hamming(out.residual, atom);
        if (toggled_weight >= residual_weight) break;

        // Commit. Flipping r on supp(atom) changes each correlation by
        // +1 per bit that became set and -1 per bit that cleared.
        const PackedBits cleared = out.residual & atom;
        out.residual ^= atom;
        const PackedBits raised = out.residual & atom;
        for (std::size_t l = 0; l < p; ++l) {
            g[l] += static_cast<std::int64_t>(int_dot(D.col(l), raised));
            g[l] -= static_cast<std::int64_t>(int_dot(D.col(l), cleared));
            // The GF(2) Gramm column gives the parity of that change.
            assert(((int_dot(atom, D.col(l)) ^ static_cast<std::size_t>(gram.get(l, k))) & 1u) == 0);
        }
        out.coeffs.flip(k);
        residual_weight = toggled_weight;
        ++out.toggles;
        if (observer) observer->on_toggle(k, out.coeffs, out.residual, g);
    }
    return out;
}

}  // namespace detail

PackedBits bmp_encode(const PackedBits& x, const BinMatrix& D, const BinMatrix& gram,
                      std::span<const std::size_t> atom_weights, const PackedBits& a0,
                      const EncodeParams& params) {
    return detail::bmp_run(x, D, gram, atom_weights, a0, params, nullptr).coeffs;
}

EncodeResult encode_all(const BinMatrix& X, const BinMatrix& D, const BinMatrix& A_init,
                        const EncodeParams& params, unsigned threads) {
    if (D.rows() != X.rows()) throw std::invalid_argument("encode_all: row count mismatch");
    if (A_init.rows() != D.cols() || A_init.cols() != X.cols())
        throw std::invalid_argument("encode_all: coefficient dimension mismatch");

    // local copies keep D untouched, so concurrent encodes may share it
    const std::size_t n = X.cols();
    const BinMatrix gram = mod2_gram(D);
    std::vector<std::size_t> atom_weights(D.cols());
    for (std::size_t k = 0; k < D.cols(); ++k) atom_weights[k] = D.col(k).weight();

    std::vector<PackedBits> acols(n);
    std::vector<PackedBits> ecols(n);
    detail::parallel_for(n, threads, [&](std::size_t j) {
        auto run = detail::bmp_run(X.col(j), D, gram, atom_weights, A_init.col(j), params, nullptr);
        acols[j] = std::move(run.coeffs);
        ecols[j] = std::move(run.residual);
    });

    EncodeResult result;
    result.coefficients = BinMatrix::from_columns(D.cols(), std::move(acols));
    result.residual = BinMatrix::from_columns(X.rows(), std::move(ecols));
    return result;
}

}  // namespace bmf
