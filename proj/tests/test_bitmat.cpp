#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bmf/bin_matrix.hpp"
#include "test_support.hpp"

using namespace bmf;
using namespace testsup;

TEST_CASE("weight counts set bits") {
    CHECK(PackedBits(100).weight() == 0);
    CHECK(PackedBits::ones(65).weight() == 65);

    PackedBits v(5);
    v.set(0, true);
    v.set(2, true);
    v.set(3, true);
    CHECK(v.weight() == 3);
}

TEST_CASE("ones keeps pad bits clear") {
    for (std::size_t len : {1u, 63u, 64u, 65u, 100u, 128u}) {
        const auto v = PackedBits::ones(len);
        CHECK(v.pad_clear());
        CHECK(v.weight() == len);
    }
}

TEST_CASE("xor truth table, identity and self-inverse") {
    std::mt19937_64 gen(7);
    const PackedBits x = random_bits(gen, 130);
    PackedBits self = x;
    self ^= x;
    CHECK(self.weight() == 0);

    PackedBits with_zero = x;
    with_zero ^= PackedBits(130);
    CHECK(with_zero == x);

    PackedBits a(4), b(4);
    a.set(0, true);
    a.set(1, true);
    b.set(0, true);
    b.set(2, true);
    a ^= b;
    CHECK(to_naive(a) == BitVec{0, 1, 1, 0});
}

TEST_CASE("xor rejects length mismatch") {
    PackedBits a(5), b(6);
    CHECK_THROWS_AS(a ^= b, std::invalid_argument);
    CHECK_THROWS_AS(int_dot(a, b), std::invalid_argument);
    CHECK_THROWS_AS(mod2_dot(a, b), std::invalid_argument);
    CHECK_THROWS_AS(bool_dot(a, b), std::invalid_argument);
}

TEST_CASE("boolean dot on degenerate supports") {
    PackedBits zero(70);
    std::mt19937_64 gen(9);
    const PackedBits y = random_bits(gen, 70);
    CHECK_FALSE(bool_dot(zero, y));

    PackedBits a(70), b(70);
    a.set(33, true);
    b.set(33, true);
    CHECK(bool_dot(a, b));

    PackedBits c(70), d(70);
    c.set(1, true);
    d.set(2, true);
    CHECK_FALSE(bool_dot(c, d));
}

TEST_CASE("mod2 dot parities") {
    PackedBits x(3), y(3);
    x.set(0, true);
    x.set(1, true);
    y = x;
    CHECK(mod2_dot(x, y) == 0);

    const PackedBits ones = PackedBits::ones(3);
    PackedBits e0(3);
    e0.set(0, true);
    CHECK(mod2_dot(ones, e0) == 1);
}

TEST_CASE("int dot basics") {
    std::mt19937_64 gen(11);
    const PackedBits x = random_bits(gen, 90);
    CHECK(int_dot(x, x) == x.weight());

    PackedBits a(8), b(8);
    a.set(0, true);
    b.set(7, true);
    CHECK(int_dot(a, b) == 0);
}

TEST_CASE("packed dots agree with the unpacked reference on random pairs") {
    std::mt19937_64 gen(13);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t len = 1 + random_below(gen, 80);
        const PackedBits x = random_bits(gen, len);
        const PackedBits y = random_bits(gen, len);
        const BitVec nx = to_naive(x), ny = to_naive(y);
        CHECK(int_dot(x, y) == naive_int_dot(nx, ny));
        CHECK(mod2_dot(x, y) == naive_mod2_dot(nx, ny));
        CHECK(bool_dot(x, y) == naive_bool_dot(nx, ny));
        CHECK(hamming(x, y) == naive_weight(naive_xor(nx, ny)));
    }
}

TEST_CASE("algebraic identities on random vectors") {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t len = 1 + random_below(gen, 80);
        const PackedBits x = random_bits(gen, len);
        const PackedBits y = random_bits(gen, len);
        CHECK(static_cast<int>(int_dot(x, y) % 2) == mod2_dot(x, y));
        CHECK(bool_dot(x, y) == (int_dot(x, y) >= 1));
        CHECK((x ^ y).weight() == x.weight() + y.weight() - 2 * int_dot(x, y));
        CHECK((x ^ y).pad_clear());
    }
}

TEST_CASE("gram matrix of a diagonal pattern is the identity") {
    const auto d = BinMatrix::identity_pattern(5, 5);
    const auto g = mod2_gram(d);
    CHECK(g == BinMatrix::identity_pattern(5, 5));
}

TEST_CASE("gram row and column vanish for a zero atom") {
    std::mt19937_64 gen(19);
    BinMatrix d = random_matrix(gen, 8, 5);
    d.set_col(2, PackedBits(8));
    const auto g = mod2_gram(d);
    for (std::size_t l = 0; l < 5; ++l) {
        CHECK_FALSE(g.get(l, 2));
        CHECK_FALSE(g.get(2, l));
    }
}

TEST_CASE("gram agrees with the unpacked reference") {
    std::mt19937_64 gen(23);
    for (int trial = 0; trial < 20; ++trial) {
        const BinMatrix d = random_matrix(gen, 8, 5);
        const auto g = mod2_gram(d);
        const auto ng = naive_gram(to_naive(d));
        for (std::size_t k = 0; k < 5; ++k)
            for (std::size_t l = 0; l < 5; ++l) CHECK(static_cast<int>(g.get(k, l)) == ng[k][l]);
    }
}

TEST_CASE("matvec selects and xors columns") {
    std::mt19937_64 gen(29);
    const BinMatrix m = random_matrix(gen, 40, 9);

    CHECK(mod2_matvec(m, PackedBits(9)).weight() == 0);

    PackedBits basis(9);
    basis.set(4, true);
    CHECK(mod2_matvec(m, basis) == m.col(4));

    for (int trial = 0; trial < 50; ++trial) {
        const PackedBits a = random_bits(gen, 9);
        CHECK(to_naive(mod2_matvec(m, a)) == naive_matvec(40, to_naive(m), to_naive(a)));
    }
}

TEST_CASE("matvec is linear over GF(2)") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t rows = 1 + random_below(gen, 70);
        const std::size_t cols = 1 + random_below(gen, 20);
        const BinMatrix m = random_matrix(gen, rows, cols);
        const PackedBits a = random_bits(gen, cols);
        const PackedBits b = random_bits(gen, cols);
        CHECK(mod2_matvec(m, a ^ b) == (mod2_matvec(m, a) ^ mod2_matvec(m, b)));
    }
}

TEST_CASE("transpose fixed points and involution") {
    CHECK(BinMatrix::identity_pattern(6, 6).transposed() == BinMatrix::identity_pattern(6, 6));

    BinMatrix row(1, 7);
    for (std::size_t j = 0; j < 7; ++j) row.set(0, j, true);
    const BinMatrix col = row.transposed();
    CHECK(col.rows() == 7);
    CHECK(col.cols() == 1);
    CHECK(col.col(0).weight() == 7);

    std::mt19937_64 gen(37);
    const BinMatrix m = random_matrix(gen, 37, 63);
    CHECK(m.transposed().transposed() == m);

    const auto nt = naive_transpose(37, to_naive(m));
    CHECK(to_naive(m.transposed()) == nt);
}

TEST_CASE("row view and weight caches match recomputation") {
    std::mt19937_64 gen(41);
    BinMatrix m = random_matrix(gen, 33, 21);

    const auto& rows = m.row_view();
    CHECK(rows.size() == 33);
    CHECK(m.check_invariants());

    const auto& w = m.col_weights();
    for (std::size_t j = 0; j < 21; ++j) CHECK(w[j] == m.col(j).weight());

    // xor_col patches the weight cache and drops the row view
    const PackedBits mask = random_bits(gen, 33);
    m.xor_col(5, mask);
    CHECK(m.check_invariants());
    CHECK(m.col_weights()[5] == m.col(5).weight());

    // full mutation invalidates everything
    m.set(0, 0, !m.get(0, 0));
    CHECK(m.check_invariants());

    const auto wsum = [&] {
        std::size_t s = 0;
        for (auto v : m.row_weights()) s += v;
        return s;
    }();
    CHECK(wsum == m.weight());
}

TEST_CASE("from_rows matches element placement") {
    std::vector<PackedBits> rows;
    PackedBits r0(3), r1(3);
    r0.set(1, true);
    r1.set(0, true);
    r1.set(2, true);
    rows.push_back(r0);
    rows.push_back(r1);
    const BinMatrix m = BinMatrix::from_rows(3, rows);
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 3);
    CHECK(m.get(0, 1));
    CHECK(m.get(1, 0));
    CHECK(m.get(1, 2));
    CHECK(m.weight() == 3);
}
