#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bmf/io.hpp"
#include "test_support.hpp"

using namespace bmf;
using namespace testsup;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("bmf_io_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("single black pixel writes the canonical raw file") {
    TempDir tmp;
    BinMatrix img(1, 1);
    img.set(0, 0, true);
    const auto file = tmp.path / "dot.pbm";
    save_pbm(img, file);
    const std::string bytes = slurp(file);
    CHECK(bytes == std::string("P4\n1 1\n\x80", 8));
    CHECK(load_pbm(file) == img);
}

TEST_CASE("raw round trips are bit-exact on awkward widths") {
    TempDir tmp;
    std::mt19937_64 gen(3);
    for (auto [h, w] : std::vector<std::pair<std::size_t, std::size_t>>{
             {33, 17}, {1, 1}, {5, 8}, {8, 5}, {3, 64}, {7, 65}, {16, 9}}) {
        const BinMatrix img = random_matrix(gen, h, w);
        const auto file = tmp.path / "rt.pbm";
        save_pbm(img, file);
        CHECK(load_pbm(file) == img);
    }
}

TEST_CASE("ascii and raw encodings load identically") {
    TempDir tmp;
    std::mt19937_64 gen(5);
    const BinMatrix img = random_matrix(gen, 19, 23);
    save_pbm(img, tmp.path / "a.pbm", true);
    save_pbm(img, tmp.path / "b.pbm", false);
    CHECK(load_pbm(tmp.path / "a.pbm") == load_pbm(tmp.path / "b.pbm"));
    CHECK(load_pbm(tmp.path / "a.pbm") == img);
}

TEST_CASE("headers with comments parse and bad files are rejected") {
    TempDir tmp;
    {
        std::ofstream out(tmp.path / "c.pbm", std::ios::binary);
        out << "P1\n# a comment\n3 2\n1 0 1\n0 1 0\n";
    }
    const BinMatrix img = load_pbm(tmp.path / "c.pbm");
    CHECK(img.rows() == 2);
    CHECK(img.cols() == 3);
    CHECK(img.get(0, 0));
    CHECK(img.get(1, 1));
    CHECK(img.weight() == 3);

    {
        std::ofstream out(tmp.path / "bad_magic.pbm", std::ios::binary);
        out << "P7\n3 2\n";
    }
    CHECK_THROWS_AS(load_pbm(tmp.path / "bad_magic.pbm"), std::runtime_error);

    {
        std::ofstream out(tmp.path / "truncated.pbm", std::ios::binary);
        out << "P4\n16 4\n\xff";
    }
    CHECK_THROWS_AS(load_pbm(tmp.path / "truncated.pbm"), std::runtime_error);

    {
        std::ofstream out(tmp.path / "noheader.pbm", std::ios::binary);
        out << "P4\nabc\n";
    }
    CHECK_THROWS_AS(load_pbm(tmp.path / "noheader.pbm"), std::runtime_error);

    CHECK_THROWS_AS(load_pbm(tmp.path / "missing.pbm"), std::runtime_error);
}

TEST_CASE("a block the size of the image is one sample") {
    std::mt19937_64 gen(7);
    const BinMatrix img = random_matrix(gen, 16, 16);
    const BinMatrix samples = image_to_blocks(img, 16, 16);
    CHECK(samples.rows() == 256);
    CHECK(samples.cols() == 1);
    CHECK(samples.weight() == img.weight());
}

TEST_CASE("a full-page image cuts into the expected grid") {
    const BinMatrix img(1160, 896);
    const BinMatrix samples = image_to_blocks(img, 16, 16);
    CHECK(samples.rows() == 256);
    CHECK(samples.cols() == 72 * 56);  // floor(1160/16) * floor(896/16) = 4032
}

TEST_CASE("blocks reassemble to the covered region") {
    std::mt19937_64 gen(11);
    const BinMatrix img = random_matrix(gen, 21, 34);  // 16x32 covered by 4x8 blocks
    const BinMatrix samples = image_to_blocks(img, 4, 8);
    CHECK(samples.cols() == 5 * 4);
    const BinMatrix back = blocks_to_image(samples, 4, 8, 4);
    CHECK(back.rows() == 20);
    CHECK(back.cols() == 32);
    for (std::size_t i = 0; i < back.rows(); ++i)
        for (std::size_t j = 0; j < back.cols(); ++j) CHECK(back.get(i, j) == img.get(i, j));

    CHECK_THROWS_AS(image_to_blocks(img, 0, 8), std::invalid_argument);
    CHECK_THROWS_AS(image_to_blocks(img, 22, 8), std::invalid_argument);
}

TEST_CASE("binarize thresholds and is idempotent on binary data") {
    GrayImage gray;
    gray.rows = 2;
    gray.cols = 3;
    gray.maxval = 255;
    gray.pixels = {10, 20, 30, 40, 50, 60};

    CHECK(binarize(gray, 61).weight() == 0);
    CHECK(binarize(gray, 10).weight() == 6);

    const BinMatrix mid = binarize(gray, 35);
    CHECK(mid.weight() == 3);
    CHECK(mid.get(1, 0));

    GrayImage binary;
    binary.rows = 1;
    binary.cols = 4;
    binary.maxval = 1;
    binary.pixels = {0, 1, 1, 0};
    const BinMatrix b = binarize(binary, 1);
    GrayImage again;
    again.rows = 1;
    again.cols = 4;
    again.maxval = 1;
    for (std::size_t j = 0; j < 4; ++j) again.pixels.push_back(b.get(0, j) ? 1 : 0);
    CHECK(binarize(again, 1) == b);
}

TEST_CASE("pgm loads both encodings") {
    TempDir tmp;
    {
        std::ofstream out(tmp.path / "a.pgm", std::ios::binary);
        out << "P2\n3 2\n255\n0 128 255\n64 32 16\n";
    }
    {
        std::ofstream out(tmp.path / "b.pgm", std::ios::binary);
        out << "P5\n3 2\n255\n";
        const unsigned char px[] = {0, 128, 255, 64, 32, 16};
        out.write(reinterpret_cast<const char*>(px), 6);
    }
    const GrayImage a = load_pgm(tmp.path / "a.pgm");
    const GrayImage b = load_pgm(tmp.path / "b.pgm");
    CHECK(a.pixels == b.pixels);
    CHECK(a.rows == 2);
    CHECK(a.cols == 3);
    CHECK(binarize(a, 64) == binarize(b, 64));
}

TEST_CASE("planted synthesis is exact without noise and reproducible") {
    const auto a = synth_planted(32, 100, 6, 3, 0.0, 42);
    const auto b = synth_planted(32, 100, 6, 3, 0.0, 42);
    CHECK(a.data == b.data);
    CHECK(a.dictionary == b.dictionary);
    CHECK(a.coefficients == b.coefficients);

    CHECK(a.data == mod2_multiply(a.dictionary, a.coefficients));
    for (std::size_t j = 0; j < 100; ++j) CHECK(a.coefficients.col(j).weight() == 3);
}

TEST_CASE("single unit-weight atom copies it to every sample") {
    const auto planted = synth_planted(24, 30, 1, 1, 0.0, 7);
    for (std::size_t j = 0; j < 30; ++j) CHECK(planted.data.col(j) == planted.dictionary.col(0));
}

TEST_CASE("noise mass lands near its expectation") {
    const std::size_t rows = 200, samples = 500;  // 1e5 bits
    const auto planted = synth_planted(rows, samples, 4, 2, 0.05, 11);
    const auto clean = mod2_multiply(planted.dictionary, planted.coefficients);
    std::size_t flips = 0;
    for (std::size_t j = 0; j < samples; ++j) flips += hamming(planted.data.col(j), clean.col(j));
    const double mean = 0.05 * rows * samples;
    const double sigma = std::sqrt(rows * samples * 0.05 * 0.95);
    CHECK(static_cast<double>(flips) > mean - 3 * sigma);
    CHECK(static_cast<double>(flips) < mean + 3 * sigma);

    CHECK_THROWS_AS(synth_planted(4, 4, 2, 3, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(synth_planted(4, 4, 2, 1, 1.0, 1), std::invalid_argument);
}

TEST_CASE("model directories round trip bit-exactly") {
    TempDir tmp;
    const auto planted = synth_planted(40, 80, 5, 2, 0.02, 13);
    LearnParams params;
    params.seed = 13;
    const auto model = learn(planted.data, init_samples(planted.data, 5, 13), params);

    const auto dir = tmp.path / "model";
    save_model(model, Method::mob, 13, dir);
    const auto loaded = load_model(dir, &planted.data);
    CHECK(loaded.model.dictionary == model.dictionary);
    CHECK(loaded.model.coefficients == model.coefficients);
    CHECK(loaded.model.residual == model.residual);
    CHECK(loaded.model.residual_weight == model.residual_weight);
    CHECK(loaded.method == Method::mob);
    CHECK(loaded.seed == 13);
    CHECK(loaded.model.outer_iters == model.outer_iters);
    CHECK(loaded.model.converged == model.converged);
}

TEST_CASE("a tampered manifest or residual fails to load") {
    TempDir tmp;
    const auto planted = synth_planted(20, 30, 3, 1, 0.0, 17);
    LearnParams params;
    const auto model = learn(planted.data, planted.dictionary, params);
    const auto dir = tmp.path / "model";
    save_model(model, Method::kprox, 17, dir);

    // manifest residual weight contradicted by E.pbm
    {
        auto manifest = slurp(dir / "manifest.txt");
        const auto at = manifest.find("residual_weight = ");
        manifest.replace(at, std::string("residual_weight = ").size() + 1,
                         "residual_weight = 9");
        std::ofstream out(dir / "manifest.txt", std::ios::binary);
        out << manifest;
    }
    CHECK_THROWS_AS(load_model(dir), std::runtime_error);

    save_model(model, Method::kprox, 17, dir);
    CHECK_NOTHROW(load_model(dir));

    // residual inconsistent with the supplied data
    BinMatrix wrong = planted.data;
    wrong.set(0, 0, !wrong.get(0, 0));
    CHECK_THROWS_AS(load_model(dir, &wrong), std::runtime_error);

    fs::remove(dir / "A.pbm");
    CHECK_THROWS_AS(load_model(dir), std::runtime_error);
}

TEST_CASE("an empty model round trips") {
    TempDir tmp;
    std::mt19937_64 gen(19);
    Model model;
    model.dictionary = BinMatrix(12, 0);
    model.coefficients = BinMatrix(0, 9);
    model.residual = random_matrix(gen, 12, 9);
    model.residual_weight = model.residual.weight();
    model.outer_iters = 1;
    model.converged = true;

    const auto dir = tmp.path / "empty";
    save_model(model, Method::mob, 0, dir);
    const auto loaded = load_model(dir);
    CHECK(loaded.model.dictionary.cols() == 0);
    CHECK(loaded.model.coefficients.rows() == 0);
    CHECK(loaded.model.coefficients.cols() == 9);
    CHECK(loaded.model.residual == model.residual);
}

TEST_CASE("mosaic dimensions and content") {
    // one tile: the tile plus a one-pixel border all around
    BinMatrix one(6, 1);
    one.set(2, 0, true);
    const BinMatrix single = mosaic(one, 3, 2, 1);
    CHECK(single.rows() == 5);
    CHECK(single.cols() == 4);
    CHECK(single.weight() == 1);
    CHECK(single.get(1 + 2 % 3, 1 + 2 / 3));

    // unit atoms: exactly one pixel per tile, walking the vectorization order
    const BinMatrix eye = BinMatrix::identity_pattern(16, 16);
    const BinMatrix grid = mosaic(eye, 4, 4, 4);
    CHECK(grid.rows() == 4 * 5 + 1);
    CHECK(grid.cols() == 4 * 5 + 1);
    CHECK(grid.weight() == 16);
    // atom k lights bit k: tile (k/4, k%4), in-tile row k%4, column k/4
    for (std::size_t k = 0; k < 16; ++k)
        CHECK(grid.get(1 + (k / 4) * 5 + k % 4, 1 + (k % 4) * 5 + k / 4));

    CHECK_THROWS_AS(mosaic(one, 2, 2, 1), std::invalid_argument);
}

TEST_CASE("mosaic of a reloaded model matches the original") {
    TempDir tmp;
    const auto planted = synth_planted(24, 40, 4, 2, 0.01, 23);
    LearnParams params;
    const auto model = learn(planted.data, init_samples(planted.data, 4, 23), params);
    save_model(model, Method::mob, 23, tmp.path / "m");
    const auto loaded = load_model(tmp.path / "m");
    CHECK(mosaic(model.dictionary, 6, 4, 2) == mosaic(loaded.model.dictionary, 6, 4, 2));
}

TEST_CASE("center crop takes the middle window") {
    BinMatrix img(6, 8);
    img.set(2, 3, true);  // inside the window
    img.set(0, 0, true);  // outside
    const BinMatrix crop = center_crop(img, 4, 4);
    CHECK(crop.rows() == 4);
    CHECK(crop.cols() == 4);
    CHECK(crop.weight() == 1);
    CHECK(crop.get(1, 1));
    CHECK_THROWS_AS(center_crop(img, 7, 4), std::invalid_argument);
}
