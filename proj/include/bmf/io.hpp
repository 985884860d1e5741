#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "bmf/learner.hpp"
#include "bmf/mdl.hpp"

namespace bmf {

/// Reads a P1 (ASCII) or P4 (raw) PBM file. Pixel value 1 is black and maps
/// to a set bit; the image row/column grid maps directly onto matrix
/// rows/columns.
BinMatrix load_pbm(const std::filesystem::path& path);

/// Writes P4 by default, P1 when ascii is set. Round trips are bit-exact.
void save_pbm(const BinMatrix& matrix, const std::filesystem::path& path, bool ascii = false);

struct GrayImage {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::uint32_t maxval = 255;
    std::vector<std::uint16_t> pixels;  // row-major
};

/// Reads a P2 (ASCII) or P5 (raw) PGM file.
GrayImage load_pgm(const std::filesystem::path& path);

/// Bit set iff the pixel value is >= threshold.
BinMatrix binarize(const GrayImage& image, std::uint32_t threshold);

/// Cuts the image into non-overlapping block_rows x block_cols tiles in
/// raster order, each vectorized column by column into one sample column.
/// Trailing partial tiles are dropped.
BinMatrix image_to_blocks(const BinMatrix& image, std::size_t block_rows, std::size_t block_cols);

/// Inverse of image_to_blocks on the covered region; the sample count must
/// fill the grid exactly.
BinMatrix blocks_to_image(const BinMatrix& samples, std::size_t block_rows, std::size_t block_cols,
                          std::size_t grid_cols);

/// Centered rows x cols window of the image.
BinMatrix center_crop(const BinMatrix& image, std::size_t rows, std::size_t cols);

/// Renders each column as a block_rows x block_cols tile (column-wise
/// vectorization, matching image_to_blocks) on a clear 1-pixel grid,
/// row-major tile order, with a clear outer border.
BinMatrix mosaic(const BinMatrix& tiles, std::size_t tile_rows, std::size_t tile_cols,
                 std::size_t grid_cols);

struct Planted {
    BinMatrix data;          // rows x samples
    BinMatrix dictionary;    // rows x atoms, Bernoulli(1/2)
    BinMatrix coefficients;  // atoms x samples, fixed column weight
};

/// Synthetic ground-truth model: data = dictionary ⊗ coefficients, with each
/// bit then flipped independently with probability noise_rate.
Planted synth_planted(std::size_t rows, std::size_t samples, std::size_t atoms,
                      std::size_t coeff_weight, double noise_rate, std::uint64_t seed);

struct SavedModel {
    Model model;
    Method method = Method::mob;
    std::uint64_t seed = 0;
    CodelengthReport codelength{};
};

/// Writes D.pbm / A.pbm / E.pbm plus a key = value manifest into dir.
void save_model(const Model& model, Method method, std::uint64_t seed,
                const std::filesystem::path& dir);

/// Loads a model directory and re-derives everything the manifest states;
/// any disagreement (dimensions, residual weight, codelengths) is an error.
/// When data is given, residual consistency against it is checked too.
SavedModel load_model(const std::filesystem::path& dir, const BinMatrix* data = nullptr);

}  // namespace bmf
