#include "bmf/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "bmf/rng.hpp"

namespace bmf {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& why) {
    throw std::runtime_error(path.string() + ": " + why);
}

int skip_space_and_comments(std::istream& in) {
    int c = in.get();
    for (;;) {
        if (c == '#') {
            while (c != '\n' && c != EOF) c = in.get();
        } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
            c = in.get();
        } else {
            return c;
        }
    }
}

std::size_t read_header_number(std::istream& in, const std::filesystem::path& path) {
    int c = skip_space_and_comments(in);
    if (c < '0' || c > '9') fail(path, "malformed header");
    std::size_t value = 0;
    while (c >= '0' && c <= '9') {
        value = value * 10 + static_cast<std::size_t>(c - '0');
        c = in.get();
    }
    if (c != EOF) in.unget();
    return value;
}

PackedBits row_from_raw(const unsigned char* bytes, std::size_t width) {
    const std::size_t nbytes = (width + 7) / 8;
    std::vector<std::uint64_t> words((width + 63) / 64, 0);
    for (std::size_t b = 0; b < nbytes; ++b)
        words[b >> 3] |= static_cast<std::uint64_t>(bytes[b]) << (56 - 8 * (b & 7));
    return PackedBits::from_words(width, std::move(words));
}

void row_to_raw(const PackedBits& row, unsigned char* bytes) {
    const std::size_t nbytes = (row.size() + 7) / 8;
    const auto words = row.words();
    for (std::size_t b = 0; b < nbytes; ++b)
        bytes[b] = static_cast<unsigned char>(words[b >> 3] >> (56 - 8 * (b & 7)));
}

std::uint16_t read_pgm_sample(std::istream& in, bool ascii, std::uint32_t maxval,
                              const std::filesystem::path& path) {
    if (ascii) {
        const std::size_t v = read_header_number(in, path);
        if (v > maxval) fail(path, "sample exceeds maxval");
        return static_cast<std::uint16_t>(v);
    }
    if (maxval > 255) {
        const int hi = in.get(), lo = in.get();
        if (lo == EOF) fail(path, "truncated payload");
        return static_cast<std::uint16_t>((hi << 8) | lo);
    }
    const int v = in.get();
    if (v == EOF) fail(path, "truncated payload");
    return static_cast<std::uint16_t>(v);
}

}  // namespace

BinMatrix load_pbm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    const int magic0 = in.get();
    const int magic1 = in.get();
    if (magic0 != 'P' || (magic1 != '1' && magic1 != '4')) fail(path, "not a PBM file");
    const bool ascii = magic1 == '1';
    const std::size_t width = read_header_number(in, path);
    const std::size_t height = read_header_number(in, path);

    std::vector<PackedBits> rows;
    rows.reserve(height);
    if (ascii) {
        for (std::size_t i = 0; i < height; ++i) {
            PackedBits row(width);
            for (std::size_t j = 0; j < width; ++j) {
                const int c = skip_space_and_comments(in);
                if (c == '1')
                    row.set(j, true);
                else if (c != '0')
                    fail(path, "truncated payload");
            }
            rows.push_back(std::move(row));
        }
    } else {
        if (width > 0 && height > 0) {
            const int sep = in.get();  // single whitespace byte ends the header
            if (sep == EOF) fail(path, "truncated payload");
        }
        const std::size_t nbytes = (width + 7) / 8;
        std::vector<unsigned char> buffer(nbytes);
        for (std::size_t i = 0; i < height; ++i) {
            in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(nbytes));
            if (static_cast<std::size_t>(in.gcount()) != nbytes) fail(path, "truncated payload");
            rows.push_back(row_from_raw(buffer.data(), width));
        }
    }
    return BinMatrix::from_rows(width, rows);
}

void save_pbm(const BinMatrix& matrix, const std::filesystem::path& path, bool ascii) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    const std::size_t height = matrix.rows();
    const std::size_t width = matrix.cols();
    const BinMatrix by_row = matrix.transposed();

    out << (ascii ? "P1" : "P4") << '\n' << width << ' ' << height << '\n';
    if (ascii) {
        for (std::size_t i = 0; i < height; ++i) {
            for (std::size_t j = 0; j < width; ++j) {
                out.put(by_row.col(i).get(j) ? '1' : '0');
                if (j % 64 == 63 || j + 1 == width) out.put('\n');
            }
        }
    } else {
        const std::size_t nbytes = (width + 7) / 8;
        std::vector<unsigned char> buffer(nbytes);
        for (std::size_t i = 0; i < height; ++i) {
            row_to_raw(by_row.col(i), buffer.data());
            out.write(reinterpret_cast<const char*>(buffer.data()), static_cast<std::streamsize>(nbytes));
        }
    }
    if (!out) fail(path, "write failed");
}

GrayImage load_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    const int magic0 = in.get();
    const int magic1 = in.get();
    if (magic0 != 'P' || (magic1 != '2' && magic1 != '5')) fail(path, "not a PGM file");
    const bool ascii = magic1 == '2';

    GrayImage img;
    img.cols = read_header_number(in, path);
    img.rows = read_header_number(in, path);
    img.maxval = static_cast<std::uint32_t>(read_header_number(in, path));
    if (img.maxval == 0 || img.maxval > 65535) fail(path, "bad maxval");
    if (!ascii) in.get();

    img.pixels.resize(img.rows * img.cols);
    for (auto& px : img.pixels) px = read_pgm_sample(in, ascii, img.maxval, path);
    return img;
}

BinMatrix binarize(const GrayImage& image, std::uint32_t threshold) {
    BinMatrix out(image.rows, image.cols);
    for (std::size_t i = 0; i < image.rows; ++i)
        for (std::size_t j = 0; j < image.cols; ++j)
            if (image.pixels[i * image.cols + j] >= threshold) out.set(i, j, true);
    return out;
}

BinMatrix image_to_blocks(const BinMatrix& image, std::size_t block_rows, std::size_t block_cols) {
    if (block_rows == 0 || block_cols == 0) throw std::invalid_argument("image_to_blocks: zero block size");
    if (block_rows > image.rows() || block_cols > image.cols())
        throw std::invalid_argument("image_to_blocks: block exceeds image");
    const std::size_t grid_rows = image.rows() / block_rows;
    const std::size_t grid_cols = image.cols() / block_cols;
    const std::size_t m = block_rows * block_cols;

    BinMatrix samples(m, grid_rows * grid_cols);
    for (std::size_t br = 0; br < grid_rows; ++br) {
        for (std::size_t bc = 0; bc < grid_cols; ++bc) {
            const std::size_t sample = br * grid_cols + bc;
            PackedBits col(m);
            for (std::size_t c = 0; c < block_cols; ++c)
                for (std::size_t r = 0; r < block_rows; ++r)
                    if (image.get(br * block_rows + r, bc * block_cols + c)) col.set(c * block_rows + r, true);
            samples.set_col(sample, std::move(col));
        }
    }
    return samples;
}

BinMatrix blocks_to_image(const BinMatrix& samples, std::size_t block_rows, std::size_t block_cols,
                          std::size_t grid_cols) {
    if (block_rows * block_cols != samples.rows())
        throw std::invalid_argument("blocks_to_image: block size does not match sample length");
    if (grid_cols == 0 || samples.cols() % grid_cols != 0)
        throw std::invalid_argument("blocks_to_image: sample count does not fill the grid");
    const std::size_t grid_rows = samples.cols() / grid_cols;

    BinMatrix image(grid_rows * block_rows, grid_cols * block_cols);
    for (std::size_t sample = 0; sample < samples.cols(); ++sample) {
        const std::size_t br = sample / grid_cols;
        const std::size_t bc = sample % grid_cols;
        samples.col(sample).for_each_set([&](std::size_t bit) {
            image.set(br * block_rows + bit % block_rows, bc * block_cols + bit / block_rows, true);
        });
    }
    return image;
}

BinMatrix center_crop(const BinMatrix& image, std::size_t rows, std::size_t cols) {
    if (rows > image.rows() || cols > image.cols())
        throw std::invalid_argument("center_crop: window exceeds image");
    const std::size_t top = (image.rows() - rows) / 2;
    const std::size_t left = (image.cols() - cols) / 2;
    BinMatrix out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (image.get(top + i, left + j)) out.set(i, j, true);
    return out;
}

BinMatrix mosaic(const BinMatrix& tiles, std::size_t tile_rows, std::size_t tile_cols,
                 std::size_t grid_cols) {
    if (tile_rows * tile_cols != tiles.rows())
        throw std::invalid_argument("mosaic: tile size does not match column length");
    if (grid_cols == 0) throw std::invalid_argument("mosaic: grid_cols must be positive");
    const std::size_t count = tiles.cols();
    const std::size_t grid_rows = count == 0 ? 0 : (count + grid_cols - 1) / grid_cols;

    BinMatrix image(grid_rows * (tile_rows + 1) + 1, grid_cols * (tile_cols + 1) + 1);
    for (std::size_t t = 0; t < count; ++t) {
        const std::size_t top = 1 + (t / grid_cols) * (tile_rows + 1);
        const std::size_t left = 1 + (t % grid_cols) * (tile_cols + 1);
        tiles.col(t).for_each_set([&](std::size_t bit) {
            image.set(top + bit % tile_rows, left + bit / tile_rows, true);
        });
    }
    return image;
}

Planted synth_planted(std::size_t rows, std::size_t samples, std::size_t atoms,
                      std::size_t coeff_weight, double noise_rate, std::uint64_t seed) {
    if (coeff_weight > atoms) throw std::invalid_argument("synth_planted: coeff_weight exceeds atom count");
    if (!(noise_rate >= 0.0 && noise_rate < 1.0))
        throw std::invalid_argument("synth_planted: noise_rate must be in [0,1)");

    rng::Engine gen(seed);
    Planted out;
    out.dictionary = BinMatrix(rows, atoms);
    for (std::size_t k = 0; k < atoms; ++k) {
        PackedBits col(rows);
        for (std::size_t i = 0; i < rows; ++i)
            if (rng::bernoulli(gen, 0.5)) col.set(i, true);
        out.dictionary.set_col(k, std::move(col));
    }
    out.coefficients = BinMatrix(atoms, samples);
    for (std::size_t j = 0; j < samples; ++j) {
        PackedBits col(atoms);
        for (std::size_t k : rng::sample_without_replacement(gen, atoms, coeff_weight)) col.set(k, true);
        out.coefficients.set_col(j, std::move(col));
    }
    out.data = mod2_multiply(out.dictionary, out.coefficients);
    if (noise_rate > 0.0) {
        for (std::size_t j = 0; j < samples; ++j) {
            PackedBits flips(rows);
            for (std::size_t i = 0; i < rows; ++i)
                if (rng::bernoulli(gen, noise_rate)) flips.set(i, true);
            out.data.xor_col(j, flips);
        }
    }
    return out;
}

void save_model(const Model& model, Method method, std::uint64_t seed,
                const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    save_pbm(model.dictionary, dir / "D.pbm");
    save_pbm(model.coefficients, dir / "A.pbm");
    save_pbm(model.residual, dir / "E.pbm");

    const CodelengthReport len = model_codelength(model.dictionary, model.coefficients, model.residual);
    std::ofstream out(dir / "manifest.txt");
    if (!out) fail(dir / "manifest.txt", "cannot open for writing");
    char bps[32];
    std::snprintf(bps, sizeof bps, "%.6f", len.bits_per_sample);
    out << "m = " << model.dictionary.rows() << '\n'
        << "n = " << model.coefficients.cols() << '\n'
        << "p = " << model.dictionary.cols() << '\n'
        << "method = " << to_string(method) << '\n'
        << "seed = " << seed << '\n'
        << "outer_iters = " << model.outer_iters << '\n'
        << "converged = " << (model.converged ? 1 : 0) << '\n'
        << "residual_weight = " << model.residual_weight << '\n'
        << "L_D = " << len.dict_bits << '\n'
        << "L_A = " << len.coef_bits << '\n'
        << "L_E = " << len.resid_bits << '\n'
        << "total_bits = " << len.total_bits << '\n'
        << "bits_per_sample = " << bps << '\n';
    if (!out) fail(dir / "manifest.txt", "write failed");
}

SavedModel load_model(const std::filesystem::path& dir, const BinMatrix* data) {
    const auto manifest_path = dir / "manifest.txt";
    std::ifstream in(manifest_path);
    if (!in) fail(manifest_path, "cannot open");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto field = [&](const char* key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) fail(manifest_path, std::string("missing field: ") + key);
        return it->second;
    };
    auto number = [&](const char* key) { return std::stoull(field(key)); };

    SavedModel out;
    out.method = method_from_string(field("method"));
    out.seed = number("seed");
    out.model.dictionary = load_pbm(dir / "D.pbm");
    out.model.coefficients = load_pbm(dir / "A.pbm");
    out.model.residual = load_pbm(dir / "E.pbm");
    out.model.outer_iters = number("outer_iters");
    out.model.converged = number("converged") != 0;
    out.model.residual_weight = out.model.residual.weight();

    if (out.model.dictionary.rows() != number("m") || out.model.coefficients.cols() != number("n") ||
        out.model.dictionary.cols() != number("p"))
        fail(manifest_path, "dimensions disagree with stored matrices");
    if (out.model.coefficients.rows() != out.model.dictionary.cols() ||
        out.model.residual.rows() != out.model.dictionary.rows() ||
        out.model.residual.cols() != out.model.coefficients.cols())
        fail(manifest_path, "stored matrices are not conformable");
    if (out.model.residual_weight != number("residual_weight"))
        fail(manifest_path, "residual_weight disagrees with E.pbm");

    out.codelength = model_codelength(out.model.dictionary, out.model.coefficients, out.model.residual);
    if (out.codelength.dict_bits != number("L_D") || out.codelength.coef_bits != number("L_A") ||
        out.codelength.resid_bits != number("L_E") || out.codelength.total_bits != number("total_bits"))
        fail(manifest_path, "codelength disagrees with stored matrices");

    if (data) {
        if (data->rows() != out.model.dictionary.rows() || data->cols() != out.model.coefficients.cols())
            fail(manifest_path, "data dimensions disagree with model");
        const BinMatrix recon = mod2_multiply(out.model.dictionary, out.model.coefficients);
        for (std::size_t j = 0; j < data->cols(); ++j)
            if ((data->col(j) ^ recon.col(j)) != out.model.residual.col(j))
                fail(manifest_path, "residual is inconsistent with the supplied data");
    }
    return out;
}

}  // namespace bmf
