// Batch front end: learn fixed-order models, search the model order by
// codelength, encode held-out samples, render mosaics, generate synthetic
// data. Every command is deterministic given its flags and seed.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "bmf/io.hpp"
#include "bmf/mdl.hpp"

namespace fs = std::filesystem;
using namespace bmf;

namespace {

struct Shape {
    std::size_t rows = 0;
    std::size_t cols = 0;
};

Shape parse_shape(const std::string& text, const char* what) {
    const auto x = text.find('x');
    if (x == std::string::npos || x == 0 || x + 1 == text.size())
        throw CLI::ValidationError(std::string(what) + " must look like ROWSxCOLS");
    Shape s;
    try {
        s.rows = std::stoul(text.substr(0, x));
        s.cols = std::stoul(text.substr(x + 1));
    } catch (const std::exception&) {
        throw CLI::ValidationError(std::string(what) + " must look like ROWSxCOLS");
    }
    return s;
}

struct IngestOptions {
    std::string input;
    std::string crop;            // optional HxW center crop before blocking
    std::string blocks;          // optional HxW block extraction
    std::int64_t threshold = -1; // PGM binarization threshold, -1 = half of maxval
};

void add_ingest_flags(CLI::App* cmd, IngestOptions& opt) {
    cmd->add_option("--input", opt.input, "input PBM matrix, or image (PBM/PGM)")->required();
    cmd->add_option("--crop", opt.crop, "center-crop the input image to HxW before use");
    cmd->add_option("--blocks", opt.blocks, "cut the input image into HxW blocks, one sample per block");
    cmd->add_option("--threshold", opt.threshold, "binarization threshold for PGM input");
}

bool looks_like_pgm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    const int c0 = in.get();
    const int c1 = in.get();
    return c0 == 'P' && (c1 == '2' || c1 == '5');
}

BinMatrix load_samples(const IngestOptions& opt) {
    BinMatrix m;
    if (looks_like_pgm(opt.input)) {
        const GrayImage gray = load_pgm(opt.input);
        const std::uint32_t threshold = opt.threshold >= 0 ? static_cast<std::uint32_t>(opt.threshold)
                                                           : (gray.maxval + 1) / 2;
        m = binarize(gray, threshold);
    } else {
        m = load_pbm(opt.input);
    }
    if (!opt.crop.empty()) {
        const Shape s = parse_shape(opt.crop, "--crop");
        m = center_crop(m, s.rows, s.cols);
    }
    if (!opt.blocks.empty()) {
        const Shape s = parse_shape(opt.blocks, "--blocks");
        m = image_to_blocks(m, s.rows, s.cols);
    }
    return m;
}

struct LearnFlags {
    std::string method = "mob";
    std::string init = "samples";
    double theta = 0.5;
    std::uint64_t seed = 0;
    std::int64_t h_max = -1;  // -1 = atom count
    std::size_t w_max = 1;
    std::size_t max_iter = 100;
    unsigned threads = 1;
};

void add_learn_flags(CLI::App* cmd, LearnFlags& opt) {
    cmd->add_option("--method", opt.method, "dictionary update rule")
        ->check(CLI::IsMember({"mob", "kprox"}))
        ->capture_default_str();
    cmd->add_option("--init", opt.init, "initial dictionary source")
        ->check(CLI::IsMember({"bernoulli", "samples"}))
        ->capture_default_str();
    cmd->add_option("--theta", opt.theta, "bit probability for --init bernoulli")->capture_default_str();
    cmd->add_option("--seed", opt.seed, "random seed")->capture_default_str();
    cmd->add_option("--h-max", opt.h_max, "toggle cap per sample (-1 = atom count)")->capture_default_str();
    cmd->add_option("--w-max", opt.w_max, "stop encoding a sample below this residual weight")
        ->capture_default_str();
    cmd->add_option("--max-iter", opt.max_iter, "outer iteration cap")->capture_default_str();
    cmd->add_option("--threads", opt.threads, "worker threads for the encode sweep")
        ->envname("BMF_THREADS")
        ->capture_default_str();
}

LearnParams to_params(const LearnFlags& opt) {
    LearnParams p;
    p.method = method_from_string(opt.method);
    p.init = opt.init == "bernoulli" ? InitKind::bernoulli : InitKind::samples;
    p.theta = opt.theta;
    p.seed = opt.seed;
    if (opt.h_max >= 0) p.encode.h_max = static_cast<std::size_t>(opt.h_max);
    p.encode.w_max = opt.w_max;
    p.max_outer_iter = opt.max_iter;
    p.threads = opt.threads;
    return p;
}

void write_trajectory_csv(const fs::path& path, const std::vector<SelectStep>& steps) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << "p,L_D,L_A,L_E,total,bits_per_sample,wall_time_seconds\n";
    char buf[64];
    for (const auto& s : steps) {
        std::snprintf(buf, sizeof buf, "%.6f,%.3f", s.codelength.bits_per_sample, s.seconds);
        out << s.atoms << ',' << s.codelength.dict_bits << ',' << s.codelength.coef_bits << ','
            << s.codelength.resid_bits << ',' << s.codelength.total_bits << ',' << buf << '\n';
    }
}

int cmd_learn(const IngestOptions& ingest, const LearnFlags& flags, std::int64_t atoms,
              const std::string& init_dict, const std::string& output) {
    if (init_dict.empty() && atoms < 1) {
        std::cerr << "error: p must be >= 1\n";
        return 1;
    }
    const BinMatrix data = load_samples(ingest);
    const LearnParams params = to_params(flags);
    const BinMatrix d0 = init_dict.empty()
                             ? initial_dictionary(data, static_cast<std::size_t>(atoms), params)
                             : load_pbm(init_dict);

    fs::create_directories(output);
    std::ofstream csv(fs::path(output) / "iterations.csv");
    if (!csv) throw std::runtime_error(output + "/iterations.csv: cannot open for writing");
    csv << "iter,h_E,changed_bits_D,changed_bits_A,seconds\n";
    const Model model = learn(data, d0, params, [&](const LearnIterStats& s) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", s.seconds);
        csv << s.iter << ',' << s.residual_weight << ',' << s.changed_bits_dict << ','
            << s.changed_bits_coef << ',' << buf << '\n';
    });
    csv.close();

    save_model(model, params.method, params.seed, output);
    const auto len = model_codelength(model.dictionary, model.coefficients, model.residual);
    if (!model.converged)
        std::cerr << "warning: stopped at the iteration cap without an exact fixed point\n";
    char bps[32];
    std::snprintf(bps, sizeof bps, "%.6f", len.bits_per_sample);
    std::cout << "learned p=" << model.dictionary.cols() << " h(E)=" << model.residual_weight
              << " iters=" << model.outer_iters << " bits_per_sample=" << bps << '\n';
    return 0;
}

int cmd_select(const IngestOptions& ingest, const LearnFlags& flags, std::size_t p0,
               const std::string& output) {
    const BinMatrix data = load_samples(ingest);
    SelectParams params;
    params.p0 = p0;
    params.learn = to_params(flags);

    const SelectResult result = forward_select(data, params);
    fs::create_directories(output);
    save_model(result.model, params.learn.method, params.learn.seed, output);
    write_trajectory_csv(fs::path(output) / "trajectory.csv", result.trajectory);

    char bps[32];
    std::snprintf(bps, sizeof bps, "%.6f", result.codelength.bits_per_sample);
    std::cout << "selected p=" << result.model.dictionary.cols() << " bits_per_sample=" << bps
              << " h(E)=" << result.model.residual_weight << '\n';
    return 0;
}

int cmd_encode(const IngestOptions& ingest, const LearnFlags& flags, const std::string& model_dir,
               const std::string& output, bool warm_start) {
    const SavedModel saved = load_model(model_dir);
    const BinMatrix data = load_samples(ingest);
    if (data.rows() != saved.model.dictionary.rows())
        throw std::runtime_error("sample length does not match the model dictionary");

    const std::size_t p = saved.model.dictionary.cols();
    BinMatrix a0(p, data.cols());
    if (warm_start) {
        if (saved.model.coefficients.cols() != data.cols())
            throw std::runtime_error("--warm-start needs as many samples as the model was trained on");
        a0 = saved.model.coefficients;
    }
    EncodeParams ep;
    if (flags.h_max >= 0) ep.h_max = static_cast<std::size_t>(flags.h_max);
    ep.w_max = flags.w_max;
    const EncodeResult enc = encode_all(data, saved.model.dictionary, a0, ep, flags.threads);

    fs::create_directories(output);
    save_pbm(enc.coefficients, fs::path(output) / "A.pbm");
    save_pbm(enc.residual, fs::path(output) / "E.pbm");

    const auto len = model_codelength(saved.model.dictionary, enc.coefficients, enc.residual);
    char bps[32];
    std::snprintf(bps, sizeof bps, "%.6f", len.bits_per_sample);
    std::cout << "encoded n=" << data.cols() << " h(E)=" << enc.residual.weight()
              << " bits_per_sample=" << bps << '\n';
    return 0;
}

int cmd_mosaic(const std::string& model_dir, const std::string& source, const std::string& tile,
               std::size_t grid_cols, const std::string& output) {
    const SavedModel saved = load_model(model_dir);
    const BinMatrix& tiles = source == "residual" ? saved.model.residual : saved.model.dictionary;
    const Shape s = parse_shape(tile, "--tile");
    if (s.rows * s.cols != tiles.rows())
        throw std::runtime_error("--tile dimensions do not multiply to the sample length");
    if (grid_cols == 0) {
        grid_cols = 1;
        while (grid_cols * grid_cols < tiles.cols()) ++grid_cols;
    }
    save_pbm(mosaic(tiles, s.rows, s.cols, grid_cols), output);
    std::cout << "wrote " << output << " with " << tiles.cols() << " tiles\n";
    return 0;
}

int cmd_synth(std::size_t rows, std::size_t cols, std::int64_t atoms, std::size_t coeff_weight,
              double noise, std::uint64_t seed, const std::string& output) {
    if (atoms < 1) {
        std::cerr << "error: p must be >= 1\n";
        return 1;
    }
    const Planted planted =
        synth_planted(rows, cols, static_cast<std::size_t>(atoms), coeff_weight, noise, seed);
    fs::create_directories(output);
    save_pbm(planted.data, fs::path(output) / "X.pbm");
    save_pbm(planted.dictionary, fs::path(output) / "D.pbm");
    save_pbm(planted.coefficients, fs::path(output) / "A.pbm");
    std::cout << "wrote X(" << rows << 'x' << cols << ") D(" << rows << 'x' << atoms << ") A("
              << atoms << 'x' << cols << ") h(X)=" << planted.data.weight() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bit-packed binary matrix factorization toolkit"};
    app.require_subcommand(1);

    IngestOptions ingest;
    LearnFlags flags;
    std::string output;
    std::string model_dir;
    std::int64_t atoms = 0;
    std::size_t p0 = 1;
    bool warm_start = false;
    std::string source = "dict";
    std::string tile;
    std::size_t grid_cols = 0;
    std::size_t rows = 0, cols = 0;
    std::size_t coeff_weight = 1;
    double noise = 0.0;

    std::string init_dict;
    auto* learn_cmd = app.add_subcommand("learn", "learn a fixed-order model");
    add_ingest_flags(learn_cmd, ingest);
    add_learn_flags(learn_cmd, flags);
    learn_cmd->add_option("--atoms", atoms, "model order p");
    learn_cmd->add_option("--init-dict", init_dict, "PBM file with the initial dictionary (overrides --atoms/--init)");
    learn_cmd->add_option("--output", output, "model directory to write")->required();

    auto* select_cmd = app.add_subcommand("select", "search the model order by codelength");
    add_ingest_flags(select_cmd, ingest);
    add_learn_flags(select_cmd, flags);
    select_cmd->add_option("--p0", p0, "initial model order")->capture_default_str();
    select_cmd->add_option("--output", output, "model directory to write")->required();

    auto* encode_cmd = app.add_subcommand("encode", "encode samples against a stored model");
    add_ingest_flags(encode_cmd, ingest);
    add_learn_flags(encode_cmd, flags);
    encode_cmd->add_option("--model", model_dir, "model directory to load")->required();
    encode_cmd->add_option("--output", output, "directory for A.pbm and E.pbm")->required();
    encode_cmd->add_flag("--warm-start", warm_start, "start from the stored coefficients");

    auto* mosaic_cmd = app.add_subcommand("mosaic", "render model columns as a tiled image");
    mosaic_cmd->add_option("--model", model_dir, "model directory to load")->required();
    mosaic_cmd->add_option("--source", source, "which columns to render")
        ->check(CLI::IsMember({"dict", "residual"}))
        ->capture_default_str();
    mosaic_cmd->add_option("--tile", tile, "tile shape HxW, H*W = sample length")->required();
    mosaic_cmd->add_option("--grid-cols", grid_cols, "tiles per mosaic row (0 = square-ish)")
        ->capture_default_str();
    mosaic_cmd->add_option("--output", output, "output PBM image")->required();

    auto* synth_cmd = app.add_subcommand("synth", "generate a planted synthetic dataset");
    synth_cmd->add_option("--rows", rows, "sample length m")->required();
    synth_cmd->add_option("--cols", cols, "sample count n")->required();
    synth_cmd->add_option("--atoms", atoms, "planted dictionary size p")->required();
    synth_cmd->add_option("--coeff-weight", coeff_weight, "set bits per coefficient column")
        ->capture_default_str();
    synth_cmd->add_option("--noise", noise, "independent bit-flip probability")->capture_default_str();
    synth_cmd->add_option("--seed", flags.seed, "random seed")->capture_default_str();
    synth_cmd->add_option("--output", output, "directory for X.pbm, D.pbm, A.pbm")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (learn_cmd->parsed()) return cmd_learn(ingest, flags, atoms, init_dict, output);
        if (select_cmd->parsed()) return cmd_select(ingest, flags, p0, output);
        if (encode_cmd->parsed()) return cmd_encode(ingest, flags, model_dir, output, warm_start);
        if (mosaic_cmd->parsed()) return cmd_mosaic(model_dir, source, tile, grid_cols, output);
        if (synth_cmd->parsed()) return cmd_synth(rows, cols, atoms, coeff_weight, noise, flags.seed, output);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
