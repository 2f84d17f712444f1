#pragma once

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rdnn/common.hpp"
#include "rdnn/rng.hpp"

namespace rdnn {

// Fully connected feed-forward net, tanh hidden layers, affine output.
// layer_sizes includes input and output widths, e.g. {2, 60, 60, 60, 60, 1}.
struct NetworkParams {
    std::vector<int> layer_sizes;
    std::vector<MatrixXd> weights;  // weights[l]: layer_sizes[l+1] x layer_sizes[l]
    std::vector<VectorXd> biases;   // biases[l]:  layer_sizes[l+1]
    std::uint64_t seed = 0;

    int num_layers() const { return static_cast<int>(weights.size()); }
    int input_dim() const { return layer_sizes.front(); }
    int output_dim() const { return layer_sizes.back(); }

    long parameter_count() const {
        long n = 0;
        for (std::size_t l = 0; l < weights.size(); ++l)
            n += weights[l].size() + biases[l].size();
        return n;
    }
};

// Glorot-uniform weights, zero biases.  Weight entries are drawn in storage
// order (column-major) from one counter stream so the result is a pure
// function of (layer_sizes, seed).
inline NetworkParams init_network(const std::vector<int>& layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() < 2)
        throw Error("init_network: need at least input and output layers");
    for (int n : layer_sizes)
        if (n <= 0) throw Error("init_network: layer sizes must be positive");

    NetworkParams net;
    net.layer_sizes = layer_sizes;
    net.seed = seed;
    SplitMix64 rng(seed);
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const int fan_in = layer_sizes[l];
        const int fan_out = layer_sizes[l + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        MatrixXd w(fan_out, fan_in);
        for (int j = 0; j < fan_in; ++j)
            for (int i = 0; i < fan_out; ++i)
                w(i, j) = rng.next_uniform(-limit, limit);
        net.weights.push_back(std::move(w));
        net.biases.push_back(VectorXd::Zero(fan_out));
    }
    return net;
}

// Flat layout: for each layer, W in column-major order, then b.  Gradients
// and optimizer moments use the same layout.
inline VectorXd to_flat(const NetworkParams& net) {
    VectorXd flat(net.parameter_count());
    long off = 0;
    for (int l = 0; l < net.num_layers(); ++l) {
        const auto& w = net.weights[l];
        std::memcpy(flat.data() + off, w.data(), sizeof(double) * w.size());
        off += w.size();
        const auto& b = net.biases[l];
        std::memcpy(flat.data() + off, b.data(), sizeof(double) * b.size());
        off += b.size();
    }
    return flat;
}

inline void from_flat(NetworkParams& net, const VectorXd& flat) {
    if (flat.size() != net.parameter_count())
        throw Error("from_flat: size mismatch");
    long off = 0;
    for (int l = 0; l < net.num_layers(); ++l) {
        auto& w = net.weights[l];
        std::memcpy(w.data(), flat.data() + off, sizeof(double) * w.size());
        off += w.size();
        auto& b = net.biases[l];
        std::memcpy(b.data(), flat.data() + off, sizeof(double) * b.size());
        off += b.size();
    }
}

// Value-only forward pass.  inputs: input_dim x N, returns output_dim x N.
inline MatrixXd evaluate(const NetworkParams& net, const MatrixXd& inputs) {
    if (inputs.rows() != net.input_dim())
        throw Error("evaluate: input dimension mismatch");
    MatrixXd a = inputs;
    const int L = net.num_layers();
    for (int l = 0; l < L; ++l) {
        MatrixXd z = (net.weights[l] * a).colwise() + net.biases[l];
        a = (l + 1 < L) ? fast_tanh(z) : std::move(z);
    }
    return a;
}

// Evaluates the net on the tensor grid xs x ts.  Returns one nx x nt matrix
// per output component.
inline std::vector<MatrixXd> evaluate_grid(const NetworkParams& net,
                                           const std::vector<double>& xs,
                                           const std::vector<double>& ts) {
    const long nx = static_cast<long>(xs.size());
    const long nt = static_cast<long>(ts.size());
    MatrixXd inputs(2, nx * nt);
    for (long j = 0; j < nt; ++j)
        for (long i = 0; i < nx; ++i) {
            inputs(0, j * nx + i) = xs[i];
            inputs(1, j * nx + i) = ts[j];
        }
    MatrixXd out = evaluate(net, inputs);
    std::vector<MatrixXd> grids;
    for (int c = 0; c < net.output_dim(); ++c) {
        MatrixXd g(nx, nt);
        for (long j = 0; j < nt; ++j)
            for (long i = 0; i < nx; ++i) g(i, j) = out(c, j * nx + i);
        grids.push_back(std::move(g));
    }
    return grids;
}

// Checkpoint format: one UTF-8 header line
//   "rdnn-checkpoint 1 <n0,n1,...,nk> <seed>\n"
// followed by the flat parameter vector as raw little-endian doubles.
// Round-trips bitwise.
inline void save_checkpoint(const NetworkParams& net, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IOError("save_checkpoint: cannot open " + path);
    std::ostringstream header;
    header << "rdnn-checkpoint 1 ";
    for (std::size_t i = 0; i < net.layer_sizes.size(); ++i) {
        if (i) header << ',';
        header << net.layer_sizes[i];
    }
    header << ' ' << net.seed << '\n';
    os << header.str();
    VectorXd flat = to_flat(net);
    os.write(reinterpret_cast<const char*>(flat.data()),
             static_cast<std::streamsize>(sizeof(double) * flat.size()));
    if (!os) throw IOError("save_checkpoint: write failed for " + path);
}

inline NetworkParams load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IOError("load_checkpoint: cannot open " + path);
    std::string header;
    if (!std::getline(is, header)) throw IOError("load_checkpoint: missing header in " + path);
    std::istringstream hs(header);
    std::string magic, sizes;
    int version = 0;
    std::uint64_t seed = 0;
    hs >> magic >> version >> sizes >> seed;
    if (magic != "rdnn-checkpoint" || version != 1 || hs.fail())
        throw IOError("load_checkpoint: bad header in " + path);
    std::vector<int> layer_sizes;
    std::istringstream ss(sizes);
    std::string tok;
    while (std::getline(ss, tok, ',')) layer_sizes.push_back(std::stoi(tok));
    if (layer_sizes.size() < 2) throw IOError("load_checkpoint: bad layer sizes in " + path);

    NetworkParams net;
    net.layer_sizes = layer_sizes;
    net.seed = seed;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        net.weights.emplace_back(MatrixXd::Zero(layer_sizes[l + 1], layer_sizes[l]));
        net.biases.emplace_back(VectorXd::Zero(layer_sizes[l + 1]));
    }
    VectorXd flat(net.parameter_count());
    is.read(reinterpret_cast<char*>(flat.data()),
            static_cast<std::streamsize>(sizeof(double) * flat.size()));
    if (is.gcount() != static_cast<std::streamsize>(sizeof(double) * flat.size()))
        throw IOError("load_checkpoint: truncated payload in " + path);
    from_flat(net, flat);
    return net;
}

}  // namespace rdnn
