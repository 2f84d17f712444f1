#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "rdnn/network.hpp"

using namespace rdnn;

TEST_CASE("init_network shapes, bounds and determinism") {
    NetworkParams net = init_network({2, 16, 16, 1}, 42);
    REQUIRE(net.num_layers() == 3);
    REQUIRE(net.weights[0].rows() == 16);
    REQUIRE(net.weights[0].cols() == 2);
    REQUIRE(net.weights[2].rows() == 1);
    REQUIRE(net.parameter_count() == 337);

    for (int l = 0; l < net.num_layers(); ++l) {
        REQUIRE(net.biases[l].cwiseAbs().maxCoeff() == 0.0);
        const double limit =
            std::sqrt(6.0 / (net.layer_sizes[l] + net.layer_sizes[l + 1]));
        REQUIRE(net.weights[l].cwiseAbs().maxCoeff() <= limit);
        REQUIRE(net.weights[l].cwiseAbs().maxCoeff() > 0.0);
    }

    NetworkParams again = init_network({2, 16, 16, 1}, 42);
    for (int l = 0; l < 3; ++l)
        REQUIRE((net.weights[l] - again.weights[l]).cwiseAbs().maxCoeff() == 0.0);

    NetworkParams other = init_network({2, 16, 16, 1}, 43);
    REQUIRE((net.weights[0] - other.weights[0]).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("init_network rejects degenerate shapes") {
    REQUIRE_THROWS_AS(init_network({2}, 1), Error);
    REQUIRE_THROWS_AS(init_network({2, 0, 1}, 1), Error);
}

TEST_CASE("flat layout is layer-major, weights column-major then bias") {
    NetworkParams net = init_network({2, 3, 1}, 9);
    VectorXd flat = to_flat(net);
    REQUIRE(flat.size() == net.parameter_count());
    // First block: W0 in column-major order.
    REQUIRE(flat(0) == net.weights[0](0, 0));
    REQUIRE(flat(1) == net.weights[0](1, 0));
    REQUIRE(flat(2) == net.weights[0](2, 0));
    REQUIRE(flat(3) == net.weights[0](0, 1));
    // Then b0.
    REQUIRE(flat(6) == net.biases[0](0));
    // Then W1 and b1.
    REQUIRE(flat(9) == net.weights[1](0, 0));
    REQUIRE(flat(12) == net.biases[1](0));

    VectorXd perturbed = flat;
    perturbed(5) = 3.25;
    from_flat(net, perturbed);
    REQUIRE(net.weights[0](2, 1) == 3.25);
    REQUIRE((to_flat(net) - perturbed).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("evaluate matches a hand computation") {
    NetworkParams net;
    net.layer_sizes = {2, 2, 1};
    net.weights = {MatrixXd(2, 2), MatrixXd(1, 2)};
    net.biases = {VectorXd(2), VectorXd(1)};
    net.weights[0] << 0.5, -0.25, 1.0, 0.75;
    net.biases[0] << 0.1, -0.2;
    net.weights[1] << 2.0, -1.5;
    net.biases[1] << 0.3;

    const double x = 0.4, t = 1.2;
    const double h0 = std::tanh(0.5 * x - 0.25 * t + 0.1);
    const double h1 = std::tanh(1.0 * x + 0.75 * t - 0.2);
    const double expect = 2.0 * h0 - 1.5 * h1 + 0.3;

    MatrixXd in(2, 1);
    in << x, t;
    REQUIRE(std::abs(evaluate(net, in)(0, 0) - expect) < 1e-14);
}

TEST_CASE("evaluate_grid lays out values as (x index, t index)") {
    NetworkParams net = init_network({2, 5, 2}, 4);
    std::vector<double> xs = {-1.0, 0.0, 0.5};
    std::vector<double> ts = {0.0, 2.0};
    auto grids = evaluate_grid(net, xs, ts);
    REQUIRE(grids.size() == 2);
    REQUIRE(grids[0].rows() == 3);
    REQUIRE(grids[0].cols() == 2);
    MatrixXd in(2, 1);
    in << xs[2], ts[1];
    MatrixXd point = evaluate(net, in);
    REQUIRE(grids[0](2, 1) == point(0, 0));
    REQUIRE(grids[1](2, 1) == point(1, 0));
}

TEST_CASE("checkpoints round-trip bitwise") {
    const std::string path = std::filesystem::temp_directory_path() / "rdnn_test.ckpt";
    NetworkParams net = init_network({2, 7, 3, 2}, 20250823);
    net.biases[1](0) = 1e-300;  // subnormal-adjacent values must survive
    net.weights[0](0, 0) = -0.0;
    save_checkpoint(net, path);

    NetworkParams back = load_checkpoint(path);
    REQUIRE(back.layer_sizes == net.layer_sizes);
    REQUIRE(back.seed == net.seed);
    VectorXd a = to_flat(net), b = to_flat(back);
    REQUIRE(a.size() == b.size());
    for (long i = 0; i < a.size(); ++i) {
        REQUIRE(std::memcmp(&a[i], &b[i], sizeof(double)) == 0);
    }
    std::filesystem::remove(path);
}

TEST_CASE("checkpoint loader rejects corrupt files") {
    namespace fs = std::filesystem;
    const std::string dir = fs::temp_directory_path() / "rdnn_ckpt_corrupt";
    fs::create_directories(dir);

    {
        std::ofstream os(dir + "/bad_magic.ckpt", std::ios::binary);
        os << "not-a-checkpoint 1 2,3,1 0\n";
    }
    REQUIRE_THROWS_AS(load_checkpoint(dir + "/bad_magic.ckpt"), IOError);

    {
        NetworkParams net = init_network({2, 5, 1}, 3);
        save_checkpoint(net, dir + "/trunc.ckpt");
        fs::resize_file(dir + "/trunc.ckpt", fs::file_size(dir + "/trunc.ckpt") - 9);
    }
    REQUIRE_THROWS_AS(load_checkpoint(dir + "/trunc.ckpt"), IOError);

    REQUIRE_THROWS_AS(load_checkpoint(dir + "/missing.ckpt"), IOError);
    fs::remove_all(dir);
}
