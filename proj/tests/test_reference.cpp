#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstring>

#include "rdnn/reference.hpp"

using namespace rdnn;

namespace {

double trapezoid_mass(const GridSolution& g, int c, long j) {
    double acc = 0.0;
    for (long i = 0; i + 1 < g.nx(); ++i) {
        const double h = g.xs[static_cast<std::size_t>(i + 1)] - g.xs[static_cast<std::size_t>(i)];
        acc += 0.5 * h * (g.values[c](i, j) + g.values[c](i + 1, j));
    }
    return acc;
}

GridSolution exact_on(const EquationSpec& eq, const GridSolution& like) {
    GridSolution g;
    g.xs = like.xs;
    g.ts = like.ts;
    RowVectorXd row(like.nx());
    for (long i = 0; i < like.nx(); ++i) row(i) = like.xs[static_cast<std::size_t>(i)];
    for (int c = 0; c < eq.d_out; ++c) g.values.emplace_back(MatrixXd::Zero(like.nx(), like.nt()));
    for (long j = 0; j < like.nt(); ++j) {
        MatrixXd u = eq.exact(row, like.ts[static_cast<std::size_t>(j)]);
        for (int c = 0; c < eq.d_out; ++c) g.values[c].col(j) = u.row(c).transpose();
    }
    return g;
}

}  // namespace

TEST_CASE("line solver reproduces the closed-form cosine decay") {
    EquationSpec eq = make_diffusion();
    DomainSpec domain{-3.0, 3.0, 0.5};
    GridSolution mol = mol_solve(eq, domain, 201, 1e-4, {0.0, 0.25, 0.5});
    GridSolution exact = exact_on(eq, mol);
    REQUIRE(linf_at(mol, exact, 0) == 0.0);  // snapshot at t = 0 is the initial data
    REQUIRE(linf_error(mol, exact) < 1e-3);
}

TEST_CASE("spatial error shrinks at second order") {
    EquationSpec eq = make_diffusion();
    DomainSpec domain{-3.0, 3.0, 0.1};
    const std::vector<double> snaps{0.1};
    GridSolution coarse = mol_solve(eq, domain, 101, 2e-5, snaps);
    GridSolution fine = mol_solve(eq, domain, 201, 2e-5, snaps);
    const double e_coarse = linf_error(coarse, exact_on(eq, coarse));
    const double e_fine = linf_error(fine, exact_on(eq, fine));
    const double order = std::log2(e_coarse / e_fine);
    REQUIRE(order > 1.9);
    REQUIRE(order < 2.3);
}

TEST_CASE("no-flux walls conserve the trapezoid mass of a pure diffusion run") {
    EquationSpec eq = make_diffusion();
    DomainSpec domain{-3.0, 3.0, 0.5};
    GridSolution mol = mol_solve(eq, domain, 151, 1e-4, {0.0, 0.5});
    const double m0 = trapezoid_mass(mol, 0, 0);
    const double m1 = trapezoid_mass(mol, 0, 1);
    REQUIRE(std::abs(m1 - m0) < 1e-10);
}

TEST_CASE("line solver keeps even symmetry") {
    EquationSpec eq = make_diffusion();
    GridSolution mol = mol_solve(eq, DomainSpec{-3.0, 3.0, 0.3}, 121, 1e-4, {0.3});
    for (long i = 0; i < mol.nx(); ++i)
        REQUIRE(mol.values[0](i, 0) ==
                Catch::Approx(mol.values[0](mol.nx() - 1 - i, 0)).margin(1e-12));
}

TEST_CASE("unstable step size reports divergence") {
    EquationSpec eq = make_diffusion();
    // dx = 0.03 puts the RK4 stability limit near dt = 6.3e-4; 1e-3 blows up.
    REQUIRE_THROWS_AS(mol_solve(eq, DomainSpec{-3.0, 3.0, 1.0}, 201, 1e-3, {1.0}),
                      DivergedError);
}

TEST_CASE("interpolated snapshots sit between steps") {
    EquationSpec eq = make_diffusion();
    DomainSpec domain{-3.0, 3.0, 0.3};
    // 0.2505 is not a multiple of the step; the value is interpolated.
    GridSolution mol = mol_solve(eq, domain, 201, 2e-4, {0.2505});
    GridSolution exact = exact_on(eq, mol);
    REQUIRE(linf_error(mol, exact) < 1e-3);
}

TEST_CASE("bistable reaction ignites and advances a front") {
    EquationSpec eq = make_bistable();
    DomainSpec domain{-30.0, 30.0, 10.0};
    GridSolution mol = mol_solve(eq, domain, 301, 0.01, {0.0, 5.0, 10.0});

    // The centre starts on the stable branch and stays there.
    const long mid = mol.nx() / 2;
    REQUIRE(std::abs(mol.values[0](mid, 2) - 1.0) < 1e-2);

    const double f0 = front_position(mol.xs, mol.values[0].col(0));
    const double f5 = front_position(mol.xs, mol.values[0].col(1));
    const double f10 = front_position(mol.xs, mol.values[0].col(2));
    REQUIRE(std::isfinite(f0));
    REQUIRE(f10 > f5);
    const double speed = (f10 - f5) / 5.0;
    REQUIRE(speed > 0.30);
    REQUIRE(speed < 0.55);
}

TEST_CASE("front locator finds the rightmost downward crossing") {
    std::vector<double> xs{0.0, 1.0, 2.0, 3.0, 4.0};
    VectorXd ramp(5);
    ramp << 1.0, 0.8, 0.6, 0.4, 0.2;
    REQUIRE(front_position(xs, ramp) == Catch::Approx(2.5));

    VectorXd two(5);
    two << 1.0, 0.2, 1.0, 0.2, 0.2;
    REQUIRE(front_position(xs, two) == Catch::Approx(2.625));

    VectorXd rising(5);
    rising << 0.0, 0.1, 0.2, 0.3, 0.4;
    REQUIRE(std::isnan(front_position(xs, rising)));

    VectorXd high(5);
    high << 1.0, 0.9, 0.95, 0.9, 1.0;
    REQUIRE(std::isnan(front_position(xs, high)));
}

TEST_CASE("grid files round-trip to the bit") {
    GridSolution g;
    g.xs = {-1.0, 0.0, 2.5};
    g.ts = {0.0, 0.1, 0.7};
    g.values = {MatrixXd(3, 3), MatrixXd(3, 3)};
    g.values[0] << 3.141592653589793, 1e-300, -0.0, 1.0 / 3.0, -7.25, 2e17, 0.1, 0.2, 0.3;
    g.values[1] = -2.0 * g.values[0];

    const std::string path = "roundtrip_test.grid";
    save_grid(g, path);
    GridSolution r = load_grid(path);
    std::remove(path.c_str());

    REQUIRE(r.xs == g.xs);
    REQUIRE(r.ts == g.ts);
    REQUIRE(r.components() == 2);
    for (int c = 0; c < 2; ++c)
        REQUIRE(std::memcmp(r.values[c].data(), g.values[c].data(), sizeof(double) * 9) == 0);
}

TEST_CASE("grid loader rejects malformed files") {
    const std::string path = "malformed_test.grid";
    {
        std::ofstream os(path);
        os << "# wrong-magic\n";
    }
    REQUIRE_THROWS_AS(load_grid(path), IOError);
    {
        std::ofstream os(path);
        os << "# rdnn-grid 1\n# components 1\n# nx 2 nt 1\n# ts 0\n0.0 1.0\n";
        // second row missing
    }
    REQUIRE_THROWS_AS(load_grid(path), IOError);
    std::remove(path.c_str());
    REQUIRE_THROWS_AS(load_grid("no_such_file.grid"), IOError);
}

TEST_CASE("solver input validation") {
    EquationSpec eq = make_diffusion();
    DomainSpec domain{-3.0, 3.0, 1.0};
    REQUIRE_THROWS_AS(mol_solve(eq, domain, 2, 1e-3, {0.5}), Error);
    REQUIRE_THROWS_AS(mol_solve(eq, domain, 11, 0.0, {0.5}), Error);
    REQUIRE_THROWS_AS(mol_solve(eq, domain, 11, 1e-3, {1.5}), Error);
    REQUIRE_THROWS_AS(mol_solve(eq, domain, 11, 1e-3, {-0.5}), Error);
}

TEST_CASE("grid comparison helpers validate shapes") {
    GridSolution a, b;
    a.xs = {0.0, 1.0};
    a.ts = {0.0};
    a.values = {MatrixXd::Zero(2, 1)};
    b = a;
    b.xs = {0.0, 0.5, 1.0};
    b.values = {MatrixXd::Zero(3, 1)};
    REQUIRE_THROWS_AS(linf_at(a, b, 0), Error);
    GridSolution c = a;
    c.ts = {0.0, 1.0};
    c.values = {MatrixXd::Zero(2, 2)};
    REQUIRE_THROWS_AS(linf_error(a, c), Error);
    REQUIRE(linf_error(a, a) == 0.0);
}

TEST_CASE("network grids share the layout") {
    NetworkParams net = init_network({2, 5, 2}, 3);
    std::vector<double> xs{-1.0, 0.0, 1.0};
    std::vector<double> ts{0.0, 0.5};
    GridSolution g = network_grid(net, xs, ts);
    REQUIRE(g.nx() == 3);
    REQUIRE(g.nt() == 2);
    REQUIRE(g.components() == 2);
    MatrixXd in(2, 1);
    in << 1.0, 0.5;
    MatrixXd direct = evaluate(net, in);
    REQUIRE(g.values[0](2, 1) == direct(0, 0));
    REQUIRE(g.values[1](2, 1) == direct(1, 0));
}
