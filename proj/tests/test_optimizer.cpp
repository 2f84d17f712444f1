#include <catch2/catch_amalgamated.hpp>

#include "rdnn/optimizer.hpp"

using namespace rdnn;

TEST_CASE("learning-rate ladder latches on loss thresholds") {
    LRSchedule sched = LRSchedule::standard();
    REQUIRE(sched.rate() == 0.01);

    sched.observe(0.5);
    REQUIRE(sched.rate() == 0.01);  // above every threshold

    sched.observe(0.009);
    REQUIRE(sched.rate() == 0.001);  // crossed 0.01

    sched.observe(0.007);
    REQUIRE(sched.rate() == 0.001);  // still above the 0.005 threshold

    sched.observe(0.002);
    REQUIRE(sched.rate() == 5e-4);  // crossed 0.005

    sched.observe(0.0009);
    REQUIRE(sched.rate() == 1e-4);

    // Loss rising again must not revert the latch.
    sched.observe(10.0);
    REQUIRE(sched.rate() == 1e-4);

    sched.observe(5e-6);
    REQUIRE(sched.rate() == 1e-5);  // skipped straight past the 1e-4 stage
    sched.observe(1e-12);
    REQUIRE(sched.rate() == 1e-5);  // bottom of the ladder
}

TEST_CASE("one observation can advance several stages") {
    LRSchedule sched = LRSchedule::standard();
    sched.observe(1e-9);
    REQUIRE(sched.rate() == 1e-5);
}

TEST_CASE("fresh returns an unlatched copy") {
    LRSchedule sched = LRSchedule::standard();
    sched.observe(1e-9);
    LRSchedule f = sched.fresh();
    REQUIRE(f.rate() == 0.01);
    REQUIRE(sched.rate() == 1e-5);
}

TEST_CASE("fixed schedule ignores the loss") {
    LRSchedule sched = LRSchedule::fixed(0.001);
    sched.observe(1e-30);
    REQUIRE(sched.rate() == 0.001);
}

TEST_CASE("schedule validation") {
    LRSchedule bad;
    bad.initial_rate = 0.01;
    bad.stages = {{0.01, 0.001}, {0.05, 1e-4}};  // thresholds must decrease
    REQUIRE_THROWS_AS(bad.validate(), Error);
    bad.stages = {{0.01, 0.0}};
    REQUIRE_THROWS_AS(bad.validate(), Error);
    bad.stages = {{0.01, 0.001}, {0.005, 5e-4}};
    REQUIRE_NOTHROW(bad.validate());
}

TEST_CASE("first adam step has closed form") {
    VectorXd p(3);
    p << 1.0, -2.0, 0.5;
    VectorXd g(3);
    g << 0.3, -4.0, 0.0;
    AdamState state(3);
    const double lr = 0.01;
    VectorXd p1 = p;
    adam_step(p1, g, state, lr);

    // After bias correction the first update is lr * g / (|g| + eps).
    for (int i = 0; i < 3; ++i) {
        const double expect =
            p(i) - lr * g(i) / (std::abs(g(i)) + 1e-8);
        REQUIRE(p1(i) == Catch::Approx(expect).margin(1e-15));
    }
    REQUIRE(p1(2) == p(2));  // zero gradient leaves the weight alone
    REQUIRE(state.step == 1);
}

TEST_CASE("adam matches a scalar reference implementation") {
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8, lr = 0.003;
    VectorXd p(2);
    p << 0.7, -1.3;
    VectorXd m = VectorXd::Zero(2), v = VectorXd::Zero(2);
    VectorXd p_ref = p;
    AdamState state(2);

    std::vector<VectorXd> grads;
    VectorXd g1(2), g2(2), g3(2);
    g1 << 1.0, -0.5;
    g2 << -0.2, 0.9;
    g3 << 0.0, 0.1;
    grads = {g1, g2, g3};

    for (int t = 1; t <= 3; ++t) {
        const VectorXd& g = grads[t - 1];
        adam_step(p, g, state, lr);
        for (int i = 0; i < 2; ++i) {
            m(i) = b1 * m(i) + (1 - b1) * g(i);
            v(i) = b2 * v(i) + (1 - b2) * g(i) * g(i);
            const double mh = m(i) / (1 - std::pow(b1, t));
            const double vh = v(i) / (1 - std::pow(b2, t));
            p_ref(i) -= lr * mh / (std::sqrt(vh) + eps);
        }
    }
    REQUIRE((p - p_ref).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("adam rejects size mismatches") {
    VectorXd p = VectorXd::Zero(3);
    VectorXd g = VectorXd::Zero(4);
    AdamState state(3);
    REQUIRE_THROWS_AS(adam_step(p, g, state, 0.01), Error);
}

TEST_CASE("adam minimises a quadratic") {
    // f(p) = 0.5 * sum c_i p_i^2, gradient c_i p_i.
    VectorXd c(3);
    c << 1.0, 10.0, 0.1;
    VectorXd p(3);
    p << 2.0, -1.0, 3.0;
    AdamState state(3);
    for (int it = 0; it < 4000; ++it) {
        VectorXd g = c.cwiseProduct(p);
        adam_step(p, g, state, 0.01);
    }
    REQUIRE(p.cwiseAbs().maxCoeff() < 1e-3);
}
