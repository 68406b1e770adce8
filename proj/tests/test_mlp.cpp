#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fedadapt/mlp.hpp"
#include "fedadapt/rng.hpp"
#include "support/oracles.hpp"

using namespace fedadapt;

namespace {

std::vector<double> random_input(int dim, RngStream& rng) {
    std::vector<double> x(static_cast<std::size_t>(dim));
    for (auto& v : x) v = rng.uniform();
    return x;
}

// Scalar probe loss: weighted sum of outputs, squared. Exercises every
// output coordinate and the full depth.
double probe_loss(const Mlp& net, const std::vector<double>& x) {
    const auto y = net.forward(x);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (1.0 + 0.5 * static_cast<double>(i)) * y[i];
    return s * s;
}

void probe_backward(Mlp& net, const std::vector<double>& x, std::vector<double>& grad) {
    Mlp::Cache cache;
    const auto y = net.forward(x, &cache);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (1.0 + 0.5 * static_cast<double>(i)) * y[i];
    std::vector<double> dy(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) dy[i] = 2.0 * s * (1.0 + 0.5 * static_cast<double>(i));
    net.backward(cache, dy, grad);
}

}  // namespace

TEST_CASE("zero weights with sigmoid output give 0.5 everywhere") {
    Mlp net({6, 8, 3}, OutputTransform::Sigmoid, 1);
    std::fill(net.params().begin(), net.params().end(), 0.0);
    const auto y = net.forward({0.2, 0.4, 0.6, 0.1, 0.9, 0.3});
    REQUIRE(y.size() == 3);
    for (double v : y) CHECK(v == 0.5);
}

TEST_CASE("initialization is seed-deterministic") {
    const Mlp a({9, 64, 32, 3}, OutputTransform::Sigmoid, 77);
    const Mlp b({9, 64, 32, 3}, OutputTransform::Sigmoid, 77);
    const Mlp c({9, 64, 32, 3}, OutputTransform::Sigmoid, 78);
    CHECK(a.params() == b.params());
    CHECK(a.params() != c.params());
    RngStream rng(5);
    const auto x = random_input(9, rng);
    CHECK(a.forward(x) == b.forward(x));
}

TEST_CASE("parameter gradients match central differences") {
    RngStream rng(20250809);
    for (int trial = 0; trial < 50; ++trial) {
        const bool sigmoid = trial % 2 == 0;
        Mlp net({4, 8, 5, sigmoid ? 2 : 1},
                sigmoid ? OutputTransform::Sigmoid : OutputTransform::Linear,
                static_cast<std::uint64_t>(trial) + 1);
        const auto x = random_input(4, rng);

        std::vector<double> analytic(net.params().size(), 0.0);
        probe_backward(net, x, analytic);
        const auto numeric = oracles::central_differences(
            [&] { return probe_loss(net, x); }, net.params(), 1e-5);
        CHECK(oracles::gradient_rel_error(analytic, numeric) < 1e-4);
    }
}

TEST_CASE("input jacobian matches finite differences") {
    RngStream rng(99);
    Mlp net({5, 16, 8, 3}, OutputTransform::Sigmoid, 4);
    auto x = random_input(5, rng);

    Mlp::Cache cache;
    const auto y = net.forward(x, &cache);
    for (std::size_t out = 0; out < y.size(); ++out) {
        std::vector<double> dy(y.size(), 0.0);
        dy[out] = 1.0;
        std::vector<double> scratch(net.params().size(), 0.0);
        std::vector<double> d_input;
        net.backward(cache, dy, scratch, &d_input);

        const auto numeric = oracles::central_differences(
            [&] { return net.forward(x)[out]; }, x, 1e-5);
        CHECK(oracles::gradient_rel_error(d_input, numeric) < 1e-4);
    }
}

TEST_CASE("adam reduces a quadratic") {
    std::vector<double> params{5.0, -3.0};
    Optimizer opt(OptimizerKind::Adam, params.size());
    for (int i = 0; i < 8000; ++i) {
        const std::vector<double> grad{2.0 * (params[0] - 1.0), 2.0 * (params[1] + 2.0)};
        opt.step(params, grad, 1e-2);
    }
    CHECK(params[0] == Catch::Approx(1.0).margin(1e-3));
    CHECK(params[1] == Catch::Approx(-2.0).margin(1e-3));
}

TEST_CASE("sgd takes plain gradient steps") {
    std::vector<double> params{1.0};
    Optimizer opt(OptimizerKind::Sgd, params.size());
    opt.step(params, {0.5}, 0.1);
    CHECK(params[0] == Catch::Approx(0.95));
}

TEST_CASE("non-finite detection") {
    CHECK_FALSE(has_non_finite({1.0, -2.0, 0.0}));
    CHECK(has_non_finite({1.0, std::nan(""), 0.0}));
    CHECK(has_non_finite({1.0, std::numeric_limits<double>::infinity()}));
}
