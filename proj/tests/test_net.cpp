#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "relutrace/net.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

using namespace rtr;

namespace {

std::mt19937_64 rng(20240817ull);

double urand(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng);
}

}  // namespace

TEST_CASE("identity and constant primitives evaluate exactly") {
    ReluNetwork id = build_identity(1);
    CHECK(id.evaluate1(-3.0) == -3.0);
    CHECK(id.evaluate1(7.25) == 7.25);

    ReluNetwork one = build_const_one();
    CHECK(one.evaluate1(7.2) == 1.0);
    CHECK(one.evaluate1(-123.0) == 1.0);
    NetworkStats s = stats(one);
    CHECK(s.depth == 2);
    CHECK(s.width == 4);
}

TEST_CASE("hat function values and partition of unity") {
    ReluNetwork hat0 = build_hat(0.0);
    CHECK(hat0.evaluate1(0.0) == 1.0);
    CHECK(hat0.evaluate1(1.0) == 0.0);
    CHECK(hat0.evaluate1(-1.0) == 0.0);
    CHECK(hat0.evaluate1(0.5) == 0.5);

    for (int i = 0; i < 200; ++i) {
        double x = urand(-3.0, 3.0);
        double sum = 0;
        for (int l = -3; l <= 3; ++l) sum += build_hat(l).evaluate1(x);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("linear combination primitive") {
    ReluNetwork lin = build_linear(2.0, -1.0);
    Vector v(2);
    v << 3.0, 4.0;
    CHECK(lin.evaluate(v)(0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("compose semantics and depth arithmetic") {
    ReluNetwork id = build_identity(1);
    ReluNetwork c = compose(id, id);
    CHECK(c.evaluate1(5.0) == 5.0);
    CHECK(c.depth() == id.depth() + id.depth() - 1);

    ReluNetwork one = build_const_one();
    ReluNetwork co = compose(one, id);
    for (int i = 0; i < 100; ++i) CHECK(co.evaluate1(urand(-50, 50)) == 1.0);

    // evaluate(compose(g,f), x) == evaluate(g, evaluate(f, x))
    ReluNetwork hat = build_hat(0.5);
    ReluNetwork gf = compose(hat, build_linear(0.5, 0.25));
    for (int i = 0; i < 100; ++i) {
        Vector v(2);
        v << urand(-2, 2), urand(-2, 2);
        double inner = build_linear(0.5, 0.25).evaluate(v)(0);
        CHECK(gf.evaluate(v)(0) == doctest::Approx(hat.evaluate1(inner)).epsilon(1e-14));
    }
}

TEST_CASE("compose associativity on random inputs") {
    ReluNetwork f = build_hat(0.0);
    ReluNetwork g = build_hat(0.25);
    ReluNetwork h = build_hat(-0.25);
    ReluNetwork left = compose(compose(h, g), f);
    ReluNetwork right = compose(h, compose(g, f));
    for (int i = 0; i < 300; ++i) {
        double x = urand(-2, 2);
        double a = left.evaluate1(x), b = right.evaluate1(x);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("parallel stacking with identity padding") {
    ReluNetwork a = build_identity(1);                    // depth 2
    ReluNetwork b = compose(build_identity(1), compose(build_identity(1), build_identity(1)));
    CHECK(b.depth() == 4);
    ReluNetwork par = parallel({a, b}, true);
    CHECK(par.depth() == 4);  // max depth; padding adds no extra layers on top
    for (int i = 0; i < 50; ++i) {
        double x = urand(-5, 5);
        Vector v(1);
        v << x;
        Vector out = par.evaluate(v);
        CHECK(out(0) == doctest::Approx(x).epsilon(1e-15));
        CHECK(out(1) == doctest::Approx(x).epsilon(1e-15));
    }

    ReluNetwork pair = parallel({build_const_one(), build_identity(1)}, true);
    Vector v(1);
    v << 2.0;
    Vector out = pair.evaluate(v);
    CHECK(out(0) == 1.0);
    CHECK(out(1) == 2.0);
}

TEST_CASE("stats of the p0/p1 realizations") {
    // p1 = rho(x) - rho(-x)
    NetworkStats s1 = stats(build_identity(1));
    CHECK(s1.depth == 2);
    CHECK(s1.width == 2);
    CHECK(s1.weight_bound <= 1.0);
}

TEST_CASE("bounded_affine trades weights for depth") {
    // kappa^(1/3) with kappa = 512 -> entry 8: depth <= floor(log2 8) + 5 = 8
    ReluNetwork n = bounded_affine(Matrix::Constant(1, 1, 8.0), Vector::Zero(1));
    CHECK(stats(n).weight_bound <= 1.0);
    CHECK(n.depth() <= 8);
    CHECK(n.evaluate1(1.0) == 8.0);
    CHECK(n.evaluate1(-2.5) == -20.0);

    ReluNetwork big = bounded_affine(Matrix::Constant(1, 1, 1e6), Vector::Zero(1));
    CHECK(stats(big).weight_bound <= 1.0);
    CHECK(big.evaluate1(1.0) == 1e6);

    // identity case
    ReluNetwork idaff = bounded_affine(Matrix::Identity(2, 2), Vector::Zero(2));
    CHECK(stats(idaff).weight_bound <= 1.0);
    Vector v(2);
    v << 0.75, -0.5;
    Vector out = idaff.evaluate(v);
    CHECK(out(0) == 0.75);
    CHECK(out(1) == -0.5);

    for (double a : {3.0, 100.0, 1e5, 1e9}) {
        ReluNetwork m = bounded_affine(Matrix::Constant(1, 1, a), Vector::Constant(1, a / 2));
        CHECK(stats(m).weight_bound <= 1.0);
        double x = urand(-1.0, 1.0);
        CHECK(m.evaluate1(x) == doctest::Approx(a * x + a / 2).epsilon(1e-13));
    }
}

TEST_CASE("scale_by_pow2 is exact") {
    ReluNetwork s = scale_by_pow2(7, 1);
    CHECK(stats(s).weight_bound <= 1.0);
    for (int i = 0; i < 50; ++i) {
        double x = urand(-10, 10);
        CHECK(s.evaluate1(x) == 128.0 * x);
    }
}

TEST_CASE("serialization round trip is bit exact") {
    ReluNetwork n = compose(build_hat(0.25), bounded_affine(Matrix::Constant(1, 1, 3.7), Vector::Constant(1, -0.1)));
    std::string text = serialize(n);
    ReluNetwork back = deserialize(text);
    REQUIRE(back.depth() == n.depth());
    for (std::int64_t k = 0; k < n.depth(); ++k) {
        CHECK(back.layers()[k].W == n.layers()[k].W);
        CHECK(back.layers()[k].b == n.layers()[k].b);
    }
    CHECK(serialize(back) == text);

    // file round trip
    auto path = std::filesystem::temp_directory_path() / "rtr_test_net.relunet";
    save_network(n, path.string());
    ReluNetwork loaded = load_network(path.string());
    CHECK(serialize(loaded) == text);
    std::filesystem::remove(path);
}

TEST_CASE("deserialize rejects malformed input") {
    ReluNetwork n = build_identity(1);
    std::string text = serialize(n);
    CHECK_THROWS(deserialize(text.substr(0, text.size() / 2)));
    CHECK_THROWS(deserialize("not a network"));
    CHECK_THROWS(deserialize("relunet 2\n1 1 1\n"));
}

TEST_CASE("evaluate rejects dimension mismatch") {
    ReluNetwork lin = build_linear(1.0, 1.0);
    Vector v(1);
    v << 1.0;
    CHECK_THROWS(lin.evaluate(v));
}

TEST_CASE("select_inputs rewires coordinates") {
    ReluNetwork id = build_identity(1);
    ReluNetwork sel = select_inputs(id, {2}, 4);
    Vector v(4);
    v << 9, 8, 7, 6;
    CHECK(sel.evaluate(v)(0) == 7.0);
}
