#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "relutrace/blocks.hpp"
#include "relutrace/calculus.hpp"
#include "relutrace/cheb.hpp"

#include <cmath>
#include <random>

using namespace rtr;

namespace {
std::mt19937_64 rng(90310ull);
double urand(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng);
}
}  // namespace

TEST_CASE("product of constants and of identities") {
    ReluNetwork one = build_const_one();
    ReluNetwork p = product_nets(one, one, 1.0, 1.0, 1e-3);
    for (int i = 0; i < 50; ++i) CHECK(std::abs(p.evaluate1(urand(-1, 1)) - 1.0) <= 1e-3);

    // alpha(x) = beta(x) = x on (-2,2): sub-accuracy exact, budget only the mu
    ReluNetwork id = build_identity(1);
    ReluNetwork sq = product_nets(id, id, 2.0, 2.0, 1e-4);
    for (int i = 0; i < 1000; ++i) {
        double x = urand(-2, 2);
        CHECK(std::abs(sq.evaluate1(x) - x * x) <= 1e-4);
    }
}

TEST_CASE("product width formula: max{2+M_beta, 2+M_alpha, 5}") {
    // Shapes with M_beta >= M_alpha, where the lemma's formula
    // max{2+M_beta, max{M_alpha, 5}} coincides with the assembled width.
    struct Case {
        int deg_a, deg_b;
    } cases[] = {{2, 2}, {2, 5}, {3, 7}};
    for (auto c : cases) {
        std::vector<double> ca(static_cast<size_t>(c.deg_a) + 1, 0.0);
        ca.back() = 0.5;
        std::vector<double> cb(static_cast<size_t>(c.deg_b) + 1, 0.0);
        cb.back() = 0.5;
        ReluNetwork a = build_polynomial(ca, 1.0, 1e-3);
        ReluNetwork b = build_polynomial(cb, 1.0, 1e-3);
        const auto Ma = stats(a).width, Mb = stats(b).width;
        REQUIRE(Mb >= Ma);
        ReluNetwork prod = product_nets(a, b, 1.0, 1.0, 1e-2);
        auto M = stats(prod).width;
        CHECK(M == std::max<std::int64_t>({2 + Mb, 2 + Ma, 5}));
        CHECK(M == std::max<std::int64_t>(2 + Mb, std::max<std::int64_t>(Ma, 5)));
    }
}

TEST_CASE("complex product: 1 * i and rotated unit") {
    // alpha = 1, beta = i as constant complex nets
    Matrix A(2, 1);
    A << 0, 0;
    Vector b1(2), bi(2);
    b1 << 1, 0;
    bi << 0, 1;
    ComplexNet cone(prepend_affine(affine_network(Matrix::Identity(2, 2), b1),
                                   A, Vector::Zero(2)));
    ComplexNet ci(prepend_affine(affine_network(Matrix::Identity(2, 2), bi),
                                 A, Vector::Zero(2)));
    ComplexNet out = product_nets_complex(cone, ci, 1.0, 1.0, 1e-3);
    for (double x : {-0.5, 0.0, 0.9}) {
        Complex v = out.evaluate(x);
        CHECK(std::abs(v - Complex(0, 1)) <= 1e-3);
    }

    Vector br(2);
    br << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    ComplexNet cr(prepend_affine(affine_network(Matrix::Identity(2, 2), br), A, Vector::Zero(2)));
    ComplexNet sq = product_nets_complex(cr, cr, 1.0, 1.0, 1e-3);
    for (double x : {-1.0, 0.3}) CHECK(std::abs(sq.evaluate(x) - Complex(0, 1)) <= 1e-3);
}

TEST_CASE("complex product width matches the lemma on wide sub-nets") {
    // width = max{4+M_alpha, 2+M_beta, 2+max(10,M_alpha), 2+max(10,M_beta)};
    // coincides with the assembled max{2+M_beta, 4+M_alpha, 20} once the
    // sub-nets are at least 18 wide (the shapes used by the emulators).
    ReluNetwork cr = build_trig(TrigKind::Cos, 2.0, 1.0, 1e-4);
    ReluNetwork si = build_trig(TrigKind::Sin, 2.0, 1.0, 1e-4);
    ComplexNet e2(parallel({cr, si}, true));  // e^{2ix}, width 18
    auto Ma = stats(e2).width, Mb = stats(e2).width;
    REQUIRE(Ma == 18);
    ComplexNet prod = product_nets_complex(e2, e2, 1.0, 1.0, 1e-2);
    auto lemma = std::max<std::int64_t>(
        {4 + Ma, 2 + Mb, 2 + std::max<std::int64_t>(10, Ma), 2 + std::max<std::int64_t>(10, Mb)});
    CHECK(stats(prod).width == lemma);
    CHECK(stats(prod).width ==
          std::max<std::int64_t>({2 + Mb, 4 + Ma, 20}));  // documented general formula
    // and the product is e^{4ix}
    double worst = 0;
    for (int i = 0; i <= 400; ++i) {
        double x = -1.0 + 2.0 * i / 400.0;
        worst = std::max(worst, std::abs(prod.evaluate(x) - std::exp(Complex(0, 4 * x))));
    }
    CHECK(worst <= 1e-2);
}

TEST_CASE("multiply_compose: x * cos(2x)") {
    ReluNetwork alpha = build_identity(1);                      // x
    ReluNetwork beta = bounded_affine(Matrix::Constant(1, 1, 2.0), Vector::Zero(1));  // 2x
    double sup_beta = 2.0;
    ReluNetwork omega = build_trig(TrigKind::Cos, 1.0, 2.0 * sup_beta, 1e-5);
    ReluNetwork f = multiply_compose(alpha, omega, beta, 1.0, 1.0, sup_beta, 1e-3);
    for (int i = 0; i < 1000; ++i) {
        double x = urand(-1, 1);
        CHECK(std::abs(f.evaluate1(x) - x * std::cos(2 * x)) <= 1e-3);
    }

    // trivial: alpha = 1, omega = beta = identity
    ReluNetwork t = multiply_compose(build_const_one(), build_identity(1), build_identity(1),
                                     1.0, 1.0, 1.0, 1e-3);
    for (int i = 0; i < 100; ++i) {
        double x = urand(-1, 1);
        CHECK(std::abs(t.evaluate1(x) - x) <= 1e-3);
    }
}

TEST_CASE("multiply_compose: an under-accurate inner stage breaks the budget") {
    // beta should approximate 2x but is off by 0.05; with omega = cos at
    // frequency 4 the composite error exceeds the requested 1e-3.
    ReluNetwork alpha = build_const_one();
    ReluNetwork beta_bad = bounded_affine(Matrix::Constant(1, 1, 2.0), Vector::Constant(1, 0.05));
    ReluNetwork omega = build_trig(TrigKind::Cos, 4.0, 4.0, 1e-6);
    ReluNetwork f = multiply_compose(alpha, omega, beta_bad, 1.0, 1.0, 2.0, 1e-3);
    double worst = 0;
    for (int i = 0; i <= 400; ++i) {
        double x = -1.0 + 2.0 * i / 400.0;
        worst = std::max(worst, std::abs(f.evaluate1(x) - std::cos(4 * (2 * x))));
    }
    CHECK(worst > 1e-3);
}

TEST_CASE("partition map hits its breakpoints exactly") {
    PartitionSpec spec;
    spec.halfwidth = 12.0;
    spec.D_minus = 2.5;
    spec.D_plus = 3.5;
    ReluNetwork T = build_partition_map(spec);
    CHECK(T.evaluate1(0.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(T.evaluate1(spec.D_plus) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(T.evaluate1(-spec.D_minus) == doctest::Approx(-2.0).epsilon(1e-13));
    CHECK(T.evaluate1(-spec.halfwidth) == doctest::Approx(-3.0).epsilon(1e-13));
    CHECK(T.evaluate1(spec.halfwidth) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(stats(T).weight_bound <= 1.0);
    CHECK(T.depth() <= static_cast<std::int64_t>(std::log2(spec.halfwidth)) + 5);

    // piecewise linearity between breakpoints
    CHECK(T.evaluate1(spec.D_plus / 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(T.evaluate1(-spec.D_minus / 2) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("partition of unity after mapping") {
    PartitionSpec spec;
    spec.halfwidth = 20.0;
    spec.D_minus = 3.0;
    spec.D_plus = 4.0;
    ReluNetwork T = build_partition_map(spec);
    for (int i = 0; i <= 2000; ++i) {
        double tau = -spec.halfwidth + 2 * spec.halfwidth * i / 2000.0;
        double sum = 0;
        for (int l = -3; l <= 3; ++l) sum += compose(build_hat(l), T).evaluate1(tau);
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("glue_partition: constant pieces reproduce the constant") {
    PartitionSpec spec;
    spec.halfwidth = 10.0;
    spec.D_minus = 2.0;
    spec.D_plus = 3.0;
    ReluNetwork T = build_partition_map(spec);
    Matrix Z(2, 1);
    Z << 0, 0;
    Vector c(2);
    c << 1.0, 0.0;
    ComplexNet one(prepend_affine(affine_network(Matrix::Identity(2, 2), c), Z, Vector::Zero(2)));
    std::vector<ComplexNet> pieces(7, one);
    double eps = 1e-4;
    ComplexNet glued = glue_partition(T, pieces, 1.0, eps);
    for (int i = 0; i <= 500; ++i) {
        double tau = -spec.halfwidth + 2 * spec.halfwidth * i / 500.0;
        CHECK(std::abs(glued.evaluate(tau) - Complex(1, 0)) <= 6 * eps);
    }
}

TEST_CASE("glue_partition: accurate pieces give global 6*eps accuracy") {
    PartitionSpec spec;
    spec.halfwidth = 8.0;
    spec.D_minus = 2.0;
    spec.D_plus = 2.0;
    ReluNetwork T = build_partition_map(spec);
    // target: cos(tau/4) + i sin(tau/4) emulated once, used as every piece
    double eps = 1e-3;
    ReluNetwork cr = build_trig(TrigKind::Cos, 0.25, spec.halfwidth, eps);
    ReluNetwork si = build_trig(TrigKind::Sin, 0.25, spec.halfwidth, eps);
    ComplexNet piece(parallel({cr, si}, true));
    std::vector<ComplexNet> pieces(7, piece);
    ComplexNet glued = glue_partition(T, pieces, 1.1, eps);
    double worst = 0;
    for (int i = 0; i <= 800; ++i) {
        double tau = -spec.halfwidth + 2 * spec.halfwidth * i / 800.0;
        Complex target(std::cos(tau / 4), std::sin(tau / 4));
        worst = std::max(worst, std::abs(glued.evaluate(tau) - target));
    }
    CHECK(worst <= 6 * eps);
}

TEST_CASE("glue_partition blends two different constants through the hats") {
    PartitionSpec spec;
    spec.halfwidth = 9.0;
    spec.D_minus = 3.0;
    spec.D_plus = 3.0;
    ReluNetwork T = build_partition_map(spec);
    auto const_net = [](double re) {
        Matrix Z(2, 1);
        Z << 0, 0;
        Vector c(2);
        c << re, 0.0;
        return ComplexNet(prepend_affine(affine_network(Matrix::Identity(2, 2), c), Z, Vector::Zero(2)));
    };
    std::vector<ComplexNet> pieces;
    for (int l = -3; l <= 3; ++l) pieces.push_back(const_net(l <= 0 ? 1.0 : 2.0));
    double eps = 1e-5;
    ComplexNet glued = glue_partition(T, pieces, 2.0, eps);
    for (int i = 0; i <= 400; ++i) {
        double tau = -spec.halfwidth + 2 * spec.halfwidth * i / 400.0;
        double t = T.evaluate1(tau);
        double blend = 0;
        for (int l = -3; l <= 3; ++l)
            blend += (l <= 0 ? 1.0 : 2.0) * build_hat(l).evaluate1(t);
        CHECK(std::abs(glued.evaluate(tau).real() - blend) <= 6 * eps + 1e-9);
        CHECK(std::abs(glued.evaluate(tau).imag()) <= 6 * eps);
    }
}
