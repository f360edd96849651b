#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "relutrace/cheb.hpp"

#include <cmath>

using namespace rtr;

TEST_CASE("cheb_coeffs recovers known expansions") {
    // x^3 = (3 T_1 + T_3) / 4
    ChebSeries s = cheb_coeffs([](double x) { return Complex(x * x * x, 0.0); }, 8, 1.0);
    CHECK(std::abs(s.coeffs[1] - Complex(0.75, 0)) <= 1e-12);
    CHECK(std::abs(s.coeffs[3] - Complex(0.25, 0)) <= 1e-12);
    for (int k : {0, 2, 4, 5, 6, 7, 8}) CHECK(std::abs(s.coeffs[static_cast<size_t>(k)]) <= 1e-12);

    // f = 1: halved-first convention gives a_0 = 2
    ChebSeries one = cheb_coeffs([](double) { return Complex(1.0, 0.0); }, 4, 1.0);
    CHECK(std::abs(one.coeffs[0] - Complex(2.0, 0)) <= 1e-12);
    CHECK(std::abs(clenshaw(one, 0.3) - Complex(1.0, 0)) <= 1e-12);
}

TEST_CASE("coefficients of 1/(2-x) decay geometrically with ratio 2 - sqrt(3)") {
    ChebSeries s = cheb_coeffs([](double x) { return Complex(1.0 / (2.0 - x), 0.0); }, 24, 1.0);
    const double rho = 2.0 - std::sqrt(3.0);  // Bernstein-ellipse decay ratio
    for (int k = 4; k <= 20; k += 4) {
        double ratio = std::abs(s.coeffs[static_cast<size_t>(k + 1)]) /
                       std::abs(s.coeffs[static_cast<size_t>(k)]);
        CHECK(ratio == doctest::Approx(rho).epsilon(0.05));
    }
}

TEST_CASE("truncation_index formula") {
    SmoothClass cls;
    cls.lambda = {1e-9, 1e-9, 1e-9, 1e-9, 1e-9, 1e-9};
    cls.D = 1.0;
    CHECK(truncation_index(cls, 2, 0.4) == 4);  // floor case k+2

    SmoothClass c3;
    c3.lambda = {1, 1, 1, 1, 1.0};
    double eps = 1e-4;
    long long n = truncation_index(c3, 3, eps);
    double Ck = 6.0 * std::pow(3.0 * M_E, 3) / 4.0;
    double Ckt = std::pow(4.0, 4) * Ck;
    long long expect = static_cast<long long>(std::ceil(std::sqrt(2.0 * Ckt * 1.0 / eps)));
    CHECK(n == std::max<long long>(5, expect));

    // nonincreasing as eps grows (monotone in the formula)
    long long prev = -1;
    for (double e : {1e-2, 1e-3, 1e-4, 1e-5}) {
        long long v = truncation_index(c3, 3, e);
        if (prev >= 0) CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("Chebyshev polynomial sub-networks meet the zeta 4^n ledger") {
    const double zeta = 1e-6;
    for (int n : {2, 3, 5, 8}) {
        ReluNetwork t = build_chebyshev_T(n, zeta);
        double bound = zeta * std::pow(4.0, n);
        GridError e = measure_error_1d(
            t, [&](double x) { return std::cos(n * std::acos(std::clamp(x, -1.0, 1.0))); },
            -1.0, 1.0, 2001);
        CHECK(e.sup <= bound);
    }
}

TEST_CASE("cheb sum network: constant and cubic") {
    ChebSeries cs;
    cs.coeffs = {Complex(2.0, 0.0)};
    cs.domain_halfwidth = 1.0;
    ReluNetwork one = build_cheb_sum(cs, 1e-3);
    for (double x : {-0.9, 0.0, 0.77}) CHECK(std::abs(one.evaluate1(x) - 1.0) <= 1e-3);

    ChebSeries cubic;
    cubic.coeffs = {0.0, Complex(0.75, 0.0), 0.0, Complex(0.25, 0.0)};
    cubic.domain_halfwidth = 1.0;
    ReluNetwork p = build_cheb_sum(cubic, 1e-3);
    CHECK(std::abs(p.evaluate1(0.5) - 0.125) <= 1e-3);
    NetworkStats st = stats(p);
    CHECK(st.width == 13);
    CHECK(st.weight_bound <= 2.0);  // max{2, max|a_k|}

    GridError e = measure_error_1d(p, [](double x) { return x * x * x; }, -1.0, 1.0, 10001);
    CHECK(e.sup <= 1e-3);
}

TEST_CASE("complex cheb sum has width 15") {
    ChebSeries s;
    s.coeffs = {Complex(0.4, 1.0), Complex(0.3, -0.2), Complex(0.0, 0.5)};
    s.domain_halfwidth = 1.0;
    ComplexNet net = build_cheb_sum_complex(s, 1e-4);
    CHECK(stats(net).width == 15);
    GridError e = measure_error_complex(net, [&](double x) { return clenshaw(s, x); }, -1, 1, 4001);
    CHECK(e.sup <= 1e-4);
}

TEST_CASE("reconstruction matches Clenshaw everywhere") {
    auto f = [](double x) { return Complex(std::exp(x) * std::sin(2 * x), 0.0); };
    ChebSeries s = cheb_coeffs(f, 20, 1.0);
    for (auto& c : s.coeffs) c = Complex(c.real(), 0.0);
    ReluNetwork net = build_cheb_sum(s, 1e-5);
    GridError e = measure_error_1d(net, [&](double x) { return clenshaw(s, x).real(); }, -1, 1, 10001);
    CHECK(e.sup <= 1e-5);
}

TEST_CASE("smooth emulator certifies e^{sin x} on D = pi") {
    SmoothClass cls;
    cls.lambda = {M_E, M_E, 2 * M_E, 5 * M_E, 16 * M_E, 60 * M_E};
    cls.D = M_PI;
    cls.complex_valued = false;
    SmoothEmulatorReport rep;
    ReluNetwork net = build_smooth_emulator_real(
        [](double x) { return std::exp(std::sin(x)); }, cls, 4, 1e-3, &rep);
    GridError e = measure_error_1d(net, [](double x) { return std::exp(std::sin(x)); },
                                   -M_PI, M_PI, 10001);
    CHECK(e.sup <= 1e-3);
    CHECK(stats(net).width == 13);
    CHECK(rep.terms_used >= 6);
    CHECK(rep.formula_terms >= rep.terms_used);  // Jackson bound overestimates
}

TEST_CASE("smooth emulator: constant is cheap; cos(10x) needs more terms") {
    SmoothClass cls;
    cls.lambda = {1, 1, 1, 1, 1};
    cls.D = 1.0;
    SmoothEmulatorReport r1, r2;
    ComplexNet c1 = build_smooth_emulator([](double) { return Complex(1.0, 0.0); }, cls, 2, 1e-3, &r1);
    CHECK(std::abs(c1.evaluate(0.37) - Complex(1, 0)) <= 1e-3);
    CHECK(r1.terms_used <= 8);

    SmoothClass cls10;
    cls10.lambda = {1, 10, 100, 1000, 10000, 100000};
    cls10.D = 1.0;
    ComplexNet c2 = build_smooth_emulator(
        [](double x) { return Complex(std::cos(10 * x), 0.0); }, cls10, 4, 1e-3, &r2);
    GridError e = measure_error_complex(c2, [](double x) { return Complex(std::cos(10 * x), 0.0); },
                                        -1, 1, 4001);
    CHECK(e.sup <= 1e-3);
    CHECK(r2.terms_used > r1.terms_used);
    CHECK(stats(c2).width == 15);
}

TEST_CASE("scaling covariance: [-D,D] emulation equals the unit-interval one") {
    const double D = 3.0;
    auto f = [](double x) { return Complex(std::cos(x), std::sin(x / 2)); };
    ChebSeries sd = cheb_coeffs(f, 18, D);
    ChebSeries unit = cheb_coeffs([&](double t) { return f(t * D); }, 18, 1.0);
    for (size_t k = 0; k < sd.coeffs.size(); ++k)
        CHECK(std::abs(sd.coeffs[k] - unit.coeffs[k]) <= 1e-12);
    for (double x : {-2.5, -0.3, 0.0, 1.7, 3.0})
        CHECK(std::abs(clenshaw(sd, x) - clenshaw(unit, x / D)) <= 1e-12);
}

TEST_CASE("analytic truncation error decays geometrically before emulation") {
    auto f = [](double x) { return Complex(1.0 / (1.3 - x), 0.0); };
    double prev = 1e9;
    for (int n : {4, 8, 16, 32}) {
        ChebSeries s = cheb_coeffs(f, n, 1.0);
        double sup = 0;
        for (int i = 0; i <= 500; ++i) {
            double x = -1.0 + 2.0 * i / 500.0;
            sup = std::max(sup, std::abs(clenshaw(s, x) - f(x)));
        }
        CHECK(sup < prev);
        prev = sup;
    }
    CHECK(prev <= 1e-5);
}
