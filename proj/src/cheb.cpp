#include "relutrace/cheb.hpp"

#include <algorithm>
#include <cmath>

namespace rtr {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

// One recurrence block: state (x, T_k, T_{k-1}, S...) -> (x, T_{k+1}, T_k, S + a_{k+1} T_{k+1}).
// acc_coeffs holds the coefficient per accumulator channel (1 real / 2 complex).
ReluNetwork cheb_step(const ReluNetwork& mu, const std::vector<double>& acc_coeffs) {
    const int acc = static_cast<int>(acc_coeffs.size());
    const int dim = 3 + acc;
    std::vector<ReluNetwork> parts;
    parts.push_back(select_inputs(build_identity(1), {0}, dim));  // x
    parts.push_back(select_inputs(mu, {0, 1}, dim));              // mu(x, T_k)
    parts.push_back(select_inputs(build_identity(1), {1}, dim));  // T_k
    parts.push_back(select_inputs(build_identity(1), {2}, dim));  // T_{k-1}
    for (int i = 0; i < acc; ++i)
        parts.push_back(select_inputs(build_identity(1), {3 + i}, dim));
    ReluNetwork stacked = parallel(parts, true);
    // stacked outputs: (x, m, T_k, T_{k-1}, S...)
    Matrix A = Matrix::Zero(dim, 4 + acc);
    A(0, 0) = 1;
    A(1, 1) = 2;   // T_{k+1} = 2 mu - T_{k-1}
    A(1, 3) = -1;
    A(2, 2) = 1;   // new T_k slot carries the old T_k
    for (int i = 0; i < acc; ++i) {
        A(3 + i, 4 + i) = 1;                                      // S
        A(3 + i, 1) = 2 * acc_coeffs[static_cast<size_t>(i)];     // + a (2 mu - T_{k-1})
        A(3 + i, 3) = -acc_coeffs[static_cast<size_t>(i)];
    }
    return append_affine(A, Vector::Zero(dim), stacked);
}

ReluNetwork cheb_sum_chain(const std::vector<Complex>& a, double D, double zeta, int acc) {
    const int n = static_cast<int>(a.size()) - 1;
    // mu domain: |Phi_cheb| <= 1 + zeta 4^n, clamped to a sane probe range.
    double mu_dom = std::min(1.0 + zeta * std::pow(4.0, std::min(n, 25)), 4.0);
    mu_dom = std::max(mu_dom, 1.25);
    ReluNetwork mu = build_multiply(mu_dom, zeta);
    // init: x -> (x/D, T_1 = x/D, T_0 = 1, S = a_0/2 [, Im a_0/2])
    Matrix A0 = Matrix::Zero(3 + acc, 1);
    Vector b0 = Vector::Zero(3 + acc);
    A0(0, 0) = 1.0 / D;
    A0(1, 0) = 1.0 / D;
    b0(2) = 1.0;
    b0(3) = 0.5 * a[0].real();
    if (acc == 2) b0(4) = 0.5 * a[0].imag();
    // fold in the k = 1 term directly (the T_1 channel is exact)
    if (n >= 1) {
        A0(3, 0) += a[1].real() / D;
        if (acc == 2) A0(4, 0) += a[1].imag() / D;
    }
    ChainBuilder chain(affine_network(A0, b0));
    for (int k = 1; k + 1 <= n; ++k) {
        std::vector<double> cc;
        cc.push_back(a[static_cast<size_t>(k + 1)].real());
        if (acc == 2) cc.push_back(a[static_cast<size_t>(k + 1)].imag());
        chain.then(cheb_step(mu, cc));
    }
    Matrix P = Matrix::Zero(acc, 3 + acc);
    for (int i = 0; i < acc; ++i) P(i, 3 + i) = 1.0;
    chain.then_affine(P, Vector::Zero(acc));
    return chain.finish();
}

double max_abs(const std::vector<Complex>& a) {
    double m = 0;
    for (const auto& c : a) m = std::max({m, std::abs(c.real()), std::abs(c.imag())});
    return m;
}

}  // namespace

Complex clenshaw(const ChebSeries& s, double x) {
    const double t = x / s.domain_halfwidth;
    Complex b1 = 0, b2 = 0;
    for (int k = static_cast<int>(s.coeffs.size()) - 1; k >= 1; --k) {
        Complex b0 = 2.0 * t * b1 - b2 + s.coeffs[static_cast<size_t>(k)];
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + 0.5 * s.coeffs[0];
}

ChebSeries cheb_coeffs(const std::function<Complex(double)>& f, int n, double D) {
    if (n < 0) fail("cheb_coeffs: negative order");
    const int m = 4 * (n + 1);
    std::vector<Complex> fv(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) {
        double theta = M_PI * (j + 0.5) / m;
        fv[static_cast<size_t>(j)] = f(D * std::cos(theta));
    }
    ChebSeries s;
    s.domain_halfwidth = D;
    s.coeffs.resize(static_cast<size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        Complex acc = 0;
        for (int j = 0; j < m; ++j)
            acc += fv[static_cast<size_t>(j)] * std::cos(k * M_PI * (j + 0.5) / m);
        s.coeffs[static_cast<size_t>(k)] = 2.0 * acc / static_cast<double>(m);
    }
    return s;
}

long long truncation_index(const SmoothClass& cls, int k, double eps) {
    if (k < 2) fail("truncation_index: k must be >= 2");
    if (static_cast<int>(cls.lambda.size()) < k + 2)
        fail("truncation_index: lambda prefix must cover order k+1");
    const double Ck = 6.0 * std::pow(3.0 * M_E, k) / (1.0 + k);
    const double Ckt = std::pow(4.0, k + 1) * Ck;
    const double lam = cls.lambda[static_cast<size_t>(k) + 1];
    double v = std::pow(2.0 * Ckt * lam / eps, 1.0 / (k - 1));
    long long formula = static_cast<long long>(std::ceil(v));
    return std::max<long long>(k + 2, formula);
}

ReluNetwork build_chebyshev_T(int n, double zeta) {
    if (n < 0) fail("build_chebyshev_T: negative order");
    std::vector<Complex> a(static_cast<size_t>(n) + 1, 0.0);
    a[static_cast<size_t>(n)] = 1.0;
    if (n == 0) a[0] = 2.0;  // halved-first convention
    return cheb_sum_chain(a, 1.0, zeta, 1);
}

ReluNetwork build_cheb_sum(const ChebSeries& s, double eps) {
    if (s.coeffs.empty()) fail("build_cheb_sum: empty series");
    if (!(eps > 0 && eps < 0.5)) fail("build_cheb_sum: eps must lie in (0, 1/2)");
    for (const auto& c : s.coeffs)
        if (c.imag() != 0.0) fail("build_cheb_sum: complex coefficients; use the complex variant");
    const int n = static_cast<int>(s.coeffs.size()) - 1;
    const double amax = std::max(1.0, max_abs(s.coeffs));
    auto exact = [&](double x) { return clenshaw(s, x).real(); };
    for (int tries = 0;; ++tries) {
        double zeta;
        if (tries == 0) zeta = eps / (amax * 8.0 * (n + 1));
        else if (tries == 1) zeta = eps / (amax * std::pow(2.0, n + 2));
        else zeta = eps / (amax * std::pow(4.0, n + 1));
        zeta = std::max(zeta, 1e-16);
        ReluNetwork net = cheb_sum_chain(s.coeffs, s.domain_halfwidth, zeta, 1);
        GridError e = measure_error_1d(net, exact, -s.domain_halfwidth, s.domain_halfwidth, 1025);
        if (e.sup <= 0.9 * eps || tries >= 3) return net;
    }
}

ComplexNet build_cheb_sum_complex(const ChebSeries& s, double eps) {
    if (s.coeffs.empty()) fail("build_cheb_sum_complex: empty series");
    if (!(eps > 0 && eps < 0.5)) fail("build_cheb_sum_complex: eps must lie in (0, 1/2)");
    const int n = static_cast<int>(s.coeffs.size()) - 1;
    const double amax = std::max(1.0, max_abs(s.coeffs));
    auto exact = [&](double x) { return clenshaw(s, x); };
    for (int tries = 0;; ++tries) {
        double zeta;
        if (tries == 0) zeta = eps / (amax * 8.0 * (n + 1));
        else if (tries == 1) zeta = eps / (amax * std::pow(2.0, n + 2));
        else zeta = eps / (amax * std::pow(4.0, n + 1));
        zeta = std::max(zeta, 1e-16);
        ComplexNet net(cheb_sum_chain(s.coeffs, s.domain_halfwidth, zeta, 2));
        GridError e = measure_error_complex(net, exact, -s.domain_halfwidth, s.domain_halfwidth, 1025);
        if (e.sup <= 0.9 * eps || tries >= 3) return net;
    }
}

namespace {

// Adaptive truncation: escalate n until the sampled series reproduces f.
ChebSeries pick_series(const std::function<Complex(double)>& f, double D, int k, double eps,
                       SmoothEmulatorReport* report) {
    int n = std::max(k + 2, 4);
    const int cap = 1 << 16;
    double best = 1e300;
    while (true) {
        ChebSeries s = cheb_coeffs(f, n, D);
        double tail = 0;
        for (int j = std::max(0, n - 3); j <= n; ++j)
            tail += std::abs(s.coeffs[static_cast<size_t>(j)]);
        double sup = 0;
        const int probe = 1025;
        for (int i = 0; i < probe; ++i) {
            double x = -D + 2.0 * D * i / (probe - 1);
            sup = std::max(sup, std::abs(clenshaw(s, x) - f(x)));
        }
        best = std::min(best, sup);
        if (report) {
            report->terms_used = n;
            report->coeff_tail = tail;
        }
        if (sup <= 0.45 * eps && tail <= 2.0 * eps) return s;
        if (n >= cap)
            throw BuildError("smooth emulator: truncation failed to certify (achieved " +
                                 std::to_string(best) + ")",
                             best);
        n = n + n / 2 + 4;
    }
}

}  // namespace

ComplexNet build_smooth_emulator(const std::function<Complex(double)>& f,
                                 const SmoothClass& cls, int k, double eps,
                                 SmoothEmulatorReport* report) {
    if (k < 2) fail("build_smooth_emulator: k must be >= 2");
    if (!(eps > 0 && eps < 0.5)) fail("build_smooth_emulator: eps must lie in (0, 1/2)");
    ChebSeries s = pick_series(f, cls.D, k, eps, report);
    if (report && static_cast<int>(cls.lambda.size()) >= k + 2) {
        // Record the Jackson-bound index from the declared class for comparison
        // (effective smoothness on the unit interval scales lambda_j by D^j).
        SmoothClass unit = cls;
        for (size_t j = 0; j < unit.lambda.size(); ++j)
            unit.lambda[j] *= std::pow(cls.D, static_cast<double>(j));
        report->formula_terms = truncation_index(unit, k, eps);
    }
    ComplexNet net = build_cheb_sum_complex(s, eps / 2.0);
    GridError e = measure_error_complex(net, [&](double x) { return f(x); }, -cls.D, cls.D, 2049);
    if (report) report->achieved = e.sup;
    if (e.sup > eps)
        throw BuildError("smooth emulator: certification failed (achieved " +
                             std::to_string(e.sup) + ")",
                         e.sup);
    return net;
}

ReluNetwork build_smooth_emulator_real(const std::function<double(double)>& f,
                                       const SmoothClass& cls, int k, double eps,
                                       SmoothEmulatorReport* report) {
    if (k < 2) fail("build_smooth_emulator_real: k must be >= 2");
    if (!(eps > 0 && eps < 0.5)) fail("build_smooth_emulator_real: eps must lie in (0, 1/2)");
    ChebSeries s = pick_series([&](double x) { return Complex(f(x), 0.0); }, cls.D, k, eps, report);
    if (report && static_cast<int>(cls.lambda.size()) >= k + 2) {
        SmoothClass unit = cls;
        for (size_t j = 0; j < unit.lambda.size(); ++j)
            unit.lambda[j] *= std::pow(cls.D, static_cast<double>(j));
        report->formula_terms = truncation_index(unit, k, eps);
    }
    for (auto& c : s.coeffs) c = Complex(c.real(), 0.0);
    ReluNetwork net = build_cheb_sum(s, eps / 2.0);
    GridError e = measure_error_1d(net, f, -cls.D, cls.D, 2049);
    if (report) report->achieved = e.sup;
    if (e.sup > eps)
        throw BuildError("smooth emulator: certification failed (achieved " +
                             std::to_string(e.sup) + ")",
                         e.sup);
    return net;
}

}  // namespace rtr
