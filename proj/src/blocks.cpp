#include "relutrace/blocks.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace rtr {

namespace {

constexpr int kMaxToothLevels = 40;  // 4^-40 is far below double resolution

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

int tooth_levels_for(double range_sq, double eps) {
    // Interpolation error of x^2 on a dyadic grid with m levels is 4^-m / 4;
    // range_sq carries the output scaling of the surrounding construction.
    double target = eps / std::max(range_sq, 1e-300);
    int m = 2;
    while (m < kMaxToothLevels && 0.25 * std::pow(4.0, -m) > target) ++m;
    return m;
}

Matrix grid_points(double lo, double hi, int npts) {
    Matrix pts(1, npts);
    for (int i = 0; i < npts; ++i)
        pts(0, i) = lo + (hi - lo) * static_cast<double>(i) / (npts - 1);
    return pts;
}

}  // namespace

std::vector<double> eval_on_grid(const ReluNetwork& net, double lo, double hi, int npts) {
    Matrix pts = grid_points(lo, hi, npts);
    Matrix out(net.output_dim(), npts);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int chunk = 2048;
    if (hw < 2 || npts <= chunk) {
        out = net.evaluate(pts);
    } else {
        // Column blocks are independent, so the result is identical to the
        // single-threaded pass.
        const int nchunks = (npts + chunk - 1) / chunk;
        std::vector<std::thread> workers;
        std::atomic<int> next{0};
        auto work = [&]() {
            for (;;) {
                int c = next.fetch_add(1);
                if (c >= nchunks) break;
                int c0 = c * chunk;
                int n = std::min(chunk, npts - c0);
                out.middleCols(c0, n) = net.evaluate(Matrix(pts.middleCols(c0, n)));
            }
        };
        for (unsigned t = 0; t + 1 < hw; ++t) workers.emplace_back(work);
        work();
        for (auto& w : workers) w.join();
    }
    std::vector<double> r(npts);
    for (int i = 0; i < npts; ++i) r[i] = out(0, i);
    return r;
}

GridError measure_error_1d(const std::function<double(double)>& approx,
                           const std::function<double(double)>& exact,
                           double lo, double hi, int npts) {
    GridError e;
    double l2 = 0;
    for (int i = 0; i < npts; ++i) {
        double x = lo + (hi - lo) * static_cast<double>(i) / (npts - 1);
        double d = std::abs(approx(x) - exact(x));
        if (d > e.sup) {
            e.sup = d;
            e.at_x = x;
        }
        l2 += d * d;
    }
    e.l2 = std::sqrt(l2 * (hi - lo) / npts);
    return e;
}

GridError measure_error_1d(const ReluNetwork& net,
                           const std::function<double(double)>& exact,
                           double lo, double hi, int npts) {
    std::vector<double> vals = eval_on_grid(net, lo, hi, npts);
    GridError e;
    double l2 = 0;
    for (int i = 0; i < npts; ++i) {
        double x = lo + (hi - lo) * static_cast<double>(i) / (npts - 1);
        double d = std::abs(vals[i] - exact(x));
        if (d > e.sup) {
            e.sup = d;
            e.at_x = x;
        }
        l2 += d * d;
    }
    e.l2 = std::sqrt(l2 * (hi - lo) / npts);
    return e;
}

GridError measure_error_complex(const ComplexNet& net,
                                const std::function<Complex(double)>& exact,
                                double lo, double hi, int npts) {
    Matrix pts = grid_points(lo, hi, npts);
    Matrix out = net.net.evaluate(pts);
    GridError e;
    double l2 = 0;
    for (int i = 0; i < npts; ++i) {
        double x = pts(0, i);
        double d = std::abs(Complex(out(0, i), out(1, i)) - exact(x));
        if (d > e.sup) {
            e.sup = d;
            e.at_x = x;
        }
        l2 += d * d;
    }
    e.l2 = std::sqrt(l2 * (hi - lo) / npts);
    return e;
}

// --- squaring -------------------------------------------------------------

namespace {

// Shared core: the interpolation ladder for a^2 on [0,1], optionally run for
// two inputs a, b with a combined accumulator G = f^a - f^b + 1 (used by the
// multiplication network). Returns the layer list; the caller appends the
// output affine. Channel conventions documented inline.
std::vector<AffineLayer> square_ladder(int m) {
    // L1 units: (rho(x), rho(x - 1/2)); level-s units (s = 1..m-1):
    //   (rho(h_s), rho(h_s - 4^-s / 2), rho(f_s))
    // with h_{s+1} = h_s/2 - rho(h_s - 4^-s/2) and f_{s+1} = f_s - h_{s+1}.
    std::vector<AffineLayer> layers;
    {
        Matrix W(2, 1);
        W << 1, 1;
        Vector b(2);
        b << 0, -0.5;
        layers.emplace_back(W, b);
    }
    {
        // level-1 units from L1: h1 = x/2 - rho(x - 1/2), f1 = x/2 + rho(x - 1/2)
        Matrix W(3, 2);
        Vector b(3);
        W << 0.5, -1,   // h1
             0.5, -1,   // h1 - beta2
             0.5, 1;    // f1
        b << 0, -std::pow(4.0, -1.0) / 2.0, 0;
        layers.emplace_back(W, b);
    }
    for (int s = 1; s + 1 < m; ++s) {
        const double beta_next = std::pow(4.0, -(s + 1)) / 2.0;
        Matrix W(3, 3);
        Vector b(3);
        W << 0.5, -1, 0,   // h_{s+1} = p/2 - t
             0.5, -1, 0,   // h_{s+1} - beta
            -0.5,  1, 1;   // f_{s+1} = F - p/2 + t
        b << 0, -beta_next, 0;
        layers.emplace_back(W, b);
    }
    return layers;
}

}  // namespace

ReluNetwork build_square(double eps) {
    if (!(eps > 0 && eps < 0.5)) fail("build_square: eps must lie in (0, 1/2)");
    for (int m = tooth_levels_for(1.0, eps);; ++m) {
        std::vector<AffineLayer> layers = square_ladder(m);
        Matrix W(1, 3);
        W << -0.5, 1, 1;  // f_m = F - p/2 + t
        layers.emplace_back(W, Vector::Zero(1));
        ReluNetwork net(std::move(layers));
        GridError e = measure_error_1d(net, [](double x) { return x * x; }, 0.0, 1.0, 2049);
        if (e.sup <= eps || m >= kMaxToothLevels) return net;
    }
}

// --- multiplication -------------------------------------------------------

ReluNetwork build_multiply(double D, double eps) {
    if (!(D > 0)) fail("build_multiply: D must be positive");
    if (!(eps > 0 && eps < 0.5)) fail("build_multiply: eps must lie in (0, 1/2)");
    // xy = (u^2 - v^2) / (4 s^2) with u = s(x+y), v = s(x-y), s = min(1, 1/(2D)).
    const double s = std::min(1.0, 1.0 / (2.0 * D));
    const double out_scale = 1.0 / (4.0 * s * s);
    int m2 = 0;
    while (out_scale > std::ldexp(1.0, m2)) ++m2;
    const double out_res = out_scale / std::ldexp(1.0, m2);  // in (1/2, 1]

    for (int m = tooth_levels_for(2.0 * out_scale, eps);; ++m) {
        std::vector<AffineLayer> layers;
        {
            Matrix W(4, 2);
            W << s, s, -s, -s, s, -s, -s, s;  // rho(u), rho(-u), rho(v), rho(-v)
            layers.emplace_back(W, Vector::Zero(4));
        }
        {
            // level-0 units: t0a = rho(a - 1/2), t0b = rho(b - 1/2),
            //                ah = rho(a), bh = rho(b), G0 = rho(a - b + 1)
            Matrix W(5, 4);
            Vector b(5);
            W << 1, 1, 0, 0,
                 0, 0, 1, 1,
                 1, 1, 0, 0,
                 0, 0, 1, 1,
                 1, 1, -1, -1;
            b << -0.5, -0.5, 0, 0, 1;
            layers.emplace_back(W, b);
        }
        // level-s units (s = 1..m-1):
        //   (pa, ta, pb, tb, G) with pa = rho(h^a_s), ta = rho(h^a_s - beta),
        //   G_s = f^a_s - f^b_s + 1 (stays in [0,2]).
        {
            // level-1 from level-0 units [t0a, t0b, ah, bh, G0]:
            //   h1 = ah/2 - t0, G1 = G0 - h1a + h1b
            const double beta1 = std::pow(4.0, -1.0) / 2.0;
            Matrix W = Matrix::Zero(5, 5);
            Vector b(5);
            W(0, 2) = 0.5; W(0, 0) = -1;                    // h1a
            W(1, 2) = 0.5; W(1, 0) = -1;                    // h1a - beta1
            W(2, 3) = 0.5; W(2, 1) = -1;                    // h1b
            W(3, 3) = 0.5; W(3, 1) = -1;                    // h1b - beta1
            W(4, 4) = 1; W(4, 2) = -0.5; W(4, 0) = 1;       // G1 = G0 - h1a + h1b
            W(4, 3) = 0.5; W(4, 1) = -1;
            b << 0, -beta1, 0, -beta1, 0;
            layers.emplace_back(W, b);
        }
        for (int lev = 1; lev + 1 < m; ++lev) {
            const double beta_next = std::pow(4.0, -(lev + 1)) / 2.0;
            Matrix W = Matrix::Zero(5, 5);
            Vector b(5);
            // inputs: [pa, ta, pb, tb, G]
            W(0, 0) = 0.5; W(0, 1) = -1;
            W(1, 0) = 0.5; W(1, 1) = -1;
            W(2, 2) = 0.5; W(2, 3) = -1;
            W(3, 2) = 0.5; W(3, 3) = -1;
            W(4, 4) = 1; W(4, 0) = -0.5; W(4, 1) = 1; W(4, 2) = 0.5; W(4, 3) = -1;
            b << 0, -beta_next, 0, -beta_next, 0;
            layers.emplace_back(W, b);
        }
        // Output value w = (G_m - 1) * out_res, then m2 doublings.
        Matrix Wo(1, 5);
        Wo << -0.5 * out_res, 1.0 * out_res, 0.5 * out_res, -1.0 * out_res, 1.0 * out_res;
        Vector bo(1);
        bo << -out_res;
        layers.emplace_back(Wo, bo);
        ReluNetwork core(std::move(layers));
        ReluNetwork net = (m2 > 0) ? compose(scale_by_pow2(m2, 1), core) : core;

        // Probe on a tensor grid plus the diagonal.
        double worst = 0;
        {
            const int g = 101;
            Matrix pts(2, g * g);
            for (int i = 0; i < g; ++i)
                for (int j = 0; j < g; ++j) {
                    pts(0, i * g + j) = -D + 2.0 * D * i / (g - 1);
                    pts(1, i * g + j) = -D + 2.0 * D * j / (g - 1);
                }
            Matrix out = net.evaluate(pts);
            for (int c = 0; c < g * g; ++c)
                worst = std::max(worst, std::abs(out(0, c) - pts(0, c) * pts(1, c)));
        }
        if (worst <= eps || m >= kMaxToothLevels) return net;
    }
}

// --- polynomials (monomial accumulation chain) -----------------------------

namespace {

// One accumulation step for the power chain: input state (x, p, S...) where S
// has `acc_dim` components; output (x, p', S + c * p') with p' = mu(x, p).
ReluNetwork power_step(const ReluNetwork& mu, const std::vector<double>& coeff_cols) {
    const int acc_dim = static_cast<int>(coeff_cols.size());  // one coefficient per acc channel
    const int in_dim = 2 + acc_dim;
    std::vector<ReluNetwork> parts;
    parts.push_back(select_inputs(build_identity(1), {0}, in_dim));       // carry x
    parts.push_back(select_inputs(mu, {0, 1}, in_dim));                   // p' = mu(x, p)
    for (int i = 0; i < acc_dim; ++i)
        parts.push_back(select_inputs(build_identity(1), {2 + i}, in_dim));  // carry S_i
    ReluNetwork stacked = parallel(parts, true);
    // outputs: (x, p', S_1..S_acc) -> (x, p', S_i + c_i p')
    Matrix A = Matrix::Zero(in_dim, in_dim);
    A(0, 0) = 1;
    A(1, 1) = 1;
    for (int i = 0; i < acc_dim; ++i) {
        A(2 + i, 2 + i) = 1;
        A(2 + i, 1) = coeff_cols[static_cast<size_t>(i)];
    }
    return append_affine(A, Vector::Zero(in_dim), stacked);
}

// Shared polynomial driver: real (acc_dim=1) or complex (acc_dim=2)
// coefficients, premultiplied by Dp^i and scaled into [-1,1] by 2^m3.
// `slack` tightens the internal multiplication target on escalation.
ReluNetwork polynomial_chain(const std::vector<Complex>& coeffs, double D, double eps, int acc_dim,
                             double slack) {
    const int deg = static_cast<int>(coeffs.size()) - 1;
    const double Dp = std::max(D, 1.0);
    std::vector<Complex> scaled(coeffs.size());
    double cmax = 0;
    for (int i = 0; i <= deg; ++i) {
        scaled[static_cast<size_t>(i)] = coeffs[static_cast<size_t>(i)] * std::pow(Dp, i);
        cmax = std::max({cmax, std::abs(scaled[static_cast<size_t>(i)].real()),
                         std::abs(scaled[static_cast<size_t>(i)].imag())});
    }
    int m3 = 0;
    while (cmax > std::ldexp(1.0, m3)) ++m3;
    const double sc = std::ldexp(1.0, -m3);
    for (auto& c : scaled) c *= sc;

    const double eps_q = eps * sc;
    double zeta = eps_q / (3.0 * deg * slack);
    zeta = std::max(zeta, 1e-16);
    ReluNetwork mu = build_multiply(1.5, zeta);

    // init: x -> (x/Dp, 1, S0) as a single affine.
    Matrix A0 = Matrix::Zero(2 + acc_dim, 1);
    Vector b0 = Vector::Zero(2 + acc_dim);
    A0(0, 0) = 1.0 / Dp;
    b0(1) = 1.0;
    b0(2) = scaled[0].real();
    if (acc_dim == 2) b0(3) = scaled[0].imag();
    ChainBuilder chain(affine_network(A0, b0));

    for (int k = 1; k <= deg; ++k) {
        std::vector<double> cc;
        cc.push_back(scaled[static_cast<size_t>(k)].real());
        if (acc_dim == 2) cc.push_back(scaled[static_cast<size_t>(k)].imag());
        chain.then(power_step(mu, cc));
    }
    // project accumulator(s) and undo the coefficient scaling
    Matrix P = Matrix::Zero(acc_dim, 2 + acc_dim);
    for (int i = 0; i < acc_dim; ++i) P(i, 2 + i) = 1.0;
    chain.then_affine(P, Vector::Zero(acc_dim));
    ReluNetwork out = chain.finish();
    if (m3 > 0) out = compose(scale_by_pow2(m3, acc_dim), out);
    return out;
}

}  // namespace

ReluNetwork build_polynomial(const std::vector<double>& coeffs, double D, double eps) {
    if (coeffs.empty()) fail("build_polynomial: empty coefficient list");
    if (!(eps > 0 && eps < 0.5)) fail("build_polynomial: eps must lie in (0, 1/2)");
    const int deg = static_cast<int>(coeffs.size()) - 1;
    if (deg == 0) return append_affine(Matrix::Constant(1, 1, 0.0),
                                       Vector::Constant(1, coeffs[0]), build_identity(1));
    if (deg == 1) {
        // exact affine a0 + a1 x; bounded_affine keeps all weights <= 1
        return bounded_affine(Matrix::Constant(1, 1, coeffs[1]), Vector::Constant(1, coeffs[0]));
    }
    std::vector<Complex> cc(coeffs.begin(), coeffs.end());
    auto exact = [&](double x) {
        double v = 0;
        for (int i = deg; i >= 0; --i) v = v * x + coeffs[static_cast<size_t>(i)];
        return v;
    };
    for (int tries = 0;; ++tries) {
        ReluNetwork net = polynomial_chain(cc, D, eps, 1, std::pow(8.0, tries));
        GridError e = measure_error_1d(net, exact, -D, D, 2049);
        if (e.sup <= 0.9 * eps || tries >= 4) return net;
    }
}

ComplexNet build_polynomial_complex(const std::vector<Complex>& coeffs, double D, double eps) {
    if (coeffs.empty()) fail("build_polynomial_complex: empty coefficient list");
    if (!(eps > 0 && eps < 0.5)) fail("build_polynomial_complex: eps must lie in (0, 1/2)");
    auto exact = [&](double x) {
        Complex v = 0;
        for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i)
            v = v * x + coeffs[static_cast<size_t>(i)];
        return v;
    };
    for (int tries = 0;; ++tries) {
        ComplexNet net(polynomial_chain(coeffs, D, eps, 2, std::pow(8.0, tries)));
        GridError e = measure_error_complex(net, exact, -D, D, 2049);
        if (e.sup <= 0.9 * eps || tries >= 4) return net;
    }
}

// --- trigonometric networks ------------------------------------------------

ReluNetwork build_trig(TrigKind kind, double a, double D, double eps) {
    if (!(a > 0 && D > 0)) fail("build_trig: a and D must be positive");
    if (!(eps > 0 && eps < 0.5)) fail("build_trig: eps must lie in (0, 1/2)");
    const double shift = (kind == TrigKind::Sin) ? M_PI / 2.0 : 0.0;
    // cos(y) = cos(dist(y, 2 pi Z)); the distance is produced by lattice
    // folding of t = |a x - shift| / (2^K pi) and K+2 unit-weight doublings.
    int K = 0;
    while (std::ldexp(M_PI, K) < a * D + shift + 0.1 || a / std::ldexp(M_PI, K) > 1.0) ++K;
    const double unit = std::ldexp(M_PI, K);  // 2^K pi

    for (int tries = 0;; ++tries) {
        const double eps_here = eps / (1 << tries);
        std::vector<AffineLayer> layers;
        {
            Matrix W(2, 1);
            W << a / unit, -a / unit;
            Vector b(2);
            b << -shift / unit, shift / unit;
            layers.emplace_back(W, b);
        }
        // t = u1 + u2 in [0,1]; K folds t <- c - |t - c| at c = 2^-j.
        for (int j = 1; j <= K; ++j) {
            const double c = std::ldexp(1.0, -j);
            Matrix W(2, 2);
            Vector b(2);
            if (j == 1) {
                W << 1, 1, -1, -1;  // rho(t - c), rho(c - t)
            } else {
                W << -1, -1, 1, 1;  // previous layer holds (rho(t'-c'), rho(c'-t')): t = c' - s1 - s2
            }
            b << (j == 1 ? -c : std::ldexp(1.0, -(j - 1)) - c),
                 (j == 1 ? c : c - std::ldexp(1.0, -(j - 1)));
            layers.emplace_back(W, b);
        }
        // After the folds the current value is theta_t = c_K - s1 - s2 in [0, 2^-K].
        // K+2 doublings at unit weights (value stays nonnegative), then x pi/4.
        {
            Matrix W(2, 2);
            Vector b = Vector::Zero(2);
            if (K >= 1) {
                const double cK = std::ldexp(1.0, -K);
                W << -1, -1, -1, -1;
                b << cK, cK;
            } else {
                // no folds happened: units are (rho(wx - c0), rho(c0 - wx)), t = sum
                W << 1, 1, 1, 1;
            }
            layers.emplace_back(W, b);  // two copies of theta_t
        }
        for (int j = 0; j < K + 2; ++j) {
            Matrix W(2, 2);
            W << 1, 1, 1, 1;
            layers.emplace_back(W, Vector::Zero(2));
        }
        ReluNetwork reduce(std::move(layers));
        // theta = (pi/4) * 2^{K+2} * theta_t in [0, pi]
        Matrix Wth(1, 2);
        Wth << M_PI / 8.0, M_PI / 8.0;  // half from each duplicate channel
        reduce = append_affine(Wth, Vector::Zero(1), reduce);

        // Polynomial core: cos(theta) = -sin(theta - pi/2) on [0, pi].
        int d = 5;
        while (std::pow(M_PI / 2.0, d + 2) / std::tgamma(d + 3.0) > eps_here / 4.0 && d < 40) d += 2;
        std::vector<double> sc(static_cast<size_t>(d) + 1, 0.0);
        double f = 1;
        for (int k = 0; k <= d; ++k) {
            if (k > 0) f *= k;
            if (k % 2 == 1) sc[static_cast<size_t>(k)] = ((k / 2) % 2 == 0 ? -1.0 : 1.0) / f;
        }
        ReluNetwork core = build_polynomial(sc, M_PI / 2.0 + 0.1, eps_here / 2.0);
        Matrix Ash(1, 1);
        Ash << 1.0;
        Vector bsh(1);
        bsh << -M_PI / 2.0;
        ReluNetwork net = compose(prepend_affine(core, Ash, bsh), reduce);

        auto exact = [&](double x) {
            return (kind == TrigKind::Cos) ? std::cos(a * x) : std::sin(a * x);
        };
        GridError e = measure_error_1d(net, exact, -D, D, 2049);
        if (e.sup <= eps || tries >= 3) return net;
    }
}

// --- decaying exponential ---------------------------------------------------

ReluNetwork build_exp_decay(double a, double D, double eps) {
    if (!(a > 0 && D > 0)) fail("build_exp_decay: a and D must be positive");
    if (!(eps > 0 && eps < 0.5)) fail("build_exp_decay: eps must lie in (0, 1/2)");
    const double su = (D > 1.0) ? 1.0 / D : 1.0;     // u = su * x in (0, min(D,1))
    const double rate = a / su;                      // exp(-a x) = exp(-rate u)
    int n_sq = 0;
    while (rate / std::ldexp(1.0, n_sq) > 1.0) ++n_sq;
    const double c2 = rate / std::ldexp(1.0, n_sq);  // in (1/2, 1]

    for (int tries = 0;; ++tries) {
        const double eps_here = eps / (1 << (2 * tries));
        // Optimistic chain budget first (linear growth); the worst case
        // 2^{n_sq} amplification is restored by the escalation ladder.
        double zeta = (tries == 0) ? eps_here / (2.0 * (n_sq + 1))
                                   : eps_here / std::pow(2.0, n_sq + 1);
        zeta = std::max(zeta, 1e-16);
        // Taylor core for exp(-c2 u) about u = 1/2 (halves the radius, so the
        // degree needed drops by ~2^-N versus expansion at 0).
        int N = 3;
        while (std::pow(0.5, N + 1) / std::tgamma(N + 2.0) > zeta / 2.0 && N < 30) ++N;
        std::vector<double> coeff(static_cast<size_t>(N) + 1);
        const double mid = std::exp(-c2 / 2.0);
        double f = 1, p = 1;
        for (int k = 0; k <= N; ++k) {
            if (k > 0) {
                f *= k;
                p *= -c2;
            }
            coeff[static_cast<size_t>(k)] = mid * ((k == 0) ? 1.0 : p / f);
        }
        ReluNetwork core = build_polynomial(coeff, 0.55, zeta / 2.0);
        Matrix As(1, 1);
        As << su;
        Vector bs(1);
        bs << -0.5;
        core = prepend_affine(core, As, bs);
        ReluNetwork net = core;
        if (n_sq > 0) {
            ReluNetwork sq = build_square(zeta);
            for (int j = 0; j < n_sq; ++j) net = compose(sq, net);
        }
        GridError e = measure_error_1d(net, [&](double x) { return std::exp(-a * x); }, 0.0, D, 513);
        if (e.sup <= 0.9 * eps || tries >= 3) return net;
    }
}

// --- sinc quadrature and reciprocals ----------------------------------------

SincRule sinc_rule(int k) {
    if (k < 1) fail("sinc_rule: k must be >= 1");
    SincRule r;
    r.k = k;
    const double h = 1.0 / std::sqrt(static_cast<double>(k));
    for (int j = -k; j <= k; ++j) {
        const double e = std::exp(j * h);
        r.nodes.push_back(std::log(e + std::sqrt(1.0 + e * e)));
        r.weights.push_back(1.0 / std::sqrt(k + k * std::exp(-2.0 * j * h)));
    }
    return r;
}

namespace {

double sinc_direct_error(const SincRule& r, double lo, double hi, int npts) {
    double worst = 0;
    for (int i = 0; i < npts; ++i) {
        double x = lo + (hi - lo) * i / (npts - 1);
        double s = 0;
        for (size_t j = 0; j < r.nodes.size(); ++j)
            s += r.weights[j] * std::exp(-r.nodes[j] * x);
        worst = std::max(worst, std::abs(s - 1.0 / x));
    }
    return worst;
}

double estimated_sinc_constant() {
    // C_S in err <= C_S exp(-sqrt(k)), estimated once empirically at k = 16.
    static const double cs = [] {
        SincRule r = sinc_rule(16);
        double e = sinc_direct_error(r, 1.0, 50.0, 4001);
        return e / std::exp(-4.0);
    }();
    return cs;
}

// Appends "acc += omega * Phi(x)" to a running (x, acc) chain.
ReluNetwork sum_step(const ReluNetwork& phi, double omega) {
    std::vector<ReluNetwork> parts;
    parts.push_back(select_inputs(build_identity(1), {0}, 2));
    parts.push_back(select_inputs(phi, {0}, 2));
    parts.push_back(select_inputs(build_identity(1), {1}, 2));
    ReluNetwork stacked = parallel(parts, true);
    Matrix A(2, 3);
    A << 1, 0, 0, 0, omega, 1;
    return append_affine(A, Vector::Zero(2), stacked);
}

}  // namespace

ReluNetwork build_reciprocal(double D, double eps) {
    if (!(D > 1)) fail("build_reciprocal: D must exceed 1");
    if (!(eps > 0 && eps < 0.5)) fail("build_reciprocal: eps must lie in (0, 1/2)");
    const double cs = estimated_sinc_constant();
    double l = std::log(2.0 * cs / eps);
    int k = static_cast<int>(std::ceil(l * l));
    k = std::max(k, 4);
    SincRule rule = sinc_rule(k);
    while (sinc_direct_error(rule, 1.0, std::min(D, 1e4), 2001) > eps / 2.0) {
        k = static_cast<int>(std::ceil(1.3 * k)) + 1;
        rule = sinc_rule(k);
    }
    double wsum = 0;
    for (double w : rule.weights) wsum += w;
    const double eps_each = eps / (2.0 * wsum);

    for (int tries = 0;; ++tries) {
        Matrix A0(2, 1);
        A0 << 1, 0;
        ChainBuilder chain(affine_network(A0, Vector::Zero(2)));  // (x, 0)
        for (size_t j = 0; j < rule.nodes.size(); ++j) {
            ReluNetwork phi = build_exp_decay(rule.nodes[j], D, eps_each / (1 << tries));
            chain.then(sum_step(phi, rule.weights[j]));
        }
        Matrix P(1, 2);
        P << 0, 1;
        chain.then_affine(P, Vector::Zero(1));
        ReluNetwork net = chain.finish();
        GridError e = measure_error_1d(net, [](double x) { return 1.0 / x; }, 1.0, D, 1025);
        if (e.sup <= 0.9 * eps || tries >= 2) return net;
    }
}

ReluNetwork build_reciprocal_power(int n, double D, double eps) {
    if (n < 2) fail("build_reciprocal_power: n must be >= 2");
    if (!(D > 1)) fail("build_reciprocal_power: D must exceed 1");
    if (!(eps > 0 && eps < 0.5)) fail("build_reciprocal_power: eps must lie in (0, 1/2)");
    for (int tries = 0;; ++tries) {
        // Optimistic budget |phi^n - x^{-n}| <= n*zeta on x >= 1 first; the
        // escalation restores the (2n+1)(1+zeta)^n zeta worst case.
        double zeta = (tries == 0) ? eps / (n + 1.0) : eps / ((2.0 * n + 1.0) * 1.1 * (1 << tries));
        ReluNetwork phi = build_reciprocal(D, zeta);
        ReluNetwork mu = build_multiply(1.5, zeta);
        // state (v, p): v = phi(x) carried, p = running power
        Matrix A0(2, 1);
        A0 << 1, 1;
        ChainBuilder chain(append_affine(A0, Vector::Zero(2), phi));  // (v, v)
        for (int j = 2; j <= n; ++j) {
            std::vector<ReluNetwork> parts;
            parts.push_back(select_inputs(build_identity(1), {0}, 2));
            parts.push_back(select_inputs(mu, {0, 1}, 2));
            chain.then(parallel(parts, true));
        }
        Matrix P(1, 2);
        P << 0, 1;
        chain.then_affine(P, Vector::Zero(1));
        ReluNetwork net = chain.finish();
        GridError e = measure_error_1d(net, [&](double x) { return std::pow(x, -n); }, 1.0, D, 1025);
        if (e.sup <= 0.9 * eps || tries >= 2) return net;
    }
}

}  // namespace rtr
