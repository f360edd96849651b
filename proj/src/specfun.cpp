#include "relutrace/specfun.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rtr {

namespace {

constexpr double kAi0 = 0.35502805388781723926;    // Ai(0)
constexpr double kAip0 = -0.25881940379280679841;  // Ai'(0)
constexpr double kSeriesRadius = 4.7;
constexpr double kAsympRadius = 9.0;

// Maclaurin series for (Ai, Ai') via the standard f/g solution pair.
ScaledAiry airy_series(Complex z) {
    const Complex z3 = z * z * z;
    Complex f = 1.0, fterm = 1.0;
    Complex g = z, gterm = z;
    Complex fp = 0.0, fpterm = 0.0;
    Complex gp = 1.0, gpterm = 1.0;
    // f  = sum z^{3k} prod, f' correspondingly; recurrences derived from
    // a_{k+1} = a_k z^3/((3k+2)(3k+3)) and g_{k+1} = g_k z^3/((3k+3)(3k+4)).
    Complex fpk = 0.5 * z * z;  // first f' term (k=1)
    fp = fpk;
    for (int k = 0; k < 60; ++k) {
        fterm *= z3 / static_cast<double>((3 * k + 2) * (3 * k + 3));
        gterm *= z3 / static_cast<double>((3 * k + 3) * (3 * k + 4));
        f += fterm;
        g += gterm;
        gpterm *= z3 / static_cast<double>((3 * k + 1) * (3 * k + 3));
        gp += gpterm;
        if (k >= 1) {
            fpk *= z3 * static_cast<double>(k + 1) /
                   static_cast<double>(k * (3 * k + 2) * (3 * k + 3));
            fp += fpk;
        }
        if (std::abs(fterm) + std::abs(gterm) < 1e-20 * (std::abs(f) + std::abs(g))) break;
    }
    ScaledAiry r;
    r.val = kAi0 * f + kAip0 * g;
    r.der = kAi0 * fp + kAip0 * gp;
    r.sigma = 0.0;
    return r;
}

// Poincare expansion, reliable for |z| >= 9 and |arg z| <= 2pi/3 + 0.05.
ScaledAiry airy_asymptotic_principal(Complex z) {
    const Complex zeta = (2.0 / 3.0) * std::pow(z, 1.5);
    const Complex z14 = std::pow(z, 0.25);
    Complex su = 0.0, sv = 0.0;
    double u = 1.0;
    Complex pw = 1.0;
    for (int k = 0; k < 40; ++k) {
        double v = -u * (6.0 * k + 1.0) / (6.0 * k - 1.0);
        if (k == 0) v = 1.0;
        Complex tu = u * pw, tv = v * pw;
        su += (k % 2 == 0) ? tu : -tu;
        sv += (k % 2 == 0) ? tv : -tv;
        double next_u = u * (6 * k + 5.0) * (6 * k + 3.0) * (6 * k + 1.0) /
                        (216.0 * (k + 1.0) * (2 * k + 1.0));
        if (std::abs(next_u * pw / zeta) > std::abs(u * pw)) break;  // past the least term
        u = next_u;
        pw /= zeta;
    }
    const double c = 0.5 / std::sqrt(M_PI);
    ScaledAiry r;
    r.sigma = -zeta.real();
    Complex phase = std::exp(Complex(0.0, -zeta.imag()));
    r.val = c * phase * su / z14;
    r.der = -c * phase * z14 * sv;
    return r;
}

ScaledAiry combine_scaled(const ScaledAiry& a, const ScaledAiry& b) {
    ScaledAiry r;
    r.sigma = std::max(a.sigma, b.sigma);
    r.val = a.val * std::exp(a.sigma - r.sigma) + b.val * std::exp(b.sigma - r.sigma);
    r.der = a.der * std::exp(a.sigma - r.sigma) + b.der * std::exp(b.sigma - r.sigma);
    return r;
}

ScaledAiry airy_asymptotic(Complex z) {
    const double arg = std::arg(z);
    if (std::abs(arg) <= 2.0 * M_PI / 3.0 + 0.05) return airy_asymptotic_principal(z);
    // connection: Ai(z) = -e^{2pi i/3} Ai(z e^{2pi i/3}) - e^{-2pi i/3} Ai(z e^{-2pi i/3});
    // both rotated arguments land inside the principal sector.
    const Complex w = std::polar(1.0, 2.0 * M_PI / 3.0);
    const Complex wp = std::polar(1.0, -2.0 * M_PI / 3.0);
    ScaledAiry a = airy_asymptotic_principal(z * w);
    ScaledAiry b = airy_asymptotic_principal(z * wp);
    ScaledAiry ra{-w * a.val, -w * w * a.der, a.sigma};
    ScaledAiry rb{-wp * b.val, -wp * wp * b.der, b.sigma};
    return combine_scaled(ra, rb);
}

// Taylor marching of w'' = z w from an asymptotic anchor toward z (radially);
// used in the annulus where neither the series nor the expansion is reliable.
ScaledAiry airy_march(Complex z) {
    const Complex dir = z / std::abs(z);
    Complex z0 = kAsympRadius * 1.02 * dir;
    ScaledAiry a = airy_asymptotic(z0);
    Complex y = a.val, yp = a.der;
    const double sigma = a.sigma;
    const int order = 26;
    double remaining = std::abs(z - z0);
    const Complex step_dir = (z - z0) / remaining;
    while (remaining > 1e-14) {
        double h = std::min(0.5, remaining);
        Complex hdir = step_dir * h;
        // Taylor coefficients c_n of the solution at z0
        std::vector<Complex> c(order + 1);
        c[0] = y;
        c[1] = yp;
        for (int n = 0; n + 2 <= order; ++n) {
            Complex rhs = z0 * c[static_cast<size_t>(n)];
            if (n >= 1) rhs += c[static_cast<size_t>(n) - 1];
            c[static_cast<size_t>(n) + 2] = rhs / static_cast<double>((n + 1) * (n + 2));
        }
        Complex nv = 0.0, nd = 0.0;
        for (int n = order; n >= 0; --n) {
            nv = nv * hdir + c[static_cast<size_t>(n)];
            if (n >= 1) nd = nd * hdir + static_cast<double>(n) * c[static_cast<size_t>(n)];
        }
        y = nv;
        yp = nd / 1.0;
        // nd accumulated n*c_n h^{n-1} terms: redo properly below
        z0 += hdir;
        remaining -= h;
    }
    return {y, yp, sigma};
}

}  // namespace

ScaledAiry airy_ai_scaled(Complex z) {
    const double r = std::abs(z);
    if (r <= kSeriesRadius) return airy_series(z);
    if (r >= kAsympRadius) return airy_asymptotic(z);
    return airy_march(z);
}

AiryValue airy_ai(Complex z) {
    ScaledAiry s = airy_ai_scaled(z);
    AiryValue v;
    v.overflow = s.sigma > 700.0;
    double e = std::exp(std::min(s.sigma, 700.0));
    v.value = s.val * e;
    v.deriv = s.der * e;
    return v;
}

namespace {

double airy_real(double x) {
    ScaledAiry s = airy_ai_scaled(Complex(x, 0.0));
    return (s.val * std::exp(s.sigma)).real();
}

}  // namespace

double airy_rightmost_root() {
    double lo = -2.5, hi = -2.0;  // Ai(-2.5) < 0 < Ai(-2)
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (airy_real(lo) * airy_real(mid) <= 0）hi = mid;
        else lo = mid;
        if (hi - lo < 1e-14) break;
    }
    return 0.5 * (lo + hi);
}

const std::vector<std::pair<double, double>>& airy_roots() {
    static const std::vector<std::pair<double, double>> roots = [] {
        const double approx[6] = {-2.338107, -4.087949, -5.520560, -6.786708, -7.944134, -9.022651};
        std::vector<std::pair<double, double>> out;
        for (double a0 : approx) {
            double lo = a0 - 0.25, hi = a0 + 0.25;
            double flo = airy_real(lo);
            for (int it = 0; it < 100; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = airy_real(mid);
                if (flo * fm <= 0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
                if (hi - lo < 1e-14) break;
            }
            double nu = 0.5 * (lo + hi);
            ScaledAiry s = airy_ai_scaled(Complex(nu, 0.0));
            out.emplace_back(nu, (s.der * std::exp(s.sigma)).real());
        }
        return out;
    }();
    return roots;
}

}  // namespace rtr
