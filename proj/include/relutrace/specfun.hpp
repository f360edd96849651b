#pragma once

// Independent numerical oracles: complex Airy function, Bessel/Hankel
// functions, Fock's integral and its derivatives, the rightmost Airy root,
// and empirical asymptotic coefficients.

#include "relutrace/net.hpp"

#include <vector>

namespace rtr {

// --- Airy ------------------------------------------------------------------

struct ScaledAiry {
    Complex val;    // Ai(z)  = val  * exp(sigma)
    Complex der;    // Ai'(z) = der  * exp(sigma)
    double sigma;   // real scale exponent
};

// Valid on the whole plane; |z| <= ~1e3. Maclaurin series for |z| <= 4.7,
// Poincare asymptotics (with the connection formula behind |arg z| > 2pi/3)
// for |z| >= 9, Taylor marching of the Airy ODE from an asymptotic anchor in
// the annulus between.
ScaledAiry airy_ai_scaled(Complex z);

struct AiryValue {
    Complex value;
    Complex deriv;
    bool overflow;  // exp(sigma) exceeded the double range
};
AiryValue airy_ai(Complex z);

double airy_rightmost_root();                                  // nu_1 to ~1e-12
const std::vector<std::pair<double, double>>& airy_roots();    // (nu_j, Ai'(nu_j)), j=1..6

// --- Bessel ------------------------------------------------------------------

double bessel_j(int m, double x);
double bessel_y(int m, double x);
Complex bessel_h1(int m, double x);

// All orders 0..mmax at once (backward recurrence for J, forward for Y).
void bessel_jy_all(int mmax, double x, std::vector<double>& J, std::vector<double>& Y);

// J_m(x) Y'_m(x) - J'_m(x) Y_m(x) - 2/(pi x); should vanish to ~1e-9.
double bessel_wronskian_residual(int m, double x);

// --- Fock's integral ---------------------------------------------------------

// Contour: two rays from a vertex on the negative imaginary axis. The left
// arm direction adapts to tau (theta_L = pi - min(pi/6, delta_scale/tau^3)
// for tau > 4) so the integrand's modulus stays cancellation-safe; values for
// tau <= residue_switch come from the residue series over the Airy poles.
struct FockOracleConfig {
    double vertex_depth = 0.45;        // vertex at -i * vertex_depth
    double theta_left = 5.0 * M_PI / 6.0;
    double theta_right = 0.0;
    double delta_scale = 122.0;
    double residue_switch = -8.0;
    double truncation_radius_cap = 3.0e4;
    int max_panels = 200000;
    int max_deriv = 4;
};

struct FockValue {
    Complex value;
    double err_estimate;
    bool converged;
};

// Psi^{(ell)}(tau), ell <= cfg.max_deriv (<= 4).
FockValue fock_psi(double tau, int ell = 0, const FockOracleConfig& cfg = FockOracleConfig());

struct FockTailCoeffs {
    std::vector<Complex> a;   // plus-side tail coefficients a_0..a_n
    double fit_residual;      // rms residual of the least-squares fit
    double Cn_remainder;      // empirical constant in |Psi - sum| <= C_n tau^{1-3(n+1)}
    Complex c0;               // minus-side amplitude
    double beta;              // minus-side correction rate (> 0)
    double minus_slope;       // fitted d log|Psi|/d|tau| (about nu_1 sqrt(3)/2)
};

// Fits on tau in [15, 80] (plus side) and [-40, -10] (minus side); n <= 4.
FockTailCoeffs fock_tail_coeffs(int n, const FockOracleConfig& cfg = FockOracleConfig());

}  // namespace rtr
