#pragma once

#include "bellcv/functions.hpp"

namespace bellcv {

// The four Gaussian-weighted integrals that determine the moment inequality
// for a site measuring f and g:
//   i_plus  = 2 \int e^{-2x^2} x (f+g) dx
//   i_minus = 2 \int e^{-2x^2} x (f-g) dx
//   i_quad  = 4 \int x^2 e^{-2x^2} [(f+g)^2 + (f-g)^2] dx
//   i_zero  =   \int e^{-2x^2} [(f+g)^2 + (f-g)^2] dx
struct IIntegrals {
    double i_plus;
    double i_minus;
    double i_quad;
    double i_zero;
};

IIntegrals compute_I(const FunctionSpec& f, const FunctionSpec& g);
inline IIntegrals compute_I(const FunctionSpec& f) { return compute_I(f, f); }

// Self-consistent parameter of the optimal rational function x/(1+eps x^2)
// for even mode counts: eps = 4 i_zero / i_quad at eps itself. Damped
// fixed-point iteration with a bracketing-bisection fallback.
double solve_epsilon_even();
// Independent bisection-only solver for cross-checks.
double solve_epsilon_even_bisection();

// Odd mode counts: the measured parameter eps' = eps (N e+ - e-)/(N e+ + e-),
// e+- = eps +- 4, solved jointly with eps = 4 i_zero / i_quad evaluated at
// the rational function with parameter eps'. Returns eps'.
double solve_epsilon_odd(int n_sites);

// Optimal rational parameter under detector efficiency eta:
//   eps(eta) = 2 eta eps / (2 eta + (1-eta) eps).
double epsilon_lossy(double eta, double eps_even);
double epsilon_lossy(double eta);

// Closed-form threshold efficiency for the even symmetric configuration,
//   [(4-eps) + sqrt((4-eps)^2 + 4 eps^2)] i_zero i_quad pi
//   ----------------------------------------------------- ,
//                2^{6-4/N} (i_plus)^4
// with the fixed-point eps and its integrals.
double analytic_eta_crit(int n_sites);

// ---------------------------------------------------------------------------
// Closed-form Bell values for the generalized GHZ family with equal weights
// c1 = c2 = 1/sqrt(2). These are the per-mode contracted expressions; the
// test suite checks them against the full kernel engine at small N.

// Plain moment inequality (identity functions) under uniform efficiency.
double cfrd_bell_ghz(int n_sites, int r, double eta = 1.0);

// Functional inequality with f = g at every site; `purity` enters per site
// (an N-mode dyad that flips k modes is scaled by purity^k at the amplitude
// level, so the Bell ratio carries purity^N for the GHZ cross terms).
double functional_bell_ghz(int n_sites, int r, const FunctionSpec& f, double eta = 1.0,
                           double purity = 1.0);

// Functional inequality at the optimal rational function (eps resolved per
// parity and efficiency), r = N/2 rounded down to the favourable odd split.
double functional_bell_optimal(int n_sites, double eta = 1.0, double purity = 1.0);

// Binned inequality value S_N(p, eta) for GHZ states at the optimal angles.
double mabk_surface(int n_sites, double eta = 1.0, double purity = 1.0,
                    const FunctionSpec& bin_func = FunctionSpec::sign_bin());

// Minimum efficiency 2^{(1-2N)/N} pi for the binned inequality at purity 1.
double mabk_eta_min(int n_sites);

}  // namespace bellcv
