#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "bellcv/functions.hpp"
#include "bellcv/states.hpp"

namespace bellcv {

// Integral of h(x) x^order e^{-2x^2} over the real line. The domain is split
// at the declared breakpoints and each smooth piece is integrated by adaptive
// fixed-node Gaussian rules after the substitution u = sqrt(2) x. Throws
// QuadratureError when refinement fails to converge.
double integrate_1d(const std::function<double(double)>& h, int moment_order,
                    std::span<const double> breakpoints);

struct QuadratureError : std::runtime_error {
    explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

// Cached Gaussian moments of a measured function against the vacuum weight:
//   m0 = \int h e^{-2x^2} dx,  m1 = \int x h e^{-2x^2} dx,
//   m2 = \int x^2 h e^{-2x^2} dx
// and the same three for h^2 (used by the inequality denominators).
struct KernelMoments {
    double m0, m1, m2;
    double s0, s1, s2;
};

const KernelMoments& kernel_moments(const FunctionSpec& h);

// Moments of |x|^p against e^{-2x^2}: {m0, m2} (odd moment vanishes).
struct EvenMoments {
    double m0, m2;
};
EvenMoments abs_power_moments(double p);

// Number of kernel-cache entries computed or loaded so far.
std::size_t kernel_cache_size();
// Load/store the kernel cache from BELLCV_CACHE_DIR (no-ops when unset;
// corrupt or missing files are ignored and entries recompute silently).
void kernel_cache_load_env();
void kernel_cache_save_env();

// Single-mode density block, entry block(ket, bra) = coefficient of |ket><bra|.
struct ModeBlock {
    cplx w[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    cplx& at(int ket, int bra) { return w[ket][bra]; }
    const cplx& at(int ket, int bra) const { return w[ket][bra]; }
};

// Tr[block h(X^theta)] restricted to the {0,1} photon subspace.
cplx mode_kernel(const ModeBlock& block, const FunctionSpec& h, double theta);

// Measured function plus local-oscillator phase for one mode.
struct ModeObservable {
    FunctionSpec func;
    double angle;
};

// Complex site function F = f(X^theta) + i * conj_sign * g(X^theta').
struct SiteObservablePair {
    ModeObservable f_obs;
    ModeObservable g_obs;
    int conj_sign = +1;
};

// <prod_n h_n(X_n^theta_n)> via per-mode kernel contraction.
cplx correlate(const DensityOperator& rho, std::span<const ModeObservable> observables);

// As correlate, but discards an imaginary part below 1e-10 and throws above.
double correlate_hermitian(const DensityOperator& rho,
                           std::span<const ModeObservable> observables);

// <prod_n h_n(X_n^theta_n)^2>: the per-mode kernels of the squared functions.
double correlate_hermitian_squared(const DensityOperator& rho,
                                   std::span<const ModeObservable> observables);

// <prod_n [f_n(X^theta_n) + i s_n g_n(X^theta'_n)]>.
cplx correlate_complex(const DensityOperator& rho, std::span<const SiteObservablePair> sites);

// <prod_n [f_n(X^theta_n)^2 + g_n(X^theta'_n)^2]>.
double correlate_squared_sum(const DensityOperator& rho,
                             std::span<const SiteObservablePair> sites);

// Joint quadrature density P(x_1,...,x_N) at local-oscillator angles.
double joint_probability(const DensityOperator& rho, std::span<const double> angles,
                         std::span<const double> x);

// One axis of the grid oracle: an arbitrary outcome function with its
// non-smooth points, measured at the given local-oscillator angle.
struct GridAxis {
    std::function<double(double)> h;
    std::vector<double> breakpoints;
    double angle;
};

// Tensor-product quadrature of P * prod_n h_n(x_n) over R^N, evaluating the
// joint probability pointwise. Independent of the kernel contraction path;
// used as the verification oracle. points_per_axis nodes are distributed over
// the smooth pieces of each axis.
double grid_moment(const DensityOperator& rho, std::span<const GridAxis> axes,
                   int points_per_axis = 201);
double grid_moment(const DensityOperator& rho, std::span<const ModeObservable> observables,
                   int points_per_axis = 201);

}  // namespace bellcv
