#pragma once
// Scaling-limit layer: q = exp(-gamma/n) with k/n -> c as n -> infinity.
//
// Positions are measured in the scaled variable t = a/n on [0, c+1].  The
// limiting particle density rho(t) comes from an arccosine of a closed-form
// argument; outside the band where that argument lies in [-1,1] the density
// freezes at 0 or 1.  The same argument arises as half the smaller endpoint
// of the local spectral interval of the limiting three-term recurrence, whose
// coefficient limits (a, b) also give the support [b-2a, b+2a] in the
// exponential variable u = e^{gamma t} and the Gaussian fluctuation variance
// of linear statistics via Fourier coefficients on that interval.

#include "qk/measures.hpp"
#include "qk/partition.hpp"

#include <functional>
#include <vector>

namespace qk {

struct LimitParams {
    double gamma = 1.0;  // q = exp(-gamma/n); must be nonzero
    double c = 1.0;      // aspect ratio k/n; must be positive
    Spec spec = Spec::PP;
};

/// Closed-form argument of the arccosine giving the limit density; defined
/// for t in the open interval (0, c+1).
double arc_argument(double t, const LimitParams& lp);

/// Limiting particle density rho(t) on [0, c+1], frozen to 0 or 1 where the
/// arccosine argument leaves [-1, 1].
double limit_density(double t, const LimitParams& lp);

/// int_0^x rho(t) dt (adaptive Simpson; equals 1 at x = c+1).
double integrated_density(double x, const LimitParams& lp);

/// Rescaled boundary profile f(x) = 1 + int_0^x (1 - 2 rho(t)) dt.
double limit_shape(double x, const LimitParams& lp);

/// Discrete sine kernel with local density rho; diagonal value is rho.
double sine_kernel(double rho, double u, double v);

/// Limits of the orthonormal recurrence coefficients near truncation order n,
/// in the variable u = q^{-a}.
struct RecurrenceLimits {
    double a = 0.0;
    double b = 0.0;
};

RecurrenceLimits recurrence_limits_closed(const LimitParams& lp);

/// The same limits obtained independently: evaluate the finite-n coefficients
/// at n in {200, 400, 800, 1600} (with real-valued k = c n) and extrapolate
/// polynomially in 1/n to n = infinity.  Throws if the extrapolation shows no
/// convergence.
RecurrenceLimits recurrence_limits_extrapolated(const LimitParams& lp);

/// Support [b - 2a, b + 2a] of the limiting measure in u = e^{gamma t},
/// together with the corresponding t-interval (clamped to [0, c+1]).
struct SupportInterval {
    double u_lo = 0.0;
    double u_hi = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
};
SupportInterval support_interval(const LimitParams& lp);

struct Band {
    double lo = 0.0;
    double hi = 0.0;
};

/// t-interval where |arc_argument| < 1, found by grid scan plus bisection —
/// independent of the closed-form support above.
Band oscillatory_band(const LimitParams& lp);

/// Endpoints of the local spectral interval at position x = t: `projection`
/// restricts the limiting operator to the range of the rank projection,
/// `full` does not.  The projection band is nested inside the full band, and
/// its smaller endpoint equals 2 * arc_argument(x).
Band projection_band(double x, const LimitParams& lp);
Band full_band(double x, const LimitParams& lp);
double arc_argument_from_band(double x, const LimitParams& lp);

/// Fourier coefficients hat f_l = (1/2pi) int f(2a cos th + b) e^{-il th} dth
/// (real by symmetry), l = 0..count-1.
std::vector<double> fourier_coeffs(const std::function<double(double)>& f,
                                   const RecurrenceLimits& rl, int count, int grid = 4096);

/// Gaussian limit variance sum_{l>=1} l hat f_l^2 of the linear statistic.
double clt_variance(const std::function<double(double)>& f, const RecurrenceLimits& rl);

/// Finite-n linear statistic sum_i f(e^{gamma a_i / n}) over the particle
/// coordinates of a diagram.
double linear_statistic(const std::function<double(double)>& f, const Partition& lam, int n,
                        double gamma);

}  // namespace qk
