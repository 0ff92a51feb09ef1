#include "qk/asymptotics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qk {
namespace {

constexpr double kPi = std::numbers::pi_v<double>;

void check_limit_params(const LimitParams& lp) {
    if (lp.gamma == 0.0) throw std::invalid_argument("limit: gamma must be nonzero");
    if (!(lp.c > 0.0)) throw std::invalid_argument("limit: c must be positive");
}

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double flm = f(0.5 * (a + m));
    const double frm = f(0.5 * (m + b));
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double eps) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, eps, 40);
}

struct BandPieces {
    double E = 0.0;   // common positive prefactor
    double F0 = 0.0;  // shared endpoint factor
    double FAp = 0.0; // projection-band endpoint factor
    double FAf = 0.0; // full-band endpoint factor
};

BandPieces band_pieces(double x, const LimitParams& lp) {
    check_limit_params(lp);
    const double g = lp.gamma, c = lp.c;
    if (!(x > 0.0) || !(x < c + 1.0))
        throw std::domain_error("spectral band: position outside (0, c+1)");
    const double den = 1.0 - std::exp(g * (c + 1.0 - x));
    const double ratio = (1.0 - std::exp(-g * (c + 1.0 - x))) / (1.0 - std::exp(-g * x));
    BandPieces p;
    if (lp.spec == Spec::PP) {
        p.E = std::exp(g * (c + 1.0 - x) / 2.0 - g) * std::sqrt(ratio);
        p.F0 = 1.0 - std::exp(2.0 * g) * (1.0 - std::exp(-g * x)) / den;
        p.FAp = (std::exp(2.0 * g) - 1.0) / den + p.F0;
        p.FAf = (std::exp(g * (c + 1.0)) + std::exp(2.0 * g) - 1.0 - std::exp(g * (1.0 - c))) / den +
                p.F0;
    } else {
        p.E = std::exp(-g * x / 2.0 - g / 2.0) * std::sqrt(ratio);
        p.F0 = 1.0 - std::exp(g * (c + 2.0)) * (1.0 - std::exp(-g * x)) / den;
        p.FAp = (std::exp(g) - 1.0) * (1.0 + std::exp(g * (c + 1.0))) / den + p.F0;
        p.FAf = (std::exp(g * (c + 1.0)) - 1.0) * (1.0 + std::exp(g)) / den + p.F0;
    }
    return p;
}

/// Finite-size recurrence coefficients at truncation order, with n and k = cn
/// treated as real numbers so extrapolation in 1/n is smooth.
RecurrenceLimits finite_n_recurrence(double n, const LimitParams& lp) {
    const double c = lp.c, g = lp.gamma;
    const double N = n + c * n - 1.0;
    const double pe = (lp.spec == Spec::PP) ? (1.0 - 2.0 * n) : (2.0 - 2.0 * n - c * n);
    const double lnq = -g / n;
    auto qp = [&](double z) { return std::exp(z * lnq); };
    auto coefA = [&](double m) {
        return (1.0 - qp(m - N)) * (1.0 + qp(pe + m)) /
               ((1.0 + qp(pe + 2.0 * m)) * (1.0 + qp(pe + 2.0 * m + 1.0)));
    };
    auto coefC = [&](double m) {
        return -qp(pe + 2.0 * m - N - 1.0) * (1.0 + qp(pe + m + N)) * (1.0 - qp(m)) /
               ((1.0 + qp(pe + 2.0 * m - 1.0)) * (1.0 + qp(pe + 2.0 * m)));
    };
    RecurrenceLimits r;
    r.b = 1.0 - (coefA(n) + coefC(n));
    r.a = std::sqrt(coefA(n - 1.0) * coefC(n));
    return r;
}

/// Value at h = 0 of the polynomial through (h_i, y_i), i = from..3.
double lagrange_at_zero(const std::array<double, 4>& h, const std::array<double, 4>& y, int from) {
    double s = 0.0;
    for (int i = from; i < 4; ++i) {
        double w = 1.0;
        for (int j = from; j < 4; ++j)
            if (j != i) w *= h[j] / (h[j] - h[i]);
        s += w * y[i];
    }
    return s;
}

}  // namespace

double arc_argument(double t, const LimitParams& lp) {
    check_limit_params(lp);
    const double g = lp.gamma, c = lp.c;
    if (!(t > 0.0) || !(t < c + 1.0))
        throw std::domain_error("arc_argument: t outside (0, c+1)");
    const double R = (1.0 - std::exp(g * t)) * (1.0 - std::exp(g * (c + 1.0 - t)));
    const double sgn = g > 0.0 ? -1.0 : 1.0;
    if (lp.spec == Spec::PP)
        return sgn * 0.5 * std::exp(g - g * t / 2.0) * (1.0 - std::exp(g * (c - 1.0))) /
               std::sqrt(R);
    return sgn * 0.5 * std::exp(g * (t - c) / 2.0) *
           (1.0 - std::exp(g * c) - std::exp(g * (c - t)) + std::exp(g * (c + 1.0 - t))) /
           std::sqrt(R);
}

double limit_density(double t, const LimitParams& lp) {
    check_limit_params(lp);
    const double span = lp.c + 1.0;
    const double delta = span * 1e-13;
    t = std::clamp(t, delta, span - delta);
    const double arg = std::clamp(arc_argument(t, lp), -1.0, 1.0);
    return std::acos(arg) / kPi;
}

double integrated_density(double x, const LimitParams& lp) {
    check_limit_params(lp);
    x = std::clamp(x, 0.0, lp.c + 1.0);
    return integrate([&](double t) { return limit_density(t, lp); }, 0.0, x, 1e-10);
}

double limit_shape(double x, const LimitParams& lp) {
    x = std::clamp(x, 0.0, lp.c + 1.0);
    return 1.0 + x - 2.0 * integrated_density(x, lp);
}

double sine_kernel(double rho, double u, double v) {
    const double d = u - v;
    if (d == 0.0) return rho;
    return std::sin(kPi * rho * d) / (kPi * d);
}

RecurrenceLimits recurrence_limits_closed(const LimitParams& lp) {
    check_limit_params(lp);
    const double g = lp.gamma, c = lp.c;
    RecurrenceLimits r;
    if (lp.spec == Spec::PP) {
        r.a = 0.25 * std::sqrt((std::exp(2.0 * g) - 1.0) * (std::exp(2.0 * g * c) - 1.0));
        r.b = 0.5 * (1.0 + std::exp(g * (c + 1.0)));
    } else {
        const double egc = std::exp(g * c);
        const double s = 1.0 + egc;
        const double rad =
            2.0 * (std::exp(g) - 1.0) * (egc - 1.0) * (1.0 + std::exp(g * (c + 1.0)));
        r.a = egc * std::sqrt(rad) / (s * s);
        r.b = (3.0 * egc - std::exp(2.0 * g * c) - std::exp(g * (c + 1.0)) +
               3.0 * std::exp(g * (2.0 * c + 1.0))) /
              (s * s);
    }
    return r;
}

RecurrenceLimits recurrence_limits_extrapolated(const LimitParams& lp) {
    check_limit_params(lp);
    const std::array<double, 4> ns{200.0, 400.0, 800.0, 1600.0};
    std::array<double, 4> h{}, ya{}, yb{};
    for (int i = 0; i < 4; ++i) {
        h[i] = 1.0 / ns[i];
        const RecurrenceLimits r = finite_n_recurrence(ns[i], lp);
        ya[i] = r.a;
        yb[i] = r.b;
    }
    RecurrenceLimits out;
    out.a = lagrange_at_zero(h, ya, 0);
    out.b = lagrange_at_zero(h, yb, 0);
    const double ea = std::abs(out.a - lagrange_at_zero(h, ya, 1));
    const double eb = std::abs(out.b - lagrange_at_zero(h, yb, 1));
    if (ea > 1e-4 * std::max(1.0, std::abs(out.a)) ||
        eb > 1e-4 * std::max(1.0, std::abs(out.b)))
        throw std::runtime_error("recurrence_limits_extrapolated: no convergence in 1/n");
    return out;
}

SupportInterval support_interval(const LimitParams& lp) {
    const RecurrenceLimits r = recurrence_limits_closed(lp);
    SupportInterval s;
    s.u_lo = r.b - 2.0 * r.a;
    s.u_hi = r.b + 2.0 * r.a;
    const double g = lp.gamma;
    const double u_end = std::exp(g * (lp.c + 1.0));
    const double umin = std::min(1.0, u_end), umax = std::max(1.0, u_end);
    const double t1 = std::log(std::clamp(s.u_lo, umin, umax)) / g;
    const double t2 = std::log(std::clamp(s.u_hi, umin, umax)) / g;
    s.t_lo = std::min(t1, t2);
    s.t_hi = std::max(t1, t2);
    return s;
}

Band oscillatory_band(const LimitParams& lp) {
    check_limit_params(lp);
    const double span = lp.c + 1.0;
    const int G = 4001;
    auto at = [&](int i) { return span * (i + 0.5) / G; };
    auto is_in = [&](double t) { return std::abs(arc_argument(t, lp)) < 1.0; };
    int first = -1, last = -1;
    for (int i = 0; i < G; ++i) {
        if (is_in(at(i))) {
            if (first < 0) first = i;
            last = i;
        }
    }
    if (first < 0) throw std::runtime_error("oscillatory_band: no oscillatory region found");
    auto bisect = [&](double t_out, double t_in) {
        for (int it = 0; it < 60; ++it) {
            const double m = 0.5 * (t_out + t_in);
            (is_in(m) ? t_in : t_out) = m;
        }
        return 0.5 * (t_out + t_in);
    };
    Band b;
    b.lo = (first == 0) ? 0.0 : bisect(at(first - 1), at(first));
    b.hi = (last == G - 1) ? span : bisect(at(last + 1), at(last));
    return b;
}

Band projection_band(double x, const LimitParams& lp) {
    const BandPieces p = band_pieces(x, lp);
    const double e1 = p.E * p.F0, e2 = p.E * p.FAp;
    return {std::min(e1, e2), std::max(e1, e2)};
}

Band full_band(double x, const LimitParams& lp) {
    const BandPieces p = band_pieces(x, lp);
    const double e1 = p.E * p.F0, e2 = p.E * p.FAf;
    return {std::min(e1, e2), std::max(e1, e2)};
}

double arc_argument_from_band(double x, const LimitParams& lp) {
    const BandPieces p = band_pieces(x, lp);
    return 0.5 * p.E * p.FAp;
}

std::vector<double> fourier_coeffs(const std::function<double(double)>& f,
                                   const RecurrenceLimits& rl, int count, int grid) {
    if (count < 1 || grid < 2 * count) throw std::invalid_argument("fourier_coeffs: grid too small");
    std::vector<double> fv(grid);
    for (int j = 0; j < grid; ++j)
        fv[j] = f(2.0 * rl.a * std::cos(2.0 * kPi * j / grid) + rl.b);
    std::vector<double> out(count, 0.0);
    for (int l = 0; l < count; ++l) {
        double s = 0.0;
        for (int j = 0; j < grid; ++j) s += fv[j] * std::cos(l * (2.0 * kPi * j / grid));
        out[l] = s / grid;
    }
    return out;
}

double clt_variance(const std::function<double(double)>& f, const RecurrenceLimits& rl) {
    int count = 64, grid = 4096;
    for (int attempt = 0; attempt < 4; ++attempt) {
        const std::vector<double> fh = fourier_coeffs(f, rl, count, grid);
        double s = 0.0;
        for (int l = 1; l < count; ++l) s += l * fh[l] * fh[l];
        double tail = 0.0;
        for (int l = count - 8; l < count; ++l) tail += l * fh[l] * fh[l];
        if (tail <= 1e-12 * s + 1e-14) return s;  // absolute floor admits constant statistics
        count *= 2;
        grid *= 2;
    }
    throw std::runtime_error("clt_variance: Fourier coefficients decay too slowly");
}

double linear_statistic(const std::function<double(double)>& f, const Partition& lam, int n,
                        double gamma) {
    double s = 0.0;
    for (int a : to_coords(lam, n)) s += f(std::exp(gamma * a / n));
    return s;
}

}  // namespace qk
