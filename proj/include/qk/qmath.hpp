#pragma once
// q-arithmetic primitives shared by every other layer.
//
// All functions are templated on the scalar type.  Two backends are used
// throughout the project:
//   * qk::Rational — exact arbitrary-precision rationals, for identities that
//     must hold bit-exactly (normalization, form equivalence, weight ratios);
//   * double — for the numeric/asymptotic layer.  Products whose exponents
//     would overflow a double are handled by the log-space helpers below.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace qk {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& x) { return x.convert_to<double>(); }
inline double to_double(double x) { return x; }

/// base^e for integer e of either sign (binary exponentiation).
/// Negative exponents require an invertible base.
template <class S>
S pow_int(S base, long long e) {
    if (e < 0) {
        if (base == S(0)) throw std::domain_error("pow_int: 0 to a negative power");
        base = S(1) / base;
        e = -e;
    }
    S acc(1);
    while (e > 0) {
        if (e & 1) acc *= base;
        base *= base;
        e >>= 1;
    }
    return acc;
}

/// q-number [m]_q = (1-q^m)/(1-q), with the q->1 limit [m]_1 = m.
template <class S>
S q_number(long long m, const S& q) {
    if (m < 0) throw std::domain_error("q_number: negative m");
    if (q == S(1)) return S(static_cast<long>(m));
    return (S(1) - pow_int(q, m)) / (S(1) - q);
}

/// [m]_q! = prod_{i=1..m} [i]_q; empty product is 1.
template <class S>
S q_factorial(long long m, const S& q) {
    if (m < 0) throw std::domain_error("q_factorial: negative m");
    S acc(1);
    for (long long i = 1; i <= m; ++i) acc *= q_number(i, q);
    return acc;
}

/// Gaussian binomial [n choose m]_q; zero outside 0 <= m <= n.
/// Computed as the interleaved product prod_{i=1..m} [n-m+i]_q/[i]_q so that
/// partial results stay moderate in the floating backend; every division is
/// exact in the rational backend (the value is a polynomial in q).
template <class S>
S q_binomial(long long n, long long m, const S& q) {
    if (n < 0) throw std::domain_error("q_binomial: negative n");
    if (m < 0 || m > n) return S(0);
    if (2 * m > n) m = n - m;
    S acc(1);
    for (long long i = 1; i <= m; ++i) acc = acc * q_number(n - m + i, q) / q_number(i, q);
    return acc;
}

/// q-Pochhammer (a;q)_m = prod_{i=1..m} (1 - a q^{i-1}).
template <class S>
S q_pochhammer(const S& a, const S& q, long long m) {
    if (m < 0) throw std::domain_error("q_pochhammer: negative m");
    S acc(1);
    S aq = a;
    for (long long i = 0; i < m; ++i) {
        acc *= (S(1) - aq);
        aq *= q;
    }
    return acc;
}

// ---- log-space helpers for the floating backend ---------------------------

/// log|1 - e^t| for t != 0, stable for both tiny and huge |t|.
inline double log1m_exp(double t) {
    if (t == 0.0) throw std::domain_error("log1m_exp: t == 0");
    if (t > 0.0) return t + std::log1p(-std::exp(-t));  // |1-e^t| = e^t(1-e^{-t})
    return std::log1p(-std::exp(t));
}

/// log(1 + e^t) without overflow (softplus).
inline double log1p_exp(double t) {
    if (t > 0.0) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

/// log of sum of exponentials, tolerating -inf entries.
inline double log_sum_exp(const double* v, std::size_t n) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, v[i]);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - m);
    return m + std::log(s);
}

}  // namespace qk
