#pragma once
// q-Krawtchouk polynomial machinery: three-term recurrences, the lattice
// difference equation, the symmetrized tridiagonal operator and the rank-n
// projection correlation kernel.
//
// The kernel can be built two ways, which cross-check each other:
//  * spectral_kernel — eigendecomposition of the tridiagonal operator,
//    summing the eigenvector projectors of the lowest n recurrence indices;
//  * cd_kernel — Christoffel-Darboux sum over orthonormal polynomials,
//    evaluated with power-of-two scaled recurrences and log-weights so the
//    astronomically large/small intermediate factors never overflow.  This
//    path scales to lattices of tens of thousands of sites and is what the
//    asymptotic diagnostics use.

#include "qk/measures.hpp"
#include "qk/qmath.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

namespace qk {

/// Parameter triple (p, N, q) of the q-Krawtchouk family on {0,...,N}.
/// Derived from a model: N = n+k-1 and p = q^{1-2n} (PP) or q^{2-2n-k} (PIP).
template <class S>
struct QKParams {
    S p{1};
    long long N = 0;
    S q{1};
};

template <class S>
QKParams<S> qk_params(const ModelParams<S>& mp) {
    long long pe = (mp.spec == Spec::PP) ? (1 - 2LL * mp.n) : (2 - 2LL * mp.n - mp.k);
    return QKParams<S>{pow_int(mp.q, pe), mp.n + mp.k - 1LL, mp.q};
}

/// p as a power of q: the exponent used by qk_params.
inline long long p_exponent(int n, int k, Spec spec) {
    return spec == Spec::PP ? (1 - 2LL * n) : (2 - 2LL * n - k);
}

/// Difference-equation coefficients on the lattice:
///   A(m) = q^{-m}(1-q^m)(1+p q^m),  B(a) = 1-q^{a-N},  C(a) = -p(1-q^a).
template <class S>
S coeff_A(long long m, const QKParams<S>& t) {
    return pow_int(t.q, -m) * (S(1) - pow_int(t.q, m)) * (S(1) + t.p * pow_int(t.q, m));
}
template <class S>
S coeff_B(long long a, const QKParams<S>& t) {
    return S(1) - pow_int(t.q, a - t.N);
}
template <class S>
S coeff_C(long long a, const QKParams<S>& t) {
    return -t.p * (S(1) - pow_int(t.q, a));
}

/// Monic three-term recurrence coefficients (A_m, C_m):
///   q^{-x} P_m = P_{m+1} + [1-(A_m+C_m)] P_m + A_{m-1}C_m P_{m-1}.
template <class S>
std::pair<S, S> monic_recurrence_coeffs(long long m, const QKParams<S>& t) {
    const S& q = t.q;
    const S& p = t.p;
    S A = (S(1) - pow_int(q, m - t.N)) * (S(1) + p * pow_int(q, m)) /
          ((S(1) + p * pow_int(q, 2 * m)) * (S(1) + p * pow_int(q, 2 * m + 1)));
    S C = -p * pow_int(q, 2 * m - t.N - 1) * (S(1) + p * pow_int(q, m + t.N)) *
          (S(1) - pow_int(q, m)) /
          ((S(1) + p * pow_int(q, 2 * m - 1)) * (S(1) + p * pow_int(q, 2 * m)));
    return {A, C};
}

template <class S>
S monic_alpha(long long m, const QKParams<S>& t) {
    auto [A, C] = monic_recurrence_coeffs(m, t);
    return S(1) - (A + C);
}

template <class S>
S monic_beta(long long m, const QKParams<S>& t) {
    auto [Am1, Cm1] = monic_recurrence_coeffs(m - 1, t);
    auto [Am, Cm] = monic_recurrence_coeffs(m, t);
    (void)Cm1;
    (void)Am;
    return Am1 * Cm;
}

/// Monic polynomial value P_m(x) by the recurrence; exact in the rational
/// backend.
template <class S>
S monic_eval(long long m, const S& x, const QKParams<S>& t) {
    S pm1(0), pm(1);
    for (long long j = 0; j < m; ++j) {
        S next = (x - monic_alpha(j, t)) * pm - monic_beta(j, t) * pm1;
        pm1 = pm;
        pm = next;
    }
    return pm;
}

/// Residual of the lattice difference equation
///   A(m) K_m(a) = B(a) K_m(a+1) - (B(a)+C(a)) K_m(a) + C(a) K_m(a-1)
/// for the monic polynomials, divided by the sum of term magnitudes.
template <class S>
S verify_difference_eq(long long m, long long a, const QKParams<S>& t) {
    using std::abs;
    if (a < 1 || a > t.N - 1) throw std::invalid_argument("verify_difference_eq: interior lattice only");
    S xm = pow_int(t.q, -(a - 1)), x0 = pow_int(t.q, -a), xp = pow_int(t.q, -(a + 1));
    S Pm = monic_eval(m, xm, t), P0 = monic_eval(m, x0, t), Pp = monic_eval(m, xp, t);
    S A = coeff_A(m, t), B = coeff_B(a, t), C = coeff_C(a, t);
    S r = A * P0 - B * Pp + (B + C) * P0 - C * Pm;
    S scale = abs(A * P0) + abs(B * Pp) + abs((B + C) * P0) + abs(C * Pm);
    if (scale == S(0)) return S(0);
    return abs(r) / scale;
}

/// Entries of the symmetric tridiagonal operator T acting on functions of the
/// lattice, conjugate to the difference equation by sqrt-weights:
///   diag(a)       = -(B(a) + C(a))
///   offdiag(a)^2  = B(a) C(a+1)          (a = 0..N-1)
/// T kappa_m = A(m) kappa_m with kappa_m(a) = sqrt(W(a)) K_m(q^{-a}).
/// The identity B(a) W(a) = C(a+1) W(a+1) (exact; tested in the rational
/// backend) makes the two off-diagonal entries equal.
template <class S>
S operator_diag(long long a, const QKParams<S>& t) {
    return -(coeff_B(a, t) + coeff_C(a, t));
}
template <class S>
S operator_offdiag_sq(long long a, const QKParams<S>& t) {
    return coeff_B(a, t) * coeff_C(a + 1, t);
}

struct TridiagonalOperator {
    Eigen::VectorXd diag;     // N+1 entries
    Eigen::VectorXd offdiag;  // N entries
};

/// Numeric operator with the off-diagonal sign of B(a), computed through
/// logs so no intermediate overflows.
TridiagonalOperator build_operator(const ModelParams<double>& mp);

struct KernelMatrix {
    Eigen::MatrixXd m;  // (N+1) x (N+1), symmetric projection
    int rank = 0;
};

/// Kernel via eigendecomposition of the tridiagonal operator.  Eigenvalues
/// are matched one-to-one against the analytic A(m) (sorted); a relative
/// mismatch above 1e-8 aborts.  K = sum of v v^T over the n eigenvectors
/// whose matched index m is below n.
KernelMatrix spectral_kernel(const ModelParams<double>& mp, int dense_budget = 5000);

/// Same kernel via the direct Christoffel-Darboux sum
///   K(a,b) = sqrt(W(a)W(b)) sum_{m<n} p_m(q^{-a}) p_m(q^{-b})
/// using scaled orthonormal-recurrence evaluation.
KernelMatrix cd_kernel(const ModelParams<double>& mp, int budget = 4096);

/// Scaled Christoffel-Darboux evaluation engine.  All members are plain
/// precomputed tables; evaluation never forms an (N+1)^2 matrix unless asked.
class CDEvaluator {
public:
    explicit CDEvaluator(const ModelParams<double>& mp);

    int lattice_size() const { return static_cast<int>(log_w_.size()); }
    int rank() const { return n_; }
    double log_weight(int a) const { return log_w_[a]; }
    double log_weight_sum() const { return log_w_sum_; }
    /// orthonormal recurrence coefficients; a_m valid for m>=1, b_m for m>=1
    double coeff_a(int m) const { return a_[m]; }
    double coeff_b(int m) const { return b_[m]; }

    /// signs and log-magnitudes of the orthonormal polynomials
    /// p_0..p_{count-1} at lattice point a
    struct PolyTable {
        std::vector<double> log_abs;
        std::vector<int8_t> sign;
    };
    PolyTable poly_table(int a, int count) const;

    double kernel_entry(int a, int b) const;          // rank() polynomials
    Eigen::VectorXd kernel_diagonal() const;          // all lattice points
    Eigen::MatrixXd gram_matrix(int count) const;     // sum_a W p_i p_j, i,j < count

private:
    int n_ = 0;
    double q_ = 1;
    long long pe_ = 0;   // exponent of the lattice parameter p = q^{pe}
    long long lin_ = 0;  // linear exponent of the one-point weight
    double lnq_ = 0;
    std::vector<double> log_w_;
    double log_w_sum_ = 0;
    std::vector<double> a_, b_;  // orthonormal recurrence coefficients
};

}  // namespace qk
