#include "qk/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qk {
namespace {

void check_numeric_params(const ModelParams<double>& mp) {
    if (mp.n < 1 || mp.k < 1) throw std::invalid_argument("model: need n >= 1 and k >= 1");
    if (!(mp.q > 0.0) || mp.q == 1.0) throw std::invalid_argument("model: need q > 0 and q != 1");
}

}  // namespace

TridiagonalOperator build_operator(const ModelParams<double>& mp) {
    check_numeric_params(mp);
    const long long N = mp.n + mp.k - 1;
    const double lnq = std::log(mp.q);
    const double pe = static_cast<double>(p_exponent(mp.n, mp.k, mp.spec));
    const double sgn_b = mp.q > 1.0 ? 1.0 : -1.0;
    TridiagonalOperator T;
    T.diag.resize(N + 1);
    T.offdiag.resize(N);
    for (long long a = 0; a <= N; ++a) {
        // -(B(a)+C(a)) = q^{a-N} - 1 + p - p q^a
        T.diag[a] = std::exp((a - N) * lnq) - 1.0 + std::exp(pe * lnq) -
                    std::exp((pe + a) * lnq);
        if (a < N) {
            const double log_bc =
                log1m_exp((a - N) * lnq) + pe * lnq + log1m_exp((a + 1) * lnq);
            T.offdiag[a] = sgn_b * std::exp(0.5 * log_bc);
        }
    }
    return T;
}

KernelMatrix spectral_kernel(const ModelParams<double>& mp, int dense_budget) {
    check_numeric_params(mp);
    const long long N = mp.n + mp.k - 1;
    if (N + 1 > dense_budget)
        throw std::invalid_argument(
            "spectral_kernel: lattice larger than the dense eigensolver budget; use cd_kernel");
    TridiagonalOperator T = build_operator(mp);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(T.diag, T.offdiag, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("spectral_kernel: tridiagonal eigensolver failed");

    // Match computed eigenvalues one-to-one against the analytic spectrum
    // A(m) = q^{-m} + p - 1 - p q^m, m = 0..N.
    const double lnq = std::log(mp.q);
    const double pe = static_cast<double>(p_exponent(mp.n, mp.k, mp.spec));
    std::vector<std::pair<double, int>> analytic(N + 1);
    for (long long m = 0; m <= N; ++m) {
        const double A = std::exp(-static_cast<double>(m) * lnq) + std::exp(pe * lnq) - 1.0 -
                         std::exp((pe + m) * lnq);
        analytic[m] = {A, static_cast<int>(m)};
    }
    std::sort(analytic.begin(), analytic.end());
    for (long long i = 0; i <= N; ++i) {
        const double got = es.eigenvalues()[i];
        const double want = analytic[i].first;
        if (std::abs(got - want) > 1e-8 * std::max(1.0, std::abs(want))) {
            std::ostringstream msg;
            msg << "spectral_kernel: eigenvalue " << i << " = " << got
                << " does not match analytic value " << want << " (recurrence index "
                << analytic[i].second << ")";
            throw std::runtime_error(msg.str());
        }
    }

    KernelMatrix K;
    K.m = Eigen::MatrixXd::Zero(N + 1, N + 1);
    K.rank = mp.n;
    for (long long i = 0; i <= N; ++i) {
        if (analytic[i].second < mp.n)
            K.m.noalias() += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose();
    }
    return K;
}

CDEvaluator::CDEvaluator(const ModelParams<double>& mp) {
    check_numeric_params(mp);
    n_ = mp.n;
    q_ = mp.q;
    const long long N = mp.n + mp.k - 1;
    lnq_ = std::log(mp.q);
    pe_ = p_exponent(mp.n, mp.k, mp.spec);
    lin_ = (mp.spec == Spec::PP) ? (mp.n - mp.k) : (mp.n - 1);
    const double pe = static_cast<double>(pe_);
    const long long lin = lin_;

    // log W(a) via the ratio W(a+1)/W(a) = q^{a+lin} (1-q^{N-a})/(1-q^{a+1});
    // the two (1 - q^positive) factors always carry the same sign.
    log_w_.assign(N + 1, 0.0);
    for (long long a = 0; a < N; ++a) {
        log_w_[a + 1] = log_w_[a] + (a + lin) * lnq_ + log1m_exp((N - a) * lnq_) -
                        log1m_exp((a + 1) * lnq_);
    }
    log_w_sum_ = log_sum_exp(log_w_.data(), log_w_.size());

    // Orthonormal recurrence coefficients from the monic ones:
    //   b_{m+1} = 1 - (A_m + C_m),   a_m = sqrt(A_{m-1} C_m),
    // with |A_m| and |C_m| assembled in logs so arbitrarily large q-powers
    // never overflow.  A_m and C_m share the sign of q-1 on the interior.
    auto log_abs_A = [&](long long m) {
        return log1m_exp((m - N) * lnq_) + log1p_exp((pe + m) * lnq_) -
               log1p_exp((pe + 2 * m) * lnq_) - log1p_exp((pe + 2 * m + 1) * lnq_);
    };
    auto log_abs_C = [&](long long m) {
        return (pe + 2 * m - N - 1) * lnq_ + log1p_exp((pe + m + N) * lnq_) +
               log1m_exp(m * lnq_) - log1p_exp((pe + 2 * m - 1) * lnq_) -
               log1p_exp((pe + 2 * m) * lnq_);
    };
    const double sgn = mp.q > 1.0 ? 1.0 : -1.0;
    a_.assign(N + 1, 0.0);
    b_.assign(N + 1, 0.0);
    for (long long m = 0; m <= N; ++m) {
        if (m + 1 <= N) {
            const double A = (m == N) ? 0.0 : sgn * std::exp(log_abs_A(m));
            const double C = (m == 0) ? 0.0 : sgn * std::exp(log_abs_C(m));
            b_[m + 1] = 1.0 - (A + C);
        }
        if (m >= 1) a_[m] = std::exp(0.5 * (log_abs_A(m - 1) + log_abs_C(m)));
    }
}

CDEvaluator::PolyTable CDEvaluator::poly_table(int a, int count) const {
    const int M = lattice_size();
    if (a < 0 || a >= M) throw std::out_of_range("poly_table: lattice point out of range");
    if (count < 1 || count > M) throw std::invalid_argument("poly_table: bad polynomial count");

    const double ln2 = std::log(2.0);
    const double x = std::exp(-a * lnq_);
    PolyTable t;
    t.log_abs.assign(count, -std::numeric_limits<double>::infinity());
    t.sign.assign(count, 0);

    // p_0 = (sum_a W(a))^{-1/2}, kept as v * 2^E so it survives even when the
    // weight sum is far outside double range.
    const double l0 = -0.5 * log_w_sum_;
    long long E = static_cast<long long>(std::floor(l0 / (512.0 * ln2))) * 512;
    double v = std::exp(l0 - static_cast<double>(E) * ln2);
    double u = 0.0;
    for (int m = 0; m < count; ++m) {
        if (v != 0.0) {
            t.sign[m] = v > 0.0 ? 1 : -1;
            t.log_abs[m] = std::log(std::abs(v)) + static_cast<double>(E) * ln2;
        }
        if (m + 1 < count) {
            const double next = ((x - b_[m + 1]) * v - (m >= 1 ? a_[m] * u : 0.0)) / a_[m + 1];
            u = v;
            v = next;
            const double mag = std::max(std::abs(u), std::abs(v));
            if (mag > 0x1p500) {
                u *= 0x1p-512;
                v *= 0x1p-512;
                E += 512;
            } else if (mag > 0.0 && mag < 0x1p-500) {
                u *= 0x1p512;
                v *= 0x1p512;
                E -= 512;
            }
        }
    }
    return t;
}

double CDEvaluator::kernel_entry(int a, int b) const {
    const PolyTable ta = poly_table(a, n_);
    const PolyTable tb = (b == a) ? ta : poly_table(b, n_);
    const double lw = 0.5 * (log_w_[a] + log_w_[b]);
    double s = 0.0;
    for (int m = 0; m < n_; ++m) {
        const int sg = ta.sign[m] * tb.sign[m];
        if (sg == 0) continue;
        s += sg * std::exp(ta.log_abs[m] + tb.log_abs[m] + lw);
    }
    return s;
}

Eigen::VectorXd CDEvaluator::kernel_diagonal() const {
    const int M = lattice_size();
    Eigen::VectorXd d(M);
    for (int a = 0; a < M; ++a) {
        const PolyTable t = poly_table(a, n_);
        double s = 0.0;
        for (int m = 0; m < n_; ++m)
            if (t.sign[m] != 0) s += std::exp(2.0 * t.log_abs[m] + log_w_[a]);
        d[a] = s;
    }
    return d;
}

namespace {

// log|1 - e^t| and log(1 + e^t) in extended precision, mirroring the double
// helpers used elsewhere.
long double xlog1m_exp(long double t) {
    if (t > 0.0L) return t + std::log1p(-std::exp(-t));
    return std::log1p(-std::exp(t));
}
long double xlog1p_exp(long double t) {
    if (t > 0.0L) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

}  // namespace

Eigen::MatrixXd CDEvaluator::gram_matrix(int count) const {
    const int M = lattice_size();
    if (count < 1 || count > M) throw std::invalid_argument("gram_matrix: bad polynomial count");

    // Orthogonality of the top-degree members is exquisitely ill-conditioned:
    // plain double recurrences leave residuals around 1e-7 for a 20-point
    // lattice even with exactly rounded coefficients.  Rebuilding the weights,
    // the coefficients, and the polynomial recurrence in extended precision
    // pushes the residual of the full family below 1e-10.
    const long long N = M - 1;
    const long double lnq = std::log(static_cast<long double>(q_));
    const long double pe = static_cast<long double>(pe_);

    std::vector<long double> lw(M, 0.0L);
    for (long long a = 0; a < N; ++a)
        lw[a + 1] = lw[a] + static_cast<long double>(a + lin_) * lnq +
                    xlog1m_exp((N - a) * lnq) - xlog1m_exp((a + 1) * lnq);
    long double lw_max = lw[0];
    for (long long a = 1; a <= N; ++a) lw_max = std::max(lw_max, lw[a]);
    long double lw_sum = 0.0L;
    for (long long a = 0; a <= N; ++a) lw_sum += std::exp(lw[a] - lw_max);
    lw_sum = lw_max + std::log(lw_sum);

    auto log_abs_A = [&](long long m) {
        return xlog1m_exp((m - N) * lnq) + xlog1p_exp((pe + m) * lnq) -
               xlog1p_exp((pe + 2 * m) * lnq) - xlog1p_exp((pe + 2 * m + 1) * lnq);
    };
    auto log_abs_C = [&](long long m) {
        return (pe + 2 * m - N - 1) * lnq + xlog1p_exp((pe + m + N) * lnq) +
               xlog1m_exp(m * lnq) - xlog1p_exp((pe + 2 * m - 1) * lnq) -
               xlog1p_exp((pe + 2 * m) * lnq);
    };
    const long double sgn = q_ > 1.0 ? 1.0L : -1.0L;
    std::vector<long double> av(M, 0.0L), bv(M, 0.0L);
    for (long long m = 0; m <= N; ++m) {
        if (m + 1 <= N) {
            const long double A = (m == N) ? 0.0L : sgn * std::exp(log_abs_A(m));
            const long double C = (m == 0) ? 0.0L : sgn * std::exp(log_abs_C(m));
            bv[m + 1] = 1.0L - (A + C);
        }
        if (m >= 1) av[m] = std::exp(0.5L * (log_abs_A(m - 1) + log_abs_C(m)));
    }

    std::vector<long double> acc(static_cast<std::size_t>(count) * count, 0.0L);
    std::vector<long double> p(count);
    for (int a = 0; a < M; ++a) {
        const long double x = std::exp(-a * lnq);
        long double u = 0.0L, v = std::exp(-0.5L * lw_sum);
        for (int m = 0; m < count; ++m) {
            p[m] = v;
            if (m + 1 < count) {
                const long double next =
                    ((x - bv[m + 1]) * v - (m >= 1 ? av[m] * u : 0.0L)) / av[m + 1];
                u = v;
                v = next;
            }
        }
        const long double w = std::exp(lw[a]);
        for (int i = 0; i < count; ++i)
            for (int j = i; j < count; ++j) acc[i * count + j] += w * p[i] * p[j];
    }
    Eigen::MatrixXd G(count, count);
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < count; ++j)
            G(i, j) = static_cast<double>(acc[std::min(i, j) * count + std::max(i, j)]);
    return G;
}

KernelMatrix cd_kernel(const ModelParams<double>& mp, int budget) {
    CDEvaluator ev(mp);
    const int M = ev.lattice_size();
    if (M > budget)
        throw std::invalid_argument(
            "cd_kernel: lattice larger than the full-matrix budget; use CDEvaluator entrywise");
    const int n = ev.rank();
    std::vector<CDEvaluator::PolyTable> tabs;
    tabs.reserve(M);
    for (int a = 0; a < M; ++a) tabs.push_back(ev.poly_table(a, n));
    KernelMatrix K;
    K.m = Eigen::MatrixXd::Zero(M, M);
    K.rank = n;
    for (int a = 0; a < M; ++a) {
        for (int b = a; b < M; ++b) {
            const double lw = 0.5 * (ev.log_weight(a) + ev.log_weight(b));
            double s = 0.0;
            for (int m = 0; m < n; ++m) {
                const int sg = tabs[a].sign[m] * tabs[b].sign[m];
                if (sg == 0) continue;
                s += sg * std::exp(tabs[a].log_abs[m] + tabs[b].log_abs[m] + lw);
            }
            K.m(a, b) = s;
            K.m(b, a) = s;
        }
    }
    return K;
}

}  // namespace qk
