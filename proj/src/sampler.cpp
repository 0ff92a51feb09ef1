#include "qk/sampler.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qk {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(seed ^ (index + 1) * 0x9e3779b97f4a7c15ULL));
}

double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

ExactSampler::ExactSampler(const ModelParams<Rational>& mp, double enumeration_cap) {
    using boost::multiprecision::cpp_int;
    enumerate_in_box(
        mp.n, mp.k,
        [&](const Partition& lam) {
            support_.push_back(lam);
            prob_.push_back(prob(lam, mp));
        },
        enumeration_cap);
    Rational cum(0);
    threshold_.reserve(prob_.size());
    for (const Rational& p : prob_) {
        if (p <= 0) throw std::runtime_error("ExactSampler: non-positive probability");
        cum += p;
        threshold_.push_back((cpp_int(numerator(cum)) << 127) / cpp_int(denominator(cum)));
    }
    if (cum != 1) throw std::runtime_error("ExactSampler: probabilities do not sum to one");
}

std::size_t ExactSampler::sample_index(std::mt19937_64& g) const {
    using boost::multiprecision::cpp_int;
    const std::uint64_t hi = g() >> 1;  // 63 bits
    const std::uint64_t lo = g();
    const cpp_int r = (cpp_int(hi) << 64) | lo;
    auto it = std::upper_bound(threshold_.begin(), threshold_.end(), r);
    if (it == threshold_.end()) --it;  // r == 2^127 - 1 edge with cum == 1
    return static_cast<std::size_t>(it - threshold_.begin());
}

Partition ExactSampler::sample(std::mt19937_64& g) const { return support_[sample_index(g)]; }

std::vector<Partition> ExactSampler::sample_many(std::uint64_t count, std::uint64_t seed) const {
    std::vector<Partition> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::mt19937_64 g = substream(seed, i);
        out.push_back(sample(g));
    }
    return out;
}

std::vector<int> sample_dpp_once(const Eigen::MatrixXd& kernel, int rank, std::mt19937_64& g) {
    const int M = static_cast<int>(kernel.rows());
    if (kernel.cols() != M) throw std::invalid_argument("sample_dpp_once: kernel must be square");
    if (rank < 0 || rank > M) throw std::invalid_argument("sample_dpp_once: bad rank");
    Eigen::MatrixXd K = kernel;
    std::vector<int> sel;
    sel.reserve(rank);
    int remaining = rank;
    for (int a = 0; a < M && remaining > 0; ++a) {
        const double diag = K(a, a);
        if (diag < -1e-9 || diag > 1.0 + 1e-9)
            throw std::runtime_error("sample_dpp_once: conditioned diagonal left [0,1]");
        const double d = std::clamp(diag, 0.0, 1.0);
        bool take;
        if (M - a == remaining)
            take = true;  // every remaining site is forced
        else if (d >= 1.0 - 1e-12)
            take = true;
        else if (d <= 1e-12)
            take = false;
        else
            take = uniform01(g) < d;
        const Eigen::VectorXd col = K.col(a);
        if (take) {
            if (diag < 1e-12)
                throw std::runtime_error("sample_dpp_once: forced inclusion with vanishing pivot");
            sel.push_back(a);
            --remaining;
            K.noalias() -= col * (col.transpose() / diag);
        } else {
            K.noalias() += col * (col.transpose() / (1.0 - diag));
        }
        K.row(a).setZero();
        K.col(a).setZero();
    }
    if (static_cast<int>(sel.size()) != rank)
        throw std::runtime_error("sample_dpp_once: wrong particle count");
    return sel;
}

std::vector<Partition> sample_dpp(const ModelParams<double>& mp, std::uint64_t count,
                                  std::uint64_t seed) {
    const KernelMatrix K = spectral_kernel(mp);
    std::vector<Partition> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::mt19937_64 g = substream(seed, i);
        std::vector<int> coords = sample_dpp_once(K.m, K.rank, g);
        std::reverse(coords.begin(), coords.end());
        out.push_back(from_coords(coords, mp.n));
    }
    return out;
}

Eigen::VectorXd occupancy(const std::vector<Partition>& samples, int n, int k) {
    const int M = n + k;
    Eigen::VectorXd occ = Eigen::VectorXd::Zero(M);
    for (const Partition& lam : samples)
        for (int a : to_coords(lam, n)) occ[a] += 1.0;
    if (!samples.empty()) occ /= static_cast<double>(samples.size());
    return occ;
}

DensityHistogram empirical_density(const std::vector<Partition>& samples, int n, int k, int bins) {
    if (bins < 1) throw std::invalid_argument("empirical_density: need at least one bin");
    DensityHistogram h;
    h.t_max = static_cast<double>(n + k) / n;
    h.bin_width = h.t_max / bins;
    h.center.resize(bins);
    h.density.assign(bins, 0.0);
    for (int b = 0; b < bins; ++b) h.center[b] = (b + 0.5) * h.bin_width;
    for (const Partition& lam : samples) {
        for (int a : to_coords(lam, n)) {
            int b = static_cast<int>((static_cast<double>(a) / n) / h.bin_width);
            b = std::clamp(b, 0, bins - 1);
            h.density[b] += 1.0;
        }
    }
    const double norm = static_cast<double>(samples.size()) * n * h.bin_width;
    if (norm > 0)
        for (double& d : h.density) d /= norm;
    return h;
}

double chi_square_pvalue(const std::vector<double>& observed, const std::vector<double>& expected) {
    if (observed.size() != expected.size() || observed.empty())
        throw std::invalid_argument("chi_square_pvalue: mismatched cell counts");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] <= 0.0) throw std::invalid_argument("chi_square_pvalue: expected count <= 0");
        const double d = observed[i] - expected[i];
        stat += d * d / expected[i];
    }
    const double df = static_cast<double>(observed.size()) - 1.0;
    if (df <= 0.0) return 1.0;
    return boost::math::gamma_q(df / 2.0, stat / 2.0);
}

}  // namespace qk
