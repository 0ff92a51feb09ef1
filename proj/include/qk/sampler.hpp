#pragma once
// Samplers for the ensemble and histogram utilities for validating them.
//
// Two independent routes produce random diagrams:
//  * ExactSampler — enumerates the box, computes every probability as an
//    exact rational, and inverts 127-bit uniform draws against the exact CDF.
//    Statistical error per cell is below 2^-127, far outside anything a test
//    can detect, but the cost grows with the number of diagrams in the box.
//  * sample_dpp — sequential sampling of the determinantal kernel: sweep the
//    lattice sites, include each with the conditional probability given all
//    earlier decisions, updating the kernel by a rank-one Schur complement.
//    Cost is O(sites^3) per sample and independent of the box volume.
//
// Every sample index gets its own generator seeded by a splitmix64 hash of
// (seed, index), so batches are reproducible regardless of batch size.

#include "qk/ensemble.hpp"
#include "qk/measures.hpp"
#include "qk/partition.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <random>
#include <vector>

namespace qk {

std::uint64_t splitmix64(std::uint64_t z);

/// Generator for sample `index` of a batch started from `seed`.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index);

/// Uniform double in [0,1) using the top 53 bits of one generator output.
double uniform01(std::mt19937_64& g);

class ExactSampler {
public:
    explicit ExactSampler(const ModelParams<Rational>& mp, double enumeration_cap = 1e6);

    const std::vector<Partition>& support() const { return support_; }
    const std::vector<Rational>& probabilities() const { return prob_; }

    /// Index into support() drawn according to the exact probabilities.
    std::size_t sample_index(std::mt19937_64& g) const;
    Partition sample(std::mt19937_64& g) const;
    std::vector<Partition> sample_many(std::uint64_t count, std::uint64_t seed) const;

private:
    std::vector<Partition> support_;
    std::vector<Rational> prob_;
    // floor(cdf * 2^127); a 127-bit draw r selects the first cell with r < threshold
    std::vector<boost::multiprecision::cpp_int> threshold_;
};

/// One draw from the projection-kernel point process; returns the selected
/// lattice sites in increasing order (exactly `rank` of them).
std::vector<int> sample_dpp_once(const Eigen::MatrixXd& kernel, int rank, std::mt19937_64& g);

/// Batch of diagrams sampled through the determinantal kernel.
std::vector<Partition> sample_dpp(const ModelParams<double>& mp, std::uint64_t count,
                                  std::uint64_t seed);

/// Occupation frequency of each lattice site across a batch; comparable to
/// the kernel diagonal.
Eigen::VectorXd occupancy(const std::vector<Partition>& samples, int n, int k);

/// Histogram of scaled particle positions t = a/n over [0, (n+k)/n), scaled
/// so that the values estimate the limiting particle density in t.
struct DensityHistogram {
    double t_max = 0;
    double bin_width = 0;
    std::vector<double> center;
    std::vector<double> density;
};
DensityHistogram empirical_density(const std::vector<Partition>& samples, int n, int k, int bins);

/// Pearson chi-square p-value for observed counts against expected counts
/// (degrees of freedom = cells - 1).
double chi_square_pvalue(const std::vector<double>& observed, const std::vector<double>& expected);

}  // namespace qk
