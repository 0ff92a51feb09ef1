#pragma once
// Young diagrams confined to an n x k box: coordinates, statistics, duals,
// enumeration and boundary profiles.

#include <cstdint>
#include <functional>
#include <vector>

namespace qk {

/// A partition (weakly decreasing row lengths).  Rows are stored with
/// explicit trailing zeros up to the row count fixed at construction, so a
/// partition bound to an n x k box always carries exactly n entries and its
/// point configuration always has exactly n points.
struct Partition {
    std::vector<int> rows;

    Partition() = default;
    explicit Partition(std::vector<int> r);  // validates weak decrease

    int num_rows() const { return static_cast<int>(rows.size()); }
    long long size() const;  // number of cells
    bool fits_box(int n, int k) const;
    bool operator==(const Partition& o) const { return rows == o.rows; }
};

/// Transpose of the diagram (column lengths).  The result has lambda_1 rows;
/// no box padding is applied.
Partition conjugate(const Partition& lam);

/// Complement of lambda in the n x k box, transposed: the k-row partition
/// conjugate of (k - lambda_n, ..., k - lambda_1).  Rejects diagrams that do
/// not fit the box.
Partition complement_conjugate(const Partition& lam, int n, int k);

/// ||lambda|| = sum_i (i-1) lambda_i.
long long content_stat(const Partition& lam);

/// sum_i (k - lambda_i)(k - lambda_i - 1)/2 over the n rows; equals
/// content_stat(complement_conjugate(lam, n, k)).
long long dual_content_stat(const Partition& lam, int n, int k);

/// a_i = lambda_i + n - i (1-based i), strictly decreasing.
std::vector<int> to_coords(const Partition& lam, int n);

/// Inverse of to_coords; rejects non strictly-decreasing input.
Partition from_coords(const std::vector<int>& coords, int n);

/// Number of partitions in the n x k box, binomial(n+k, n), as a double
/// (used only for cap checks).
double partitions_in_box_count(int n, int k);

/// Visit every partition in the n x k box exactly once, in ascending
/// lexicographic order on the row vectors.  This fixed order is what the
/// CDF-based exact sampler binary-searches, so it must never change.
/// Throws if the box holds more than `cap` partitions.
void enumerate_in_box(int n, int k, const std::function<void(const Partition&)>& visit,
                      double cap = 1e7);

/// Rotated-boundary profile of the diagram on the integer lattice [0, n+k]:
/// f(0) = n and the slope on the unit interval [j, j+1) is -1 when j is one
/// of the point coordinates a_i, +1 otherwise.  After scaling both axes by
/// 1/n the domain becomes [0, c+1] with c = k/n.
struct Profile {
    int n = 0, k = 0;
    std::vector<int> slopes;  // n+k entries, each +1 or -1
    std::vector<int> heights; // n+k+1 entries, heights[0] = n

    double value(double x) const;  // piecewise-linear evaluation on [0, n+k]
    std::vector<int> descents() const;  // positions j with slope -1, descending
};

Profile profile(const Partition& lam, int n, int k);

}  // namespace qk
