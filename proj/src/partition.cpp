#include "qk/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qk {

Partition::Partition(std::vector<int> r) : rows(std::move(r)) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] < 0) throw std::invalid_argument("Partition: negative row");
        if (i > 0 && rows[i] > rows[i - 1])
            throw std::invalid_argument("Partition: rows must be weakly decreasing");
    }
}

long long Partition::size() const {
    long long s = 0;
    for (int r : rows) s += r;
    return s;
}

bool Partition::fits_box(int n, int k) const {
    if (num_rows() > n) {
        for (int i = n; i < num_rows(); ++i)
            if (rows[i] != 0) return false;
    }
    return rows.empty() || rows[0] <= k;
}

Partition conjugate(const Partition& lam) {
    int width = lam.rows.empty() ? 0 : lam.rows[0];
    std::vector<int> cols(width, 0);
    for (int j = 0; j < width; ++j)
        for (int r : lam.rows)
            if (r > j) ++cols[j];
    return Partition(std::move(cols));
}

Partition complement_conjugate(const Partition& lam, int n, int k) {
    if (lam.num_rows() != n || !lam.fits_box(n, k))
        throw std::invalid_argument("complement_conjugate: partition does not fit the box");
    std::vector<int> comp(n);
    for (int i = 0; i < n; ++i) comp[i] = k - lam.rows[n - 1 - i];
    Partition c = conjugate(Partition(std::move(comp)));
    c.rows.resize(k, 0);  // result lives in the k x n box
    return c;
}

long long content_stat(const Partition& lam) {
    long long s = 0;
    for (int i = 0; i < lam.num_rows(); ++i) s += static_cast<long long>(i) * lam.rows[i];
    return s;
}

long long dual_content_stat(const Partition& lam, int n, int k) {
    if (lam.num_rows() != n || !lam.fits_box(n, k))
        throw std::invalid_argument("dual_content_stat: partition does not fit the box");
    long long s = 0;
    for (int i = 0; i < n; ++i) {
        long long r = k - lam.rows[i];
        s += r * (r - 1) / 2;
    }
    return s;
}

std::vector<int> to_coords(const Partition& lam, int n) {
    if (lam.num_rows() != n)
        throw std::invalid_argument("to_coords: partition must carry exactly n rows");
    std::vector<int> a(n);
    for (int i = 0; i < n; ++i) a[i] = lam.rows[i] + n - 1 - i;
    return a;
}

Partition from_coords(const std::vector<int>& coords, int n) {
    if (static_cast<int>(coords.size()) != n)
        throw std::invalid_argument("from_coords: expected n coordinates");
    std::vector<int> rows(n);
    for (int i = 0; i < n; ++i) {
        if (i > 0 && coords[i] >= coords[i - 1])
            throw std::invalid_argument("from_coords: coordinates must strictly decrease");
        rows[i] = coords[i] - (n - 1 - i);
        if (rows[i] < 0) throw std::invalid_argument("from_coords: coordinate below staircase");
    }
    return Partition(std::move(rows));
}

double partitions_in_box_count(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= n; ++i) c *= static_cast<double>(k + i) / i;
    return c;
}

void enumerate_in_box(int n, int k, const std::function<void(const Partition&)>& visit,
                      double cap) {
    if (n < 0 || k < 0) throw std::invalid_argument("enumerate_in_box: negative box");
    if (partitions_in_box_count(n, k) > cap)
        throw std::runtime_error("enumerate_in_box: box exceeds enumeration cap");
    Partition lam;
    lam.rows.assign(n, 0);
    // ascending lexicographic order: row i ranges over 0..rows[i-1]
    std::function<void(int, int)> rec = [&](int i, int maxv) {
        if (i == n) {
            visit(lam);
            return;
        }
        for (int v = 0; v <= maxv; ++v) {
            lam.rows[i] = v;
            rec(i + 1, v);
        }
    };
    rec(0, k);
}

double Profile::value(double x) const {
    int m = n + k;
    if (x <= 0) return heights[0] - x;  // continue with slope -1 outside
    if (x >= m) return heights[m] + (x - m);
    int j = static_cast<int>(std::floor(x));
    return heights[j] + slopes[j] * (x - j);
}

std::vector<int> Profile::descents() const {
    std::vector<int> d;
    for (int j = n + k - 1; j >= 0; --j)
        if (slopes[j] < 0) d.push_back(j);
    return d;
}

Profile profile(const Partition& lam, int n, int k) {
    if (lam.num_rows() != n || !lam.fits_box(n, k))
        throw std::invalid_argument("profile: partition does not fit the box");
    Profile p;
    p.n = n;
    p.k = k;
    p.slopes.assign(n + k, +1);
    for (int a : to_coords(lam, n)) p.slopes[a] = -1;
    p.heights.assign(n + k + 1, 0);
    p.heights[0] = n;
    for (int j = 0; j < n + k; ++j) p.heights[j + 1] = p.heights[j] + p.slopes[j];
    return p;
}

}  // namespace qk
