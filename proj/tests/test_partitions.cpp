// Unit tests for partitions confined to an n x k box: validation, conjugation,
// rectangle complement, particle coordinates, box enumeration, and the
// rotated boundary profile.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>
#include <vector>

#include "qk/partition.hpp"

using qk::Partition;

TEST_CASE("constructor validates weak decrease and nonnegativity") {
    CHECK_NOTHROW(Partition({3, 1}));
    CHECK_NOTHROW(Partition({2, 2, 0, 0}));
    CHECK_NOTHROW(Partition(std::vector<int>{}));
    CHECK_THROWS_AS(Partition({1, 3}), std::invalid_argument);
    CHECK_THROWS_AS(Partition({2, -1}), std::invalid_argument);
}

TEST_CASE("size and fits_box") {
    Partition lam({3, 1});
    CHECK(lam.size() == 4);
    CHECK(lam.fits_box(2, 3));
    CHECK_FALSE(lam.fits_box(1, 3));  // too many rows
    CHECK_FALSE(lam.fits_box(2, 2));  // first row too long
    CHECK(Partition({0, 0}).fits_box(2, 0));
}

TEST_CASE("conjugate transposes the diagram") {
    CHECK(qk::conjugate(Partition({3, 1})) == Partition({2, 1, 1}));
    CHECK(qk::conjugate(Partition(std::vector<int>{})) == Partition(std::vector<int>{}));
    // involution on partitions without trailing zero rows
    for (const auto& rows : {std::vector<int>{4, 2, 2, 1}, {5}, {1, 1, 1}}) {
        Partition lam(rows);
        CHECK(qk::conjugate(qk::conjugate(lam)) == lam);
    }
}

TEST_CASE("complement_conjugate maps the n x k box to the k x n box") {
    CHECK(qk::complement_conjugate(Partition({1, 0}), 2, 2) == Partition({2, 1}));
    int n = 3, k = 4;
    qk::enumerate_in_box(n, k, [&](const Partition& lam) {
        Partition cc = qk::complement_conjugate(lam, n, k);
        CHECK(cc.fits_box(k, n));
        CHECK(lam.size() + cc.size() == static_cast<long long>(n) * k);
    });
}

TEST_CASE("content_stat weights row i by i-1") {
    CHECK(qk::content_stat(Partition({3, 2, 2})) == 6);
    CHECK(qk::content_stat(Partition(std::vector<int>{})) == 0);
    CHECK(qk::content_stat(Partition({5})) == 0);
    CHECK(qk::content_stat(Partition({2, 2, 0})) == 2);  // trailing zero rows contribute nothing
}

TEST_CASE("dual_content_stat equals content_stat of the complement-conjugate") {
    int n = 3, k = 4;
    qk::enumerate_in_box(n, k, [&](const Partition& lam) {
        CHECK(qk::dual_content_stat(lam, n, k) ==
              qk::content_stat(qk::complement_conjugate(lam, n, k)));
    });
}

TEST_CASE("particle coordinates a_i = lambda_i + n - i round-trip") {
    Partition lam({2, 1});
    std::vector<int> a = qk::to_coords(lam, 2);
    CHECK(a == std::vector<int>{3, 1});
    CHECK(qk::from_coords(a, 2) == lam);

    int n = 3, k = 4;
    qk::enumerate_in_box(n, k, [&](const Partition& l) {
        std::vector<int> c = qk::to_coords(l, n);
        REQUIRE(static_cast<int>(c.size()) == n);
        for (int i = 0; i + 1 < n; ++i) CHECK(c[i] > c[i + 1]);  // strictly decreasing
        CHECK(c.front() <= n + k - 1);
        CHECK(c.back() >= 0);
        CHECK(qk::from_coords(c, n) == l);
    });

    CHECK_THROWS_AS(qk::from_coords({1, 1, 0}, 3), std::invalid_argument);
}

TEST_CASE("box enumeration counts binomial(n+k, n) diagrams in ascending order") {
    CHECK(qk::partitions_in_box_count(3, 4) == doctest::Approx(35.0));
    CHECK(qk::partitions_in_box_count(0, 5) == doctest::Approx(1.0));

    std::vector<Partition> all;
    qk::enumerate_in_box(3, 3, [&](const Partition& lam) { all.push_back(lam); });
    REQUIRE(all.size() == 20);
    CHECK(all.front() == Partition({0, 0, 0}));  // empty diagram first
    CHECK(all.back() == Partition({3, 3, 3}));   // full box last
    for (const auto& lam : all) CHECK(lam.num_rows() == 3);
    for (std::size_t i = 0; i + 1 < all.size(); ++i)
        CHECK(all[i].rows < all[i + 1].rows);  // strictly ascending lexicographic

    CHECK_THROWS_AS(qk::enumerate_in_box(20, 20, [](const Partition&) {}, 10.0),
                    std::runtime_error);
}

TEST_CASE("profile heights interpolate between n and k with unit steps") {
    int n = 5, k = 7;
    Partition lam({7, 4, 3, 3, 1});
    qk::Profile pr = qk::profile(lam, n, k);
    REQUIRE(static_cast<int>(pr.heights.size()) == n + k + 1);
    CHECK(pr.heights[0] == n);
    CHECK(pr.heights[n + k] == k);
    for (int j = 0; j < n + k; ++j) {
        CHECK(std::abs(pr.slopes[j]) == 1);
        CHECK(pr.heights[j + 1] - pr.heights[j] == pr.slopes[j]);
        CHECK(pr.value(static_cast<double>(j)) == doctest::Approx(pr.heights[j]));
    }
    // descending slope positions are exactly the particle coordinates
    CHECK(pr.descents() == std::vector<int>{11, 7, 5, 4, 1});
    CHECK(pr.descents() == qk::to_coords(lam, n));
    // linear continuation outside the box
    CHECK(pr.value(-1.0) == doctest::Approx(n + 1.0));
    CHECK(pr.value(n + k + 2.0) == doctest::Approx(k + 2.0));

    CHECK_THROWS_AS(qk::profile(Partition({9, 0, 0, 0, 0}), n, k), std::invalid_argument);
}
