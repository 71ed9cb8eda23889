#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "coco/metrics.hpp"

using coco::adjusted_rand_index;
using coco::variation_of_information;

namespace {

std::vector<int> random_partition(std::size_t n, int k, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, k - 1);
    std::vector<int> out(n);
    for (auto& v : out) v = pick(rng);
    return out;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("ari: identical partitions score 1") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 50; ++rep) {
        const auto a = random_partition(30, 4, rng);
        CHECK(adjusted_rand_index(a, a) == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("ari: invariant to relabeling") {
    std::mt19937_64 rng(7);
    const auto a = random_partition(40, 3, rng);
    const auto b = random_partition(40, 4, rng);
    const double base = adjusted_rand_index(a, b);
    std::vector<int> perm{2, 0, 3, 1};
    std::vector<int> b2(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) b2[i] = perm[static_cast<std::size_t>(b[i])];
    CHECK(adjusted_rand_index(a, b2) == doctest::Approx(base).epsilon(1e-14));
}

TEST_CASE("ari: hand-computed contingency value") {
    // a = {1,1,2,2}, b = {1,2,1,2}: all four contingency cells equal 1, so
    // sum C(n_ij,2) = 0; row/col pair sums are 2 each; E = 2*2/C(4,2) = 2/3;
    // ARI = (0 - 2/3) / (2 - 2/3) = -1/2.
    const std::vector<int> a{1, 1, 2, 2}, b{1, 2, 1, 2};
    CHECK(adjusted_rand_index(a, b) == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("ari: both-trivial partitions define 1") {
    const std::vector<int> a{0, 0, 0}, b{5, 5, 5};
    CHECK(adjusted_rand_index(a, b) == 1.0);
}

TEST_CASE("ari: random independent partitions concentrate near zero") {
    std::mt19937_64 rng(11);
    double mean = 0.0;
    const int reps = 1000;
    for (int rep = 0; rep < reps; ++rep) {
        const auto a = random_partition(60, 3, rng);
        const auto b = random_partition(60, 3, rng);
        mean += adjusted_rand_index(a, b);
    }
    mean /= reps;
    CHECK(std::abs(mean) <= 0.02);
}

TEST_CASE("ari stays within [-1, 1]") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 200; ++rep) {
        const auto a = random_partition(25, 5, rng);
        const auto b = random_partition(25, 2, rng);
        const double v = adjusted_rand_index(a, b);
        CHECK(v <= 1.0 + 1e-12);
        CHECK(v >= -1.0 - 1e-12);
    }
}

TEST_CASE("vi: perfect agreement scores 0, symmetric") {
    std::mt19937_64 rng(17);
    const auto a = random_partition(50, 4, rng);
    const auto b = random_partition(50, 3, rng);
    CHECK(variation_of_information(a, a) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(variation_of_information(a, b) ==
          doctest::Approx(variation_of_information(b, a)).epsilon(1e-14));
}

TEST_CASE("vi: singletons vs one cluster equals ln n") {
    for (std::size_t n : {2, 5, 17, 100}) {
        std::vector<int> singles(n), one(n, 0);
        for (std::size_t i = 0; i < n; ++i) singles[i] = static_cast<int>(i);
        // H(singletons) = ln n, H(one) = 0, I = 0.
        CHECK(variation_of_information(singles, one) ==
              doctest::Approx(std::log(static_cast<double>(n))).epsilon(1e-14));
    }
}

TEST_CASE("vi: triangle inequality on random triples") {
    std::mt19937_64 rng(19);
    for (int rep = 0; rep < 1000; ++rep) {
        const auto a = random_partition(20, 3, rng);
        const auto b = random_partition(20, 4, rng);
        const auto c = random_partition(20, 2, rng);
        const double ac = variation_of_information(a, c);
        const double ab = variation_of_information(a, b);
        const double bc = variation_of_information(b, c);
        CHECK(ac <= ab + bc + 1e-12);
    }
}

TEST_CASE("errors: length mismatch") {
    const std::vector<int> a{0, 1}, b{0, 1, 2};
    CHECK_THROWS_AS(adjusted_rand_index(a, b), std::invalid_argument);
    CHECK_THROWS_AS(variation_of_information(a, b), std::invalid_argument);
}

}  // TEST_SUITE
