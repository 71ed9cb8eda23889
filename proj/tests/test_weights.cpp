#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "coco/tensor.hpp"
#include "coco/union_find.hpp"
#include "coco/weights.hpp"
#include "oracles.hpp"

using coco::Tensor;

namespace {

// Brute-force pairwise squared distances between mode-d subarrays: fix the
// mode index, iterate every remaining index combination directly.
Eigen::MatrixXd brute_force_distances(const Tensor& t, std::size_t mode) {
    const std::size_t nd = t.dim(mode);
    Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nd),
                                               static_cast<Eigen::Index>(nd));
    std::vector<std::size_t> idx(t.order(), 0);
    const std::size_t rest = t.size() / nd;
    for (std::size_t c = 0; c < rest; ++c) {
        // Decode c into the non-mode indices, lower modes fastest.
        std::size_t rem = c;
        for (std::size_t d = 0; d < t.order(); ++d) {
            if (d == mode) continue;
            idx[d] = rem % t.dim(d);
            rem /= t.dim(d);
        }
        for (std::size_t i = 0; i < nd; ++i)
            for (std::size_t j = 0; j < nd; ++j) {
                idx[mode] = i;
                const double a = t[t.offset(idx)];
                idx[mode] = j;
                const double b = t[t.offset(idx)];
                d2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
                    (a - b) * (a - b);
            }
    }
    return d2;
}

// Three mode-0 slices at mutual distances d(0,1)=1, d(1,2)=1, d(0,2)=2.
Tensor three_slice_line() {
    Tensor t({3, 2});
    t.at({0, 0}) = 0.0;
    t.at({1, 0}) = 1.0;
    t.at({2, 0}) = 2.0;
    return t;
}

}  // namespace

TEST_SUITE("weights") {

TEST_CASE("pairwise distances match the brute-force oracle") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        std::uniform_int_distribution<std::size_t> dim(2, 5);
        const Tensor t = oracle::random_tensor({dim(rng), dim(rng), dim(rng)}, 300 + rep);
        for (std::size_t d = 0; d < 3; ++d) {
            const auto fast = coco::mode_distances_squared(t, d);
            const auto slow = brute_force_distances(t, d);
            REQUIRE(fast.rows() == slow.rows());
            for (Eigen::Index i = 0; i < fast.rows(); ++i)
                for (Eigen::Index j = 0; j < fast.cols(); ++j)
                    CHECK(fast(i, j) == doctest::Approx(slow(i, j)).epsilon(1e-10));
        }
    }
}

TEST_CASE("knn on a three-point line with k=1") {
    const Tensor t = three_slice_line();
    const auto edges = coco::knn_edges(t, 0, 1);
    // Nearest neighbor of 0 is 1, of 1 is 0 (tie with 2 broken by lower
    // index), of 2 is 1: symmetrized union {(0,1), (1,2)}.
    REQUIRE(edges.size() == 2);
    CHECK(edges[0] == std::make_pair<std::size_t, std::size_t>(0, 1));
    CHECK(edges[1] == std::make_pair<std::size_t, std::size_t>(1, 2));
}

TEST_CASE("knn with k = n-1 yields the complete graph") {
    const Tensor t = oracle::random_tensor({5, 3}, 17);
    const auto edges = coco::knn_edges(t, 0, 4);
    CHECK(edges.size() == 10);  // C(5,2)
}

TEST_CASE("identical slices always share an edge") {
    Tensor t({3, 2});
    t.at({0, 0}) = 5.0;
    t.at({1, 0}) = 5.0;  // slice 1 duplicates slice 0
    t.at({2, 0}) = 50.0;
    t.at({0, 1}) = 1.0;
    t.at({1, 1}) = 1.0;
    t.at({2, 1}) = -7.0;
    const auto edges = coco::knn_edges(t, 0, 1);
    CHECK(std::find(edges.begin(), edges.end(),
                    std::make_pair<std::size_t, std::size_t>(0, 1)) != edges.end());
}

TEST_CASE("median bandwidth") {
    // Squared distances {1, 4, 9} over three edges: median 4, tau = 1/4.
    Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(3, 3);
    d2(0, 1) = d2(1, 0) = 1.0;
    d2(0, 2) = d2(2, 0) = 4.0;
    d2(1, 2) = d2(2, 1) = 9.0;
    const std::vector<std::pair<std::size_t, std::size_t>> edges{{0, 1}, {0, 2}, {1, 2}};
    CHECK(coco::median_bandwidth(d2, edges) == doctest::Approx(0.25).epsilon(1e-15));

    // All squared distances equal 4: tau = 0.25 as well.
    Eigen::MatrixXd d2b = Eigen::MatrixXd::Constant(3, 3, 4.0);
    d2b.diagonal().setZero();
    CHECK(coco::median_bandwidth(d2b, edges) == doctest::Approx(0.25).epsilon(1e-15));

    // Identical slices: zero median falls back to tau = 0.
    Eigen::MatrixXd d2c = Eigen::MatrixXd::Zero(3, 3);
    CHECK(coco::median_bandwidth(d2c, edges) == 0.0);

    CHECK_THROWS_AS(coco::median_bandwidth(d2, {}), std::invalid_argument);
}

TEST_CASE("gaussian pre-weights") {
    Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(2, 2);
    d2(0, 1) = d2(1, 0) = 1.0;
    const std::vector<std::pair<std::size_t, std::size_t>> edges{{0, 1}};
    CHECK(coco::gaussian_preweights(d2, edges, 0.0)[0] == 1.0);  // uniform regime
    CHECK(coco::gaussian_preweights(d2, edges, 1.0)[0] ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    d2(0, 1) = 0.0;
    CHECK(coco::gaussian_preweights(d2, edges, 3.0)[0] == 1.0);  // identical slices
}

TEST_CASE("weight normalization") {
    const std::vector<std::size_t> dims{4, 4, 4};
    // Single edge: its weight is exactly sqrt(n_d/n).
    {
        const auto g = coco::normalize_mode_weights({{0, 1}}, {7.0}, 0, dims);
        REQUIRE(g.edges.size() == 1);
        CHECK(g.edges[0].weight == doctest::Approx(std::sqrt(4.0 / 64.0)).epsilon(1e-15));
    }
    // Pre-weights 1 and 3: weights (1/4) and (3/4) of sqrt(4/64).
    {
        const auto g = coco::normalize_mode_weights({{0, 1}, {2, 3}}, {1.0, 3.0}, 0, dims);
        const double target = std::sqrt(4.0 / 64.0);
        CHECK(g.edges[0].weight == doctest::Approx(0.25 * target).epsilon(1e-15));
        CHECK(g.edges[1].weight == doctest::Approx(0.75 * target).epsilon(1e-15));
    }
    // Scale invariance of the pre-weights.
    {
        const auto g1 = coco::normalize_mode_weights({{0, 1}, {2, 3}}, {1.0, 3.0}, 0, dims);
        const auto g2 = coco::normalize_mode_weights({{0, 1}, {2, 3}}, {2.5, 7.5}, 0, dims);
        for (std::size_t e = 0; e < 2; ++e)
            CHECK(g1.edges[e].weight == doctest::Approx(g2.edges[e].weight).epsilon(1e-14));
    }
    CHECK_THROWS_AS(coco::normalize_mode_weights({{0, 1}}, {0.0}, 0, dims),
                    std::invalid_argument);
}

TEST_CASE("ensure_connected grows k until the graph connects") {
    // Two well-separated groups of mode-0 slices; k=1 keeps them apart.
    Tensor t({6, 2});
    for (std::size_t i = 0; i < 3; ++i) {
        t.at({i, 0}) = static_cast<double>(i) * 0.1;
        t.at({i, 1}) = 0.0;
    }
    for (std::size_t i = 3; i < 6; ++i) {
        t.at({i, 0}) = 100.0 + static_cast<double>(i) * 0.1;
        t.at({i, 1}) = 0.0;
    }
    const auto d2 = coco::mode_distances_squared(t, 0);
    CHECK_FALSE(coco::is_connected(6, coco::knn_edges(d2, 1)));

    const auto [k, edges] = coco::ensure_connected(t, 0, 1);
    CHECK(k > 1);
    CHECK(coco::is_connected(6, edges));

    // Already-connected start is returned unchanged.
    const auto [k2, edges2] = coco::ensure_connected(t, 0, k);
    CHECK(k2 == k);
    CHECK(edges2 == edges);

    // Single-node mode: empty edge set, trivially connected.
    Tensor single({1, 4});
    const auto [k3, edges3] = coco::ensure_connected(single, 0, 1);
    CHECK(edges3.empty());
}

TEST_CASE("build_mode_graphs invariants on 1000 randomized cases") {
    std::mt19937_64 rng(71);
    std::uniform_int_distribution<std::size_t> dim(2, 6);
    std::uniform_int_distribution<std::size_t> kk(1, 3);
    std::uniform_int_distribution<int> bw(0, 1);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::vector<std::size_t> dims{dim(rng), dim(rng), dim(rng)};
        const Tensor t = oracle::random_tensor(dims, 5000 + rep);
        coco::WeightConfig wc;
        wc.k_neighbors = kk(rng);
        wc.bandwidth = bw(rng) ? coco::BandwidthMode::MedianHeuristic
                               : coco::BandwidthMode::Uniform;
        const auto graphs = coco::build_mode_graphs(t, wc);
        REQUIRE(graphs.size() == 3);
        std::size_t n = t.size();
        for (std::size_t d = 0; d < 3; ++d) {
            const auto& g = graphs[d];
            REQUIRE(g.n_nodes == dims[d]);
            // Weight sum sqrt(n_d/n), no self/duplicate edges, connectivity.
            double sum = 0.0;
            coco::UnionFind uf(g.n_nodes);
            std::set<std::pair<std::size_t, std::size_t>> seen;
            for (const auto& e : g.edges) {
                REQUIRE(e.i < e.j);
                REQUIRE(e.j < g.n_nodes);
                REQUIRE(e.weight > 0.0);
                REQUIRE(seen.insert({e.i, e.j}).second);
                sum += e.weight;
                uf.unite(e.i, e.j);
            }
            const double target = std::sqrt(static_cast<double>(dims[d]) / static_cast<double>(n));
            REQUIRE(std::abs(sum - target) <= 1e-12);
            REQUIRE(uf.components() == 1);
        }
    }
}

TEST_CASE("uniform mode on a complete graph reproduces equal weights") {
    const Tensor t = oracle::random_tensor({5, 4, 3}, 83);
    coco::WeightConfig wc;
    wc.k_neighbors = 4;  // complete graph along mode 0
    wc.bandwidth = coco::BandwidthMode::Uniform;
    const auto graphs = coco::build_mode_graphs(t, wc);
    const auto& g = graphs[0];
    REQUIRE(g.edges.size() == 10);
    const double want = std::sqrt(5.0 / 60.0) / 10.0;
    for (const auto& e : g.edges) CHECK(e.weight == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("graph dump format") {
    std::vector<coco::ModeGraph> graphs{{0, 2, {{0, 1, 0.5}}}};
    std::ostringstream out;
    coco::write_graphs_csv(out, graphs);
    CHECK(out.str() == "mode,i,j,weight\n1,1,2,0.5\n");
}

}  // TEST_SUITE
