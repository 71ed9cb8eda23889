#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/SVD>

#include "coco/decomp.hpp"
#include "coco/tensor.hpp"
#include "oracles.hpp"

using coco::Tensor;

namespace {

Tensor rank_one(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
    Tensor t({static_cast<std::size_t>(a.size()), static_cast<std::size_t>(b.size()),
              static_cast<std::size_t>(c.size())});
    std::size_t f = 0;
    for (Eigen::Index k = 0; k < c.size(); ++k)
        for (Eigen::Index j = 0; j < b.size(); ++j)
            for (Eigen::Index i = 0; i < a.size(); ++i) t[f++] = a(i) * b(j) * c(k);
    return t;
}

double relative_error(const Tensor& got, const Tensor& want) {
    double err = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        const double d = got[i] - want[i];
        err += d * d;
    }
    const double ref = coco::frobenius_norm(want);
    return std::sqrt(err) / std::max(ref, 1e-300);
}

}  // namespace

TEST_SUITE("decomp") {

TEST_CASE("heuristic rank") {
    CHECK(coco::heuristic_rank(60) == 3);   // floor(sqrt(60)/2) = floor(3.87)
    CHECK(coco::heuristic_rank(100) == 5);  // sqrt(100)/2
    CHECK(coco::heuristic_rank(2) == 1);    // clamped from floor(0.707) = 0
    CHECK(coco::heuristic_rank(1) == 1);
    CHECK(coco::heuristic_rank(36) == 3);
}

TEST_CASE("tucker at full rank reconstructs exactly") {
    const Tensor t = oracle::random_tensor({4, 3, 5}, 7);
    const auto model = coco::tucker_hooi(t, {4, 3, 5});
    CHECK(relative_error(model.reconstruct(), t) <= 1e-10);
}

TEST_CASE("tucker rank (1,1,1) recovers a rank-1 tensor") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd a(5), b(4), c(3);
    for (auto* v : {&a, &b, &c})
        for (Eigen::Index i = 0; i < v->size(); ++i) (*v)(i) = gauss(rng);
    const Tensor t = rank_one(a, b, c);
    const auto model = coco::tucker_hooi(t, {1, 1, 1});
    CHECK(relative_error(model.reconstruct(), t) <= 1e-10);
}

TEST_CASE("hooi does not lose to its hosvd initializer") {
    const Tensor t = oracle::random_tensor({10, 10, 10}, 13);
    const std::vector<std::size_t> ranks{3, 3, 3};
    const auto hooi = coco::tucker_hooi(t, ranks, 50, 1e-12);
    REQUIRE(!hooi.objective_history.empty());
    for (std::size_t s = 1; s < hooi.objective_history.size(); ++s)
        CHECK(hooi.objective_history[s] <= hooi.objective_history[s - 1] + 1e-10);

    // Truncated-HOSVD reference built directly from per-mode SVDs.
    std::vector<Eigen::MatrixXd> factors;
    for (std::size_t d = 0; d < 3; ++d) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(coco::matricize(t, d).matrix(),
                                              Eigen::ComputeThinU);
        factors.push_back(svd.matrixU().leftCols(static_cast<Eigen::Index>(ranks[d])));
    }
    Tensor core = t;
    for (std::size_t d = 0; d < 3; ++d) core = coco::mode_product(core, d, factors[d].transpose());
    Tensor recon = core;
    for (std::size_t d = 0; d < 3; ++d) recon = coco::mode_product(recon, d, factors[d]);
    double hosvd_err = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) hosvd_err += std::pow(t[i] - recon[i], 2);
    const double hosvd_fit = 1.0 - std::sqrt(hosvd_err) / coco::frobenius_norm(t);
    CHECK(hooi.fit >= hosvd_fit - 1e-12);
}

TEST_CASE("tucker factors are orthonormal") {
    const Tensor t = oracle::random_tensor({8, 6, 5}, 17);
    const auto model = coco::tucker_hooi(t, {3, 2, 2});
    for (const auto& f : model.factors) {
        const Eigen::MatrixXd gram = f.transpose() * f;
        const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
        CHECK((gram - eye).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("tucker rank validation") {
    const Tensor t = oracle::random_tensor({3, 3, 3}, 19);
    CHECK_THROWS_AS(coco::tucker_hooi(t, {4, 3, 3}), std::invalid_argument);
    CHECK_THROWS_AS(coco::tucker_hooi(t, {0, 3, 3}), std::invalid_argument);
    CHECK_THROWS_AS(coco::tucker_hooi(t, {3, 3}), std::invalid_argument);
}

TEST_CASE("hooi objective monotone on 1000 randomized cases") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<std::size_t> dim(2, 6);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::vector<std::size_t> dims{dim(rng), dim(rng), dim(rng)};
        const Tensor t = oracle::random_tensor(dims, 40000 + rep);
        std::vector<std::size_t> ranks(3);
        for (std::size_t d = 0; d < 3; ++d)
            ranks[d] = 1 + (rep + d) % dims[d];
        const auto model = coco::tucker_hooi(t, ranks, 6, 0.0);
        for (std::size_t s = 1; s < model.objective_history.size(); ++s)
            REQUIRE(model.objective_history[s] <=
                    model.objective_history[s - 1] + 1e-9 * (1.0 + model.objective_history[0]));
    }
}

TEST_CASE("cp fits an exact rank-1 tensor") {
    std::mt19937_64 rng(29);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd a(6), b(5), c(4);
    for (auto* v : {&a, &b, &c})
        for (Eigen::Index i = 0; i < v->size(); ++i) (*v)(i) = gauss(rng);
    const Tensor t = rank_one(a, b, c);
    const auto model = coco::cp_als(t, 1, 200, 1e-12, 1);
    CHECK(model.fit >= 1.0 - 1e-8);
}

TEST_CASE("cp recovers a symmetric rank-2 tensor") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd a1(7), a2(7);
    for (Eigen::Index i = 0; i < 7; ++i) {
        a1(i) = gauss(rng);
        a2(i) = gauss(rng);
    }
    Tensor t = rank_one(a1, a1, a1);
    const Tensor t2 = rank_one(a2, a2, a2);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] += t2[i];

    const auto model = coco::cp_als(t, 2, 500, 1e-14, 3);
    CHECK(relative_error(model.reconstruct(t.dims()), t) <= 1e-6);
}

TEST_CASE("cp on the zero tensor") {
    const Tensor t({3, 3, 3});
    const auto model = coco::cp_als(t, 1, 50, 1e-10, 5);
    CHECK(model.fit == 1.0);
    CHECK(model.weights.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cp objective monotone per sweep and deterministic given seed") {
    const Tensor t = oracle::random_tensor({6, 5, 4}, 37);
    const auto m1 = coco::cp_als(t, 3, 40, 0.0, 9);
    const auto m2 = coco::cp_als(t, 3, 40, 0.0, 9);
    REQUIRE(m1.objective_history.size() == m2.objective_history.size());
    for (std::size_t s = 0; s < m1.objective_history.size(); ++s)
        CHECK(m1.objective_history[s] == m2.objective_history[s]);
    for (std::size_t s = 1; s < m1.objective_history.size(); ++s)
        CHECK(m1.objective_history[s] <= m1.objective_history[s - 1] + 1e-9);
    // Sign convention: leading nonzero entry of every factor column positive.
    for (const auto& f : m1.factors)
        for (Eigen::Index r = 0; r < f.cols(); ++r) {
            for (Eigen::Index i = 0; i < f.rows(); ++i)
                if (std::abs(f(i, r)) > 1e-12) {
                    CHECK(f(i, r) > 0.0);
                    break;
                }
        }
}

TEST_CASE("cp reconstruction identity on small tensors") {
    const Tensor t = oracle::random_tensor({4, 4, 4}, 41);
    const auto model = coco::cp_als(t, 3, 60, 1e-12, 11);
    // Explicit outer-product summation oracle.
    Tensor want(t.dims());
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t j = 0; j < 4; ++j)
            for (std::size_t i = 0; i < 4; ++i) {
                double v = 0.0;
                for (Eigen::Index r = 0; r < 3; ++r)
                    v += model.weights(r) * model.factors[0](static_cast<Eigen::Index>(i), r) *
                         model.factors[1](static_cast<Eigen::Index>(j), r) *
                         model.factors[2](static_cast<Eigen::Index>(k), r);
                want[i + 4 * j + 16 * k] = v;
            }
    const Tensor got = model.reconstruct(t.dims());
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-10));
}

}  // TEST_SUITE
