#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "coco/tensor.hpp"

namespace coco {

/// Core tensor plus one orthonormal-column factor matrix per mode.
struct TuckerModel {
    Tensor core;
    std::vector<Eigen::MatrixXd> factors;   // n_d x R_d
    std::vector<double> objective_history;  // ||T - reconstruct||_F after each sweep
    double fit = 0.0;                       // 1 - ||T - reconstruct||_F / ||T||_F

    Tensor reconstruct() const;
};

/// Sum of rank-one tensors: weights_r * a_r^(1) o ... o a_r^(D) with
/// unit-norm factor columns; magnitudes (and a deterministic sign fix)
/// live in the weight vector.
struct CpModel {
    std::size_t rank = 0;
    std::vector<Eigen::MatrixXd> factors;  // n_d x R, unit-norm columns
    Eigen::VectorXd weights;
    std::vector<double> objective_history;
    double fit = 0.0;

    Tensor reconstruct(const std::vector<std::size_t>& dims) const;
};

/// Tucker rank heuristic: max(1, floor(sqrt(n_d) / 2)).
std::size_t heuristic_rank(std::size_t n_d);
std::vector<std::size_t> heuristic_ranks(const std::vector<std::size_t>& dims);

/// Higher-order orthogonal iteration started from the truncated HOSVD.
/// Sweeps until the relative fit improvement drops below tol; the residual
/// norm is nonincreasing across sweeps.
TuckerModel tucker_hooi(const Tensor& t, const std::vector<std::size_t>& ranks,
                        std::size_t max_sweeps = 50, double tol = 1e-8);

/// Alternating least squares CP fit from a seeded random orthonormal start.
/// Deterministic given the seed; ill-conditioned normal equations are
/// stabilized with a 1e-12 ridge.
CpModel cp_als(const Tensor& t, std::size_t rank, std::size_t max_sweeps = 200,
               double tol = 1e-10, std::uint64_t seed = 0);

}  // namespace coco
