#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "coco/tensor.hpp"

namespace coco {

/// Checkerbox mean model: per-mode cluster memberships expand a small tensor
/// of block means to the full size, then independent Gaussian noise is added.
struct CheckerboxSpec {
    std::vector<std::size_t> dims;
    std::vector<std::size_t> clusters;  // k_d per mode

    /// Per-mode cluster size fractions, each summing to 1 with every
    /// resulting size >= 1. Empty: balanced sizes.
    std::vector<std::vector<double>> fractions;

    /// Explicit block means, flattened over the k_1 x ... x k_D grid in
    /// storage order. Empty: sampled iid N(0, mean_separation^2), redrawn
    /// until all pairwise gaps reach mean_separation / 2 (best draw kept if
    /// the gap target is infeasible for the block count).
    std::vector<double> block_means;
    double mean_separation = 6.0;

    /// Per-block noise standard deviations over the same flattened grid.
    /// Empty: the global sigma applies everywhere.
    std::vector<double> block_sigma;
    double sigma = 1.0;

    bool shuffle = false;  // permute slice order per mode (recorded in truth)
    std::uint64_t seed = 0;
};

struct GroundTruth {
    Tensor u_star;                         // noiseless mean tensor
    std::vector<std::vector<int>> labels;  // per-mode cluster ids
    Tensor block_means;                    // k_1 x ... x k_D
};

std::pair<Tensor, GroundTruth> gen_checkerbox(const CheckerboxSpec& spec);

/// Two-class heteroskedastic variant: blocks whose first-mode cluster is the
/// second class get sigma_1 * sigma_ratio, all others sigma_1. Ratio 1
/// reduces to the homoskedastic generator.
std::pair<Tensor, GroundTruth> gen_heteroskedastic(CheckerboxSpec spec, double sigma_ratio);

enum class TwoShape { HalfMoons, Bullseye };

/// Symmetric rank-2 third-order tensor U* = sum_r a_r o a_r o a_r built from
/// an n x 2 factor matrix whose first n/2 rows trace shape class 1 and last
/// n/2 rows shape class 2, plus Gaussian noise. Truth labels are the two
/// shape classes, identical across the three modes.
std::pair<Tensor, GroundTruth> gen_cp_two_shape(TwoShape shape, std::size_t n, double sigma,
                                                std::uint64_t seed);

/// The factor matrix used by gen_cp_two_shape (exposed for plotting/tests).
std::vector<std::array<double, 2>> two_shape_points(TwoShape shape, std::size_t n);

}  // namespace coco
