#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "coco/tensor.hpp"

namespace coco {

/// Undirected edge with a positive fusion weight; node ids are 0-based
/// and i < j.
struct GraphEdge {
    std::size_t i = 0;
    std::size_t j = 0;
    double weight = 0.0;
};

/// Sparse weighted similarity graph over the subarrays of one mode.
/// After normalization the weights sum to sqrt(n_d / n), and the graph is
/// connected (a single node counts as connected, with an empty edge set).
struct ModeGraph {
    std::size_t mode = 0;  // 0-based
    std::size_t n_nodes = 0;
    std::vector<GraphEdge> edges;
};

enum class BandwidthMode {
    MedianHeuristic,  // tau_d = 1 / median of retained squared distances
    Fixed,            // user-supplied tau per mode
    Uniform,          // tau_d = 0: every retained edge gets pre-weight 1
};

struct WeightConfig {
    std::size_t k_neighbors = 1;  // starting k; grown until the graph connects
    BandwidthMode bandwidth = BandwidthMode::MedianHeuristic;
    std::vector<double> fixed_tau;  // per mode, used when bandwidth == Fixed
};

/// Pairwise squared distances between mode-d subarrays of a tensor
/// (rows of its mode-d matricization). Symmetric with a zero diagonal.
Eigen::MatrixXd mode_distances_squared(const Tensor& xt, std::size_t mode);

/// Symmetrized union of exact k-nearest-neighbor relations, ties broken by
/// lower index. k >= n_d - 1 yields the complete graph.
std::vector<std::pair<std::size_t, std::size_t>> knn_edges(const Eigen::MatrixXd& dist2,
                                                           std::size_t k);
std::vector<std::pair<std::size_t, std::size_t>> knn_edges(const Tensor& xt, std::size_t mode,
                                                           std::size_t k);

bool is_connected(std::size_t n_nodes,
                  const std::vector<std::pair<std::size_t, std::size_t>>& edges);

/// Smallest k >= k_start whose symmetrized k-NN graph is connected, together
/// with that graph's edges. A single node yields (k_start, {}).
std::pair<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>> ensure_connected(
    const Tensor& xt, std::size_t mode, std::size_t k_start);

/// 1 / median of the retained squared distances; identical subarrays
/// (median zero) fall back to tau = 0, i.e. uniform weights.
double median_bandwidth(const Eigen::MatrixXd& dist2,
                        const std::vector<std::pair<std::size_t, std::size_t>>& edges);

/// exp(-tau * squared distance) per retained edge, floored at the smallest
/// positive normal double so no retained edge drops out by underflow.
std::vector<double> gaussian_preweights(const Eigen::MatrixXd& dist2,
                                        const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                        double tau);

/// Scale positive pre-weights so the mode's weights sum to sqrt(n_d / n).
ModeGraph normalize_mode_weights(const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                 const std::vector<double>& preweights, std::size_t mode,
                                 const std::vector<std::size_t>& dims);

/// Full pipeline over every mode of a (typically denoised) tensor.
std::vector<ModeGraph> build_mode_graphs(const Tensor& xtilde, const WeightConfig& config);

/// Debug dump, one "mode,i,j,weight" row per edge (1-based ids).
void write_graphs_csv(std::ostream& out, const std::vector<ModeGraph>& graphs);

}  // namespace coco
