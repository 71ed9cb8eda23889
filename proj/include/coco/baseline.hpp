#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "coco/clusterpath.hpp"
#include "coco/tensor.hpp"

namespace coco {

struct KMeansResult {
    std::vector<int> labels;        // canonical: ids ordered by smallest member index
    Eigen::MatrixXd centroids;      // k x p
    double wcss = 0.0;              // within-cluster sum of squares
    std::size_t iterations = 0;
    std::vector<double> wcss_history;  // nonincreasing over Lloyd iterations
};

/// k-means++ seeding followed by Lloyd iterations; best of `restarts` runs by
/// WCSS (ties to the lowest restart index). Empty clusters are repaired by
/// promoting the point farthest from its centroid.
KMeansResult kmeans(const Eigen::MatrixXd& points, std::size_t k, std::uint64_t seed,
                    std::size_t restarts = 10, std::size_t max_iter = 300);

/// Gap statistic: Gap(k) = E*[log WCSS_ref] - log WCSS(k) over B uniform
/// bounding-box reference draws; selects the smallest k with
/// Gap(k) >= Gap(k+1) - s_{k+1}.
std::size_t gap_statistic(const Eigen::MatrixXd& points,
                          const std::vector<std::size_t>& k_candidates, std::size_t b_refs,
                          std::uint64_t seed);

struct CpdKmeansResult {
    std::size_t rank = 0;                 // selected CP rank
    std::vector<double> rank_fits;        // fit per rank candidate
    std::vector<Partition> partitions;    // per mode
    std::vector<std::size_t> k_selected;  // per mode
};

/// The comparator pipeline: CP decomposition at a rank chosen from the
/// candidates (smallest whose relative fit improvement over the previous
/// candidate falls under 5%), then independent k-means on each factor
/// matrix's rows with k chosen by the gap statistic.
CpdKmeansResult cpd_kmeans(const Tensor& x, const std::vector<std::size_t>& rank_candidates,
                           const std::vector<std::size_t>& k_candidates, std::uint64_t seed);

}  // namespace coco
