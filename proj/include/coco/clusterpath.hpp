#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "coco/solver.hpp"
#include "coco/tensor.hpp"
#include "coco/weights.hpp"

namespace coco {

/// Cluster assignment for one mode's subarrays. Labels are contiguous ids
/// 0..n_clusters-1, assigned in order of each cluster's smallest member
/// index so repeated runs are byte-identical.
struct Partition {
    std::size_t mode = 0;
    std::vector<int> labels;
    std::size_t n_clusters = 0;
};

struct SolutionPoint {
    double gamma = 0.0;
    Tensor u_hat;
    std::vector<Partition> partitions;
    std::size_t co_cluster_count = 0;  // product of per-mode cluster counts
    double rss = 0.0;                  // ||X - u_hat||_F^2
    double ebic = 0.0;
    double gap = 0.0;
    std::size_t iterations = 0;
};

struct SolutionPath {
    std::vector<SolutionPoint> points;  // ascending gamma
    std::size_t selected = 0;           // index of the eBIC-selected point
};

struct PathConfig {
    SolverConfig solver{.gap_tol = 1e-12};  // tight gaps keep fusion decisions crisp
    double fuse_tol = 1e-4;                 // relative, scaled by ||X||_F / sqrt(n)
    bool warm_start = true;
    bool stop_when_coalesced = true;
};

/// Connected components of the mode graph restricted to edges whose
/// estimated subarray difference has Frobenius norm <= fuse_tol * scale.
Partition extract_mode_clusters(const Tensor& u_hat, const ModeGraph& graph, double fuse_tol,
                                double scale);

std::vector<Partition> extract_clusters(const Tensor& u_hat, const std::vector<ModeGraph>& graphs,
                                        double fuse_tol, double scale);

/// Every mode fused to a single cluster.
bool fully_coalesced(const std::vector<Partition>& partitions);

/// n log(rss/n) + 2 df log(n), natural log, with rss floored at
/// machine epsilon * n so the criterion stays finite at exact fits.
double ebic(double rss, std::size_t n, double df);

/// Ascending grid. gamma_min > 0: count log-spaced points from gamma_min to
/// gamma_max. gamma_min == 0: exact 0 followed by count-1 log-spaced points
/// ending at gamma_max with ratio 10 between consecutive points.
std::vector<double> gamma_grid(double gamma_min, double gamma_max, std::size_t count);

/// Smallest power-of-two multiple (or fraction) of 1 at which the solution
/// is fully coalesced; used as the default grid budget.
double find_gamma_max(const Tensor& x, const std::vector<ModeGraph>& graphs,
                      const PathConfig& config = {});

/// Default path grid: 0, then `count`-1 points log-spaced over four decades
/// up to the coalescence budget.
std::vector<double> default_gamma_grid(const Tensor& x, const std::vector<ModeGraph>& graphs,
                                       std::size_t count = 50, const PathConfig& config = {});

/// Solve along the grid in ascending order, warm-starting each dual from the
/// previous solution, stopping early once fully coalesced. The selected
/// point minimizes eBIC among the candidates with at least one fusion
/// (df < n); ties pick the smaller gamma.
SolutionPath solve_path(const Tensor& x, const std::vector<ModeGraph>& graphs,
                        const std::vector<double>& grid, const PathConfig& config = {});

/// One row per point: gamma,rss,df,ebic,gap,iters,k_mode_1,...,k_mode_D.
void write_path_csv(std::ostream& out, const SolutionPath& path, std::size_t order);

}  // namespace coco
