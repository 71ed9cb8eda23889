#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "coco/tensor.hpp"
#include "coco/weights.hpp"

namespace coco {

/// Thrown when an iterate stops being finite, which indicates a bad
/// step size (or pathological inputs).
struct SolverDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Matrix-free linear map stacking one row block per graph edge: the block
/// for mode-d edge (i, j) is the difference of the i-th and j-th mode-d
/// subarrays, laid out in matricization column order. The explicit matrix
/// never exists; apply/apply_adjoint walk the edges directly.
class FusionOperator {
public:
    FusionOperator(std::vector<std::size_t> dims, const std::vector<ModeGraph>& graphs);

    std::size_t primal_size() const { return n_; }
    std::size_t dual_size() const { return dual_size_; }
    std::size_t edge_count() const { return weights_.size(); }
    const std::vector<std::size_t>& dims() const { return dims_; }

    /// Fusion weight per edge, in the operator's edge enumeration order
    /// (modes ascending, edges in graph order).
    const std::vector<double>& edge_weights() const { return weights_; }
    /// Block length n_{-d} of each edge.
    const std::vector<std::size_t>& block_sizes() const { return block_len_; }
    /// Offset of each edge's block in a dual vector.
    const std::vector<std::size_t>& block_offsets() const { return offsets_; }

    /// out = A u (size dual_size).
    void apply(std::span<const double> u, std::span<double> out) const;
    /// out = A^T lambda (size primal_size).
    void apply_adjoint(std::span<const double> lambda, std::span<double> out) const;

    /// sum_{d,l} w_{d,l} ||A_{d,l} u||_2 -- the fusion penalty at u.
    double penalty(std::span<const double> u) const;

    /// Power iteration estimate of the spectral radius of A A^T.
    double spectral_radius_estimate(std::size_t max_iter = 50, double rel_tol = 1e-6) const;

    struct Edge {
        std::size_t mode;
        std::size_t i, j;        // 0-based node ids
        std::size_t offset;      // block offset in a dual vector
        std::size_t block_len;   // n_{-d}
        std::size_t stride;      // flat stride of the mode
        std::size_t chunk;       // stride * n_d
        double weight;
    };
    const std::vector<Edge>& edges() const { return edges_; }

private:
    std::vector<std::size_t> dims_;
    std::size_t n_ = 0;
    std::size_t dual_size_ = 0;
    std::vector<Edge> edges_;
    std::vector<double> weights_;
    std::vector<std::size_t> block_len_;
    std::vector<std::size_t> offsets_;
};

/// Per-edge dual vectors lambda_{d,l} in R^{n_{-d}}, flat with the
/// FusionOperator's block offsets. Feasible iff every block satisfies
/// ||lambda_{d,l}|| <= gamma * w_{d,l}.
struct DualState {
    std::vector<double> values;
};

struct SolverConfig {
    double step_size = 0.0;        // <= 0: auto from the spectral radius estimate
    std::size_t max_iter = 100000;
    double gap_tol = 1e-8;         // relative: gap <= gap_tol * max(1, ||x||^2 / 2)
    bool accelerate = true;        // momentum on the dual with restart on gap increase
    std::size_t check_every = 10;  // iterations between duality-gap evaluations
};

struct SolveResult {
    Tensor u_hat;
    DualState dual;
    double gap = 0.0;             // absolute duality gap at the returned iterate
    std::size_t iterations = 0;
    double primal_objective = 0.0;
    bool converged = false;
    double step_size = 0.0;       // the step actually used
};

/// Euclidean projection onto the ball of the given radius (in place).
void project_ball(std::span<double> z, double radius);

/// Step size 1.9 / rho(A A^T) from a power-iteration estimate.
double estimate_step_size(const FusionOperator& op);

/// Duality gap at a primal point u that was produced from a feasible dual
/// iterate via u = x - A^T lambda:
///   gap = <u, u - x> + gamma * sum w_{d,l} ||A_{d,l} u||.
/// Nonnegative up to rounding; zero exactly at the optimum.
double duality_gap(std::span<const double> u, const Tensor& x, double gamma,
                   const FusionOperator& op);

double primal_objective(std::span<const double> u, const Tensor& x, double gamma,
                        const FusionOperator& op);

/// Projected gradient (optionally accelerated) on the Lagrangian dual of the
/// fused co-clustering objective; recovers the unique primal estimate via
/// u = x - A^T lambda. The warm start, when given, is projected onto the
/// feasible set for the current gamma before iterating.
SolveResult solve(const Tensor& x, const std::vector<ModeGraph>& graphs, double gamma,
                  const SolverConfig& config = {},
                  const DualState* warm_start = nullptr);

}  // namespace coco
