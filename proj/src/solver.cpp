#include "coco/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace coco {

namespace {

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

FusionOperator::FusionOperator(std::vector<std::size_t> dims,
                               const std::vector<ModeGraph>& graphs)
    : dims_(std::move(dims)) {
    n_ = 1;
    for (std::size_t d : dims_) n_ *= d;
    if (graphs.size() != dims_.size())
        throw std::invalid_argument("FusionOperator: need one graph per mode");

    std::size_t stride = 1;
    for (std::size_t d = 0; d < dims_.size(); ++d) {
        const ModeGraph& g = graphs[d];
        if (g.mode != d || g.n_nodes != dims_[d])
            throw std::invalid_argument("FusionOperator: graph/mode mismatch at mode " +
                                        std::to_string(d + 1));
        const std::size_t block = n_ / dims_[d];
        for (const GraphEdge& e : g.edges) {
            if (e.i >= e.j || e.j >= dims_[d])
                throw std::invalid_argument("FusionOperator: bad edge node ids");
            if (!(e.weight > 0.0))
                throw std::invalid_argument("FusionOperator: edge weights must be positive");
            edges_.push_back({d, e.i, e.j, dual_size_, block, stride, stride * dims_[d], e.weight});
            weights_.push_back(e.weight);
            block_len_.push_back(block);
            offsets_.push_back(dual_size_);
            dual_size_ += block;
        }
        stride *= dims_[d];
    }
}

void FusionOperator::apply(std::span<const double> u, std::span<double> out) const {
    if (u.size() != n_ || out.size() != dual_size_)
        throw std::invalid_argument("FusionOperator::apply: size mismatch");
    for (const Edge& e : edges_) {
        double* dst = out.data() + e.offset;
        const std::size_t outer = n_ / e.chunk;
        for (std::size_t o = 0; o < outer; ++o) {
            const double* a = u.data() + o * e.chunk + e.i * e.stride;
            const double* b = u.data() + o * e.chunk + e.j * e.stride;
            double* block = dst + o * e.stride;
            for (std::size_t t = 0; t < e.stride; ++t) block[t] = a[t] - b[t];
        }
    }
}

void FusionOperator::apply_adjoint(std::span<const double> lambda, std::span<double> out) const {
    if (lambda.size() != dual_size_ || out.size() != n_)
        throw std::invalid_argument("FusionOperator::apply_adjoint: size mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    for (const Edge& e : edges_) {
        const double* src = lambda.data() + e.offset;
        const std::size_t outer = n_ / e.chunk;
        for (std::size_t o = 0; o < outer; ++o) {
            double* a = out.data() + o * e.chunk + e.i * e.stride;
            double* b = out.data() + o * e.chunk + e.j * e.stride;
            const double* block = src + o * e.stride;
            for (std::size_t t = 0; t < e.stride; ++t) {
                a[t] += block[t];
                b[t] -= block[t];
            }
        }
    }
}

double FusionOperator::penalty(std::span<const double> u) const {
    if (u.size() != n_) throw std::invalid_argument("FusionOperator::penalty: size mismatch");
    double total = 0.0;
    for (const Edge& e : edges_) {
        double sq = 0.0;
        const std::size_t outer = n_ / e.chunk;
        for (std::size_t o = 0; o < outer; ++o) {
            const double* a = u.data() + o * e.chunk + e.i * e.stride;
            const double* b = u.data() + o * e.chunk + e.j * e.stride;
            for (std::size_t t = 0; t < e.stride; ++t) {
                const double diff = a[t] - b[t];
                sq += diff * diff;
            }
        }
        total += e.weight * std::sqrt(sq);
    }
    return total;
}

double FusionOperator::spectral_radius_estimate(std::size_t max_iter, double rel_tol) const {
    if (edges_.empty()) return 0.0;
    std::mt19937_64 rng(0x5eed5eedULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> v(n_), av(dual_size_), atav(n_);
    for (double& x : v) x = gauss(rng);

    double rho = 0.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        apply(v, av);
        apply_adjoint(av, atav);
        double norm = 0.0;
        for (double x : atav) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        const double prev = rho;
        rho = norm;  // ||A^T A v|| with ||v|| = 1
        for (std::size_t i = 0; i < n_; ++i) v[i] = atav[i] / norm;
        if (it > 0 && std::abs(rho - prev) <= rel_tol * rho) break;
    }
    return rho;
}

void project_ball(std::span<double> z, double radius) {
    if (radius < 0.0) throw std::invalid_argument("project_ball: radius must be >= 0");
    double sq = 0.0;
    for (double x : z) sq += x * x;
    const double norm = std::sqrt(sq);
    if (norm <= radius) return;
    if (norm == 0.0) return;
    const double scale = radius / norm;
    for (double& x : z) x *= scale;
}

double estimate_step_size(const FusionOperator& op) {
    const double rho = op.spectral_radius_estimate();
    if (rho <= 0.0) return 1.0;  // A == 0: any step works, u = x immediately
    return 1.9 / rho;
}

double duality_gap(std::span<const double> u, const Tensor& x, double gamma,
                   const FusionOperator& op) {
    if (u.size() != x.size()) throw std::invalid_argument("duality_gap: size mismatch");
    double quad = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) quad += u[i] * (u[i] - x.data()[i]);
    return quad + gamma * op.penalty(u);
}

double primal_objective(std::span<const double> u, const Tensor& x, double gamma,
                        const FusionOperator& op) {
    if (u.size() != x.size()) throw std::invalid_argument("primal_objective: size mismatch");
    double quad = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = x.data()[i] - u[i];
        quad += r * r;
    }
    return 0.5 * quad + gamma * op.penalty(u);
}

SolveResult solve(const Tensor& x, const std::vector<ModeGraph>& graphs, double gamma,
                  const SolverConfig& config, const DualState* warm_start) {
    if (gamma < 0.0) throw std::invalid_argument("solve: gamma must be >= 0");
    FusionOperator op(x.dims(), graphs);
    const std::size_t n = op.primal_size();
    const std::size_t m = op.dual_size();

    double xsq = 0.0;
    for (double v : x.data()) xsq += v * v;
    const double gap_abs_tol = config.gap_tol * std::max(1.0, 0.5 * xsq);

    SolveResult result;

    // gamma == 0 (or no edges): the dual is pinned at zero and u = x.
    if (gamma == 0.0 || m == 0) {
        result.u_hat = x;
        result.dual.values.assign(m, 0.0);
        result.gap = 0.0;
        result.iterations = 1;
        result.primal_objective = gamma * op.penalty(vectorize(x));
        result.converged = true;
        result.step_size = 0.0;
        return result;
    }

    const double rho = op.spectral_radius_estimate();
    double eta = config.step_size;
    if (eta <= 0.0) {
        // Keep a safety margin under the 2/rho ceiling; momentum needs the
        // classical 1/rho regime.
        const double rho_safe = rho * 1.02;
        eta = config.accelerate ? 1.0 / rho_safe : 1.9 / rho_safe;
    }

    std::vector<double> lambda(m, 0.0);
    if (warm_start != nullptr) {
        if (warm_start->values.size() != m)
            throw std::invalid_argument("solve: warm start has wrong dual size");
        lambda = warm_start->values;
    }
    // Feasibility for the current gamma (warm starts from larger gamma).
    for (const auto& e : op.edges())
        project_ball({lambda.data() + e.offset, e.block_len}, gamma * e.weight);

    // The extrapolated point y = lambda + beta (lambda - lambda_prev) is kept
    // implicit: A^T y follows from the cached adjoints of the last two
    // iterates, so each iteration makes a single pass over the dual vectors.
    std::vector<double> lambda_prev = lambda;
    std::vector<double> adj(n), adj_prev(n);  // A^T lambda, A^T lambda_prev
    op.apply_adjoint(lambda, adj);
    adj_prev = adj;
    std::vector<double> u(n), u_chk(n);
    std::vector<double> zbuf;
    for (const auto& e : op.edges()) zbuf.resize(std::max(zbuf.size(), e.block_len));

    // gap = gamma * sum w ||A_l u|| - sum <A_l u, lambda_l> at u = x - A^T
    // lambda; equals <u, u - x> + gamma * penalty(u).
    auto gap_now = [&]() {
        for (std::size_t i = 0; i < n; ++i) u_chk[i] = x.data()[i] - adj[i];
        double gap = 0.0;
        for (const auto& e : op.edges()) {
            const double* lam_e = lambda.data() + e.offset;
            double sq = 0.0, dot = 0.0;
            const std::size_t outer = n / e.chunk;
            for (std::size_t o = 0; o < outer; ++o) {
                const double* a = u_chk.data() + o * e.chunk + e.i * e.stride;
                const double* b = u_chk.data() + o * e.chunk + e.j * e.stride;
                const double* l = lam_e + o * e.stride;
                for (std::size_t t = 0; t < e.stride; ++t) {
                    const double diff = a[t] - b[t];
                    sq += diff * diff;
                    dot += diff * l[t];
                }
            }
            gap += gamma * e.weight * std::sqrt(sq) - dot;
        }
        return gap;
    };

    double t_momentum = 1.0;
    double last_gap = std::numeric_limits<double>::infinity();
    double gap = std::numeric_limits<double>::infinity();
    std::size_t iter = 0;
    bool converged = false;
    int stalled_checks = 0;

    const std::size_t check_every = std::max<std::size_t>(1, config.check_every);

    while (iter < config.max_iter) {
        ++iter;

        double beta = 0.0;
        if (config.accelerate) {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
            beta = (t_momentum - 1.0) / t_next;
            t_momentum = t_next;
        }

        // u = x - A^T y with A^T y = (1 + beta) A^T lambda - beta A^T lambda_prev.
        if (beta == 0.0) {
            for (std::size_t i = 0; i < n; ++i) u[i] = x.data()[i] - adj[i];
        } else {
            for (std::size_t i = 0; i < n; ++i)
                u[i] = x.data()[i] - (1.0 + beta) * adj[i] + beta * adj_prev[i];
        }

        // lambda_next = P_C(y + eta A u), written over lambda_prev's storage,
        // with its adjoint scattered into adj_prev's storage on the fly.
        std::fill(adj_prev.begin(), adj_prev.end(), 0.0);
        for (const auto& e : op.edges()) {
            const double* lam_e = lambda.data() + e.offset;
            double* prev_e = lambda_prev.data() + e.offset;
            double* z = zbuf.data();
            double sq = 0.0;
            const std::size_t outer = n / e.chunk;
            for (std::size_t o = 0; o < outer; ++o) {
                const double* a = u.data() + o * e.chunk + e.i * e.stride;
                const double* b = u.data() + o * e.chunk + e.j * e.stride;
                const double* lc = lam_e + o * e.stride;
                const double* lp = prev_e + o * e.stride;
                double* zb = z + o * e.stride;
                for (std::size_t t = 0; t < e.stride; ++t) {
                    const double yv = lc[t] + beta * (lc[t] - lp[t]);
                    const double zv = yv + eta * (a[t] - b[t]);
                    zb[t] = zv;
                    sq += zv * zv;
                }
            }
            const double radius = gamma * e.weight;
            const double scale = (sq > radius * radius) ? radius / std::sqrt(sq) : 1.0;
            for (std::size_t o = 0; o < outer; ++o) {
                double* ai = adj_prev.data() + o * e.chunk + e.i * e.stride;
                double* aj = adj_prev.data() + o * e.chunk + e.j * e.stride;
                double* pb = prev_e + o * e.stride;
                const double* zb = z + o * e.stride;
                for (std::size_t t = 0; t < e.stride; ++t) {
                    const double v = scale * zb[t];
                    pb[t] = v;
                    ai[t] += v;
                    aj[t] -= v;
                }
            }
        }
        lambda.swap(lambda_prev);  // lambda <- lambda_next
        adj.swap(adj_prev);        // adj <- A^T lambda_next, adj_prev <- A^T lambda

        if (iter == 1 || iter % check_every == 0 || iter == config.max_iter) {
            gap = gap_now();
            if (!std::isfinite(gap) || !all_finite(u_chk))
                throw SolverDivergence("solve: non-finite iterate at iteration " +
                                       std::to_string(iter));
            if (gap <= gap_abs_tol) {
                converged = true;
                break;
            }
            // The gap has a rounding floor that scales with gamma; once the
            // iterate stops moving there is nothing left to certify.
            double step_sq = 0.0, lam_sq = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double d = lambda[i] - lambda_prev[i];
                step_sq += d * d;
                lam_sq += lambda[i] * lambda[i];
            }
            if (step_sq <= 1e-30 * (lam_sq + 1.0)) {
                if (++stalled_checks >= 3) break;
            } else {
                stalled_checks = 0;
            }
            if (config.accelerate && gap > last_gap) {
                // Adaptive restart: drop the momentum when the gap rises.
                t_momentum = 1.0;
            }
            last_gap = gap;
        }
    }

    if (!converged) gap = gap_now();

    result.u_hat = Tensor(x.dims(), u_chk);
    result.dual.values = std::move(lambda);
    result.gap = gap;
    result.iterations = iter;
    result.primal_objective = primal_objective(vectorize(result.u_hat), x, gamma, op);
    result.converged = converged;
    result.step_size = eta;
    return result;
}

}  // namespace coco
