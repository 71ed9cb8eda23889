#include "coco/clusterpath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "coco/union_find.hpp"

namespace coco {

namespace {

double edge_difference_norm(const Tensor& u, std::size_t mode, std::size_t i, std::size_t j) {
    const std::size_t stride = u.stride(mode);
    const std::size_t chunk = stride * u.dim(mode);
    const std::size_t outer = u.size() / chunk;
    double sq = 0.0;
    const double* data = u.data().data();
    for (std::size_t o = 0; o < outer; ++o) {
        const double* a = data + o * chunk + i * stride;
        const double* b = data + o * chunk + j * stride;
        for (std::size_t t = 0; t < stride; ++t) {
            const double diff = a[t] - b[t];
            sq += diff * diff;
        }
    }
    return std::sqrt(sq);
}

}  // namespace

Partition extract_mode_clusters(const Tensor& u_hat, const ModeGraph& graph, double fuse_tol,
                                double scale) {
    if (fuse_tol < 0.0) throw std::invalid_argument("extract_mode_clusters: fuse_tol must be >= 0");
    const std::size_t n_nodes = graph.n_nodes;
    const double threshold = fuse_tol * scale;

    UnionFind uf(n_nodes);
    for (const GraphEdge& e : graph.edges)
        if (edge_difference_norm(u_hat, graph.mode, e.i, e.j) <= threshold) uf.unite(e.i, e.j);

    Partition p;
    p.mode = graph.mode;
    p.labels.assign(n_nodes, -1);
    std::vector<int> root_label(n_nodes, -1);
    int next = 0;
    for (std::size_t v = 0; v < n_nodes; ++v) {
        const std::size_t r = uf.find(v);
        if (root_label[r] < 0) root_label[r] = next++;
        p.labels[v] = root_label[r];
    }
    p.n_clusters = static_cast<std::size_t>(next);
    return p;
}

std::vector<Partition> extract_clusters(const Tensor& u_hat, const std::vector<ModeGraph>& graphs,
                                        double fuse_tol, double scale) {
    std::vector<Partition> out;
    out.reserve(graphs.size());
    for (const ModeGraph& g : graphs)
        out.push_back(extract_mode_clusters(u_hat, g, fuse_tol, scale));
    return out;
}

bool fully_coalesced(const std::vector<Partition>& partitions) {
    for (const Partition& p : partitions)
        if (p.n_clusters != 1) return false;
    return true;
}

double ebic(double rss, std::size_t n, double df) {
    if (rss < 0.0 || n < 1 || df < 1.0) throw std::invalid_argument("ebic: bad arguments");
    const double nn = static_cast<double>(n);
    const double floor = std::numeric_limits<double>::epsilon() * nn;
    const double r = std::max(rss, floor);
    return nn * std::log(r / nn) + 2.0 * df * std::log(nn);
}

std::vector<double> gamma_grid(double gamma_min, double gamma_max, std::size_t count) {
    if (!(gamma_min >= 0.0) || !(gamma_min < gamma_max) || count < 2)
        throw std::invalid_argument("gamma_grid: need 0 <= gamma_min < gamma_max and count >= 2");

    std::vector<double> grid;
    grid.reserve(count);
    if (gamma_min > 0.0) {
        const double lo = std::log(gamma_min), hi = std::log(gamma_max);
        for (std::size_t i = 0; i < count; ++i)
            grid.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                             static_cast<double>(count - 1)));
    } else {
        grid.push_back(0.0);
        const std::size_t k = count - 1;
        for (std::size_t i = 0; i < k; ++i)
            grid.push_back(gamma_max *
                           std::pow(10.0, -static_cast<double>(k - 1 - i)));
    }
    grid.front() = gamma_min;
    grid.back() = gamma_max;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("gamma_grid: grid is not strictly increasing");
    return grid;
}

namespace {

struct Probe {
    bool coalesced = false;
    std::vector<std::vector<int>> labels;
    double rss = 0.0;
};

Probe probe_at(const Tensor& x, const std::vector<ModeGraph>& graphs, double gamma,
               const PathConfig& config, DualState* warm) {
    const DualState* start = (warm != nullptr && !warm->values.empty()) ? warm : nullptr;
    SolveResult r = solve(x, graphs, gamma, config.solver, start);
    const double scale = frobenius_norm(x) / std::sqrt(static_cast<double>(x.size()));
    const auto parts = extract_clusters(r.u_hat, graphs, config.fuse_tol, scale);
    Probe p;
    p.coalesced = fully_coalesced(parts);
    for (const auto& part : parts) p.labels.push_back(part.labels);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x.data()[i] - r.u_hat.data()[i];
        p.rss += d * d;
    }
    if (warm != nullptr) *warm = std::move(r.dual);
    return p;
}

}  // namespace

double find_gamma_max(const Tensor& x, const std::vector<ModeGraph>& graphs,
                      const PathConfig& path_config) {
    // The budget only needs factor-two resolution; probe at a looser gap.
    PathConfig config = path_config;
    config.solver.gap_tol = std::max(config.solver.gap_tol, 1e-9);

    DualState warm;
    double gamma = 1.0;
    if (probe_at(x, graphs, gamma, config, nullptr).coalesced) {
        // Walk down to bracket the coalescence point from above.
        while (gamma > 1e-8 && probe_at(x, graphs, gamma / 2.0, config, nullptr).coalesced)
            gamma /= 2.0;
        return gamma;
    }
    // Double until coalescence. Gaussian kernel weights can make some edges
    // numerically unfusable (their weights underflow), so the walk also
    // stops once nothing moves across two consecutive doublings and calls
    // that the budget.
    Probe prev;
    int stable = 0;
    while (gamma < 1e12) {
        gamma *= 2.0;
        Probe p = probe_at(x, graphs, gamma, config, &warm);
        if (p.coalesced) return gamma;
        const bool same = p.labels == prev.labels &&
                          std::abs(p.rss - prev.rss) <= 1e-10 * std::max(1.0, prev.rss);
        if (same && ++stable >= 2) return gamma;
        if (!same) stable = 0;
        prev = std::move(p);
    }
    return 1e12;  // capped budget; the path ends at gamma_max_budget
}

std::vector<double> default_gamma_grid(const Tensor& x, const std::vector<ModeGraph>& graphs,
                                       std::size_t count, const PathConfig& config) {
    const double gamma_max = find_gamma_max(x, graphs, config);
    if (count < 2) throw std::invalid_argument("default_gamma_grid: count must be >= 2");
    std::vector<double> grid{0.0};
    const std::size_t k = count - 1;
    const double lo = std::log(gamma_max) - 4.0 * std::log(10.0);  // four decades
    const double hi = std::log(gamma_max);
    for (std::size_t i = 0; i < k; ++i)
        grid.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                         static_cast<double>(std::max<std::size_t>(k - 1, 1))));
    grid.back() = gamma_max;
    return grid;
}

SolutionPath solve_path(const Tensor& x, const std::vector<ModeGraph>& graphs,
                        const std::vector<double>& grid, const PathConfig& config) {
    if (grid.empty()) throw std::invalid_argument("solve_path: empty gamma grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("solve_path: grid must be strictly increasing");

    const std::size_t n = x.size();
    const double scale = frobenius_norm(x) / std::sqrt(static_cast<double>(n));

    SolutionPath path;
    DualState warm;
    bool have_warm = false;

    for (double gamma : grid) {
        SolveResult r = solve(x, graphs, gamma, config.solver,
                              (config.warm_start && have_warm) ? &warm : nullptr);

        SolutionPoint pt;
        pt.gamma = gamma;
        pt.partitions = extract_clusters(r.u_hat, graphs, config.fuse_tol, scale);
        pt.co_cluster_count = 1;
        for (const Partition& p : pt.partitions) pt.co_cluster_count *= p.n_clusters;
        double rss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = x.data()[i] - r.u_hat.data()[i];
            rss += d * d;
        }
        pt.rss = rss;
        pt.ebic = ebic(rss, n, static_cast<double>(pt.co_cluster_count));
        pt.gap = r.gap;
        pt.iterations = r.iterations;
        pt.u_hat = std::move(r.u_hat);
        const bool done = config.stop_when_coalesced && fully_coalesced(pt.partitions);
        path.points.push_back(std::move(pt));

        warm = std::move(r.dual);
        have_warm = true;
        if (done) break;
    }

    // Saturated candidates (one co-cluster per element, df == n) interpolate
    // the data and are excluded from selection unless nothing else exists.
    std::size_t best = path.points.size();
    for (std::size_t i = 0; i < path.points.size(); ++i) {
        if (path.points[i].co_cluster_count >= n) continue;
        if (best == path.points.size() || path.points[i].ebic < path.points[best].ebic) best = i;
    }
    if (best == path.points.size()) {
        best = 0;
        for (std::size_t i = 1; i < path.points.size(); ++i)
            if (path.points[i].ebic < path.points[best].ebic) best = i;
    }
    path.selected = best;
    return path;
}

void write_path_csv(std::ostream& out, const SolutionPath& path, std::size_t order) {
    out << "gamma,rss,df,ebic,gap,iters";
    for (std::size_t d = 0; d < order; ++d) out << ",k_mode_" << d + 1;
    out << '\n';
    for (const SolutionPoint& pt : path.points) {
        out << pt.gamma << ',' << pt.rss << ',' << pt.co_cluster_count << ',' << pt.ebic << ','
            << pt.gap << ',' << pt.iterations;
        for (const Partition& p : pt.partitions) out << ',' << p.n_clusters;
        out << '\n';
    }
}

}  // namespace coco
