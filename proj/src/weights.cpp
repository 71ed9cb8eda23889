#include "coco/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "coco/union_find.hpp"

namespace coco {

Eigen::MatrixXd mode_distances_squared(const Tensor& xt, std::size_t mode) {
    const Matricization m = matricize(xt, mode);
    const auto rows = m.matrix();
    const Eigen::VectorXd sq = rows.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = sq.replicate(1, rows.rows()) + sq.transpose().replicate(rows.rows(), 1);
    d2.noalias() -= 2.0 * (rows * rows.transpose());
    d2 = d2.cwiseMax(0.0);
    d2.diagonal().setZero();
    return d2;
}

std::vector<std::pair<std::size_t, std::size_t>> knn_edges(const Eigen::MatrixXd& dist2,
                                                           std::size_t k) {
    const std::size_t n = static_cast<std::size_t>(dist2.rows());
    if (k < 1) throw std::invalid_argument("knn_edges: k must be >= 1");

    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) order.push_back(j);
        const std::size_t take = std::min(k, order.size());
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                          order.end(), [&](std::size_t a, std::size_t b) {
                              if (dist2(i, a) != dist2(i, b)) return dist2(i, a) < dist2(i, b);
                              return a < b;
                          });
        for (std::size_t t = 0; t < take; ++t) {
            const std::size_t j = order[t];
            edges.emplace_back(std::min(i, j), std::max(i, j));
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

std::vector<std::pair<std::size_t, std::size_t>> knn_edges(const Tensor& xt, std::size_t mode,
                                                           std::size_t k) {
    return knn_edges(mode_distances_squared(xt, mode), k);
}

bool is_connected(std::size_t n_nodes,
                  const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    if (n_nodes <= 1) return true;
    UnionFind uf(n_nodes);
    for (const auto& [i, j] : edges) uf.unite(i, j);
    return uf.components() == 1;
}

std::pair<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>> ensure_connected(
    const Tensor& xt, std::size_t mode, std::size_t k_start) {
    const std::size_t n = xt.dim(mode);
    if (n <= 1) return {k_start, {}};
    const Eigen::MatrixXd d2 = mode_distances_squared(xt, mode);
    for (std::size_t k = std::max<std::size_t>(k_start, 1);; ++k) {
        auto edges = knn_edges(d2, k);
        if (is_connected(n, edges)) return {k, std::move(edges)};
        // k = n-1 is the complete graph, always connected.
    }
}

double median_bandwidth(const Eigen::MatrixXd& dist2,
                        const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    if (edges.empty()) throw std::invalid_argument("median_bandwidth: empty edge set");
    std::vector<double> d2;
    d2.reserve(edges.size());
    for (const auto& [i, j] : edges) d2.push_back(dist2(static_cast<Eigen::Index>(i),
                                                        static_cast<Eigen::Index>(j)));
    std::sort(d2.begin(), d2.end());
    const std::size_t m = d2.size();
    const double median = (m % 2 == 1) ? d2[m / 2] : 0.5 * (d2[m / 2 - 1] + d2[m / 2]);
    return median > 0.0 ? 1.0 / median : 0.0;
}

std::vector<double> gaussian_preweights(const Eigen::MatrixXd& dist2,
                                        const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                        double tau) {
    if (tau < 0.0) throw std::invalid_argument("gaussian_preweights: tau must be >= 0");
    std::vector<double> pre;
    pre.reserve(edges.size());
    for (const auto& [i, j] : edges) {
        const double w = std::exp(-tau * dist2(static_cast<Eigen::Index>(i),
                                               static_cast<Eigen::Index>(j)));
        pre.push_back(std::max(w, std::numeric_limits<double>::min()));
    }
    return pre;
}

ModeGraph normalize_mode_weights(const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                 const std::vector<double>& preweights, std::size_t mode,
                                 const std::vector<std::size_t>& dims) {
    if (edges.size() != preweights.size())
        throw std::invalid_argument("normalize_mode_weights: edge/pre-weight count mismatch");
    double total = 0.0;
    for (double w : preweights) {
        if (w < 0.0) throw std::invalid_argument("normalize_mode_weights: negative pre-weight");
        total += w;
    }
    if (!edges.empty() && total <= 0.0)
        throw std::invalid_argument("normalize_mode_weights: all pre-weights are zero");

    std::size_t n = 1;
    for (std::size_t d : dims) n *= d;
    const double target = std::sqrt(static_cast<double>(dims.at(mode)) / static_cast<double>(n));

    ModeGraph g;
    g.mode = mode;
    g.n_nodes = dims[mode];
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const double w = preweights[e] * target / total;
        if (w > 0.0) g.edges.push_back({edges[e].first, edges[e].second, w});
    }
    return g;
}

std::vector<ModeGraph> build_mode_graphs(const Tensor& xtilde, const WeightConfig& config) {
    if (config.k_neighbors < 1)
        throw std::invalid_argument("build_mode_graphs: k_neighbors must be >= 1");
    std::vector<ModeGraph> graphs;
    graphs.reserve(xtilde.order());
    for (std::size_t d = 0; d < xtilde.order(); ++d) {
        if (xtilde.dim(d) <= 1) {
            graphs.push_back({d, xtilde.dim(d), {}});
            continue;
        }
        const Eigen::MatrixXd d2 = mode_distances_squared(xtilde, d);
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (std::size_t k = config.k_neighbors;; ++k) {
            edges = knn_edges(d2, k);
            if (is_connected(xtilde.dim(d), edges)) break;
        }
        double tau = 0.0;
        switch (config.bandwidth) {
            case BandwidthMode::MedianHeuristic:
                tau = median_bandwidth(d2, edges);
                break;
            case BandwidthMode::Fixed:
                if (config.fixed_tau.size() != xtilde.order())
                    throw std::invalid_argument("build_mode_graphs: fixed_tau needs one value per mode");
                tau = config.fixed_tau[d];
                break;
            case BandwidthMode::Uniform:
                tau = 0.0;
                break;
        }
        const auto pre = gaussian_preweights(d2, edges, tau);
        graphs.push_back(normalize_mode_weights(edges, pre, d, xtilde.dims()));
    }
    return graphs;
}

void write_graphs_csv(std::ostream& out, const std::vector<ModeGraph>& graphs) {
    out << "mode,i,j,weight\n";
    for (const auto& g : graphs)
        for (const auto& e : g.edges)
            out << g.mode + 1 << ',' << e.i + 1 << ',' << e.j + 1 << ',' << e.weight << '\n';
}

}  // namespace coco
