#include "coco/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/SVD>

#include "coco/decomp.hpp"

namespace coco {

namespace {

std::vector<int> canonical_labels(const std::vector<int>& labels) {
    std::vector<int> remap(labels.size(), -1);
    std::vector<int> out(labels.size());
    int next = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (remap[labels[i]] < 0) remap[labels[i]] = next++;
        out[i] = remap[labels[i]];
    }
    return out;
}

struct LloydRun {
    std::vector<int> labels;
    Eigen::MatrixXd centroids;
    double wcss = 0.0;
    std::size_t iterations = 0;
    std::vector<double> history;
};

double assign_points(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centroids,
                     std::vector<int>& labels) {
    double wcss = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
            const double d = (points.row(i) - centroids.row(c)).squaredNorm();
            if (d < best) {
                best = d;
                arg = static_cast<int>(c);
            }
        }
        labels[static_cast<std::size_t>(i)] = arg;
        wcss += best;
    }
    return wcss;
}

Eigen::MatrixXd plusplus_init(const Eigen::MatrixXd& points, std::size_t k,
                              std::mt19937_64& rng) {
    const Eigen::Index n = points.rows();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::MatrixXd centroids(static_cast<Eigen::Index>(k), points.cols());

    std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
    centroids.row(0) = points.row(first(rng));

    Eigen::VectorXd dist2 = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
    for (std::size_t c = 1; c < k; ++c) {
        const double total = dist2.sum();
        Eigen::Index chosen = 0;
        if (total > 0.0) {
            const double target = unif(rng) * total;
            double cum = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                cum += dist2(i);
                if (cum >= target) {
                    chosen = i;
                    break;
                }
            }
        } else {
            std::uniform_int_distribution<Eigen::Index> any(0, n - 1);
            chosen = any(rng);
        }
        centroids.row(static_cast<Eigen::Index>(c)) = points.row(chosen);
        dist2 = dist2.cwiseMin(
            (points.rowwise() - centroids.row(static_cast<Eigen::Index>(c))).rowwise().squaredNorm());
    }
    return centroids;
}

LloydRun lloyd(const Eigen::MatrixXd& points, std::size_t k, std::mt19937_64& rng,
               std::size_t max_iter) {
    const Eigen::Index n = points.rows();
    LloydRun run;
    run.centroids = plusplus_init(points, k, rng);
    run.labels.assign(static_cast<std::size_t>(n), 0);

    std::vector<int> prev;
    for (std::size_t it = 0; it < max_iter; ++it) {
        run.wcss = assign_points(points, run.centroids, run.labels);
        run.iterations = it + 1;

        // Repair empty clusters with the farthest point before updating.
        std::vector<Eigen::Index> counts(k, 0);
        for (int l : run.labels) counts[static_cast<std::size_t>(l)] += 1;
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            Eigen::Index far = 0;
            double far_d = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double d =
                    (points.row(i) - run.centroids.row(run.labels[static_cast<std::size_t>(i)]))
                        .squaredNorm();
                if (d > far_d && counts[static_cast<std::size_t>(
                                     run.labels[static_cast<std::size_t>(i)])] > 1) {
                    far_d = d;
                    far = i;
                }
            }
            counts[static_cast<std::size_t>(run.labels[static_cast<std::size_t>(far)])] -= 1;
            run.labels[static_cast<std::size_t>(far)] = static_cast<int>(c);
            counts[c] = 1;
        }

        run.centroids.setZero();
        for (Eigen::Index i = 0; i < n; ++i)
            run.centroids.row(run.labels[static_cast<std::size_t>(i)]) += points.row(i);
        for (std::size_t c = 0; c < k; ++c)
            if (counts[c] > 0)
                run.centroids.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(counts[c]);

        run.wcss = assign_points(points, run.centroids, run.labels);
        run.history.push_back(run.wcss);
        if (prev == run.labels) break;
        prev = run.labels;
    }
    return run;
}

double log_wcss(double wcss) {
    return std::log(std::max(wcss, 1e-300));
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, std::size_t k, std::uint64_t seed,
                    std::size_t restarts, std::size_t max_iter) {
    const auto n = static_cast<std::size_t>(points.rows());
    if (k < 1 || k > n) throw std::invalid_argument("kmeans: need 1 <= k <= n");

    std::mt19937_64 rng(seed);
    LloydRun best;
    best.wcss = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
        LloydRun run = lloyd(points, k, rng, max_iter);
        if (run.wcss < best.wcss) best = std::move(run);
    }

    KMeansResult out;
    out.labels = canonical_labels(best.labels);
    out.wcss = best.wcss;
    out.iterations = best.iterations;
    out.wcss_history = std::move(best.history);
    // Reorder centroids to match the canonical labels.
    out.centroids = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), points.cols());
    std::vector<int> seen(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const int canon = out.labels[i];
        if (!seen[static_cast<std::size_t>(canon)]) {
            out.centroids.row(canon) = best.centroids.row(best.labels[i]);
            seen[static_cast<std::size_t>(canon)] = 1;
        }
    }
    return out;
}

std::size_t gap_statistic(const Eigen::MatrixXd& points,
                          const std::vector<std::size_t>& k_candidates, std::size_t b_refs,
                          std::uint64_t seed) {
    if (k_candidates.empty()) throw std::invalid_argument("gap_statistic: no k candidates");
    if (b_refs < 1) throw std::invalid_argument("gap_statistic: need at least one reference draw");
    for (std::size_t i = 1; i < k_candidates.size(); ++i)
        if (k_candidates[i] <= k_candidates[i - 1])
            throw std::invalid_argument("gap_statistic: candidates must be increasing");

    const Eigen::Index n = points.rows(), p = points.cols();

    // References are uniform over the bounding box in the principal-component
    // frame (the rotated variant of the method), which keeps the reference's
    // effective dimension aligned with the data when clusters are tight.
    const Eigen::RowVectorXd center = points.colwise().mean();
    const Eigen::MatrixXd centered = points.rowwise() - center;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    const Eigen::MatrixXd v = svd.matrixV();
    const Eigen::MatrixXd rotated = centered * v;
    const Eigen::VectorXd lo = rotated.colwise().minCoeff();
    const Eigen::VectorXd hi = rotated.colwise().maxCoeff();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Eigen::MatrixXd> refs(b_refs);
    Eigen::MatrixXd draw(n, p);
    for (auto& ref : refs) {
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < p; ++j)
                draw(i, j) = lo(j) + (hi(j) - lo(j)) * unif(rng);
        ref = (draw * v.transpose()).rowwise() + center;
    }

    const std::size_t restarts = 5;
    std::vector<double> gap(k_candidates.size()), sk(k_candidates.size());
    for (std::size_t t = 0; t < k_candidates.size(); ++t) {
        const std::size_t k = k_candidates[t];
        if (k > static_cast<std::size_t>(n)) {
            gap[t] = -std::numeric_limits<double>::infinity();
            sk[t] = 0.0;
            continue;
        }
        const double data_log = log_wcss(kmeans(points, k, seed + 17 * k, restarts).wcss);
        double mean = 0.0, sq = 0.0;
        for (std::size_t b = 0; b < b_refs; ++b) {
            const double lw = log_wcss(kmeans(refs[b], k, seed + 31 * k + b, restarts).wcss);
            mean += lw;
            sq += lw * lw;
        }
        mean /= static_cast<double>(b_refs);
        const double var = std::max(0.0, sq / static_cast<double>(b_refs) - mean * mean);
        gap[t] = mean - data_log;
        sk[t] = std::sqrt(var) * std::sqrt(1.0 + 1.0 / static_cast<double>(b_refs));
    }

    for (std::size_t t = 0; t + 1 < k_candidates.size(); ++t)
        if (gap[t] >= gap[t + 1] - sk[t + 1]) return k_candidates[t];
    return k_candidates.back();
}

CpdKmeansResult cpd_kmeans(const Tensor& x, const std::vector<std::size_t>& rank_candidates,
                           const std::vector<std::size_t>& k_candidates, std::uint64_t seed) {
    if (rank_candidates.empty() || k_candidates.empty())
        throw std::invalid_argument("cpd_kmeans: empty candidate sets");

    CpdKmeansResult out;
    std::vector<CpModel> models;
    models.reserve(rank_candidates.size());
    for (std::size_t r : rank_candidates) {
        models.push_back(cp_als(x, r, 200, 1e-10, seed + r));
        out.rank_fits.push_back(models.back().fit);
    }

    // Smallest rank whose relative fit improvement over its predecessor
    // drops under 5%; fall back to the largest candidate otherwise.
    std::size_t chosen = rank_candidates.size() - 1;
    for (std::size_t t = 1; t < rank_candidates.size(); ++t) {
        const double prev = std::max(out.rank_fits[t - 1], 1e-12);
        if ((out.rank_fits[t] - out.rank_fits[t - 1]) / prev < 0.05) {
            chosen = t;
            break;
        }
    }
    out.rank = rank_candidates[chosen];
    const CpModel& model = models[chosen];

    for (std::size_t d = 0; d < x.order(); ++d) {
        std::vector<std::size_t> feasible;
        for (std::size_t k : k_candidates)
            if (k <= x.dim(d)) feasible.push_back(k);
        if (feasible.empty()) feasible.push_back(1);

        const std::size_t k = gap_statistic(model.factors[d], feasible, 20, seed + 101 * (d + 1));
        KMeansResult km = kmeans(model.factors[d], k, seed + 211 * (d + 1));
        Partition p;
        p.mode = d;
        p.labels = std::move(km.labels);
        p.n_clusters = k;
        out.partitions.push_back(std::move(p));
        out.k_selected.push_back(k);
    }
    return out;
}

}  // namespace coco
