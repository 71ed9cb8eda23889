#include "coco/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace coco {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<std::size_t> cluster_sizes(std::size_t n, std::size_t k,
                                       const std::vector<double>& fractions) {
    if (k < 1 || k > n) throw std::invalid_argument("gen_checkerbox: need 1 <= k_d <= n_d");
    std::vector<std::size_t> sizes(k);
    if (fractions.empty()) {
        // Balanced: floor(n/k) each, remainder spread over the first clusters.
        for (std::size_t c = 0; c < k; ++c) sizes[c] = n / k + (c < n % k ? 1 : 0);
        return sizes;
    }
    if (fractions.size() != k)
        throw std::invalid_argument("gen_checkerbox: need one fraction per cluster");
    double total = 0.0;
    for (double f : fractions) {
        if (!(f > 0.0)) throw std::invalid_argument("gen_checkerbox: fractions must be positive");
        total += f;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("gen_checkerbox: fractions must sum to 1");

    // Largest-remainder apportionment.
    std::vector<double> remainder(k);
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < k; ++c) {
        const double target = fractions[c] * static_cast<double>(n);
        sizes[c] = static_cast<std::size_t>(std::floor(target + 1e-12));
        remainder[c] = target - static_cast<double>(sizes[c]);
        assigned += sizes[c];
    }
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t t = 0; assigned < n; ++t, ++assigned) sizes[order[t % k]] += 1;
    for (std::size_t s : sizes)
        if (s == 0) throw std::invalid_argument("gen_checkerbox: a cluster would be empty");
    return sizes;
}

std::vector<double> sample_block_means(std::size_t count, double separation,
                                       std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, separation);
    std::vector<double> means(count), best(count);
    double best_gap = -1.0;
    const double target = separation / 2.0;
    // The gap target is infeasible for large block counts (the means cannot
    // pack); the best draw seen is kept in that case.
    for (int attempt = 0; attempt < 100000; ++attempt) {
        for (double& m : means) m = gauss(rng);
        double min_gap = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a + 1 < count; ++a)
            for (std::size_t b = a + 1; b < count; ++b)
                min_gap = std::min(min_gap, std::abs(means[a] - means[b]));
        if (count <= 1) min_gap = std::numeric_limits<double>::infinity();
        if (min_gap > best_gap) {
            best_gap = min_gap;
            best = means;
        }
        if (min_gap >= target) break;
    }
    return best;
}

}  // namespace

std::pair<Tensor, GroundTruth> gen_checkerbox(const CheckerboxSpec& spec) {
    const std::size_t order = spec.dims.size();
    if (order == 0) throw std::invalid_argument("gen_checkerbox: empty dims");
    if (spec.clusters.size() != order)
        throw std::invalid_argument("gen_checkerbox: need one cluster count per mode");
    if (!spec.fractions.empty() && spec.fractions.size() != order)
        throw std::invalid_argument("gen_checkerbox: need fractions for every mode or none");
    if (spec.sigma < 0.0) throw std::invalid_argument("gen_checkerbox: sigma must be >= 0");

    std::size_t n_blocks = 1;
    for (std::size_t k : spec.clusters) n_blocks *= k;
    if (!spec.block_means.empty() && spec.block_means.size() != n_blocks)
        throw std::invalid_argument("gen_checkerbox: block_means must cover the cluster grid");
    if (!spec.block_sigma.empty() && spec.block_sigma.size() != n_blocks)
        throw std::invalid_argument("gen_checkerbox: block_sigma must cover the cluster grid");

    std::mt19937_64 rng(spec.seed);

    std::vector<double> means = spec.block_means;
    if (means.empty()) means = sample_block_means(n_blocks, spec.mean_separation, rng);

    GroundTruth truth;
    truth.labels.resize(order);
    for (std::size_t d = 0; d < order; ++d) {
        const auto sizes = cluster_sizes(
            spec.dims[d], spec.clusters[d],
            spec.fractions.empty() ? std::vector<double>{} : spec.fractions[d]);
        auto& lab = truth.labels[d];
        lab.reserve(spec.dims[d]);
        for (std::size_t c = 0; c < sizes.size(); ++c)
            lab.insert(lab.end(), sizes[c], static_cast<int>(c));
        if (spec.shuffle) std::shuffle(lab.begin(), lab.end(), rng);
    }

    truth.block_means = Tensor(std::vector<std::size_t>(spec.clusters), means);
    truth.u_star = Tensor(spec.dims);
    Tensor x(spec.dims);

    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(order, 0);
    for (std::size_t flat = 0; flat < n; ++flat) {
        std::size_t block = 0, bs = 1;
        for (std::size_t d = 0; d < order; ++d) {
            block += static_cast<std::size_t>(truth.labels[d][idx[d]]) * bs;
            bs *= spec.clusters[d];
        }
        const double mean = means[block];
        const double sd = spec.block_sigma.empty() ? spec.sigma : spec.block_sigma[block];
        truth.u_star[flat] = mean;
        x[flat] = mean + sd * gauss(rng);

        for (std::size_t d = 0; d < order; ++d) {
            if (++idx[d] < spec.dims[d]) break;
            idx[d] = 0;
        }
    }
    return {std::move(x), std::move(truth)};
}

std::pair<Tensor, GroundTruth> gen_heteroskedastic(CheckerboxSpec spec, double sigma_ratio) {
    if (!(sigma_ratio > 0.0))
        throw std::invalid_argument("gen_heteroskedastic: sigma ratio must be > 0");
    if (spec.clusters.empty() || spec.clusters.front() < 2)
        throw std::invalid_argument("gen_heteroskedastic: first mode needs >= 2 clusters");
    std::size_t n_blocks = 1;
    for (std::size_t k : spec.clusters) n_blocks *= k;
    spec.block_sigma.assign(n_blocks, spec.sigma);
    // Blocks in the second class of mode 1 carry sigma * ratio.
    for (std::size_t b = 0; b < n_blocks; ++b)
        if (b % spec.clusters.front() == 1) spec.block_sigma[b] = spec.sigma * sigma_ratio;
    return gen_checkerbox(spec);
}

std::vector<std::array<double, 2>> two_shape_points(TwoShape shape, std::size_t n) {
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("gen_cp_two_shape: n must be even and >= 2");
    const std::size_t half = n / 2;
    std::vector<std::array<double, 2>> pts(n);
    auto arc = [&](std::size_t i) {
        return half > 1 ? kPi * static_cast<double>(i) / static_cast<double>(half - 1) : 0.0;
    };
    if (shape == TwoShape::HalfMoons) {
        // Upper unit arc at the origin vs the reflected arc at (1, 0.5).
        for (std::size_t i = 0; i < half; ++i) {
            const double th = arc(i);
            pts[i] = {std::cos(th), std::sin(th)};
            pts[half + i] = {1.0 + std::cos(th), 0.5 - std::sin(th)};
        }
    } else {
        // Concentric circles of radii 1 and 3, angles evenly spaced.
        for (std::size_t i = 0; i < half; ++i) {
            const double th = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(half);
            pts[i] = {std::cos(th), std::sin(th)};
            pts[half + i] = {3.0 * std::cos(th), 3.0 * std::sin(th)};
        }
    }

    // Standardize the two coordinates (zero mean, RMS scaled to 3). Tensor
    // slices see point differences through the factor Gram matrix, so wildly
    // unequal column norms would crush the class separation; standardized
    // columns keep the embedded shapes separated.
    for (int c = 0; c < 2; ++c) {
        double mean = 0.0;
        for (const auto& p : pts) mean += p[static_cast<std::size_t>(c)];
        mean /= static_cast<double>(n);
        double sq = 0.0;
        for (auto& p : pts) {
            p[static_cast<std::size_t>(c)] -= mean;
            sq += p[static_cast<std::size_t>(c)] * p[static_cast<std::size_t>(c)];
        }
        const double rms = std::sqrt(sq / static_cast<double>(n));
        if (rms > 0.0)
            for (auto& p : pts) p[static_cast<std::size_t>(c)] *= 3.0 / rms;
    }
    return pts;
}

std::pair<Tensor, GroundTruth> gen_cp_two_shape(TwoShape shape, std::size_t n, double sigma,
                                                std::uint64_t seed) {
    if (sigma < 0.0) throw std::invalid_argument("gen_cp_two_shape: sigma must be >= 0");
    const auto pts = two_shape_points(shape, n);

    GroundTruth truth;
    truth.u_star = Tensor({n, n, n});
    truth.block_means = Tensor({1});
    truth.labels.assign(3, std::vector<int>(n, 0));
    for (std::size_t d = 0; d < 3; ++d)
        for (std::size_t i = n / 2; i < n; ++i) truth.labels[d][i] = 1;

    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) {
                double v = 0.0;
                for (int r = 0; r < 2; ++r) v += pts[i][r] * pts[j][r] * pts[k][r];
                truth.u_star[i + n * j + n * n * k] = v;
            }
    truth.block_means[0] = grand_mean(truth.u_star);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Tensor x = truth.u_star;
    for (std::size_t f = 0; f < x.size(); ++f) x[f] += sigma * gauss(rng);
    return {std::move(x), std::move(truth)};
}

}  // namespace coco
