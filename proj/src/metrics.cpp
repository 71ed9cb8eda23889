#include "coco/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace coco {

namespace {

// Compact labels to 0..k-1 in first-appearance order.
std::vector<int> compact(std::span<const int> labels, int& k) {
    std::unordered_map<int, int> ids;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = ids.try_emplace(labels[i], static_cast<int>(ids.size()));
        out[i] = it->second;
    }
    k = static_cast<int>(ids.size());
    return out;
}

double choose2(double m) { return m * (m - 1.0) / 2.0; }

struct Contingency {
    std::vector<double> cells;  // ka x kb, row-major
    std::vector<double> a_sizes;
    std::vector<double> b_sizes;
    int ka = 0, kb = 0;
};

Contingency contingency(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("clustering metrics: label vectors differ in length");
    if (a.empty()) throw std::invalid_argument("clustering metrics: empty label vectors");
    Contingency c;
    std::vector<int> ca = compact(a, c.ka);
    std::vector<int> cb = compact(b, c.kb);
    c.cells.assign(static_cast<std::size_t>(c.ka) * c.kb, 0.0);
    c.a_sizes.assign(c.ka, 0.0);
    c.b_sizes.assign(c.kb, 0.0);
    for (std::size_t i = 0; i < ca.size(); ++i) {
        c.cells[static_cast<std::size_t>(ca[i]) * c.kb + cb[i]] += 1.0;
        c.a_sizes[ca[i]] += 1.0;
        c.b_sizes[cb[i]] += 1.0;
    }
    return c;
}

}  // namespace

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
    const Contingency c = contingency(a, b);
    const double n = static_cast<double>(a.size());

    double sum_cells = 0.0;
    for (double v : c.cells) sum_cells += choose2(v);
    double sum_a = 0.0;
    for (double v : c.a_sizes) sum_a += choose2(v);
    double sum_b = 0.0;
    for (double v : c.b_sizes) sum_b += choose2(v);

    const double total = choose2(n);
    if (total == 0.0) return 1.0;  // single item
    const double expected = sum_a * sum_b / total;
    const double denom = 0.5 * (sum_a + sum_b) - expected;
    if (denom == 0.0) return 1.0;  // both partitions trivial
    return (sum_cells - expected) / denom;
}

double variation_of_information(std::span<const int> a, std::span<const int> b) {
    const Contingency c = contingency(a, b);
    const double n = static_cast<double>(a.size());

    auto entropy = [n](const std::vector<double>& sizes) {
        double h = 0.0;
        for (double v : sizes)
            if (v > 0.0) h -= (v / n) * std::log(v / n);
        return h;
    };
    double mutual = 0.0;
    for (int i = 0; i < c.ka; ++i)
        for (int j = 0; j < c.kb; ++j) {
            const double nij = c.cells[static_cast<std::size_t>(i) * c.kb + j];
            if (nij > 0.0)
                mutual += (nij / n) * std::log(nij * n / (c.a_sizes[i] * c.b_sizes[j]));
        }
    const double vi = entropy(c.a_sizes) + entropy(c.b_sizes) - 2.0 * mutual;
    return vi < 0.0 ? 0.0 : vi;  // clamp rounding noise at exact agreement
}

}  // namespace coco
