#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace coco {

/// Hubert-Arabie adjusted Rand index in [-1, 1]. Label values are arbitrary
/// nonnegative ids; only the induced partitions matter. Degenerate cases with
/// a zero denominator (e.g. both partitions a single cluster) return 1.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

/// Variation of information H(a) + H(b) - 2 I(a;b) in nats; 0 iff the
/// partitions agree, and a metric on the space of partitions.
double variation_of_information(std::span<const int> a, std::span<const int> b);

inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    return adjusted_rand_index(std::span<const int>(a), std::span<const int>(b));
}
inline double variation_of_information(const std::vector<int>& a, const std::vector<int>& b) {
    return variation_of_information(std::span<const int>(a), std::span<const int>(b));
}

}  // namespace coco
