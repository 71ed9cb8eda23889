#pragma once

#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace coco {

/// Dense D-way tensor of doubles.
///
/// Storage is the column-major vectorization of the mode-0 matricization:
/// element (i_0, ..., i_{D-1}) lives at flat offset
///   i_0 + i_1*n_0 + i_2*n_0*n_1 + ...
/// All indices in the C++ API are 0-based. A Tensor is safe to share across
/// threads as long as it is only accessed through const methods.
class Tensor {
public:
    Tensor() = default;

    /// Zero-filled tensor with the given mode sizes.
    explicit Tensor(std::vector<std::size_t> dims)
        : dims_(std::move(dims)), data_(checked_size(dims_), 0.0) {}

    Tensor(std::vector<std::size_t> dims, std::vector<double> data)
        : dims_(std::move(dims)), data_(std::move(data)) {
        if (data_.size() != checked_size(dims_))
            throw std::invalid_argument("Tensor: data length does not match dims");
    }

    std::size_t order() const { return dims_.size(); }
    std::size_t size() const { return data_.size(); }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t dim(std::size_t d) const { return dims_.at(d); }

    /// Product of all mode sizes except mode d (n_{-d}).
    std::size_t codim(std::size_t d) const {
        check_mode(d);
        return data_.size() / dims_[d];
    }

    /// Flat stride of mode d: product of the sizes of all lower modes.
    std::size_t stride(std::size_t d) const {
        check_mode(d);
        std::size_t s = 1;
        for (std::size_t j = 0; j < d; ++j) s *= dims_[j];
        return s;
    }

    std::size_t offset(std::span<const std::size_t> idx) const {
        if (idx.size() != dims_.size())
            throw std::invalid_argument("Tensor: index arity mismatch");
        std::size_t off = 0, s = 1;
        for (std::size_t d = 0; d < dims_.size(); ++d) {
            if (idx[d] >= dims_[d]) throw std::out_of_range("Tensor: index out of range");
            off += idx[d] * s;
            s *= dims_[d];
        }
        return off;
    }

    double operator[](std::size_t flat) const { return data_[flat]; }
    double& operator[](std::size_t flat) { return data_[flat]; }

    double at(std::initializer_list<std::size_t> idx) const {
        return data_[offset(std::span<const std::size_t>(idx.begin(), idx.size()))];
    }
    double& at(std::initializer_list<std::size_t> idx) {
        return data_[offset(std::span<const std::size_t>(idx.begin(), idx.size()))];
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    static std::size_t checked_size(const std::vector<std::size_t>& dims) {
        if (dims.empty()) throw std::invalid_argument("Tensor: order must be >= 1");
        std::size_t n = 1;
        for (std::size_t d : dims) {
            if (d == 0) throw std::invalid_argument("Tensor: every mode size must be >= 1");
            if (d != 0 && n > std::numeric_limits<std::size_t>::max() / d)
                throw std::invalid_argument("Tensor: size overflow");
            n *= d;
        }
        return n;
    }
    void check_mode(std::size_t d) const {
        if (d >= dims_.size()) throw std::out_of_range("Tensor: mode out of range");
    }

    std::vector<std::size_t> dims_;
    std::vector<double> data_;
};

/// Mode-d matricization: mode-d fibers become matrix columns, stored
/// column-major. Column c enumerates the remaining indices with lower
/// modes varying fastest.
struct Matricization {
    std::size_t mode = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // column-major, rows*cols entries

    Eigen::Map<const Eigen::MatrixXd> matrix() const {
        return {data.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
    }
};

/// Flat view of the stored layout; ||vectorize(T)||_2 == frobenius_norm(T).
inline std::span<const double> vectorize(const Tensor& t) {
    return {t.data().data(), t.data().size()};
}

Matricization matricize(const Tensor& t, std::size_t mode);

/// Inverse of matricize. dims must agree with m everywhere, except that
/// dims[m.mode] is taken from m.rows (so mode products can change it).
Tensor dematricize(const Matricization& m, std::vector<std::size_t> dims);

/// T x_d B for B with B.cols() == n_d; the result has mode-d size B.rows().
Tensor mode_product(const Tensor& t, std::size_t mode, const Eigen::MatrixXd& b);

double frobenius_norm(const Tensor& t);
double grand_mean(const Tensor& t);

/// Tensor filled with a single value, matching the dims of a reference.
Tensor constant_like(const Tensor& t, double value);

}  // namespace coco
