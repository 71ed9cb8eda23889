#include "coco/tensor.hpp"

#include <cmath>

namespace coco {

Matricization matricize(const Tensor& t, std::size_t mode) {
    const auto& dims = t.dims();
    if (mode >= dims.size()) throw std::out_of_range("matricize: mode out of range");

    Matricization m;
    m.mode = mode;
    m.rows = dims[mode];
    m.cols = t.codim(mode);
    m.data.resize(t.size());

    const std::size_t stride = t.stride(mode);
    const std::size_t nd = dims[mode];
    const std::size_t outer = t.size() / (stride * nd);
    const double* src = t.data().data();
    double* dst = m.data.data();

    // Column c = o*stride + inner pairs with flat offset (o*nd + i)*stride + inner.
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < nd; ++i) {
            const double* s = src + (o * nd + i) * stride;
            for (std::size_t inner = 0; inner < stride; ++inner)
                dst[(o * stride + inner) * nd + i] = s[inner];
        }
    return m;
}

Tensor dematricize(const Matricization& m, std::vector<std::size_t> dims) {
    if (m.mode >= dims.size()) throw std::invalid_argument("dematricize: mode out of range");
    dims[m.mode] = m.rows;
    Tensor t(std::move(dims));
    if (t.size() != m.rows * m.cols)
        throw std::invalid_argument("dematricize: dims do not match matricization");

    const std::size_t stride = t.stride(m.mode);
    const std::size_t nd = m.rows;
    const std::size_t outer = t.size() / (stride * nd);
    const double* src = m.data.data();
    double* dst = t.data().data();

    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < nd; ++i) {
            double* d = dst + (o * nd + i) * stride;
            for (std::size_t inner = 0; inner < stride; ++inner)
                d[inner] = src[(o * stride + inner) * nd + i];
        }
    return t;
}

Tensor mode_product(const Tensor& t, std::size_t mode, const Eigen::MatrixXd& b) {
    const auto& dims = t.dims();
    if (mode >= dims.size()) throw std::out_of_range("mode_product: mode out of range");
    if (static_cast<std::size_t>(b.cols()) != dims[mode])
        throw std::invalid_argument("mode_product: matrix column count does not match mode size");

    if (mode == 0) {
        // The stored layout is the mode-0 matricization; multiply in place.
        std::vector<std::size_t> out_dims = dims;
        out_dims[0] = static_cast<std::size_t>(b.rows());
        Tensor out(out_dims);
        Eigen::Map<const Eigen::MatrixXd> src(t.data().data(),
                                              static_cast<Eigen::Index>(dims[0]),
                                              static_cast<Eigen::Index>(t.codim(0)));
        Eigen::Map<Eigen::MatrixXd> dst(out.data().data(), b.rows(),
                                        static_cast<Eigen::Index>(t.codim(0)));
        dst.noalias() = b * src;
        return out;
    }

    Matricization m = matricize(t, mode);
    Matricization r;
    r.mode = mode;
    r.rows = static_cast<std::size_t>(b.rows());
    r.cols = m.cols;
    r.data.resize(r.rows * r.cols);
    Eigen::Map<Eigen::MatrixXd> dst(r.data.data(), b.rows(), static_cast<Eigen::Index>(r.cols));
    dst.noalias() = b * m.matrix();
    return dematricize(r, t.dims());
}

double frobenius_norm(const Tensor& t) {
    // Two-pass scaled norm, same guarantees as std::hypot for long vectors.
    double maxabs = 0.0;
    for (double v : t.data()) maxabs = std::max(maxabs, std::abs(v));
    if (maxabs == 0.0) return 0.0;
    double sum = 0.0;
    for (double v : t.data()) {
        const double s = v / maxabs;
        sum += s * s;
    }
    return maxabs * std::sqrt(sum);
}

double grand_mean(const Tensor& t) {
    double sum = 0.0;
    for (double v : t.data()) sum += v;
    return sum / static_cast<double>(t.size());
}

Tensor constant_like(const Tensor& t, double value) {
    Tensor out(t.dims());
    std::fill(out.data().begin(), out.data().end(), value);
    return out;
}

}  // namespace coco
