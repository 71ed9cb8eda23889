#include "coco/decomp.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace coco {

namespace {

// Leading r eigenvectors of M M^T (descending eigenvalue order). The Gram
// route keeps the eigenproblem at n_d x n_d regardless of n_{-d}.
Eigen::MatrixXd leading_left_singular_vectors(const Eigen::Map<const Eigen::MatrixXd>& m,
                                              std::size_t r) {
    Eigen::MatrixXd gram = m * m.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("tucker_hooi: eigendecomposition failed");
    const Eigen::Index n = gram.rows();
    Eigen::MatrixXd out(n, static_cast<Eigen::Index>(r));
    for (std::size_t c = 0; c < r; ++c)
        out.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(n - 1 - static_cast<Eigen::Index>(c));
    return out;
}

// Khatri-Rao product over all modes except `skip`, matching the
// matricization column order (lower modes vary fastest).
Eigen::MatrixXd khatri_rao_skip(const std::vector<Eigen::MatrixXd>& factors, std::size_t skip) {
    const auto rank = factors.front().cols();
    Eigen::MatrixXd k = Eigen::MatrixXd::Ones(1, rank);
    for (std::size_t d = 0; d < factors.size(); ++d) {
        if (d == skip) continue;
        const Eigen::MatrixXd& f = factors[d];
        Eigen::MatrixXd next(k.rows() * f.rows(), rank);
        for (Eigen::Index r = 0; r < rank; ++r)
            for (Eigen::Index t = 0; t < f.rows(); ++t)
                next.block(t * k.rows(), r, k.rows(), 1) = f(t, r) * k.col(r);
        k.swap(next);
    }
    return k;
}

Eigen::MatrixXd random_unit_columns(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = gauss(rng);
    if (rows >= cols) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
        return qr.householderQ() * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(rows),
                                                             static_cast<Eigen::Index>(cols));
    }
    for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j).normalize();
    return m;
}

}  // namespace

Tensor TuckerModel::reconstruct() const {
    Tensor out = core;
    for (std::size_t d = 0; d < factors.size(); ++d) out = mode_product(out, d, factors[d]);
    return out;
}

Tensor CpModel::reconstruct(const std::vector<std::size_t>& dims) const {
    std::size_t n = 1;
    for (std::size_t d : dims) n *= d;
    Tensor out(dims);
    if (rank == 0) return out;
    Eigen::MatrixXd k = khatri_rao_skip(factors, factors.size());  // skip none
    Eigen::Map<Eigen::VectorXd>(out.data().data(), static_cast<Eigen::Index>(n)) = k * weights;
    return out;
}

std::size_t heuristic_rank(std::size_t n_d) {
    const auto r = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_d)) / 2.0));
    return std::max<std::size_t>(1, r);
}

std::vector<std::size_t> heuristic_ranks(const std::vector<std::size_t>& dims) {
    std::vector<std::size_t> ranks(dims.size());
    for (std::size_t d = 0; d < dims.size(); ++d) ranks[d] = heuristic_rank(dims[d]);
    return ranks;
}

TuckerModel tucker_hooi(const Tensor& t, const std::vector<std::size_t>& ranks,
                        std::size_t max_sweeps, double tol) {
    const std::size_t order = t.order();
    if (ranks.size() != order)
        throw std::invalid_argument("tucker_hooi: need one rank per mode");
    for (std::size_t d = 0; d < order; ++d)
        if (ranks[d] < 1 || ranks[d] > t.dim(d))
            throw std::invalid_argument("tucker_hooi: rank out of range for mode " +
                                        std::to_string(d + 1));

    const double norm_t = frobenius_norm(t);

    TuckerModel model;
    model.factors.resize(order);
    for (std::size_t d = 0; d < order; ++d) {
        const Matricization m = matricize(t, d);
        model.factors[d] = leading_left_singular_vectors(m.matrix(), ranks[d]);
    }

    auto project_core = [&](std::size_t skip) {
        Tensor y = t;
        for (std::size_t d = 0; d < order; ++d) {
            if (d == skip) continue;
            y = mode_product(y, d, model.factors[d].transpose());
        }
        return y;
    };

    double prev_obj = std::numeric_limits<double>::infinity();
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        for (std::size_t d = 0; d < order; ++d) {
            Tensor y = project_core(d);
            const Matricization m = matricize(y, d);
            model.factors[d] = leading_left_singular_vectors(m.matrix(), ranks[d]);
        }
        model.core = project_core(order);  // skip nothing: project every mode
        // Explicit residual; the ||T||^2 - ||core||^2 shortcut cancels badly
        // near exact fits.
        const Tensor recon = model.reconstruct();
        double obj_sq = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double r = t.data()[i] - recon.data()[i];
            obj_sq += r * r;
        }
        const double obj = std::sqrt(obj_sq);
        model.objective_history.push_back(obj);
        if (prev_obj - obj <= tol * std::max(norm_t, 1e-300) && sweep > 0) break;
        prev_obj = obj;
    }

    model.fit = norm_t > 0.0 ? 1.0 - model.objective_history.back() / norm_t : 1.0;
    return model;
}

CpModel cp_als(const Tensor& t, std::size_t rank, std::size_t max_sweeps, double tol,
               std::uint64_t seed) {
    if (rank < 1) throw std::invalid_argument("cp_als: rank must be >= 1");
    const std::size_t order = t.order();
    const double norm_t = frobenius_norm(t);

    CpModel model;
    model.rank = rank;
    model.factors.resize(order);
    std::mt19937_64 rng(seed);
    for (std::size_t d = 0; d < order; ++d)
        model.factors[d] = random_unit_columns(t.dim(d), rank, rng);
    model.weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rank));

    if (norm_t == 0.0) {
        model.fit = 1.0;
        model.objective_history.push_back(0.0);
        return model;
    }

    std::vector<Matricization> unfoldings(order);
    for (std::size_t d = 0; d < order; ++d) unfoldings[d] = matricize(t, d);

    const double ridge = 1e-12;
    double prev_obj = std::numeric_limits<double>::infinity();
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        for (std::size_t d = 0; d < order; ++d) {
            Eigen::MatrixXd gram = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(rank),
                                                         static_cast<Eigen::Index>(rank));
            for (std::size_t j = 0; j < order; ++j)
                if (j != d)
                    gram = gram.cwiseProduct(model.factors[j].transpose() * model.factors[j]);
            gram.diagonal().array() += ridge;

            const Eigen::MatrixXd kr = khatri_rao_skip(model.factors, d);
            Eigen::MatrixXd mttkrp = unfoldings[d].matrix() * kr;  // n_d x R
            Eigen::MatrixXd solved = gram.ldlt().solve(mttkrp.transpose()).transpose();

            for (Eigen::Index r = 0; r < solved.cols(); ++r) {
                const double nrm = solved.col(r).norm();
                model.weights(r) = nrm;
                if (nrm > 1e-300)
                    solved.col(r) /= nrm;
                else
                    solved.col(r) = model.factors[d].col(r);  // keep previous direction
            }
            model.factors[d] = std::move(solved);
        }

        const Tensor recon = model.reconstruct(t.dims());
        double obj_sq = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double r = t.data()[i] - recon.data()[i];
            obj_sq += r * r;
        }
        const double obj = std::sqrt(obj_sq);
        model.objective_history.push_back(obj);
        if (prev_obj - obj <= tol * std::max(norm_t, 1e-300) && sweep > 0) break;
        prev_obj = obj;
    }

    // Deterministic signs: first entry of each factor column with magnitude
    // above 1e-12 is positive, compensation absorbed by the weight.
    for (std::size_t d = 0; d < order; ++d)
        for (Eigen::Index r = 0; r < model.factors[d].cols(); ++r) {
            double lead = 0.0;
            for (Eigen::Index i = 0; i < model.factors[d].rows(); ++i)
                if (std::abs(model.factors[d](i, r)) > 1e-12) {
                    lead = model.factors[d](i, r);
                    break;
                }
            if (lead < 0.0) {
                model.factors[d].col(r) = -model.factors[d].col(r);
                model.weights(r) = -model.weights(r);
            }
        }

    model.fit = 1.0 - model.objective_history.back() / norm_t;
    return model;
}

}  // namespace coco
