#include "core/hermitian.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace swiptsec {

CMat hermitize(const CMat& x) {
    return 0.5 * (x + x.adjoint());
}

bool is_hermitian(const CMat& x, double tol) {
    if (x.rows() != x.cols() || x.rows() < 1) return false;
    return (x - x.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double fro_norm(const CMat& x) {
    return x.norm();
}

namespace {

void require_hermitian(const CMat& x, const char* op) {
    const double scale = std::max(1.0, x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0);
    if (!is_hermitian(x, 1e-12 * scale)) {
        throw std::invalid_argument(std::string(op) + ": input matrix is not Hermitian");
    }
}

}  // namespace

EigenResult eig_hermitian(const CMat& x) {
    require_hermitian(x, "eig_hermitian");
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(x));
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("eig_hermitian: eigensolver failed to converge");
    }

    const Eigen::Index n = x.rows();
    EigenResult r;
    r.eigenvalues.resize(n);
    r.eigenvectors.resize(n, n);
    // Eigen returns ascending order; flip to descending.
    for (Eigen::Index i = 0; i < n; ++i) {
        r.eigenvalues(i) = es.eigenvalues()(n - 1 - i);
        r.eigenvectors.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    // Phase convention: first non-negligible component real positive.
    for (Eigen::Index j = 0; j < n; ++j) {
        const double colmax = r.eigenvectors.col(j).cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < n; ++i) {
            const Complex v = r.eigenvectors(i, j);
            if (std::abs(v) > 1e-12 * std::max(1.0, colmax)) {
                r.eigenvectors.col(j) *= std::conj(v) / std::abs(v);
                break;
            }
        }
    }
    return r;
}

double lambda_max(const CMat& x) {
    require_hermitian(x, "lambda_max");
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(x), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

bool is_psd(const CMat& x, double tol) {
    require_hermitian(x, "is_psd");
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(x), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
    return lo >= -tol * std::max(1.0, hi);
}

CMat null_basis(const CMat& x, double threshold) {
    EigenResult r = eig_hermitian(x);
    const Eigen::Index n = x.rows();
    const double lmax = r.eigenvalues.size() > 0 ? r.eigenvalues(0) : 0.0;
    const double cut = threshold * std::max(lmax, 0.0);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (r.eigenvalues(i) <= cut) keep.push_back(i);
    }
    CMat basis(n, static_cast<Eigen::Index>(keep.size()));
    for (Eigen::Index j = 0; j < basis.cols(); ++j) {
        basis.col(j) = r.eigenvectors.col(keep[static_cast<std::size_t>(j)]);
    }
    return basis;
}

int numeric_rank(const CMat& x, double rel_tol) {
    EigenResult r = eig_hermitian(x);
    const double lmax = r.eigenvalues.size() > 0 ? r.eigenvalues(0) : 0.0;
    if (lmax <= 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i) {
        if (r.eigenvalues(i) > rel_tol * lmax) ++rank;
    }
    return rank;
}

}  // namespace swiptsec
