#include "projcred/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "projcred/error.hpp"

namespace projcred {

namespace {

void require_finite(const Eigen::MatrixXd& a, const char* what) {
    if (!a.allFinite()) {
        throw InvalidInput(std::string(what) + ": matrix has non-finite entries");
    }
}

}  // namespace

SymMatrix::SymMatrix(Eigen::Index dim) : a_(Eigen::MatrixXd::Zero(dim, dim)) {
    if (dim < 1) throw InvalidInput("SymMatrix: dimension must be positive");
}

SymMatrix::SymMatrix(const Eigen::MatrixXd& dense) {
    if (dense.rows() != dense.cols() || dense.rows() < 1) {
        throw InvalidInput("SymMatrix: expected a nonempty square matrix");
    }
    require_finite(dense, "SymMatrix");
    const double tol = 1e-10 * (1.0 + dense.cwiseAbs().maxCoeff());
    if ((dense - dense.transpose()).cwiseAbs().maxCoeff() > tol) {
        throw InvalidInput("SymMatrix: matrix is not symmetric");
    }
    a_ = dense.selfadjointView<Eigen::Upper>();
}

SymMatrix::SymMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    const auto p = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd dense(p, p);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        if (static_cast<Eigen::Index>(row.size()) != p) {
            throw InvalidInput("SymMatrix: ragged initializer");
        }
        Eigen::Index j = 0;
        for (double v : row) dense(i, j++) = v;
        ++i;
    }
    *this = SymMatrix(dense);
}

SymMatrix SymMatrix::identity(Eigen::Index dim) {
    SymMatrix m(dim);
    m.a_.setIdentity();
    return m;
}

SymMatrix SymMatrix::zero(Eigen::Index dim) { return SymMatrix(dim); }

SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& diag) {
    SymMatrix m(diag.size());
    require_finite(diag, "SymMatrix::diagonal");
    m.a_.diagonal() = diag;
    return m;
}

SymMatrix SymMatrix::symmetrized(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols() || a.rows() < 1) {
        throw InvalidInput("SymMatrix: expected a nonempty square matrix");
    }
    require_finite(a, "SymMatrix::symmetrized");
    SymMatrix m;
    m.a_ = 0.5 * (a + a.transpose());
    return m;
}

void SymMatrix::set(Eigen::Index i, Eigen::Index j, double value) {
    if (!std::isfinite(value)) throw InvalidInput("SymMatrix::set: non-finite value");
    a_(i, j) = value;
    a_(j, i) = value;
}

SymMatrix SymMatrix::operator+(const SymMatrix& other) const {
    if (dim() != other.dim()) throw InvalidInput("SymMatrix: dimension mismatch");
    SymMatrix m;
    m.a_ = a_ + other.a_;
    return m;
}

SymMatrix SymMatrix::operator-(const SymMatrix& other) const {
    if (dim() != other.dim()) throw InvalidInput("SymMatrix: dimension mismatch");
    SymMatrix m;
    m.a_ = a_ - other.a_;
    return m;
}

SymMatrix SymMatrix::operator*(double c) const {
    SymMatrix m;
    m.a_ = a_ * c;
    require_finite(m.a_, "SymMatrix scaling");
    return m;
}

EigenDecomposition eigh(const SymMatrix& a) {
    require_finite(a.dense(), "eigh");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.dense());
    if (solver.info() != Eigen::Success) {
        throw NumericFailure("eigh: symmetric eigensolver did not converge");
    }
    // Eigen returns ascending order.
    EigenDecomposition out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

Eigen::VectorXd eigvalsh(const SymMatrix& a) {
    require_finite(a.dense(), "eigvalsh");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.dense(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericFailure("eigvalsh: symmetric eigensolver did not converge");
    }
    return solver.eigenvalues().reverse();
}

double spectral_norm(const SymMatrix& a) { return eigvalsh(a).cwiseAbs().maxCoeff(); }

double frobenius_norm(const SymMatrix& a) { return a.dense().norm(); }

double nuclear_norm(const SymMatrix& a) { return eigvalsh(a).cwiseAbs().sum(); }

double trace(const SymMatrix& a) { return a.dense().trace(); }

double effective_rank(const SymMatrix& a) {
    const double norm = spectral_norm(a);
    if (norm == 0.0) throw InvalidInput("effective_rank: zero matrix");
    return trace(a) / norm;
}

Eigen::MatrixXd cholesky_lower(const SymMatrix& cov) {
    const double scale = spectral_norm(cov);
    Eigen::LLT<Eigen::MatrixXd> llt(cov.dense());
    if (llt.info() != Eigen::Success || scale == 0.0) {
        throw NumericFailure("cholesky: matrix is not positive-definite");
    }
    Eigen::MatrixXd l = llt.matrixL();
    const double min_pivot = l.diagonal().cwiseAbs2().minCoeff();
    if (!(min_pivot > 1e-12 * scale)) {
        throw NumericFailure("cholesky: pivot " + std::to_string(min_pivot) +
                             " below 1e-12 * ||cov||");
    }
    return l;
}

GaussianSampler::GaussianSampler(const SymMatrix& cov) : chol_(cholesky_lower(cov)) {}

Eigen::VectorXd GaussianSampler::operator()(Rng& rng) const {
    return chol_ * standard_normal_vector(chol_.rows(), rng);
}

Eigen::VectorXd sample_gaussian(const SymMatrix& cov, Rng& rng) {
    return GaussianSampler(cov)(rng);
}

Eigen::VectorXd standard_normal_vector(Eigen::Index size, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(size);
    for (Eigen::Index i = 0; i < size; ++i) z(i) = normal(rng);
    return z;
}

}  // namespace projcred
