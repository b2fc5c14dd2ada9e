#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>

#include "projcred/rng.hpp"

namespace projcred {

// Real symmetric p x p matrix. The dense storage is kept exactly symmetric:
// every write goes to both (i, j) and (j, i), so the two always hold the same
// value. Entries are finite.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(Eigen::Index dim);

    // Accepts a dense matrix that is symmetric up to rounding
    // (|a_ij - a_ji| <= 1e-10 * (1 + max|a|)); the upper triangle wins.
    explicit SymMatrix(const Eigen::MatrixXd& dense);
    SymMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static SymMatrix identity(Eigen::Index dim);
    static SymMatrix zero(Eigen::Index dim);
    static SymMatrix diagonal(const Eigen::VectorXd& diag);
    // Symmetrizes (a + a^T)/2 without any tolerance check.
    static SymMatrix symmetrized(const Eigen::MatrixXd& a);

    Eigen::Index dim() const { return a_.rows(); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return a_(i, j); }
    void set(Eigen::Index i, Eigen::Index j, double value);

    const Eigen::MatrixXd& dense() const { return a_; }

    SymMatrix operator+(const SymMatrix& other) const;
    SymMatrix operator-(const SymMatrix& other) const;
    SymMatrix operator*(double c) const;

private:
    Eigen::MatrixXd a_;
};

inline SymMatrix operator*(double c, const SymMatrix& a) { return a * c; }

// Eigenvalues sorted descending; columns of `vectors` are the matching
// unit eigenvectors.
struct EigenDecomposition {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;

    Eigen::Index dim() const { return values.size(); }
};

EigenDecomposition eigh(const SymMatrix& a);
// Eigenvalues only, descending.
Eigen::VectorXd eigvalsh(const SymMatrix& a);

double spectral_norm(const SymMatrix& a);
double frobenius_norm(const SymMatrix& a);
double nuclear_norm(const SymMatrix& a);
double trace(const SymMatrix& a);
// Tr(A) / ||A||_inf for a nonzero positive-semidefinite A.
double effective_rank(const SymMatrix& a);

// Lower Cholesky factor of a positive-definite matrix. Throws NumericFailure
// when a pivot is <= 1e-12 * ||cov||_inf.
Eigen::MatrixXd cholesky_lower(const SymMatrix& cov);

// N(0, cov) sampler with a cached triangular factor.
class GaussianSampler {
public:
    explicit GaussianSampler(const SymMatrix& cov);

    Eigen::VectorXd operator()(Rng& rng) const;
    const Eigen::MatrixXd& factor() const { return chol_; }

private:
    Eigen::MatrixXd chol_;
};

Eigen::VectorXd sample_gaussian(const SymMatrix& cov, Rng& rng);

// Vector of i.i.d. standard normals.
Eigen::VectorXd standard_normal_vector(Eigen::Index size, Rng& rng);

}  // namespace projcred
