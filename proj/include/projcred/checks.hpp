#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "projcred/matrix_core.hpp"
#include "projcred/rng.hpp"
#include "projcred/spectrum.hpp"

namespace projcred::checks {

// Symmetric matrix with entries uniform on [-1, 1], symmetrized.
SymMatrix random_symmetric(Eigen::Index p, Rng& rng);
// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
Eigen::MatrixXd random_orthogonal(Eigen::Index p, Rng& rng);

// Truth with a clustered spectrum in a random basis, a proper contiguous
// cluster selection, and a perturbation E with ||E||_inf <= gap / 4.
struct PerturbationCase {
    SpectrumSpec spec;
    ClusterSelection sel;
    SymMatrix truth;
    EigenDecomposition truth_eig;
    SymMatrix e;
};

PerturbationCase random_perturbation_case(Rng& rng, Eigen::Index max_dim = 12);

// Each check returns an empty string on success, otherwise a description of
// the violated invariant.
std::string check_eigh(const SymMatrix& a);
std::string check_projector(const Projector& p);
std::string check_weyl(const SymMatrix& a, const SymMatrix& e);
std::string check_norm_chain(const SymMatrix& a);

// U S* U^T = I and V S* V^T = I for the whitening matrices of the selection.
std::string check_whitening(const SpectrumSpec& spec, const ClusterSelection& sel);

struct PerturbationResult {
    double remainder = 0.0;       // ||P~ - P* - L(E)||_inf
    double remainder_bound = 0.0; // 15 (1 + 2 l / (pi g)) (||E|| / g)^2
    double deviation = 0.0;       // ||P~ - P*||_inf
    double deviation_bound = 0.0; // 4 (1 + 2 l / (pi g)) ||E|| / g
    double fd_error = 0.0;        // max |FD - L(E)| / max |L(E)| at t = 1e-5
};

PerturbationResult evaluate_perturbation(const PerturbationCase& c);
std::string check_perturbation(const PerturbationCase& c);

}  // namespace projcred::checks
