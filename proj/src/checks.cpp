#include "projcred/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "projcred/bounds.hpp"

namespace projcred::checks {

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

std::string describe(const char* what, double value, double limit) {
    std::ostringstream os;
    os.precision(6);
    os << what << ": " << value << " exceeds " << limit;
    return os.str();
}

}  // namespace

SymMatrix random_symmetric(Eigen::Index p, Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd a(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < p; ++i) a(i, j) = u(rng);
    }
    return SymMatrix::symmetrized(a);
}

Eigen::MatrixXd random_orthogonal(Eigen::Index p, Rng& rng) {
    Eigen::MatrixXd g(p, p);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < p; ++i) g(i, j) = normal(rng);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(p, p);
    const Eigen::MatrixXd r = qr.matrixQR();
    for (Eigen::Index j = 0; j < p; ++j) {
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    }
    return q;
}

PerturbationCase random_perturbation_case(Rng& rng, Eigen::Index max_dim) {
    std::uniform_int_distribution<int> mult_dist(1, 3);
    std::uniform_real_distribution<double> gap_dist(0.5, 3.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Clusters until the dimension budget is spent; at least two clusters.
    std::vector<int> mult;
    Eigen::Index p = 0;
    while (mult.size() < 2 || p + 1 <= max_dim) {
        const int m = std::min<int>(mult_dist(rng), static_cast<int>(std::max<Eigen::Index>(1, max_dim - p)));
        mult.push_back(m);
        p += m;
        if (mult.size() >= 2 && unit(rng) < 0.2) break;
    }
    std::vector<double> values(mult.size());
    double level = 0.5 + unit(rng);
    for (std::size_t r = mult.size(); r-- > 0;) {
        values[r] = level;
        level += gap_dist(rng);
    }
    SpectrumSpec spec(values, mult);
    const std::size_t q = spec.clusters();

    std::size_t first = 0;
    std::size_t last = 0;
    do {
        first = std::uniform_int_distribution<std::size_t>(0, q - 1)(rng);
        last = std::uniform_int_distribution<std::size_t>(first, q - 1)(rng);
    } while (first == 0 && last == q - 1);
    ClusterSelection sel(spec, first, last);

    const Eigen::MatrixXd basis = random_orthogonal(spec.dim(), rng);
    const Eigen::VectorXd sigma = spec.expanded();
    const SymMatrix truth = SymMatrix::symmetrized(basis * sigma.asDiagonal() * basis.transpose());
    EigenDecomposition truth_eig{sigma, basis};

    const SymMatrix raw = random_symmetric(spec.dim(), rng);
    const double target = (0.05 + 0.95 * unit(rng)) * sel.gap() / 4.0;
    const SymMatrix e = raw * (target / spectral_norm(raw));
    return PerturbationCase{spec, sel, truth, truth_eig, e};
}

std::string check_eigh(const SymMatrix& a) {
    const EigenDecomposition eig = eigh(a);
    const Eigen::Index p = a.dim();
    for (Eigen::Index i = 0; i + 1 < p; ++i) {
        if (eig.values(i) < eig.values(i + 1)) return "eigh: eigenvalues not descending";
    }
    const double ortho =
        max_abs(eig.vectors.transpose() * eig.vectors - Eigen::MatrixXd::Identity(p, p));
    if (ortho > 1e-10 * static_cast<double>(p)) {
        return describe("eigh: orthonormality defect", ortho, 1e-10 * static_cast<double>(p));
    }
    const Eigen::MatrixXd recon =
        eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose() - a.dense();
    const double limit = 1e-9 * (1.0 + spectral_norm(a));
    const double err = eigvalsh(SymMatrix::symmetrized(recon)).cwiseAbs().maxCoeff();
    if (err > limit) return describe("eigh: reconstruction error", err, limit);
    return {};
}

std::string check_projector(const Projector& p) {
    const Eigen::MatrixXd& m = p.matrix().dense();
    const double idem = spectral_norm(SymMatrix::symmetrized(m * m - m));
    if (idem > 1e-9) return describe("projector: ||P^2 - P||", idem, 1e-9);
    const double tr = std::abs(m.trace() - static_cast<double>(p.rank()));
    if (tr > 1e-9) return describe("projector: |trace - rank|", tr, 1e-9);
    const Eigen::VectorXd ev = eigvalsh(p.matrix());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        const double d = std::min(std::abs(ev(i)), std::abs(ev(i) - 1.0));
        if (d > 1e-8) return describe("projector: eigenvalue distance from {0, 1}", d, 1e-8);
    }
    return {};
}

std::string check_weyl(const SymMatrix& a, const SymMatrix& e) {
    const Eigen::VectorXd before = eigvalsh(a);
    const Eigen::VectorXd after = eigvalsh(a + e);
    const double shift = (after - before).cwiseAbs().maxCoeff();
    const double limit = spectral_norm(e) * (1.0 + 1e-12) + 1e-12;
    if (shift > limit) return describe("weyl: eigenvalue shift", shift, limit);
    return {};
}

std::string check_norm_chain(const SymMatrix& a) {
    const double s = spectral_norm(a);
    const double f = frobenius_norm(a);
    const double nuc = nuclear_norm(a);
    const double slack = 1e-12 * (1.0 + nuc);
    if (s > f + slack) return describe("norms: spectral above Frobenius", s, f);
    if (f > nuc + slack) return describe("norms: Frobenius above nuclear", f, nuc);
    const double ev2 = eigvalsh(a).squaredNorm();
    if (std::abs(f * f - ev2) > 1e-9 * std::max(1.0, ev2)) {
        return describe("norms: ||A||_2^2 vs sum of squared eigenvalues", std::abs(f * f - ev2),
                        1e-9 * std::max(1.0, ev2));
    }
    return {};
}

std::string check_whitening(const SpectrumSpec& spec, const ClusterSelection& sel) {
    const MomentMatrices mm = moment_matrices(spec, sel);
    const Eigen::MatrixXd truth = spec.diagonal_matrix().dense();
    const double du = max_abs(mm.u * truth * mm.u.transpose() -
                              Eigen::MatrixXd::Identity(mm.u.rows(), mm.u.rows()));
    if (du > 1e-9) return describe("whitening: ||U S U^T - I||", du, 1e-9);
    const double dv = max_abs(mm.v * truth * mm.v.transpose() -
                              Eigen::MatrixXd::Identity(mm.v.rows(), mm.v.rows()));
    if (dv > 1e-9) return describe("whitening: ||V S V^T - I||", dv, 1e-9);
    return {};
}

PerturbationResult evaluate_perturbation(const PerturbationCase& c) {
    const auto clusters = c.spec.ranges();
    const IndexRange idx = c.sel.index_set();
    const Projector p_star = projector(c.truth_eig, idx);
    const Projector p_tilde = projector(eigh(c.truth + c.e), idx);
    const SymMatrix lin = linear_term(c.truth_eig, clusters, c.sel, c.e);

    const double e_norm = spectral_norm(c.e);
    const double g = c.sel.gap();
    const double factor = 1.0 + (2.0 / std::numbers::pi) * c.sel.width() / g;

    PerturbationResult r;
    const Eigen::MatrixXd diff = p_tilde.matrix().dense() - p_star.matrix().dense();
    r.remainder = spectral_norm(SymMatrix::symmetrized(diff - lin.dense()));
    r.remainder_bound = 15.0 * factor * (e_norm / g) * (e_norm / g);
    r.deviation = spectral_norm(SymMatrix::symmetrized(diff));
    r.deviation_bound = 4.0 * factor * e_norm / g;

    constexpr double t = 1e-5;
    const Projector p_t = projector(eigh(c.truth + c.e * t), idx);
    const Eigen::MatrixXd fd = (p_t.matrix().dense() - p_star.matrix().dense()) / t;
    r.fd_error = max_abs(fd - lin.dense()) / max_abs(lin.dense());
    return r;
}

std::string check_perturbation(const PerturbationCase& c) {
    const PerturbationResult r = evaluate_perturbation(c);
    if (r.remainder > r.remainder_bound) {
        return describe("linearization remainder", r.remainder, r.remainder_bound);
    }
    if (r.deviation > r.deviation_bound) {
        return describe("projector deviation", r.deviation, r.deviation_bound);
    }
    if (r.fd_error > 1e-3) return describe("finite-difference derivative", r.fd_error, 1e-3);
    return {};
}

}  // namespace projcred::checks
