#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>

#include "projcred/datagen.hpp"
#include "projcred/spectrum.hpp"

namespace projcred {

// Whitened coordinates of the target subspace and of its complement:
// rows u_k^T / sqrt(mu_r) for k in the selection (U) and outside it (V).
struct MomentMatrices {
    Eigen::MatrixXd u;
    Eigen::MatrixXd v;
};

MomentMatrices moment_matrices(const SpectrumSpec& spec, const ClusterSelection& sel);

// Summary of the truth used by the error terms.
struct BoundInputs {
    double n = 0.0;
    Eigen::Index p = 0;
    double b = 1.0;
    double g_norm = 1.0;      // ||G||_inf
    double delta_hat = 0.0;
    double sigma_norm = 0.0;  // ||S*||_inf
    double sigma_trace = 0.0; // Tr(S*)
    double sigma_trace_sq = 0.0; // Tr(S*^2)
    double m = 0.0;           // dimension of the target subspace
    double gap = 0.0;
    double width = 0.0;
    double clusters = 0.0;    // |J|
};

BoundInputs bound_inputs(const SpectrumSpec& spec, const ClusterSelection& sel, double g_norm,
                         double b, double n, double delta_hat);

// Error terms of the posterior and frequentist Gaussian approximations, up to
// absolute constants (all set to 1, natural logarithms). `denominator` is
// ||Gamma||_2^{1/2} (||Gamma||_2^2 - ||Gamma||_inf^2)^{1/4}; when it vanishes
// the report is flagged degenerate and the divided terms are reported
// without the division.
struct BoundReport {
    BoundInputs inputs;
    double diamond1 = 0.0;
    double diamond2 = 0.0;
    double diamond3 = 0.0;
    double diamond = 0.0;
    double overline_delta = 0.0;
    double overline_diamond = 0.0;
    double denominator = 0.0;
    double moment_u = 0.0;
    double moment_v = 0.0;
    bool degenerate = false;
};

double gamma_denominator(const GammaStar& gamma);

BoundReport diamond_terms(const SpectrumSpec& spec, const ClusterSelection& sel, double g_norm,
                          double b, double n, double delta_hat);

// Monte Carlo estimates of E||U X||^3 and E||V X||^3 under the design's data
// law. Needs at least 1000 draws.
std::pair<double, double> moment3_estimates(const ExperimentDesign& design, int draws, Rng& rng);

// Fills overline_delta and overline_diamond into `report`:
//   overline_delta = n m (1 + l/g) max((1 + l/g) d^4 / g^4, |J| d^3 / g^3)
//   overline_diamond = E||UX||^3 E||VX||^3 p^{1/4} / sqrt(n)
//                      + overline_delta / denominator
void overline_terms(BoundReport& report, const SpectrumSpec& spec, const ClusterSelection& sel,
                    std::pair<double, double> moment3);

BoundReport bound_report(const SpectrumSpec& spec, const ClusterSelection& sel, double g_norm,
                         double b, double n, double delta_hat, std::pair<double, double> moment3);

}  // namespace projcred
