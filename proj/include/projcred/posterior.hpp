#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "projcred/matrix_core.hpp"
#include "projcred/rng.hpp"
#include "projcred/spectrum.hpp"

namespace projcred {

// Inverse-Wishart pseudo-posterior IW(scale, degrees) obtained from the prior
// IW(G, p + b - 1) and n observations with sample covariance S:
//   scale = G + n S,  degrees = n + p + b - 1.
// In this parameterization Sigma^{-1} ~ Wishart(scale^{-1}, degrees), so
// E[Sigma^{-1}] = degrees * scale^{-1}.
class PosteriorParams {
public:
    PosteriorParams(SymMatrix scale, double degrees);

    const SymMatrix& scale() const { return scale_; }
    double degrees() const { return degrees_; }
    Eigen::Index dim() const { return scale_.dim(); }
    // Lower Cholesky factor K of the scale; scale^{-1} = K^{-T} K^{-1}.
    const Eigen::MatrixXd& scale_factor() const { return chol_; }

private:
    SymMatrix scale_;
    double degrees_;
    Eigen::MatrixXd chol_;
};

PosteriorParams posterior_from(const SymMatrix& g, double b, const SymMatrix& sigma_hat, int n);

// One covariance draw. Uses the Bartlett factor A of Wishart(I, degrees)
// (lower triangular, A_ii^2 ~ chi^2(degrees - i), A_ij ~ N(0, 1) below the
// diagonal), so Sigma^{-1} = K^{-T} A A^T K^{-1} and
// Sigma = (K A^{-T}) (K A^{-T})^T. O(p^3) per draw.
SymMatrix sample_sigma(const PosteriorParams& params, Rng& rng);

// n ||P_J(Sigma) - center||_2^2 for a single draw of Sigma.
double posterior_draw_statistic(const PosteriorParams& params, const Projector& center,
                                const SpectrumSpec& spec, const ClusterSelection& sel, int n,
                                Rng& rng);

// n ||P_J(Sigma) - center||_2^2 for `count` draws of Sigma. P_J(Sigma) uses
// order-based clustering with the spectrum's multiplicities. Draw d uses the
// stream (master, posterior_draws, stream_tag, d), so results do not depend
// on the evaluation order.
std::vector<double> posterior_projector_draws(const PosteriorParams& params, const Projector& center,
                                              const SpectrumSpec& spec, const ClusterSelection& sel,
                                              int n, int count, std::uint64_t master,
                                              std::uint64_t stream_tag);

// Same statistic with a caller-provided generator, drawn sequentially.
std::vector<double> posterior_projector_draws(const PosteriorParams& params, const Projector& center,
                                              const SpectrumSpec& spec, const ClusterSelection& sel,
                                              int n, int count, Rng& rng);

// Projector onto the selected clusters of a covariance draw.
Projector selected_projector(const SymMatrix& sigma, const SpectrumSpec& spec,
                             const ClusterSelection& sel);

// 1-based rank ceil(alpha * size) clamped to [1, size]. A relative slack of
// 1e-9 keeps e.g. 0.95 * 1000 from rounding up to 951.
std::size_t quantile_rank(double alpha, std::size_t size);

// Lower-tail order statistic at rank ceil(alpha * N). The credible threshold
// for significance level a is posterior_quantile(draws, 1 - a).
double posterior_quantile(std::span<const double> draws, double alpha);

}  // namespace projcred
