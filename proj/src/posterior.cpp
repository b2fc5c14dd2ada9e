#include "projcred/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "projcred/error.hpp"

namespace projcred {

PosteriorParams::PosteriorParams(SymMatrix scale, double degrees)
    : scale_(std::move(scale)), degrees_(degrees) {
    if (!(degrees_ > static_cast<double>(scale_.dim()) - 1.0)) {
        throw InvalidInput("PosteriorParams: degrees must exceed p - 1");
    }
    chol_ = cholesky_lower(scale_);
}

PosteriorParams posterior_from(const SymMatrix& g, double b, const SymMatrix& sigma_hat, int n) {
    if (g.dim() != sigma_hat.dim()) throw InvalidInput("posterior_from: dimension mismatch");
    if (!(b > 0.0)) throw InvalidInput("posterior_from: b must be positive");
    if (n < 0) throw InvalidInput("posterior_from: n must be nonnegative");
    const double p = static_cast<double>(g.dim());
    SymMatrix scale = n == 0 ? g : g + sigma_hat * static_cast<double>(n);
    return PosteriorParams(std::move(scale), n + p + b - 1.0);
}

SymMatrix sample_sigma(const PosteriorParams& params, Rng& rng) {
    const Eigen::Index p = params.dim();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        std::chi_squared_distribution<double> chi2(params.degrees() - static_cast<double>(i));
        a(i, i) = std::sqrt(chi2(rng));
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = j + 1; i < p; ++i) a(i, j) = normal(rng);
    }
    if (!(a.diagonal().minCoeff() > 0.0)) {
        throw NumericFailure("sample_sigma: degenerate Bartlett factor");
    }
    // B = K A^{-T}, Sigma = B B^T.
    Eigen::MatrixXd b = params.scale_factor();
    a.transpose().triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(b);
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(p, p);
    sigma.selfadjointView<Eigen::Lower>().rankUpdate(b);
    return SymMatrix(Eigen::MatrixXd(sigma.selfadjointView<Eigen::Lower>()));
}

Projector selected_projector(const SymMatrix& sigma, const SpectrumSpec& spec,
                             const ClusterSelection& sel) {
    const EigenDecomposition eig = eigh(sigma);
    const auto clusters = cluster_sample_eigenvalues(eig.values, spec);
    return projector(eig, IndexRange{clusters[sel.first()].begin, clusters[sel.last()].end});
}

double posterior_draw_statistic(const PosteriorParams& params, const Projector& center,
                                const SpectrumSpec& spec, const ClusterSelection& sel, int n,
                                Rng& rng) {
    const SymMatrix sigma = sample_sigma(params, rng);
    return static_cast<double>(n) *
           projector_distance_sq(selected_projector(sigma, spec, sel), center);
}

std::vector<double> posterior_projector_draws(const PosteriorParams& params, const Projector& center,
                                              const SpectrumSpec& spec, const ClusterSelection& sel,
                                              int n, int count, std::uint64_t master,
                                              std::uint64_t stream_tag) {
    if (count < 1) throw InvalidInput("posterior_projector_draws: count must be positive");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int d = 0; d < count; ++d) {
        Rng rng = make_stream(master, StreamKind::posterior_draws, stream_tag,
                              static_cast<std::uint64_t>(d));
        try {
            out[static_cast<std::size_t>(d)] =
                posterior_draw_statistic(params, center, spec, sel, n, rng);
        } catch (const NumericFailure& e) {
            throw NumericFailure("posterior draw " + std::to_string(d) + " of batch " +
                                 std::to_string(stream_tag) + ": " + e.what());
        }
    }
    return out;
}

std::vector<double> posterior_projector_draws(const PosteriorParams& params, const Projector& center,
                                              const SpectrumSpec& spec, const ClusterSelection& sel,
                                              int n, int count, Rng& rng) {
    if (count < 1) throw InvalidInput("posterior_projector_draws: count must be positive");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int d = 0; d < count; ++d) {
        try {
            out[static_cast<std::size_t>(d)] =
                posterior_draw_statistic(params, center, spec, sel, n, rng);
        } catch (const NumericFailure& e) {
            throw NumericFailure("posterior draw " + std::to_string(d) + ": " + e.what());
        }
    }
    return out;
}

std::size_t quantile_rank(double alpha, std::size_t size) {
    if (size == 0) throw InvalidInput("quantile: empty sample");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("quantile: alpha must be in (0, 1)");
    const double x = alpha * static_cast<double>(size);
    const double rank = std::ceil(x - 1e-9 * std::max(1.0, x));
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(rank, 1.0)), 1, size);
}

double posterior_quantile(std::span<const double> draws, double alpha) {
    if (draws.empty()) throw InvalidInput("posterior_quantile: no draws");
    const std::size_t rank = quantile_rank(alpha, draws.size());
    std::vector<double> sorted(draws.begin(), draws.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                     sorted.end());
    return sorted[rank - 1];
}

}  // namespace projcred
