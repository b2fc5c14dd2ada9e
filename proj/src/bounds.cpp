#include "projcred/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "projcred/error.hpp"

namespace projcred {

MomentMatrices moment_matrices(const SpectrumSpec& spec, const ClusterSelection& sel) {
    // The truth is diag(expanded spectrum), so u*_k is the k-th basis vector.
    const Eigen::Index p = spec.dim();
    const Eigen::VectorXd sigma = spec.expanded();
    const IndexRange inside = sel.index_set();
    MomentMatrices out{Eigen::MatrixXd::Zero(inside.size(), p),
                       Eigen::MatrixXd::Zero(p - inside.size(), p)};
    Eigen::Index row_u = 0;
    Eigen::Index row_v = 0;
    for (Eigen::Index k = 0; k < p; ++k) {
        const double w = 1.0 / std::sqrt(sigma(k));
        if (inside.contains(k)) {
            out.u(row_u++, k) = w;
        } else {
            out.v(row_v++, k) = w;
        }
    }
    return out;
}

BoundInputs bound_inputs(const SpectrumSpec& spec, const ClusterSelection& sel, double g_norm,
                         double b, double n, double delta_hat) {
    if (!(n > 1.0)) throw InvalidInput("bounds: n must exceed 1");
    if (!(delta_hat > 0.0)) throw InvalidInput("bounds: delta_hat must be positive");
    const Eigen::VectorXd sigma = spec.expanded();
    BoundInputs in;
    in.n = n;
    in.p = spec.dim();
    in.b = b;
    in.g_norm = g_norm;
    in.delta_hat = delta_hat;
    in.sigma_norm = sigma.maxCoeff();
    in.sigma_trace = sigma.sum();
    in.sigma_trace_sq = sigma.squaredNorm();
    in.m = static_cast<double>(sel.dimension());
    in.gap = sel.gap();
    in.width = sel.width();
    in.clusters = static_cast<double>(sel.count());
    return in;
}

double gamma_denominator(const GammaStar& gamma) {
    // ||Gamma||_2^2 - ||Gamma||_inf^2 summed directly over the non-maximal
    // entries, so a single-entry Gamma gives exactly zero.
    const auto& g = gamma.diagonal;
    if (g.empty()) return 0.0;
    const auto top = std::max_element(g.begin(), g.end());
    double spread = 0.0;
    for (auto it = g.begin(); it != g.end(); ++it) {
        if (it != top) spread += *it * *it;
    }
    return std::sqrt(gamma.norm2()) * std::pow(spread, 0.25);
}

BoundReport diamond_terms(const SpectrumSpec& spec, const ClusterSelection& sel, double g_norm,
                          double b, double n, double delta_hat) {
    BoundReport r;
    r.inputs = bound_inputs(spec, sel, g_norm, b, n, delta_hat);
    const BoundInputs& in = r.inputs;
    const double log_n = std::log(in.n);
    const double p = static_cast<double>(in.p);
    const double ratio = 1.0 + in.width / in.gap;
    const double s = in.sigma_norm;

    r.diamond1 = ((log_n + p) * (ratio * std::sqrt(in.m) * s / in.gap + in.m) * s + in.m * in.g_norm) *
                 (in.m * s / (in.gap * in.gap)) * std::sqrt((log_n + p) / in.n);
    r.diamond2 = s * std::min(in.m * s * s, in.sigma_trace_sq) / std::pow(in.gap, 3) * p *
                 (in.delta_hat + p / in.n);
    r.diamond3 = std::pow(in.m, 1.5) * s * in.sigma_trace / (in.gap * in.gap) *
                 std::sqrt(log_n / in.n);

    r.denominator = gamma_denominator(gamma_star(spec, sel));
    r.degenerate = r.denominator == 0.0;
    const double sum = r.diamond1 + r.diamond2 + r.diamond3;
    r.diamond = (r.degenerate ? sum : sum / r.denominator) + 1.0 / in.n;
    return r;
}

std::pair<double, double> moment3_estimates(const ExperimentDesign& design, int draws, Rng& rng) {
    if (draws < 1000) throw InvalidInput("moment3_estimates: need at least 1000 draws");
    const MomentMatrices mm = moment_matrices(design.spectrum, design.selection);
    const Eigen::MatrixXd data = generate_dataset(design, draws, rng);
    const Eigen::MatrixXd ux = data * mm.u.transpose();
    const Eigen::MatrixXd vx = data * mm.v.transpose();
    const Eigen::VectorXd nu = ux.rowwise().norm();
    const Eigen::VectorXd nv = vx.rowwise().norm();
    return {nu.array().cube().mean(), nv.array().cube().mean()};
}

void overline_terms(BoundReport& report, const SpectrumSpec& spec, const ClusterSelection& sel,
                    std::pair<double, double> moment3) {
    const BoundInputs& in = report.inputs;
    const double ratio = 1.0 + in.width / in.gap;
    const double d = in.delta_hat / in.gap;
    const double quartic = ratio * std::pow(d, 4);
    const double cubic = in.clusters * std::pow(d, 3);
    report.overline_delta = in.n * in.m * ratio * std::max(quartic, cubic);
    report.moment_u = moment3.first;
    report.moment_v = moment3.second;
    if (report.denominator == 0.0) {
        report.denominator = gamma_denominator(gamma_star(spec, sel));
    }
    const double moment_term = moment3.first * moment3.second *
                               std::pow(static_cast<double>(in.p), 0.25) / std::sqrt(in.n);
    report.overline_diamond =
        moment_term + (report.degenerate ? report.overline_delta
                                         : report.overline_delta / report.denominator);
}

BoundReport bound_report(const SpectrumSpec& spec, const ClusterSelection& sel, double g_norm,
                         double b, double n, double delta_hat, std::pair<double, double> moment3) {
    BoundReport r = diamond_terms(spec, sel, g_norm, b, n, delta_hat);
    overline_terms(r, spec, sel, moment3);
    return r;
}

}  // namespace projcred
