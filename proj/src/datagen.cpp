#include "projcred/datagen.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "projcred/error.hpp"

namespace projcred {

std::string to_string(LawKind kind) {
    switch (kind) {
        case LawKind::gaussian: return "gaussian";
        case LawKind::uniform: return "uniform";
        case LawKind::laplace: return "laplace";
        case LawKind::discrete3: return "discrete3";
    }
    return "unknown";
}

LawKind law_kind_from_string(const std::string& name) {
    if (name == "gaussian") return LawKind::gaussian;
    if (name == "uniform") return LawKind::uniform;
    if (name == "laplace") return LawKind::laplace;
    if (name == "discrete3") return LawKind::discrete3;
    throw InvalidInput("unknown component law '" + name + "'");
}

ComponentLaw::ComponentLaw(LawKind kind, double variance) : kind_(kind), variance_(variance) {
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        throw InvalidInput("ComponentLaw: variance must be positive and finite");
    }
    switch (kind) {
        case LawKind::gaussian: scale_ = std::sqrt(variance); break;
        case LawKind::uniform: scale_ = std::sqrt(3.0 * variance); break;
        case LawKind::laplace: scale_ = std::sqrt(variance / 2.0); break;
        case LawKind::discrete3: scale_ = std::sqrt(1.5 * variance); break;
    }
}

double ComponentLaw::operator()(Rng& rng) const {
    switch (kind_) {
        case LawKind::gaussian: return scale_ * std::normal_distribution<double>(0.0, 1.0)(rng);
        case LawKind::uniform:
            return std::uniform_real_distribution<double>(-scale_, scale_)(rng);
        case LawKind::laplace: {
            const double magnitude = std::exponential_distribution<double>(1.0)(rng);
            const bool negative = std::bernoulli_distribution(0.5)(rng);
            return (negative ? -scale_ : scale_) * magnitude;
        }
        case LawKind::discrete3:
            return scale_ * std::uniform_int_distribution<int>(-1, 1)(rng);
    }
    return 0.0;
}

MarchenkoPastur::MarchenkoPastur(double lambda, double lower, double upper)
    : lambda_(lambda), lower_(lower), upper_(upper) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidInput("MarchenkoPastur: ratio must be in (0, 1)");
    if (!(lower < upper)) throw InvalidInput("MarchenkoPastur: empty support");
    density_max_ = 0.0;
    constexpr int grid = 20000;
    for (int i = 0; i <= grid; ++i) {
        density_max_ = std::max(density_max_, density(lower_ + (upper_ - lower_) * i / grid));
    }
    // Grid maximum can undershoot the true peak slightly.
    density_max_ *= 1.01;
    mass_ = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [this](double x) { return density(x); }, lower_, upper_, 15, 1e-12);
    if (!(mass_ > 0.0)) throw InvalidInput("MarchenkoPastur: support misses the law");
}

double MarchenkoPastur::fit_ratio(double lower, double upper) {
    auto residual = [&](double s) {
        const double lo = (1.0 - s) * (1.0 - s) - lower;
        const double hi = (1.0 + s) * (1.0 + s) - upper;
        return lo * lo + hi * hi;
    };
    const auto [s, value] = boost::math::tools::brent_find_minima(residual, 0.0, 1.0, 50);
    (void)value;
    return s * s;
}

MarchenkoPastur MarchenkoPastur::from_support(double lower, double upper) {
    return MarchenkoPastur(fit_ratio(lower, upper), lower, upper);
}

double MarchenkoPastur::density(double x) const {
    const double s = std::sqrt(lambda_);
    const double a = (1.0 - s) * (1.0 - s);
    const double b = (1.0 + s) * (1.0 + s);
    if (x <= a || x >= b) return 0.0;
    return std::sqrt((b - x) * (x - a)) / (2.0 * std::numbers::pi * lambda_ * x);
}

double MarchenkoPastur::cdf(double x) const {
    if (x <= lower_) return 0.0;
    if (x >= upper_) return 1.0;
    const double part = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [this](double t) { return density(t); }, lower_, x, 15, 1e-12);
    return part / mass_;
}

double MarchenkoPastur::operator()(Rng& rng) const {
    std::uniform_real_distribution<double> proposal(lower_, upper_);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (;;) {
        const double x = proposal(rng);
        if (unit(rng) * density_max_ <= density(x)) return x;
    }
}

void break_ties(std::vector<double>& descending) {
    std::size_t run_start = 0;
    for (std::size_t i = 1; i < descending.size(); ++i) {
        if (descending[i] == descending[run_start]) {
            descending[i] -= static_cast<double>(i - run_start) * 1e-12;
        } else {
            run_start = i;
        }
    }
}

const std::vector<int>& default_n_grid() {
    static const std::vector<int> grid{100, 300, 500, 1000, 2000, 3000};
    return grid;
}

void ExperimentDesign::validate() const {
    const Eigen::Index p = dim();
    if (static_cast<Eigen::Index>(laws.size()) != p) {
        throw InvalidInput("design: expected " + std::to_string(p) + " component laws, got " +
                           std::to_string(laws.size()));
    }
    if (selection.last() >= spectrum.clusters()) throw InvalidInput("design: selection out of range");
    ClusterSelection check(spectrum, selection.first(), selection.last());
    if (!(check == selection)) throw InvalidInput("design: selection does not match spectrum");
    if (n_grid.empty()) throw InvalidInput("design: empty n grid");
    for (int n : n_grid) {
        if (n < 1) throw InvalidInput("design: sample sizes must be positive");
    }
    if (mc.freq_reps < 2 || mc.realizations < 2 || mc.draws < 2) {
        throw InvalidInput("design: Monte Carlo counts must be at least 2");
    }
    if (prior.g.dim() != p) throw InvalidInput("design: prior scale has the wrong dimension");
    if (!(prior.b > 0.0)) throw InvalidInput("design: prior b must be positive");
    try {
        (void)cholesky_lower(prior.g);
    } catch (const NumericFailure&) {
        throw InvalidInput("design: prior scale G is not positive-definite");
    }
}

ExperimentDesign build_experiment1(std::uint64_t seed) {
    std::vector<double> mu{25.698, 15.7688, 10.0907, 5.9214, 3.4321};
    const auto bulk = MarchenkoPastur::from_support(0.71, 1.34);
    Rng rng = make_stream(seed, StreamKind::design, 1);
    std::vector<double> tail(95);
    for (double& v : tail) v = bulk(rng);
    std::sort(tail.begin(), tail.end(), std::greater<>());
    break_ties(tail);
    mu.insert(mu.end(), tail.begin(), tail.end());

    SpectrumSpec spectrum(mu, std::vector<int>(mu.size(), 1));
    ClusterSelection selection(spectrum, 0, 0);
    const Eigen::Index p = spectrum.dim();
    ExperimentDesign design{"exp1",
                            spectrum,
                            std::vector<LawKind>(static_cast<std::size_t>(p), LawKind::gaussian),
                            selection,
                            default_n_grid(),
                            McBudget{},
                            Prior{SymMatrix::identity(p), 1.0},
                            seed};
    design.validate();
    return design;
}

ExperimentDesign build_experiment2(std::uint64_t seed) {
    std::vector<double> mu{25.0, 20.0, 15.0, 10.0, 7.5, 5.0};
    std::vector<int> mult{3, 3, 3, 1, 1, 1};
    Rng rng = make_stream(seed, StreamKind::design, 2);
    std::uniform_real_distribution<double> uniform(0.0, 3.0);
    std::vector<double> tail;
    tail.reserve(88);
    while (tail.size() < 88) {
        const double v = uniform(rng);
        if (v > 0.0) tail.push_back(v);
    }
    std::sort(tail.begin(), tail.end(), std::greater<>());
    break_ties(tail);
    mu.insert(mu.end(), tail.begin(), tail.end());
    mult.insert(mult.end(), tail.size(), 1);

    SpectrumSpec spectrum(mu, mult);
    ClusterSelection selection(spectrum, 0, 2);
    const Eigen::Index p = spectrum.dim();
    std::vector<LawKind> laws{LawKind::uniform, LawKind::laplace,   LawKind::discrete3,
                              LawKind::gaussian, LawKind::laplace,  LawKind::discrete3,
                              LawKind::laplace, LawKind::laplace,   LawKind::uniform};
    laws.resize(static_cast<std::size_t>(p), LawKind::gaussian);
    ExperimentDesign design{"exp2",
                            spectrum,
                            laws,
                            selection,
                            default_n_grid(),
                            McBudget{},
                            Prior{SymMatrix::identity(p), 1.0},
                            seed};
    design.validate();
    return design;
}

Eigen::MatrixXd generate_dataset(const ExperimentDesign& design, int n, Rng& rng) {
    if (n < 1) throw InvalidInput("generate_dataset: n must be positive");
    const Eigen::Index p = design.dim();
    const Eigen::VectorXd sigma = design.spectrum.expanded();
    std::vector<ComponentLaw> laws;
    laws.reserve(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) {
        laws.emplace_back(design.laws[static_cast<std::size_t>(j)], sigma(j));
    }
    Eigen::MatrixXd data(n, p);
    for (int i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) data(i, j) = laws[static_cast<std::size_t>(j)](rng);
    }
    return data;
}

SymMatrix sample_covariance(const Eigen::MatrixXd& data) {
    if (data.rows() < 1 || data.cols() < 1) throw InvalidInput("sample_covariance: empty data");
    const Eigen::Index p = data.cols();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(p, p);
    s.selfadjointView<Eigen::Lower>().rankUpdate(data.transpose(),
                                                 1.0 / static_cast<double>(data.rows()));
    return SymMatrix(Eigen::MatrixXd(s.selfadjointView<Eigen::Lower>()));
}

std::string to_string(ConcentrationCase c) {
    switch (c) {
        case ConcentrationCase::gaussian: return "gaussian";
        case ConcentrationCase::subgaussian: return "subgaussian";
        case ConcentrationCase::bounded: return "bounded";
        case ConcentrationCase::logconcave: return "logconcave";
    }
    return "unknown";
}

ConcentrationCase concentration_case_from_string(const std::string& name) {
    if (name == "gaussian") return ConcentrationCase::gaussian;
    if (name == "subgaussian") return ConcentrationCase::subgaussian;
    if (name == "bounded") return ConcentrationCase::bounded;
    if (name == "logconcave") return ConcentrationCase::logconcave;
    throw InvalidInput("unknown concentration case '" + name + "'");
}

TruthStats truth_stats(const SymMatrix& truth, std::optional<double> radius) {
    return TruthStats{effective_rank(truth), spectral_norm(truth), radius};
}

double delta_hat(ConcentrationCase c, double n, Eigen::Index p, const TruthStats& stats) {
    if (!(n > 1.0)) throw InvalidInput("delta_hat: n must exceed 1");
    const double log_n = std::log(n);
    switch (c) {
        case ConcentrationCase::gaussian:
            return std::sqrt((stats.effective_rank + log_n) / n);
        case ConcentrationCase::subgaussian:
            return std::sqrt((static_cast<double>(p) + log_n) / n);
        case ConcentrationCase::bounded:
            if (!stats.radius) throw InvalidInput("delta_hat: bounded case needs a radius R");
            return *stats.radius / std::sqrt(stats.spectral_norm) * std::sqrt(log_n / n);
        case ConcentrationCase::logconcave:
            return std::sqrt(std::pow(log_n, 6) / (n * static_cast<double>(p)));
    }
    throw InvalidInput("delta_hat: unknown case");
}

}  // namespace projcred
