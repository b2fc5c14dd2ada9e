#include "projcred/mc_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <optional>
#include <string>
#include <thread>

#include "projcred/error.hpp"
#include "projcred/posterior.hpp"

namespace projcred {

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task) {
    if (count == 0) return;
    std::size_t threads = workers > 0 ? static_cast<std::size_t>(workers)
                                      : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);

    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples)
    : samples_(std::move(samples)) {
    if (samples_.empty()) throw InvalidInput("EmpiricalDistribution: empty sample");
    for (double v : samples_) {
        if (!std::isfinite(v)) throw InvalidInput("EmpiricalDistribution: non-finite sample");
    }
    std::sort(samples_.begin(), samples_.end());
}

double EmpiricalDistribution::quantile(double alpha) const {
    return samples_[quantile_rank(alpha, samples_.size()) - 1];
}

double EmpiricalDistribution::ecdf(double x) const {
    const auto below = std::upper_bound(samples_.begin(), samples_.end(), x) - samples_.begin();
    return static_cast<double>(below) / static_cast<double>(samples_.size());
}

QuantileGrid::QuantileGrid() {
    alphas_.reserve(999);
    for (int k = 1; k <= 999; ++k) alphas_.push_back(k / 1000.0);
}

std::size_t QuantileGrid::index_of(double alpha) const {
    const double k = std::round(alpha * 1000.0);
    if (k < 1.0 || k > 999.0 || std::abs(alpha - k / 1000.0) > 1e-12) {
        throw InvalidInput("level " + std::to_string(alpha) + " is not on the 0.001 grid");
    }
    return static_cast<std::size_t>(k) - 1;
}

bool gap_condition_holds(const SymMatrix& sigma_hat, const SymMatrix& truth,
                         const SpectrumSpec& spec) {
    return spectral_norm(sigma_hat - truth) <= 0.25 * spec.min_cluster_gap();
}

namespace {

std::uint64_t sample_size_tag(int n, std::size_t index) {
    return (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(index);
}

Projector truth_projector(const ExperimentDesign& design) {
    const EigenDecomposition eig = eigh(design.truth());
    return projector(eig, design.selection.index_set());
}

}  // namespace

FrequentistRun frequentist_samples(const ExperimentDesign& design, int n, int reps,
                                   std::uint64_t seed, int workers) {
    if (reps < 2) throw InvalidInput("frequentist_samples: need at least 2 replicates");
    const Projector truth_proj = truth_projector(design);
    const SymMatrix truth = design.truth();

    std::vector<double> stat(static_cast<std::size_t>(reps));
    std::vector<char> ok(static_cast<std::size_t>(reps), 0);
    std::vector<char> gap(static_cast<std::size_t>(reps), 0);
    parallel_for(static_cast<std::size_t>(reps), workers, [&](std::size_t i) {
        Rng rng = make_stream(seed, StreamKind::frequentist_data, static_cast<std::uint64_t>(n), i);
        try {
            const SymMatrix sigma_hat = sample_covariance(generate_dataset(design, n, rng));
            const Projector p_hat = selected_projector(sigma_hat, design.spectrum, design.selection);
            stat[i] = static_cast<double>(n) * projector_distance_sq(p_hat, truth_proj);
            gap[i] = gap_condition_holds(sigma_hat, truth, design.spectrum);
            ok[i] = 1;
        } catch (const NumericFailure&) {
            ok[i] = 0;
        }
    });

    std::vector<double> kept;
    std::vector<bool> gap_kept;
    kept.reserve(stat.size());
    for (std::size_t i = 0; i < stat.size(); ++i) {
        if (!ok[i]) continue;
        kept.push_back(stat[i]);
        gap_kept.push_back(gap[i] != 0);
    }
    const int dropped = reps - static_cast<int>(kept.size());
    if (dropped * 100 > reps) {
        throw NumericFailure("frequentist_samples: " + std::to_string(dropped) + " of " +
                             std::to_string(reps) + " replicates failed at n = " +
                             std::to_string(n));
    }
    return FrequentistRun{EmpiricalDistribution(std::move(kept)), std::move(gap_kept), dropped};
}

RealizationQuantiles posterior_quantile_realizations(const ExperimentDesign& design, int n,
                                                     int realizations, int draws,
                                                     const QuantileGrid& grid, std::uint64_t seed,
                                                     int workers) {
    if (realizations < 1 || draws < 1) {
        throw InvalidInput("posterior_quantile_realizations: need positive budgets");
    }
    const auto r_count = static_cast<std::size_t>(realizations);
    const auto d_count = static_cast<std::size_t>(draws);
    const SymMatrix truth = design.truth();

    struct Center {
        std::optional<PosteriorParams> params;
        std::optional<Projector> p_hat;
        bool gap = false;
    };
    std::vector<Center> centers(r_count);
    parallel_for(r_count, workers, [&](std::size_t j) {
        Rng rng = make_stream(seed, StreamKind::posterior_data, static_cast<std::uint64_t>(n), j);
        const SymMatrix sigma_hat = sample_covariance(generate_dataset(design, n, rng));
        centers[j].p_hat = selected_projector(sigma_hat, design.spectrum, design.selection);
        centers[j].params = posterior_from(design.prior.g, design.prior.b, sigma_hat, n);
        centers[j].gap = gap_condition_holds(sigma_hat, truth, design.spectrum);
    });

    std::vector<double> stat(r_count * d_count);
    parallel_for(stat.size(), workers, [&](std::size_t t) {
        const std::size_t j = t / d_count;
        const std::size_t d = t % d_count;
        Rng rng = make_stream(seed, StreamKind::posterior_draws, sample_size_tag(n, j), d);
        try {
            stat[t] = posterior_draw_statistic(*centers[j].params, *centers[j].p_hat,
                                               design.spectrum, design.selection, n, rng);
        } catch (const NumericFailure& e) {
            throw NumericFailure("n = " + std::to_string(n) + ", realization " +
                                 std::to_string(j) + ", draw " + std::to_string(d) + ": " +
                                 e.what());
        }
    });

    RealizationQuantiles out{grid, Eigen::MatrixXd(realizations, static_cast<Eigen::Index>(grid.size())),
                             std::vector<bool>(r_count)};
    for (std::size_t j = 0; j < r_count; ++j) {
        const auto first = stat.begin() + static_cast<std::ptrdiff_t>(j * d_count);
        const EmpiricalDistribution dist(
            std::vector<double>(first, first + static_cast<std::ptrdiff_t>(d_count)));
        for (std::size_t k = 0; k < grid.size(); ++k) {
            out.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                dist.quantile(grid.alphas()[k]);
        }
        out.gap_condition[j] = centers[j].gap;
    }
    return out;
}

std::size_t lower_quartile_rank(std::size_t r) { return std::clamp<std::size_t>(r / 4, 1, r); }

std::size_t median_rank(std::size_t r) { return std::clamp<std::size_t>(r / 2, 1, r); }

std::size_t upper_quartile_rank(std::size_t r) {
    return std::clamp<std::size_t>((3 * r + 3) / 4, 1, r);
}

namespace {

std::vector<double> sorted_column(const RealizationQuantiles& rq, std::size_t k) {
    const auto col = rq.values.col(static_cast<Eigen::Index>(k));
    std::vector<double> v(col.data(), col.data() + col.size());
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

std::vector<QqPoint> qq_points(const EmpiricalDistribution& freq, const RealizationQuantiles& rq) {
    if (rq.realizations() == 0) throw InvalidInput("qq_points: no realizations");
    const std::size_t med = median_rank(rq.realizations());
    std::vector<QqPoint> out;
    out.reserve(rq.grid.size());
    for (std::size_t k = 0; k < rq.grid.size(); ++k) {
        const double alpha = rq.grid.alphas()[k];
        out.push_back({alpha, freq.quantile(alpha), sorted_column(rq, k)[med - 1]});
    }
    return out;
}

const std::vector<double>& default_levels() {
    static const std::vector<double> levels{0.99, 0.95, 0.90, 0.85, 0.80, 0.75};
    return levels;
}

std::vector<CoverageRow> coverage_table(const EmpiricalDistribution& freq,
                                        const RealizationQuantiles& rq,
                                        const std::vector<double>& levels) {
    const std::size_t r = rq.realizations();
    if (r == 0) throw InvalidInput("coverage_table: no realizations");
    std::vector<CoverageRow> out;
    out.reserve(levels.size());
    for (double level : levels) {
        const auto gammas = sorted_column(rq, rq.grid.index_of(level));
        const double coverage = freq.ecdf(gammas[median_rank(r) - 1]);
        const double iqr =
            freq.ecdf(gammas[upper_quartile_rank(r) - 1]) - freq.ecdf(gammas[lower_quartile_rank(r) - 1]);
        out.push_back({level, coverage, iqr});
    }
    return out;
}

std::vector<double> sample_xi_norm_sq(const GammaStar& gamma, int count, Rng& rng) {
    if (count < 1) throw InvalidInput("sample_xi_norm_sq: count must be positive");
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(static_cast<std::size_t>(count));
    for (double& v : out) {
        double s = 0.0;
        for (double g : gamma.diagonal) {
            const double z = normal(rng);
            s += g * z * z;
        }
        v = s;
    }
    return out;
}

double kolmogorov_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InvalidInput("kolmogorov_distance: empty sample");
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double t = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= t) ++i;
        while (j < y.size() && y[j] <= t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return d;
}

}  // namespace projcred
