#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "projcred/datagen.hpp"
#include "projcred/rng.hpp"
#include "projcred/spectrum.hpp"

namespace projcred {

// Runs task(i) for i in [0, count) on `workers` threads (<= 0 means one per
// hardware thread). Tasks must write only to their own slot. If any task
// throws, the exception of the lowest failing index is rethrown after all
// workers finish.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task);

// Sorted, finite, nonempty sample.
class EmpiricalDistribution {
public:
    explicit EmpiricalDistribution(std::vector<double> samples);

    const std::vector<double>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    // Order statistic at rank ceil(alpha * N).
    double quantile(double alpha) const;
    // Fraction of samples <= x.
    double ecdf(double x) const;

private:
    std::vector<double> samples_;
};

// alpha = k / 1000 for k = 1..999.
class QuantileGrid {
public:
    QuantileGrid();

    const std::vector<double>& alphas() const { return alphas_; }
    std::size_t size() const { return alphas_.size(); }
    // Column holding `alpha`; throws InvalidInput when alpha is off the grid.
    std::size_t index_of(double alpha) const;

private:
    std::vector<double> alphas_;
};

struct FrequentistRun {
    EmpiricalDistribution distribution;
    // ||S_hat - S*|| <= min_r g_r / 4 held, per surviving replicate.
    std::vector<bool> gap_condition;
    int dropped = 0;
};

// `reps` replicates of n ||P_hat_J - P*_J||_2^2. Replicate i draws its data
// from stream (seed, frequentist_data, n, i). Replicates hitting a numeric
// failure are dropped; more than 1% dropped is a NumericFailure.
FrequentistRun frequentist_samples(const ExperimentDesign& design, int n, int reps,
                                   std::uint64_t seed, int workers);

struct RealizationQuantiles {
    QuantileGrid grid;
    // Row j: posterior quantiles of realization j over the grid.
    Eigen::MatrixXd values;
    std::vector<bool> gap_condition;

    std::size_t realizations() const { return static_cast<std::size_t>(values.rows()); }
};

// For each of R fresh datasets, D pseudo-posterior draws of
// n ||P_J - P_hat_J||_2^2 reduced to quantiles on the grid.
RealizationQuantiles posterior_quantile_realizations(const ExperimentDesign& design, int n,
                                                     int realizations, int draws,
                                                     const QuantileGrid& grid, std::uint64_t seed,
                                                     int workers);

// Ranks (1-based, in ascending order of R values) used to summarize the R
// per-realization quantiles: floor(R/4), floor(R/2), ceil(3R/4), each clamped
// to [1, R]. For R = 50 these are 12, 25, 38.
std::size_t lower_quartile_rank(std::size_t r);
std::size_t median_rank(std::size_t r);
std::size_t upper_quartile_rank(std::size_t r);

struct QqPoint {
    double alpha;
    double gamma_true;
    double gamma_posterior_median;
};

std::vector<QqPoint> qq_points(const EmpiricalDistribution& freq, const RealizationQuantiles& rq);

struct CoverageRow {
    double level;
    double coverage;
    double iqr;
};

const std::vector<double>& default_levels();

// For confidence level L: sort the R values of gamma_L; coverage is the
// frequentist ECDF at the median-rank value, iqr the ECDF difference between
// the upper- and lower-quartile-rank values.
std::vector<CoverageRow> coverage_table(const EmpiricalDistribution& freq,
                                        const RealizationQuantiles& rq,
                                        const std::vector<double>& levels = default_levels());

// Draws of sum_i gamma_i z_i^2 with z_i i.i.d. standard normal.
std::vector<double> sample_xi_norm_sq(const GammaStar& gamma, int count, Rng& rng);

// sup_x |F_a(x) - F_b(x)| for two samples.
double kolmogorov_distance(std::span<const double> a, std::span<const double> b);

// ||S_hat - S*||_inf <= min_r g_r / 4.
bool gap_condition_holds(const SymMatrix& sigma_hat, const SymMatrix& truth,
                         const SpectrumSpec& spec);

}  // namespace projcred
