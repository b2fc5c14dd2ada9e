#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "projcred/matrix_core.hpp"
#include "projcred/rng.hpp"
#include "projcred/spectrum.hpp"

namespace projcred {

enum class LawKind { gaussian, uniform, laplace, discrete3 };

std::string to_string(LawKind kind);
LawKind law_kind_from_string(const std::string& name);

// Zero-mean scalar law with a prescribed variance v. The scale a is
//   uniform on [-a, a]:        a = sqrt(3 v)
//   laplace with scale a:      a = sqrt(v / 2)
//   uniform on {-a, 0, a}:     a = sqrt(3 v / 2)
//   gaussian:                  a = sqrt(v) (the standard deviation)
class ComponentLaw {
public:
    ComponentLaw(LawKind kind, double variance);

    LawKind kind() const { return kind_; }
    double variance() const { return variance_; }
    double scale() const { return scale_; }

    double operator()(Rng& rng) const;

private:
    LawKind kind_;
    double variance_;
    double scale_;
};

// Marchenko-Pastur law with unit variance scale and ratio `lambda`, with
// draws restricted to [lower, upper]. Sampled by rejection from the uniform
// envelope on [lower, upper].
class MarchenkoPastur {
public:
    MarchenkoPastur(double lambda, double lower, double upper);

    // Ratio whose support (1 -+ sqrt(lambda))^2 best matches [lower, upper]
    // in the least-squares sense.
    static double fit_ratio(double lower, double upper);
    static MarchenkoPastur from_support(double lower, double upper);

    double lambda() const { return lambda_; }
    double lower() const { return lower_; }
    double upper() const { return upper_; }

    // Unnormalized density sqrt((b - x)(x - a)) / (2 pi lambda x).
    double density(double x) const;
    // CDF of the law restricted to [lower, upper], by adaptive quadrature.
    double cdf(double x) const;

    double operator()(Rng& rng) const;

private:
    double lambda_;
    double lower_;
    double upper_;
    double density_max_;
    double mass_;
};

struct McBudget {
    int freq_reps = 3000;
    int realizations = 50;
    int draws = 3000;

    bool operator==(const McBudget&) const = default;
};

struct Prior {
    SymMatrix g;
    double b = 1.0;
};

struct ExperimentDesign {
    std::string name;
    SpectrumSpec spectrum;
    std::vector<LawKind> laws;  // one per coordinate
    ClusterSelection selection;
    std::vector<int> n_grid;
    McBudget mc;
    Prior prior;
    std::uint64_t seed = 0;

    Eigen::Index dim() const { return spectrum.dim(); }
    SymMatrix truth() const { return spectrum.diagonal_matrix(); }
    // Throws InvalidInput when any design invariant fails.
    void validate() const;
};

const std::vector<int>& default_n_grid();

// Gaussian data, p = 100, simple spectrum with five spikes on top of a
// Marchenko-Pastur bulk on [0.71, 1.34]; target is the leading eigenvector.
ExperimentDesign build_experiment1(std::uint64_t seed);

// Mixed component laws, p = 100, three triple eigenvalues 25, 20, 15, then
// 10, 7.5, 5 and 88 values uniform on [0, 3]; target is the 9-dimensional
// leading subspace.
ExperimentDesign build_experiment2(std::uint64_t seed);

// Breaks exact ties in a descending vector by subtracting k * 1e-12 from the
// k-th repeated value of a run.
void break_ties(std::vector<double>& descending);

// n x p matrix with i.i.d. rows and independent coordinates; coordinate j
// follows laws[j] with variance sigma_j of the expanded spectrum.
Eigen::MatrixXd generate_dataset(const ExperimentDesign& design, int n, Rng& rng);

// (1/n) sum x_j x_j^T without centering.
SymMatrix sample_covariance(const Eigen::MatrixXd& data);

enum class ConcentrationCase { gaussian, subgaussian, bounded, logconcave };

std::string to_string(ConcentrationCase c);
ConcentrationCase concentration_case_from_string(const std::string& name);

struct TruthStats {
    double effective_rank = 0.0;
    double spectral_norm = 0.0;
    std::optional<double> radius;  // bounded case only
};

TruthStats truth_stats(const SymMatrix& truth, std::optional<double> radius = std::nullopt);

// Concentration radius of the sample covariance, up to absolute constants
// (all set to 1), natural logarithms:
//   gaussian     sqrt((r(S) + log n) / n)
//   subgaussian  sqrt((p + log n) / n)
//   bounded      R / sqrt(||S||) * sqrt(log n / n)
//   logconcave   sqrt(log^6 n / (n p))
double delta_hat(ConcentrationCase c, double n, Eigen::Index p, const TruthStats& stats);

}  // namespace projcred
