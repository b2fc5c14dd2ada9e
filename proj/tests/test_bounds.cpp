#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "projcred/bounds.hpp"
#include "projcred/error.hpp"

using namespace projcred;
using Catch::Approx;

namespace {

ExperimentDesign gaussian_design(std::vector<double> values, std::vector<int> mult,
                                 std::size_t first, std::size_t last) {
    SpectrumSpec spec(std::move(values), std::move(mult));
    const auto p = static_cast<std::size_t>(spec.dim());
    return ExperimentDesign{"test",
                            spec,
                            std::vector<LawKind>(p, LawKind::gaussian),
                            ClusterSelection(spec, first, last),
                            {100},
                            McBudget{},
                            Prior{SymMatrix::identity(spec.dim()), 1.0},
                            1};
}

}  // namespace

TEST_CASE("error terms on a three-point spectrum", "[bounds]") {
    // Frozen from an independent evaluation of the formulas.
    const SpectrumSpec spec({4, 2, 1}, {1, 1, 1});
    const ClusterSelection sel(spec, 0, 0);
    auto r = bound_report(spec, sel, 1.0, 1.0, 100.0, 0.1, {1.5, 2.5});
    CHECK(r.diamond1 == Approx(25.443539811384035).epsilon(1e-12));
    CHECK(r.diamond2 == Approx(3.12).epsilon(1e-12));
    CHECK(r.diamond3 == Approx(1.5021762184025431).epsilon(1e-12));
    CHECK(r.denominator == Approx(1.9084782336493231).epsilon(1e-12));
    CHECK(r.diamond == Approx(15.763764176967323).epsilon(1e-12));
    CHECK(r.overline_delta == Approx(0.0125).epsilon(1e-12));
    CHECK(r.overline_diamond == Approx(0.5000774758755365).epsilon(1e-12));
    CHECK(!r.degenerate);
    CHECK(r.inputs.p == 3);
    CHECK(r.inputs.gap == 2.0);
}

TEST_CASE("single-entry limit covariance is flagged", "[bounds]") {
    const SpectrumSpec spec({2, 1}, {1, 1});
    const ClusterSelection sel(spec, 0, 0);
    CHECK(gamma_denominator(gamma_star(spec, sel)) == 0.0);
    const auto r = bound_report(spec, sel, 1.0, 1.0, 100.0, 0.1, {1.0, 1.0});
    CHECK(r.degenerate);
    CHECK(std::isfinite(r.diamond));
    CHECK(std::isfinite(r.overline_diamond));
    CHECK(r.diamond == Approx(r.diamond1 + r.diamond2 + r.diamond3 + 0.01));
}

TEST_CASE("third error term scales with n as printed", "[bounds]") {
    const auto d = build_experiment1(1);
    for (double n : {100.0, 1000.0, 3000.0}) {
        const auto a = diamond_terms(d.spectrum, d.selection, 1.0, 1.0, n, 0.1);
        const auto b = diamond_terms(d.spectrum, d.selection, 1.0, 1.0, 2 * n, 0.1);
        CHECK(b.diamond3 / a.diamond3 ==
              Approx(std::sqrt(std::log(2 * n) / std::log(n)) * std::sqrt(0.5)).epsilon(1e-12));
        CHECK(b.diamond1 < a.diamond1);
        CHECK(b.diamond3 < a.diamond3);
    }
}

TEST_CASE("second term takes the smaller of its two branches", "[bounds]") {
    // Selecting the lower triple: m ||S||^2 = 12 > Tr(S^2) = 7.
    const SpectrumSpec spec({2, 1}, {1, 3});
    const ClusterSelection sel(spec, 1, 1);
    const auto r = diamond_terms(spec, sel, 1.0, 1.0, 100.0, 0.2);
    CHECK(r.diamond2 == Approx(2.0 * 7.0 / 1.0 * 4.0 * (0.2 + 0.04)).epsilon(1e-12));
}

TEST_CASE("second and overline terms", "[bounds]") {
    const SpectrumSpec spec({4, 2, 1}, {1, 1, 1});
    const ClusterSelection sel(spec, 0, 0);
    SECTION("vanishing radius leaves only the moment term") {
        const auto r = bound_report(spec, sel, 1.0, 1.0, 100.0, 1e-12, {2.0, 3.0});
        CHECK(r.overline_delta < 1e-30);
        CHECK(r.overline_diamond == Approx(6.0 * std::pow(3.0, 0.25) / 10.0).epsilon(1e-9));
    }
    SECTION("large radius selects the quartic branch") {
        const auto r = bound_report(spec, sel, 1.0, 1.0, 100.0, 5.0, {2.0, 3.0});
        CHECK(r.overline_delta == Approx(100.0 * std::pow(2.5, 4)).epsilon(1e-12));
    }
    SECTION("small radius selects the cubic branch") {
        const auto r = bound_report(spec, sel, 1.0, 1.0, 100.0, 0.2, {2.0, 3.0});
        CHECK(r.overline_delta == Approx(100.0 * std::pow(0.1, 3)).epsilon(1e-12));
    }
    SECTION("moment term falls as one over root n") {
        const auto a = bound_report(spec, sel, 1.0, 1.0, 100.0, 1e-12, {2.0, 3.0});
        const auto b = bound_report(spec, sel, 1.0, 1.0, 1600.0, 1e-12, {2.0, 3.0});
        CHECK(b.overline_diamond / a.overline_diamond == Approx(0.25).epsilon(1e-9));
    }
    CHECK_THROWS_AS(diamond_terms(spec, sel, 1.0, 1.0, 1.0, 0.1), InvalidInput);
    CHECK_THROWS_AS(diamond_terms(spec, sel, 1.0, 1.0, 10.0, 0.0), InvalidInput);
}

TEST_CASE("error terms are invariant under joint rescaling", "[bounds]") {
    // Scaling truth and prior by c leaves the three terms (degree 0 in c)
    // and the limit covariance unchanged.
    const SpectrumSpec spec({9, 4, 2, 1}, {1, 2, 1, 1});
    const SpectrumSpec scaled({18, 8, 4, 2}, {1, 2, 1, 1});
    const auto a = diamond_terms(spec, ClusterSelection(spec, 1, 1), 1.0, 1.0, 500.0, 0.3);
    const auto b = diamond_terms(scaled, ClusterSelection(scaled, 1, 1), 2.0, 1.0, 500.0, 0.3);
    CHECK(b.diamond1 == Approx(a.diamond1).epsilon(1e-12));
    CHECK(b.diamond2 == Approx(a.diamond2).epsilon(1e-12));
    CHECK(b.diamond3 == Approx(a.diamond3).epsilon(1e-12));
    CHECK(b.denominator == Approx(a.denominator).epsilon(1e-12));
}

TEST_CASE("experiment error terms are positive", "[bounds]") {
    for (const auto& d : {build_experiment1(20190601), build_experiment2(20190601)}) {
        for (int n : default_n_grid()) {
            const double delta =
                delta_hat(ConcentrationCase::gaussian, n, d.dim(), truth_stats(d.truth()));
            const auto r = bound_report(d.spectrum, d.selection, 1.0, 1.0, n, delta, {1.6, 2.0});
            INFO(d.name << " n=" << n);
            CHECK(r.diamond1 > 0.0);
            CHECK(r.diamond2 > 0.0);
            CHECK(r.diamond3 > 0.0);
            CHECK(r.denominator > 0.0);
            CHECK(std::isfinite(r.diamond));
            CHECK(r.overline_diamond > 0.0);
            CHECK(std::isfinite(r.overline_diamond));
        }
    }
}

TEST_CASE("whitening matrices", "[bounds][whitening]") {
    for (const auto& d : {build_experiment1(5), build_experiment2(5)}) {
        const auto mm = moment_matrices(d.spectrum, d.selection);
        const Eigen::MatrixXd s = d.truth().dense();
        CHECK(mm.u.rows() == d.selection.dimension());
        CHECK(mm.v.rows() == d.dim() - d.selection.dimension());
        CHECK((mm.u * s * mm.u.transpose() - Eigen::MatrixXd::Identity(mm.u.rows(), mm.u.rows()))
                  .cwiseAbs()
                  .maxCoeff() < 1e-9);
        CHECK((mm.v * s * mm.v.transpose() - Eigen::MatrixXd::Identity(mm.v.rows(), mm.v.rows()))
                  .cwiseAbs()
                  .maxCoeff() < 1e-9);
    }

    const auto d = gaussian_design({5, 3, 2, 1}, {2, 1, 1, 1}, 0, 0);
    const auto mm = moment_matrices(d.spectrum, d.selection);
    Rng rng(3);
    const Eigen::MatrixXd ux = generate_dataset(d, 100000, rng) * mm.u.transpose();
    const Eigen::MatrixXd cov = ux.transpose() * ux / 100000.0;
    CHECK((cov - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("third moments of whitened gaussian data", "[bounds][moments]") {
    Rng rng(19);
    SECTION("one-dimensional target: absolute third moment of a standard normal") {
        const auto d = gaussian_design({5, 3, 2, 1}, {1, 1, 1, 1}, 0, 0);
        const auto [mu, mv] = moment3_estimates(d, 100000, rng);
        CHECK(mu == Approx(1.595769121605731).epsilon(0.02));
        CHECK(mv > mu);
    }
    SECTION("two-dimensional target: third moment of chi with two degrees") {
        const auto d = gaussian_design({5, 3, 2, 1}, {2, 1, 1, 1}, 0, 0);
        const auto [mu, mv] = moment3_estimates(d, 100000, rng);
        CHECK(mu == Approx(3.7599424119465015).epsilon(0.02));
        (void)mv;
    }
    CHECK_THROWS_AS(moment3_estimates(build_experiment1(1), 999, rng), InvalidInput);
}
