#include <catch_amalgamated.hpp>

#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "projcred/error.hpp"
#include "projcred/mc_engine.hpp"
#include "support/stats.hpp"

using namespace projcred;
using Catch::Approx;

namespace {

ExperimentDesign small_design() {
    SpectrumSpec spec({8, 4, 2, 1, 0.5}, {1, 1, 1, 1, 1});
    return ExperimentDesign{"small",
                            spec,
                            std::vector<LawKind>(5, LawKind::gaussian),
                            ClusterSelection(spec, 0, 0),
                            {100},
                            McBudget{},
                            Prior{SymMatrix::identity(5), 1.0},
                            3};
}

std::vector<double> one_to(int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    std::iota(v.begin(), v.end(), 1.0);
    return v;
}

// Realizations whose every row equals the quantiles of `freq`.
RealizationQuantiles matching_rows(const EmpiricalDistribution& freq, int rows) {
    RealizationQuantiles rq{QuantileGrid{}, Eigen::MatrixXd(rows, 999), std::vector<bool>(rows, true)};
    for (int j = 0; j < rows; ++j)
        for (int k = 0; k < 999; ++k) rq.values(j, k) = freq.quantile(rq.grid.alphas()[k]);
    return rq;
}

}  // namespace

TEST_CASE("parallel_for covers every index and reports the first failure", "[mc][parallel]") {
    for (int workers : {1, 3, 8}) {
        std::vector<int> hits(1000, 0);
        parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i] += 1; });
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
    try {
        parallel_for(100, 4, [](std::size_t i) {
            if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "17");
    }
}

TEST_CASE("empirical distribution", "[mc]") {
    const EmpiricalDistribution d({3, 1, 2});
    CHECK(d.samples() == std::vector<double>{1, 2, 3});
    CHECK(d.ecdf(0.5) == 0.0);
    CHECK(d.ecdf(2.0) == Approx(2.0 / 3.0));
    CHECK(d.ecdf(9.0) == 1.0);
    CHECK(d.quantile(0.5) == 2.0);
    CHECK_THROWS_AS(EmpiricalDistribution({}), InvalidInput);
    CHECK_THROWS_AS(EmpiricalDistribution({1.0, NAN}), InvalidInput);
}

TEST_CASE("quantile grid", "[mc]") {
    const QuantileGrid g;
    REQUIRE(g.size() == 999);
    CHECK(g.alphas().front() == 0.001);
    CHECK(g.alphas().back() == 0.999);
    for (std::size_t k = 1; k < g.size(); ++k) CHECK(g.alphas()[k] > g.alphas()[k - 1]);
    CHECK(g.index_of(0.95) == 949);
    CHECK(g.index_of(0.75) == 749);
    CHECK_THROWS_AS(g.index_of(0.9505), InvalidInput);
    CHECK_THROWS_AS(g.index_of(1.0), InvalidInput);
}

TEST_CASE("grid quantiles are monotone", "[mc][property]") {
    Rng rng(12);
    std::exponential_distribution<double> law(1.0);
    std::uniform_int_distribution<int> size(1, 400);
    const QuantileGrid g;
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> v(static_cast<std::size_t>(size(rng)));
        for (double& x : v) x = law(rng);
        const EmpiricalDistribution d(v);
        double prev = -INFINITY;
        for (double a : g.alphas()) {
            const double q = d.quantile(a);
            REQUIRE(q >= prev);
            prev = q;
        }
    }
}

TEST_CASE("summary ranks", "[mc]") {
    CHECK(lower_quartile_rank(50) == 12);
    CHECK(median_rank(50) == 25);
    CHECK(upper_quartile_rank(50) == 38);
    CHECK(lower_quartile_rank(20) == 5);
    CHECK(median_rank(20) == 10);
    CHECK(upper_quartile_rank(20) == 15);
    CHECK(lower_quartile_rank(1) == 1);
    CHECK(median_rank(1) == 1);
    CHECK(upper_quartile_rank(1) == 1);
}

TEST_CASE("qq points", "[mc][qq]") {
    const EmpiricalDistribution freq(one_to(1000));
    SECTION("rows matching the frequentist quantiles lie on the identity") {
        const auto pts = qq_points(freq, matching_rows(freq, 20));
        REQUIRE(pts.size() == 999);
        for (const auto& p : pts) CHECK(p.gamma_posterior_median == p.gamma_true);
        CHECK(pts[0].alpha == 0.001);
        CHECK(pts[0].gamma_true == 1.0);
    }
    SECTION("a single realization is its own median") {
        auto rq = matching_rows(freq, 1);
        rq.values.array() += 0.5;
        const auto pts = qq_points(freq, rq);
        for (std::size_t k = 0; k < pts.size(); ++k)
            CHECK(pts[k].gamma_posterior_median == rq.values(0, static_cast<Eigen::Index>(k)));
    }
    SECTION("identical realizations give the common value") {
        RealizationQuantiles rq{QuantileGrid{}, Eigen::MatrixXd::Constant(7, 999, 4.25),
                                std::vector<bool>(7, true)};
        for (const auto& p : qq_points(freq, rq)) CHECK(p.gamma_posterior_median == 4.25);
    }
}

TEST_CASE("coverage table", "[mc][coverage]") {
    const EmpiricalDistribution freq(one_to(1000));
    SECTION("matching rows recover the nominal level with zero spread") {
        const auto rows = coverage_table(freq, matching_rows(freq, 20));
        REQUIRE(rows.size() == 6);
        for (const auto& row : rows) {
            CHECK(row.coverage == Approx(row.level).margin(1e-3));
            CHECK(row.iqr == 0.0);
        }
        CHECK(rows[0].level == 0.99);
        CHECK(rows[5].level == 0.75);
    }
    SECTION("values are proportions and follow the median realization") {
        Rng rng(1);
        std::normal_distribution<double> noise(0.0, 40.0);
        auto rq = matching_rows(freq, 20);
        for (int j = 0; j < 20; ++j) rq.values.row(j).array() += noise(rng);
        for (const auto& row : coverage_table(freq, rq)) {
            CHECK(row.coverage >= 0.0);
            CHECK(row.coverage <= 1.0);
            CHECK(row.iqr >= 0.0);
            CHECK(row.iqr <= 1.0);
        }
    }
    SECTION("coverage is monotone in the level for monotone rows") {
        Rng rng(2);
        std::uniform_real_distribution<double> shift(-30, 30);
        auto rq = matching_rows(freq, 20);
        for (int j = 0; j < 20; ++j) rq.values.row(j).array() += shift(rng);
        const auto rows = coverage_table(freq, rq, {0.75, 0.8, 0.85, 0.9, 0.95, 0.99});
        for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].coverage >= rows[i - 1].coverage);
    }
}

TEST_CASE("weighted chi-square sampler", "[mc][xi]") {
    Rng rng(44);
    SECTION("single weight") {
        GammaStar g{{2.5}};
        const auto d = sample_xi_norm_sq(g, 100000, rng);
        const auto m = testing::moments(d);
        CHECK(m.mean == Approx(2.5).epsilon(0.03));
        CHECK(m.var == Approx(2 * 2.5 * 2.5).epsilon(0.03));
    }
    SECTION("vanishing weights") {
        GammaStar g{std::vector<double>(10, 1e-300)};
        for (double v : sample_xi_norm_sq(g, 1000, rng)) CHECK(v < 1e-290);
    }
    SECTION("moments for a random diagonal") {
        std::uniform_real_distribution<double> w(0.1, 3.0);
        GammaStar g;
        for (int i = 0; i < 20; ++i) g.diagonal.push_back(w(rng));
        const auto m = testing::moments(sample_xi_norm_sq(g, 100000, rng));
        CHECK(std::abs(m.mean - g.norm1()) <= 3.0 * m.mean_se);
        CHECK(std::abs(m.var - 2.0 * g.norm2() * g.norm2()) <= 3.0 * m.var_se);
    }
    CHECK_THROWS_AS(sample_xi_norm_sq(GammaStar{{1.0}}, 0, rng), InvalidInput);
}

TEST_CASE("Kolmogorov distance", "[mc]") {
    const std::vector<double> a{1, 2, 3, 4};
    CHECK(kolmogorov_distance(a, a) == 0.0);
    CHECK(kolmogorov_distance(a, std::vector<double>{10, 11}) == 1.0);
    CHECK(kolmogorov_distance(a, std::vector<double>{1, 2}) == Approx(0.5));
}

TEST_CASE("frequentist replicates", "[mc][freq]") {
    const auto design = small_design();
    const auto a = frequentist_samples(design, 100, 200, 5, 1);
    const auto b = frequentist_samples(design, 100, 200, 5, 3);
    CHECK(a.distribution.samples() == b.distribution.samples());
    CHECK(a.gap_condition == b.gap_condition);
    CHECK(a.dropped == 0);
    CHECK(a.distribution.size() == 200);

    // The unscaled distance shrinks as the sample grows.
    const auto big = frequentist_samples(design, 100000, 100, 5, 1);
    CHECK(big.distribution.quantile(0.5) / 100000.0 < a.distribution.quantile(0.01) / 100.0);
}

TEST_CASE("posterior realizations", "[mc][posterior]") {
    const auto design = small_design();
    const QuantileGrid grid;
    const auto a = posterior_quantile_realizations(design, 200, 4, 100, grid, 8, 1);
    const auto b = posterior_quantile_realizations(design, 200, 4, 100, grid, 8, 4);
    REQUIRE(a.values.rows() == 4);
    REQUIRE(a.values.cols() == 999);
    CHECK(a.values == b.values);
    for (Eigen::Index j = 0; j < a.values.rows(); ++j)
        for (Eigen::Index k = 1; k < a.values.cols(); ++k) CHECK(a.values(j, k) >= a.values(j, k - 1));
}

TEST_CASE("gap condition", "[mc]") {
    const SpectrumSpec spec({4, 2}, {1, 1});
    const SymMatrix truth = spec.diagonal_matrix();
    CHECK(gap_condition_holds(truth, truth, spec));
    CHECK(gap_condition_holds(truth + SymMatrix::identity(2) * 0.4, truth, spec));
    CHECK(!gap_condition_holds(truth + SymMatrix::identity(2) * 0.6, truth, spec));
}
