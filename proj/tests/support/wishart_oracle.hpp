#pragma once

// Reference sampler for the inverse-Wishart posterior built literally from
// its Wishart representation: Sigma^{-1} = sum_{j=1}^{degrees} W_j W_j^T with
// W_j ~ N(0, scale^{-1}). O(degrees * p^2) per draw; test use only.

#include <Eigen/Dense>

#include <cmath>

#include "projcred/posterior.hpp"

namespace projcred::testing {

inline Eigen::MatrixXd outer_product_precision(const PosteriorParams& params, Rng& rng) {
    const Eigen::Index p = params.dim();
    const auto terms = static_cast<long>(std::lround(params.degrees()));
    // W = K^{-T} z has covariance K^{-T} K^{-1} = scale^{-1}.
    const Eigen::MatrixXd& k = params.scale_factor();
    Eigen::MatrixXd precision = Eigen::MatrixXd::Zero(p, p);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(p);
    for (long j = 0; j < terms; ++j) {
        for (Eigen::Index i = 0; i < p; ++i) z(i) = normal(rng);
        const Eigen::VectorXd w = k.transpose().triangularView<Eigen::Upper>().solve(z);
        precision += w * w.transpose();
    }
    return precision;
}

}  // namespace projcred::testing
