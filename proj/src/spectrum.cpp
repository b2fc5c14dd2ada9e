#include "projcred/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "projcred/error.hpp"

namespace projcred {

SpectrumSpec::SpectrumSpec(std::vector<double> distinct_values, std::vector<int> multiplicities)
    : values_(std::move(distinct_values)), mult_(std::move(multiplicities)) {
    if (values_.empty() || values_.size() != mult_.size()) {
        throw InvalidInput("SpectrumSpec: need one multiplicity per distinct eigenvalue");
    }
    for (std::size_t r = 0; r < values_.size(); ++r) {
        if (!std::isfinite(values_[r]) || values_[r] <= 0.0) {
            throw InvalidInput("SpectrumSpec: eigenvalues must be positive and finite");
        }
        if (r > 0 && !(values_[r] < values_[r - 1])) {
            throw InvalidInput("SpectrumSpec: eigenvalues must be strictly decreasing (index " +
                               std::to_string(r) + ")");
        }
        if (mult_[r] < 1) throw InvalidInput("SpectrumSpec: multiplicities must be positive");
        dim_ += mult_[r];
    }
}

Eigen::VectorXd SpectrumSpec::expanded() const {
    Eigen::VectorXd out(dim_);
    Eigen::Index k = 0;
    for (std::size_t r = 0; r < values_.size(); ++r) {
        for (int j = 0; j < mult_[r]; ++j) out(k++) = values_[r];
    }
    return out;
}

std::vector<IndexRange> SpectrumSpec::ranges() const {
    std::vector<IndexRange> out;
    out.reserve(mult_.size());
    Eigen::Index begin = 0;
    for (int m : mult_) {
        out.push_back({begin, begin + m});
        begin += m;
    }
    return out;
}

SymMatrix SpectrumSpec::diagonal_matrix() const { return SymMatrix::diagonal(expanded()); }

double SpectrumSpec::min_cluster_gap() const {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r + 1 < values_.size(); ++r) {
        gap = std::min(gap, values_[r] - values_[r + 1]);
    }
    return gap;
}

double spectral_gap(const SpectrumSpec& spec, std::size_t first, std::size_t last) {
    const std::size_t q = spec.clusters();
    if (first > last || last >= q) throw InvalidInput("spectral_gap: invalid cluster range");
    if (first == 0 && last == q - 1) {
        throw InvalidInput("spectral_gap: selection covers every cluster, no external gap");
    }
    if (first == 0) return spec.value(last) - spec.value(last + 1);
    if (last == q - 1) return spec.value(first - 1) - spec.value(first);
    return std::min(spec.value(first - 1) - spec.value(first),
                    spec.value(last) - spec.value(last + 1));
}

double cluster_width(const SpectrumSpec& spec, std::size_t first, std::size_t last) {
    if (first > last || last >= spec.clusters()) {
        throw InvalidInput("cluster_width: invalid cluster range");
    }
    return spec.value(first) - spec.value(last);
}

ClusterSelection::ClusterSelection(const SpectrumSpec& spec, std::size_t first, std::size_t last)
    : first_(first),
      last_(last),
      gap_(spectral_gap(spec, first, last)),
      width_(cluster_width(spec, first, last)) {
    const auto ranges = spec.ranges();
    index_set_ = {ranges[first].begin, ranges[last].end};
}

std::vector<IndexRange> cluster_sample_eigenvalues(const Eigen::VectorXd& sorted_eigenvalues,
                                                   const SpectrumSpec& spec) {
    if (sorted_eigenvalues.size() != spec.dim()) {
        throw InvalidInput("cluster_sample_eigenvalues: got " +
                           std::to_string(sorted_eigenvalues.size()) +
                           " eigenvalues for multiplicities summing to " +
                           std::to_string(spec.dim()));
    }
    return spec.ranges();
}

Projector projector(const EigenDecomposition& eig, const std::vector<Eigen::Index>& indices) {
    if (indices.empty()) throw InvalidInput("projector: empty index set");
    const Eigen::Index p = eig.dim();
    Eigen::MatrixXd basis(p, static_cast<Eigen::Index>(indices.size()));
    for (std::size_t c = 0; c < indices.size(); ++c) {
        const Eigen::Index k = indices[c];
        if (k < 0 || k >= p) throw InvalidInput("projector: index out of range");
        basis.col(static_cast<Eigen::Index>(c)) = eig.vectors.col(k);
    }
    Eigen::MatrixXd pm = Eigen::MatrixXd::Zero(p, p);
    pm.selfadjointView<Eigen::Lower>().rankUpdate(basis);
    return Projector(SymMatrix(Eigen::MatrixXd(pm.selfadjointView<Eigen::Lower>())),
                     basis.cols());
}

Projector projector(const EigenDecomposition& eig, IndexRange indices) {
    if (indices.size() <= 0) throw InvalidInput("projector: empty index set");
    if (indices.begin < 0 || indices.end > eig.dim()) {
        throw InvalidInput("projector: index out of range");
    }
    const Eigen::Index p = eig.dim();
    const auto basis = eig.vectors.middleCols(indices.begin, indices.size());
    Eigen::MatrixXd pm = Eigen::MatrixXd::Zero(p, p);
    pm.selfadjointView<Eigen::Lower>().rankUpdate(basis);
    return Projector(SymMatrix(Eigen::MatrixXd(pm.selfadjointView<Eigen::Lower>())),
                     indices.size());
}

double GammaStar::norm1() const { return std::accumulate(diagonal.begin(), diagonal.end(), 0.0); }

double GammaStar::norm2() const {
    double s = 0.0;
    for (double g : diagonal) s += g * g;
    return std::sqrt(s);
}

double GammaStar::norm_inf() const {
    return diagonal.empty() ? 0.0 : *std::max_element(diagonal.begin(), diagonal.end());
}

GammaStar gamma_star(const SpectrumSpec& spec, const ClusterSelection& sel) {
    GammaStar out;
    const auto m_sel = static_cast<std::size_t>(sel.dimension());
    out.diagonal.reserve(m_sel * (static_cast<std::size_t>(spec.dim()) - m_sel));
    for (std::size_t r = sel.first(); r <= sel.last(); ++r) {
        for (std::size_t s = 0; s < spec.clusters(); ++s) {
            if (sel.contains(s)) continue;
            const double mr = spec.value(r);
            const double ms = spec.value(s);
            const double entry = 2.0 * mr * ms / ((mr - ms) * (mr - ms));
            const int repeats = spec.multiplicity(r) * spec.multiplicity(s);
            out.diagonal.insert(out.diagonal.end(), static_cast<std::size_t>(repeats), entry);
        }
    }
    return out;
}

SymMatrix linear_term(const EigenDecomposition& truth, const std::vector<IndexRange>& clusters,
                      const ClusterSelection& sel, const SymMatrix& e) {
    const Eigen::Index p = truth.dim();
    if (e.dim() != p) throw InvalidInput("linear_term: dimension mismatch");
    if (sel.last() >= clusters.size()) throw InvalidInput("linear_term: selection out of range");

    std::vector<double> mu(clusters.size());
    std::vector<std::size_t> owner(static_cast<std::size_t>(p));
    for (std::size_t r = 0; r < clusters.size(); ++r) {
        mu[r] = truth.values.segment(clusters[r].begin, clusters[r].size()).mean();
        for (Eigen::Index k = clusters[r].begin; k < clusters[r].end; ++k) {
            owner[static_cast<std::size_t>(k)] = r;
        }
    }

    // In the eigenbasis, P_r E P_s only keeps the (r, s) block of U^T E U.
    const Eigen::MatrixXd& u = truth.vectors;
    const Eigen::MatrixXd rotated = u.transpose() * e.dense() * u;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index k = 0; k < p; ++k) {
        const std::size_t r = owner[static_cast<std::size_t>(k)];
        if (!sel.contains(r)) continue;
        for (Eigen::Index l = 0; l < p; ++l) {
            const std::size_t s = owner[static_cast<std::size_t>(l)];
            if (sel.contains(s)) continue;
            const double v = rotated(k, l) / (mu[r] - mu[s]);
            m(k, l) = v;
            m(l, k) = v;
        }
    }
    return SymMatrix::symmetrized(u * m * u.transpose());
}

double projector_distance_sq(const Projector& p, const Projector& q) {
    if (p.dim() != q.dim()) throw InvalidInput("projector_distance_sq: dimension mismatch");
    return (p.matrix().dense() - q.matrix().dense()).squaredNorm();
}

}  // namespace projcred
