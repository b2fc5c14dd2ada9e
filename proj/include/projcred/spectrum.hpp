#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "projcred/matrix_core.hpp"

namespace projcred {

// Half-open range [begin, end) of flat eigenvalue indices (0-based).
struct IndexRange {
    Eigen::Index begin = 0;
    Eigen::Index end = 0;

    Eigen::Index size() const { return end - begin; }
    bool contains(Eigen::Index i) const { return i >= begin && i < end; }
    bool operator==(const IndexRange&) const = default;
};

// Distinct eigenvalues mu_1 > ... > mu_q > 0 with multiplicities m_r. The
// flat spectrum repeats each mu_r m_r times, in descending order.
class SpectrumSpec {
public:
    SpectrumSpec(std::vector<double> distinct_values, std::vector<int> multiplicities);

    const std::vector<double>& values() const { return values_; }
    const std::vector<int>& multiplicities() const { return mult_; }
    std::size_t clusters() const { return values_.size(); }
    Eigen::Index dim() const { return dim_; }

    double value(std::size_t r) const { return values_.at(r); }
    int multiplicity(std::size_t r) const { return mult_.at(r); }

    // sigma_1 >= ... >= sigma_p.
    Eigen::VectorXd expanded() const;
    // Cluster r occupies flat indices ranges()[r].
    std::vector<IndexRange> ranges() const;
    // Diagonal covariance with the expanded spectrum.
    SymMatrix diagonal_matrix() const;
    // min_r g_r over all clusters; +inf when q = 1.
    double min_cluster_gap() const;

    bool operator==(const SpectrumSpec&) const = default;

private:
    std::vector<double> values_;
    std::vector<int> mult_;
    Eigen::Index dim_ = 0;
};

// Contiguous block of clusters {first, ..., last} (0-based cluster indices,
// inclusive). Must be a proper subset of all clusters.
class ClusterSelection {
public:
    ClusterSelection(const SpectrumSpec& spec, std::size_t first, std::size_t last);

    std::size_t first() const { return first_; }
    std::size_t last() const { return last_; }
    std::size_t count() const { return last_ - first_ + 1; }
    bool contains(std::size_t r) const { return r >= first_ && r <= last_; }

    // Flat indices of the selected eigenvalues; contiguous since the
    // selection is an interval of clusters.
    IndexRange index_set() const { return index_set_; }
    Eigen::Index dimension() const { return index_set_.size(); }
    double gap() const { return gap_; }
    double width() const { return width_; }

    bool operator==(const ClusterSelection&) const = default;

private:
    std::size_t first_;
    std::size_t last_;
    IndexRange index_set_;
    double gap_;
    double width_;
};

// Order-based clustering of a descending sample spectrum: the top m_1 indices
// form cluster 1, the next m_2 cluster 2 and so on.
std::vector<IndexRange> cluster_sample_eigenvalues(const Eigen::VectorXd& sorted_eigenvalues,
                                                   const SpectrumSpec& spec);

class Projector {
public:
    Projector(SymMatrix matrix, Eigen::Index rank) : matrix_(std::move(matrix)), rank_(rank) {}

    const SymMatrix& matrix() const { return matrix_; }
    Eigen::Index rank() const { return rank_; }
    Eigen::Index dim() const { return matrix_.dim(); }

private:
    SymMatrix matrix_;
    Eigen::Index rank_;
};

// Sum of u_k u_k^T over k in `indices`.
Projector projector(const EigenDecomposition& eig, const std::vector<Eigen::Index>& indices);
Projector projector(const EigenDecomposition& eig, IndexRange indices);

// Spectral gap of the selection:
//   first == 0          -> mu_last - mu_{last+1}
//   last == q-1         -> mu_{first-1} - mu_first
//   otherwise           -> min of both.
double spectral_gap(const SpectrumSpec& spec, std::size_t first, std::size_t last);
// mu_first - mu_last.
double cluster_width(const SpectrumSpec& spec, std::size_t first, std::size_t last);

// Diagonal of the limit covariance: entries 2 mu_r mu_s / (mu_r - mu_s)^2
// for r inside the selection (outer loop), s outside (middle loop), each
// repeated m_r * m_s times (inner).
struct GammaStar {
    std::vector<double> diagonal;

    double norm1() const;    // trace
    double norm2() const;    // Frobenius
    double norm_inf() const; // largest entry
};

GammaStar gamma_star(const SpectrumSpec& spec, const ClusterSelection& sel);

// First-order term of P_J(truth + E) - P_J(truth):
//   sum_{r in J} sum_{s not in J} (P_r E P_s + P_s E P_r) / (mu_r - mu_s).
// mu_r is taken as the mean eigenvalue of cluster r.
SymMatrix linear_term(const EigenDecomposition& truth, const std::vector<IndexRange>& clusters,
                      const ClusterSelection& sel, const SymMatrix& e);

// ||P - Q||_2^2 (squared Frobenius distance).
double projector_distance_sq(const Projector& p, const Projector& q);

}  // namespace projcred
