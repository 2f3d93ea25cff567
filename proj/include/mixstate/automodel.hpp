#pragma once

#include "mixstate/families.hpp"
#include "mixstate/field.hpp"
#include "mixstate/linalg.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace mixstate {

enum class Boundary { Free, Toroidal };

enum class Direction { East, West, North, South };

struct Neighbour {
    std::size_t site;
    Direction dir;  // where the neighbour sits relative to the centre site
};

// Undirected edge {i, j}; i is the west (horizontal) or south (vertical) end,
// so the stored matrix is beta_ij with j the east or north neighbour of i.
struct Edge {
    std::size_t i;
    std::size_t j;
    bool horizontal;
};

// Four-nearest-neighbour lattice. Row 0 is the top row, so the north
// neighbour of (r, c) is (r - 1, c).
class Lattice {
public:
    // Toroidal lattices need rows, cols >= 3 so that no pair of sites is
    // joined twice.
    Lattice(std::size_t rows, std::size_t cols, Boundary boundary = Boundary::Free);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return rows_ * cols_; }
    Boundary boundary() const { return boundary_; }

    std::span<const Neighbour> neighbours(std::size_t site) const {
        return {nbrs_.data() + offsets_[site], nbrs_.data() + offsets_[site + 1]};
    }
    const std::vector<Edge>& edges() const { return edges_; }
    bool interior(std::size_t site) const;

private:
    std::size_t rows_;
    std::size_t cols_;
    Boundary boundary_;
    std::vector<Neighbour> nbrs_;
    std::vector<std::size_t> offsets_;
    std::vector<Edge> edges_;
};

// alpha, beta^(1) (horizontal), beta^(2) (vertical): for every site i,
// beta_{i, east(i)} = beta_h and beta_{i, north(i)} = beta_v.
struct TranslationInvariantParams {
    Vec alpha;
    Mat beta_h;
    Mat beta_v;
};

// theta_i(x) = alpha_i + sum_{j in di} beta_ij B(x_j) with beta_ji = beta_ij^T.
class AutoModel {
public:
    // General parametrization: one alpha per site and one beta_ij per edge,
    // indexed like lattice.edges().
    AutoModel(Family family, Lattice lattice, std::vector<Vec> alpha, std::vector<Mat> edge_beta);

    // Throws DomainError if require_symmetric and beta_h or beta_v is not symmetric.
    static AutoModel translation_invariant(Family family, Lattice lattice, const TranslationInvariantParams& p,
                                           bool require_symmetric = true);

    const Family& family() const { return family_; }
    const Lattice& lattice() const { return lattice_; }
    const Vec& alpha(std::size_t site) const { return alpha_[site]; }
    const Mat& edge_beta(std::size_t edge) const { return edge_beta_[edge]; }
    // Matrix multiplying B(x_j) in theta_i, for the k-th neighbour of site i.
    const Mat& neighbour_beta(std::size_t site, std::size_t k) const { return nbr_beta_[site][k]; }
    const std::optional<TranslationInvariantParams>& ti_params() const { return ti_; }

    // True when every beta_ij is a symmetric matrix.
    bool symmetric() const;
    // True when every beta entry is zero.
    bool independent() const;

    // Unchecked local natural parameter from cached sufficient statistics.
    Vec local_theta(std::size_t site, std::span<const Vec> stats) const;
    Vec local_theta(const Field& field, std::size_t site) const;

    // Throws InadmissibleParameter if theta_i leaves the family's set.
    NaturalParams local_natural_params(const Field& field, std::size_t site) const;
    NaturalParams local_natural_params(std::size_t site, std::span<const Vec> stats) const;

    // Q(x) = sum_i <alpha_i, B(x_i)> + sum_{i~j} B(x_i)^T beta_ij B(x_j).
    double energy(const Field& field) const;

    std::vector<Vec> suff_stats(const Field& field) const;
    // Throws DomainError if the field does not fit the lattice or state space.
    void validate(const Field& field) const;

private:
    void build_neighbour_betas();

    Family family_;
    Lattice lattice_;
    std::vector<Vec> alpha_;
    std::vector<Mat> edge_beta_;
    std::vector<std::array<Mat, 4>> nbr_beta_;
    std::optional<TranslationInvariantParams> ti_;
};

}  // namespace mixstate
