#include "mixstate/automodel.hpp"

#include "mixstate/errors.hpp"

namespace mixstate {

Lattice::Lattice(std::size_t rows, std::size_t cols, Boundary boundary)
    : rows_(rows), cols_(cols), boundary_(boundary) {
    if (rows == 0 || cols == 0) throw DomainError("lattice dimensions must be positive");
    if (boundary == Boundary::Toroidal && (rows < 3 || cols < 3))
        throw DomainError("toroidal lattices need at least 3 rows and 3 columns");
    const bool torus = boundary == Boundary::Toroidal;
    offsets_.reserve(size() + 1);
    offsets_.push_back(0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c + 1 < cols || torus) nbrs_.push_back({r * cols + (c + 1) % cols, Direction::East});
            if (c > 0 || torus) nbrs_.push_back({r * cols + (c + cols - 1) % cols, Direction::West});
            if (r > 0 || torus) nbrs_.push_back({((r + rows - 1) % rows) * cols + c, Direction::North});
            if (r + 1 < rows || torus) nbrs_.push_back({((r + 1) % rows) * cols + c, Direction::South});
            offsets_.push_back(nbrs_.size());
        }
    }
    for (std::size_t s = 0; s < size(); ++s) {
        for (const auto& n : neighbours(s)) {
            if (n.dir == Direction::East) edges_.push_back({s, n.site, true});
            if (n.dir == Direction::North) edges_.push_back({s, n.site, false});
        }
    }
}

bool Lattice::interior(std::size_t site) const {
    if (boundary_ == Boundary::Toroidal) return true;
    const std::size_t r = site / cols_, c = site % cols_;
    return r > 0 && c > 0 && r + 1 < rows_ && c + 1 < cols_;
}

AutoModel::AutoModel(Family family, Lattice lattice, std::vector<Vec> alpha, std::vector<Mat> edge_beta)
    : family_(std::move(family)), lattice_(std::move(lattice)), alpha_(std::move(alpha)),
      edge_beta_(std::move(edge_beta)) {
    const int d = family_.dim();
    if (alpha_.size() != lattice_.size()) throw DomainError("need one alpha vector per site");
    if (edge_beta_.size() != lattice_.edges().size()) throw DomainError("need one beta matrix per edge");
    for (const auto& a : alpha_)
        if (a.size() != d || !a.allFinite()) throw DomainError("alpha vectors must be finite with length " + std::to_string(d));
    for (const auto& b : edge_beta_)
        if (b.rows() != d || b.cols() != d || !b.allFinite())
            throw DomainError("beta matrices must be finite and " + std::to_string(d) + "x" + std::to_string(d));
    build_neighbour_betas();
}

AutoModel AutoModel::translation_invariant(Family family, Lattice lattice, const TranslationInvariantParams& p,
                                           bool require_symmetric) {
    const int d = family.dim();
    if (p.alpha.size() != d) throw DomainError("alpha must have length " + std::to_string(d));
    for (const Mat* b : {&p.beta_h, &p.beta_v}) {
        if (b->rows() != d || b->cols() != d) throw DomainError("beta matrices must be " + std::to_string(d) + "x" + std::to_string(d));
        if (require_symmetric && *b != b->transpose()) throw DomainError("beta matrices must be symmetric");
    }
    std::vector<Vec> alpha(lattice.size(), p.alpha);
    std::vector<Mat> beta;
    beta.reserve(lattice.edges().size());
    for (const auto& e : lattice.edges()) beta.push_back(e.horizontal ? p.beta_h : p.beta_v);
    AutoModel model(std::move(family), std::move(lattice), std::move(alpha), std::move(beta));
    model.ti_ = p;
    return model;
}

void AutoModel::build_neighbour_betas() {
    nbr_beta_.assign(lattice_.size(), {});
    std::vector<std::size_t> filled(lattice_.size(), 0);
    for (std::size_t k = 0; k < lattice_.edges().size(); ++k) {
        const auto& e = lattice_.edges()[k];
        const Mat& b = edge_beta_[k];
        auto place = [&](std::size_t site, std::size_t other, const Mat& m) {
            const bool forward = site == e.i;
            const Direction d = e.horizontal ? (forward ? Direction::East : Direction::West)
                                             : (forward ? Direction::North : Direction::South);
            const auto nb = lattice_.neighbours(site);
            for (std::size_t s = 0; s < nb.size(); ++s) {
                if (nb[s].site == other && nb[s].dir == d) {
                    nbr_beta_[site][s] = m;
                    ++filled[site];
                    return;
                }
            }
        };
        place(e.i, e.j, b);
        place(e.j, e.i, b.transpose());
    }
    for (std::size_t s = 0; s < lattice_.size(); ++s)
        if (filled[s] != lattice_.neighbours(s).size()) throw std::logic_error("neighbour matrix table incomplete");
}

bool AutoModel::symmetric() const {
    for (const auto& b : edge_beta_)
        if (b != b.transpose()) return false;
    return true;
}

bool AutoModel::independent() const {
    for (const auto& b : edge_beta_)
        if (!b.isZero(0.0)) return false;
    return true;
}

void AutoModel::validate(const Field& field) const {
    if (field.rows() != lattice_.rows() || field.cols() != lattice_.cols())
        throw DomainError("field is " + std::to_string(field.rows()) + "x" + std::to_string(field.cols()) +
                          " but the lattice is " + std::to_string(lattice_.rows()) + "x" + std::to_string(lattice_.cols()));
    validate_field(field, family_.state_space());
}

std::vector<Vec> AutoModel::suff_stats(const Field& field) const {
    validate(field);
    std::vector<Vec> out;
    out.reserve(field.size());
    for (const auto& v : field.cells()) out.push_back(family_.suff_stat(v));
    return out;
}

Vec AutoModel::local_theta(std::size_t site, std::span<const Vec> stats) const {
    Vec theta = alpha_[site];
    const auto nb = lattice_.neighbours(site);
    for (std::size_t k = 0; k < nb.size(); ++k) theta.noalias() += nbr_beta_[site][k] * stats[nb[k].site];
    return theta;
}

Vec AutoModel::local_theta(const Field& field, std::size_t site) const {
    validate(field);
    Vec theta = alpha_[site];
    const auto nb = lattice_.neighbours(site);
    for (std::size_t k = 0; k < nb.size(); ++k) theta.noalias() += nbr_beta_[site][k] * family_.suff_stat(field[nb[k].site]);
    return theta;
}

namespace {

NaturalParams checked(const Family& family, std::size_t site, const Vec& theta) {
    if (!family.admits(theta))
        throw InadmissibleParameter(site, "local natural parameter outside " + family.admissible_set_description());
    return NaturalParams(family, theta);
}

}  // namespace

NaturalParams AutoModel::local_natural_params(const Field& field, std::size_t site) const {
    return checked(family_, site, local_theta(field, site));
}

NaturalParams AutoModel::local_natural_params(std::size_t site, std::span<const Vec> stats) const {
    return checked(family_, site, local_theta(site, stats));
}

double AutoModel::energy(const Field& field) const {
    const auto stats = suff_stats(field);
    double q = 0.0;
    for (std::size_t i = 0; i < stats.size(); ++i) q += alpha_[i].dot(stats[i]);
    const auto& edges = lattice_.edges();
    for (std::size_t k = 0; k < edges.size(); ++k) q += stats[edges[k].i].dot(edge_beta_[k] * stats[edges[k].j]);
    return q;
}

}  // namespace mixstate
