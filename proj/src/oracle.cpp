#include "mixstate/oracle.hpp"

#include "mixstate/errors.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mixstate {

std::vector<GridPoint> Discretization::grid(const Family& family) const {
    if (!(h > 0.0)) throw DomainError("discretization step must be positive");
    const auto& space = family.state_space();
    std::vector<GridPoint> out;
    for (std::size_t k = 0; k < space.atom_count(); ++k) out.push_back({MixedValue::atom(static_cast<int>(k + 1)), 1.0, 0.0, 0.0});
    const double top = space.domain().bounded() ? space.domain().upper : radius;
    if (!(top > 0.0) || !std::isfinite(top)) throw DomainError("discretization radius must be positive and finite");
    const auto n = static_cast<std::size_t>(std::ceil(top / h - 1e-9));
    const double step = top / static_cast<double>(n);
    out.reserve(out.size() + n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lo = step * static_cast<double>(k);
        const double hi = k + 1 == n ? top : step * static_cast<double>(k + 1);
        out.push_back({MixedValue::continuous(0.5 * (lo + hi)), hi - lo, lo, hi});
    }
    return out;
}

Discretization Discretization::for_theta(const Family& family, const Vec& theta, double step, double tail) {
    NaturalParams p(family, theta);
    Discretization d;
    d.h = step;
    const auto& t = p.theta();
    switch (family.kind()) {
        case FamilyKind::MixedExponential: d.radius = -std::log(tail) / t[1]; break;
        case FamilyKind::PositiveMixedGaussian: d.radius = boost::math::erfc_inv(tail) / std::sqrt(t[1]); break;
        case FamilyKind::MixedGamma: d.radius = boost::math::gamma_q_inv(t[2] + 1.0, tail) / t[1]; break;
        default: d.radius = family.truncation(); break;
    }
    return d;
}

Discretization Discretization::standard(const Family& family, const Vec& theta) {
    NaturalParams p(family, theta);
    const auto& t = p.theta();
    double scale = 1.0;
    switch (family.kind()) {
        case FamilyKind::MixedExponential: scale = 1.0 / t[1]; break;
        case FamilyKind::PositiveMixedGaussian: scale = 1.0 / std::sqrt(t[1]); break;
        case FamilyKind::MixedGamma: scale = (t[2] + 1.0) / t[1]; break;
        case FamilyKind::TruncatedMixedExponential: scale = std::min(family.truncation(), 1.0 / t[1]); break;
        case FamilyKind::CensoredMixedExponential: scale = std::min(family.truncation(), 1.0 / t[2]); break;
    }
    return for_theta(family, theta, 1e-3 * scale);
}

double total_variation(const GridDistribution& p, const GridDistribution& q) {
    if (p.mass.size() != q.mass.size()) throw DomainError("distributions live on different grids");
    double s = std::abs(p.outside - q.outside);
    for (std::size_t k = 0; k < p.mass.size(); ++k) s += std::abs(p.mass[k] - q.mass[k]);
    return 0.5 * s;
}

double moment(const GridDistribution& d, const std::function<double(const MixedValue&)>& fn) {
    double s = 0.0;
    for (std::size_t k = 0; k < d.mass.size(); ++k) s += d.mass[k] * fn(d.grid[k].value);
    return s;
}

GridDistribution analytic_masses(const Family& family, const NaturalParams& theta, const std::vector<GridPoint>& grid) {
    GridDistribution out{grid, {}, 0.0};
    double total = 0.0;
    for (const auto& g : grid) {
        const double m = g.value.is_atom() ? family.atom_probability(theta, g.value.atom_index())
                                           : family.continuous_mass(theta, g.lo, g.hi);
        out.mass.push_back(m);
        total += m;
    }
    out.outside = std::max(0.0, 1.0 - total);
    return out;
}

namespace {

struct Enumerator {
    std::vector<Vec> b;           // B at each grid point
    std::vector<double> log_w;    // log weight of each grid point
    const AutoModel& model;
    std::size_t n_sites;

    Enumerator(const AutoModel& m, const std::vector<GridPoint>& grid) : model(m), n_sites(m.lattice().size()) {
        for (const auto& g : grid) {
            b.push_back(m.family().suff_stat(g.value));
            log_w.push_back(std::log(g.weight));
        }
    }

    // log(exp Q(x) prod w) for grid indices idx.
    double log_weight(const std::vector<std::size_t>& idx) const {
        double q = 0.0;
        for (std::size_t i = 0; i < n_sites; ++i) q += model.alpha(i).dot(b[idx[i]]) + log_w[idx[i]];
        const auto& edges = model.lattice().edges();
        for (std::size_t k = 0; k < edges.size(); ++k) q += b[idx[edges[k].i]].dot(model.edge_beta(k) * b[idx[edges[k].j]]);
        if (std::isnan(q) || q == std::numeric_limits<double>::infinity())
            throw std::runtime_error("exp Q is not finite on the grid; the parameters are likely inadmissible");
        return q;
    }

    static bool next(std::vector<std::size_t>& idx, std::size_t g) {
        for (auto& i : idx) {
            if (++i < g) return true;
            i = 0;
        }
        return false;
    }
};

std::size_t checked_cells(const AutoModel& model, std::size_t g, std::size_t limit) {
    const std::size_t n = model.lattice().size();
    if (n > 4) throw DomainError("the oracle handles lattices of at most 4 sites");
    double cells = 1.0;
    for (std::size_t i = 0; i < n; ++i) cells *= static_cast<double>(g);
    if (cells > static_cast<double>(limit))
        throw DomainError("oracle table of " + std::to_string(cells) + " cells exceeds the limit of " + std::to_string(limit));
    return static_cast<std::size_t>(cells);
}

}  // namespace

JointTable joint_table(const AutoModel& model, const Discretization& disc) {
    JointTable t;
    t.grid = disc.grid(model.family());
    t.sites = model.lattice().size();
    const std::size_t g = t.grid.size();
    const std::size_t cells = checked_cells(model, g, kMaxTableCells);
    const Enumerator en(model, t.grid);
    t.prob.resize(cells);
    std::vector<std::size_t> idx(t.sites, 0);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cells; ++c, Enumerator::next(idx, g)) {
        t.prob[c] = en.log_weight(idx);
        mx = std::max(mx, t.prob[c]);
    }
    double s = 0.0;
    for (auto& p : t.prob) {
        p = std::exp(p - mx);
        s += p;
    }
    for (auto& p : t.prob) p /= s;
    t.log_z = mx + std::log(s);
    return t;
}

double log_partition(const AutoModel& model, const Discretization& disc) {
    const auto grid = disc.grid(model.family());
    const std::size_t g = grid.size();
    const std::size_t cells = checked_cells(model, g, 1'000'000'000);
    const Enumerator en(model, grid);
    std::vector<std::size_t> idx(model.lattice().size(), 0);
    double m = -std::numeric_limits<double>::infinity(), s = 0.0;
    for (std::size_t c = 0; c < cells; ++c, Enumerator::next(idx, g)) {
        const double lw = en.log_weight(idx);
        if (lw > m) {
            s = s * std::exp(m - lw) + 1.0;
            m = lw;
        } else {
            s += std::exp(lw - m);
        }
    }
    return m + std::log(s);
}

GridDistribution conditional_from_table(const JointTable& table, std::size_t site, const std::vector<std::size_t>& others) {
    if (site >= table.sites || others.size() != table.sites) throw DomainError("bad site or conditioning vector");
    const std::size_t g = table.grid.size();
    std::size_t base = 0, stride = 1, site_stride = 1;
    for (std::size_t i = 0; i < table.sites; ++i) {
        if (i == site) site_stride = stride;
        else base += others[i] * stride;
        stride *= g;
    }
    GridDistribution out{table.grid, std::vector<double>(g), 0.0};
    double s = 0.0;
    for (std::size_t k = 0; k < g; ++k) s += out.mass[k] = table.prob[base + k * site_stride];
    if (!(s > 0.0)) throw std::runtime_error("conditioning event has zero mass in the table");
    for (auto& m : out.mass) m /= s;
    return out;
}

GridDistribution conditional_from_energy(const AutoModel& model, const std::vector<GridPoint>& grid, const Field& field,
                                         std::size_t site) {
    Field f = field;
    GridDistribution out{grid, std::vector<double>(grid.size()), 0.0};
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        f[site] = grid[k].value;
        out.mass[k] = model.energy(f) + std::log(grid[k].weight);
        if (std::isnan(out.mass[k]) || out.mass[k] == std::numeric_limits<double>::infinity())
            throw std::runtime_error("exp Q is not finite on the grid; the parameters are likely inadmissible");
        mx = std::max(mx, out.mass[k]);
    }
    double s = 0.0;
    for (auto& m : out.mass) s += m = std::exp(m - mx);
    if (!(s > 0.0) || !std::isfinite(s)) throw std::runtime_error("conditional slice has no finite mass");
    for (auto& m : out.mass) m /= s;
    return out;
}

GridDistribution marginal(const JointTable& table, std::size_t site) {
    const std::size_t g = table.grid.size();
    std::size_t stride = 1;
    for (std::size_t i = 0; i < site; ++i) stride *= g;
    GridDistribution out{table.grid, std::vector<double>(g, 0.0), 0.0};
    for (std::size_t c = 0; c < table.prob.size(); ++c) out.mass[(c / stride) % g] += table.prob[c];
    return out;
}

}  // namespace mixstate
