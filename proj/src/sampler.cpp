#include "mixstate/sampler.hpp"

#include "mixstate/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace mixstate {

void GibbsConfig::validate() const {
    if (sweeps == 0) throw DomainError("sweeps must be positive");
    if (burn_in >= sweeps) throw DomainError("burn_in must be smaller than sweeps");
}

Field initial_field(const AutoModel& model, const GibbsInit& init) {
    const auto& lat = model.lattice();
    const auto& space = model.family().state_space();
    Field f(lat.rows(), lat.cols(), space.atoms());
    switch (init.kind) {
        case GibbsInit::Kind::AllReference: break;
        case GibbsInit::Kind::AllContinuous: {
            const auto v = MixedValue::continuous(init.value);
            space.validate(v);
            for (auto& c : f.cells()) c = v;
            break;
        }
        case GibbsInit::Kind::FromField:
            model.validate(init.field);
            f = init.field;
            break;
    }
    return f;
}

GibbsChain::GibbsChain(const AutoModel& model, Field initial, std::uint64_t seed)
    : model_(model), field_(std::move(initial)), rng_(seed) {
    stats_ = model_.suff_stats(field_);
    order_.resize(field_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
}

void GibbsChain::sweep(ScanOrder order) {
    const auto& fam = model_.family();
    if (order == ScanOrder::Random) {
        // Fisher-Yates on the engine's raw output keeps runs reproducible
        // across standard libraries.
        for (std::size_t i = order_.size(); i > 1; --i) std::swap(order_[i - 1], order_[rng_.below(i)]);
    } else {
        std::iota(order_.begin(), order_.end(), std::size_t{0});
    }
    for (std::size_t s : order_) {
        const auto theta = model_.local_natural_params(s, stats_);
        field_[s] = fam.sample(theta, rng_);
        stats_[s] = fam.suff_stat(field_[s]);
    }
}

double GibbsChain::energy() const {
    double q = 0.0;
    for (std::size_t i = 0; i < stats_.size(); ++i) q += model_.alpha(i).dot(stats_[i]);
    const auto& edges = model_.lattice().edges();
    for (std::size_t k = 0; k < edges.size(); ++k) q += stats_[edges[k].i].dot(model_.edge_beta(k) * stats_[edges[k].j]);
    return q;
}

void gibbs_sweep(const AutoModel& model, Field& field, Rng& rng, ScanOrder order) {
    GibbsChain chain(model, field, 0);
    std::swap(chain.rng(), rng);
    chain.sweep(order);
    std::swap(chain.rng(), rng);
    field = chain.field();
}

SimulationResult simulate(const AutoModel& model, const GibbsConfig& config) {
    config.validate();
    GibbsChain chain(model, initial_field(model, config.init), config.seed);
    SimulationResult out;
    out.energy_trace.reserve(config.sweeps);
    for (std::size_t t = 0; t < config.sweeps; ++t) {
        chain.sweep(config.scan);
        out.energy_trace.push_back(chain.energy());
    }
    out.field = chain.field();
    return out;
}

TrendTest mann_kendall(std::span<const double> x) {
    TrendTest out;
    const std::size_t n = x.size();
    if (n < 3) return out;
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) s += (x[j] > x[i]) - (x[j] < x[i]);
    std::map<double, std::size_t> ties;
    for (double v : x) ++ties[v];
    const double nn = static_cast<double>(n);
    double var = nn * (nn - 1.0) * (2.0 * nn + 5.0);
    for (const auto& [v, t] : ties) {
        const double tt = static_cast<double>(t);
        var -= tt * (tt - 1.0) * (2.0 * tt + 5.0);
    }
    var /= 18.0;
    out.s = s;
    if (var <= 0.0) return out;
    out.z = s > 0 ? (s - 1.0) / std::sqrt(var) : s < 0 ? (s + 1.0) / std::sqrt(var) : 0.0;
    out.p_value = std::erfc(std::abs(out.z) / std::sqrt(2.0));
    return out;
}

}  // namespace mixstate
