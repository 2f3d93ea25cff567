#pragma once

// Independent reference computations for the unit tests. Nothing here
// calls the library's closed forms: sufficient statistics and densities
// are re-coded from their definitions and integrated numerically.

#include "mixstate/families.hpp"
#include "mixstate/field.hpp"
#include "mixstate/random.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace mixstate::testing {

// Sufficient statistic of a continuous point, re-coded per family.
inline std::vector<double> ref_stat_continuous(FamilyKind kind, double x) {
    switch (kind) {
        case FamilyKind::MixedExponential:
        case FamilyKind::TruncatedMixedExponential: return {1.0, -x};
        case FamilyKind::PositiveMixedGaussian: return {1.0, -x * x};
        case FamilyKind::MixedGamma: return {1.0, -x, std::log(x)};
        case FamilyKind::CensoredMixedExponential: return {0.0, 1.0, -x};
    }
    return {};
}

// Integral of fn over the continuous domain (0, upper).
inline double integrate_domain(const std::function<double(double)>& fn, double upper) {
    if (std::isinf(upper)) {
        boost::math::quadrature::exp_sinh<double> q;
        return q.integrate(fn, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
    }
    boost::math::quadrature::tanh_sinh<double> q;
    return q.integrate(fn, 0.0, upper, 1e-13);
}

struct RefMoments {
    double log_z = 0.0;
    std::vector<double> mean_stat;  // E[B]
    double restricted_mean = 0.0;   // E[X 1{X > 0}]
    double atom_mass_total = 0.0;
};

// Z = sum over atoms of exp<theta, B(atom)> + int_G exp<theta, B(x)> dx.
inline RefMoments ref_moments(FamilyKind kind, double k, const std::vector<double>& theta) {
    const std::size_t d = theta.size();
    const double upper = (kind == FamilyKind::TruncatedMixedExponential || kind == FamilyKind::CensoredMixedExponential)
                             ? k
                             : std::numeric_limits<double>::infinity();
    auto weight = [&](double x) {
        const auto b = ref_stat_continuous(kind, x);
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) s += theta[i] * b[i];
        return std::exp(s);
    };
    double z = 1.0;  // reference atom, B = 0
    std::vector<double> num(d, 0.0);
    double atom_x_num = 0.0;
    if (kind == FamilyKind::CensoredMixedExponential) {
        // Atom at 0 has B = (1, 0, 0); atom at K is the reference.
        z += std::exp(theta[0]);
        num[0] += std::exp(theta[0]);
        atom_x_num += k;  // reference atom at K, weight 1
    }
    const double zc = integrate_domain(weight, upper);
    z += zc;
    for (std::size_t i = 0; i < d; ++i)
        num[i] += integrate_domain([&](double x) { return ref_stat_continuous(kind, x)[i] * weight(x); }, upper);
    const double xnum = integrate_domain([&](double x) { return x * weight(x); }, upper);
    RefMoments out;
    out.log_z = std::log(z);
    for (double v : num) out.mean_stat.push_back(v / z);
    out.restricted_mean = (xnum + atom_x_num) / z;
    out.atom_mass_total = (z - zc) / z;
    return out;
}

// Uniformly mixed random field: each cell is an atom with probability
// 1/3, otherwise a continuous value spread over (0, scale).
inline Field random_field(const Family& family, std::size_t rows, std::size_t cols, Rng& rng, double scale = 2.0) {
    const auto& space = family.state_space();
    Field f(rows, cols, space.atoms());
    const double top = std::min(scale, space.domain().upper);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (rng.uniform() < 1.0 / 3.0) {
            f[i] = MixedValue::atom(1 + static_cast<int>(rng.below(space.atom_count())));
        } else {
            f[i] = MixedValue::continuous(top * (0.01 + 0.98 * rng.uniform()));
        }
    }
    return f;
}

inline std::vector<double> to_std(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace mixstate::testing
