#include "mixstate/errors.hpp"
#include "mixstate/families.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace mixstate;
using namespace mixstate::testing;

namespace {

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

struct Case {
    Family family;
    std::vector<Vec> thetas;
};

// At least ten admissible natural parameters per family.
std::vector<Case> theta_grid() {
    std::vector<Case> out;
    std::vector<Vec> two;
    for (double a : {-2.0, 0.0, 0.3, 1.5})
        for (double b : {0.4, 1.7, 5.0}) two.push_back(vec({a, b}));
    out.push_back({Family::mixed_exponential(), two});
    out.push_back({Family::positive_gaussian(), two});
    out.push_back({Family::truncated_exponential(2.0), two});
    std::vector<Vec> gam;
    for (double a : {-1.0, 0.5})
        for (double r : {0.7, 2.0})
            for (double s : {0.0, 0.8, 2.5}) gam.push_back(vec({a, r, s}));
    out.push_back({Family::mixed_gamma(), gam});
    std::vector<Vec> cen;
    for (double t1 : {-1.0, 0.5})
        for (double t2 : {-0.5, 1.0})
            for (double l : {0.3, 1.0, 3.0}) cen.push_back(vec({t1, t2, l}));
    out.push_back({Family::censored_exponential(1.5), cen});
    return out;
}

}  // namespace

TEST_CASE("family dimensions") {
    CHECK(Family::mixed_exponential().dim() == 2);
    CHECK(Family::mixed_gamma().dim() == 3);
    CHECK(Family::positive_gaussian().dim() == 2);
    CHECK(Family::truncated_exponential(1.0).dim() == 2);
    CHECK(Family::censored_exponential(1.0).dim() == 3);
    CHECK_THROWS_AS(Family::truncated_exponential(0.0), DomainError);
    CHECK_THROWS_AS(Family::censored_exponential(-1.0), DomainError);
    CHECK_THROWS_AS(Family::from_name("poisson"), DomainError);
    CHECK(Family::from_name("censored-exponential", 2.0).truncation() == 2.0);
}

TEST_CASE("sufficient statistics") {
    const auto me = Family::mixed_exponential();
    CHECK(me.suff_stat(MixedValue::atom(1)).isZero());
    CHECK(me.suff_stat(MixedValue::continuous(2.5)) == vec({1.0, -2.5}));
    CHECK(Family::positive_gaussian().suff_stat(MixedValue::continuous(3.0)) == vec({1.0, -9.0}));
    const auto cen = Family::censored_exponential(2.0);
    CHECK(cen.suff_stat(MixedValue::atom(2)).isZero());
    CHECK(cen.suff_stat(MixedValue::atom(1)) == vec({1.0, 0.0, 0.0}));
    CHECK(cen.suff_stat(MixedValue::continuous(0.5)) == vec({0.0, 1.0, -0.5}));
    const auto tr = Family::truncated_exponential(1.0);
    CHECK(tr.suff_stat(MixedValue::continuous(1.0)) == vec({1.0, -1.0}));
    CHECK_THROWS_AS(tr.suff_stat(MixedValue::continuous(1.5)), DomainError);
    for (const auto& c : theta_grid())
        CHECK(c.family.suff_stat(c.family.state_space().reference()).isZero());
}

TEST_CASE("natural parameters are validated") {
    const auto me = Family::mixed_exponential();
    CHECK_THROWS_AS(NaturalParams(me, vec({0.0, 0.0})), DomainError);
    CHECK_THROWS_AS(NaturalParams(me, vec({0.0, 1.0, 2.0})), DomainError);
    CHECK_THROWS_AS(NaturalParams(Family::censored_exponential(1.0), vec({0.0, 0.0, -1.0})), DomainError);
    CHECK_NOTHROW(NaturalParams(Family::censored_exponential(1.0), vec({0.0, -3.0, 1.0})));
}

TEST_CASE("original to natural examples") {
    const auto me = Family::mixed_exponential();
    const auto t = me.natural_from_original({0.5, {1.0}, {2.0}});
    CHECK(t[0] == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(t[1] == 2.0);

    const auto o = me.original_from_natural(NaturalParams(me, vec({0.0, 1.0})));
    CHECK(o.gamma == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(o.xi[0] == 1.0);

    const auto cen = Family::censored_exponential(1.0);
    const auto c = censored_natural_from_alpha_lambda(0.5, 1.0, 1.0);
    CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c[2] == 1.0);
    // Masses alpha at 0 and (1 - alpha) e^{-lambda K} at K.
    const NaturalParams cp(cen, c);
    CHECK(cen.atom_probability(cp, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cen.atom_probability(cp, 2) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("parameter maps reject the boundary gamma values") {
    const auto me = Family::mixed_exponential();
    CHECK_THROWS_AS(me.natural_from_original({0.0, {1.0}, {1.0}}), BoundaryError);
    CHECK_THROWS_AS(me.natural_from_original({1.0, {1.0}, {1.0}}), BoundaryError);
    CHECK_THROWS_AS(censored_natural_from_alpha_lambda(1.0, 1.0, 1.0), BoundaryError);
    CHECK_THROWS_AS(me.natural_from_original({0.5, {1.0}, {-1.0}}), DomainError);
    const auto cen = Family::censored_exponential(1.0);
    CHECK_THROWS_AS(cen.natural_from_original({0.5, {0.5, 0.4}, {1.0}}), DomainError);
}

TEST_CASE("natural to original round trip to 1e-12") {
    for (const auto& c : theta_grid()) {
        for (const auto& th : c.thetas) {
            const NaturalParams p(c.family, th);
            const auto back = c.family.natural_from_original(c.family.original_from_natural(p)).theta();
            for (int i = 0; i < th.size(); ++i)
                CHECK(std::abs(back[i] - th[i]) <= 1e-12 * std::max(1.0, std::abs(th[i])));
        }
    }
}

TEST_CASE("log density examples") {
    const auto me = Family::mixed_exponential();
    const auto p = me.natural_from_original({0.5, {1.0}, {1.0}});
    CHECK(me.log_density(MixedValue::atom(1), p) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
    CHECK(me.log_density(MixedValue::continuous(1.0), p) == doctest::Approx(std::log(0.5 * std::exp(-1.0))).epsilon(1e-14));
    const auto tr = Family::truncated_exponential(1.0);
    CHECK_THROWS_AS(tr.log_density(MixedValue::continuous(2.0), NaturalParams(tr, vec({0.0, 1.0}))), DomainError);
}

TEST_CASE("log normalizer closed forms") {
    const auto me = Family::mixed_exponential();
    CHECK(me.log_normalizer(NaturalParams(me, vec({0.0, 1.0}))) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    // Positive Gaussian: gamma = g(0) / (g(0) + e^{theta_1}), g(0) = 2 sqrt(xi / pi).
    const auto pg = Family::positive_gaussian();
    const double xi = 0.8, t1 = 0.4;
    const double g0 = 2.0 * std::sqrt(xi / std::numbers::pi);
    const NaturalParams p(pg, vec({t1, xi}));
    CHECK(pg.atom_probability(p, 1) == doctest::Approx(g0 / (g0 + std::exp(t1))).epsilon(1e-13));
}

TEST_CASE("normalization: atom masses plus continuous integral equal one") {
    for (const auto& c : theta_grid()) {
        const auto& fam = c.family;
        for (const auto& th : c.thetas) {
            const NaturalParams p(fam, th);
            double total = 0.0;
            for (int k = 1; k <= fam.atom_count(); ++k) total += fam.atom_probability(p, k);
            total += integrate_domain([&](double x) { return fam.continuous_density(p, x); }, fam.state_space().domain().upper);
            CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("gradient of the log normalizer equals the mean statistic") {
    for (const auto& c : theta_grid()) {
        const auto& fam = c.family;
        for (const auto& th : c.thetas) {
            const NaturalParams p(fam, th);
            const auto ref = ref_moments(fam.kind(), fam.truncation(), to_std(th));
            CHECK(fam.log_normalizer(p) == doctest::Approx(ref.log_z).epsilon(1e-10));
            const Vec g = fam.grad_log_normalizer(p);
            for (int i = 0; i < fam.dim(); ++i) CHECK(std::abs(g[i] - ref.mean_stat[static_cast<std::size_t>(i)]) < 1e-6);
            CHECK(std::abs(fam.continuous_restricted_mean(p) - ref.restricted_mean) < 1e-9);
        }
    }
    const auto me = Family::mixed_exponential();
    const auto ref = ref_moments(FamilyKind::MixedExponential, 0.0, {0.3, 1.7});
    const Vec g = me.grad_log_normalizer(NaturalParams(me, vec({0.3, 1.7})));
    CHECK((g - Eigen::Map<const Eigen::VectorXd>(ref.mean_stat.data(), 2)).norm() < 1e-6);
}

TEST_CASE("gradient of the log normalizer matches finite differences") {
    for (const auto& c : theta_grid()) {
        const auto& fam = c.family;
        for (const auto& th : c.thetas) {
            const Vec g = fam.grad_log_normalizer(NaturalParams(fam, th));
            for (int i = 0; i < fam.dim(); ++i) {
                const double h = 1e-5;
                Vec up = th, dn = th;
                up[i] += h;
                dn[i] -= h;
                const double fd = (fam.log_normalizer(NaturalParams(fam, up)) - fam.log_normalizer(NaturalParams(fam, dn))) / (2 * h);
                CHECK(g[i] == doctest::Approx(fd).epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("continuous mass matches integration of the density") {
    for (const auto& c : theta_grid()) {
        const auto& fam = c.family;
        const double upper = fam.state_space().domain().upper;
        for (const auto& th : c.thetas) {
            const NaturalParams p(fam, th);
            const double hi = std::isinf(upper) ? 1.3 : 0.7 * upper;
            const double lo = 0.2;
            boost::math::quadrature::tanh_sinh<double> q;
            const double ref = q.integrate([&](double x) { return fam.continuous_density(p, x); }, lo, hi, 1e-13);
            CHECK(fam.continuous_mass(p, lo, hi) == doctest::Approx(ref).epsilon(1e-10));
        }
    }
}

TEST_CASE("restricted mean examples") {
    const auto me = Family::mixed_exponential();
    CHECK(me.continuous_restricted_mean(me.natural_from_original({0.5, {1.0}, {2.0}})) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(truncated_exponential_mean(1e-9, 3.0) == doctest::Approx(1.5).epsilon(1e-8));
    CHECK(truncated_exponential_mean(1e-3, 3.0) == doctest::Approx(3.0 * (1.0 / 3e-3 - 1.0 / std::expm1(3e-3))).epsilon(1e-10));
    const auto cen = Family::censored_exponential(1.0);
    for (double alpha : {0.2, 0.5, 0.9}) {
        const NaturalParams p(cen, censored_natural_from_alpha_lambda(alpha, 1.0, 1.0));
        CHECK(cen.continuous_restricted_mean(p) == doctest::Approx((1.0 - alpha) * (1.0 - std::exp(-1.0))).epsilon(1e-12));
    }
    CHECK(censored_exponential_mean(2.0, 1.0) == doctest::Approx((1.0 - std::exp(-2.0)) / 2.0).epsilon(1e-14));
}

TEST_CASE("degenerate mixtures in the original parametrization") {
    Rng rng(3);
    const auto me = Family::mixed_exponential();
    int hits = 0;
    for (int i = 0; i < 1000; ++i) hits += me.sample_original({1.0, {1.0}, {1.0}}, rng) == MixedValue::atom(1);
    CHECK(hits == 1000);
    double s = 0.0;
    int atoms = 0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) {
        const auto v = me.sample_original({0.0, {1.0}, {1.0}}, rng);
        atoms += v.is_atom();
        s += v.is_atom() ? 0.0 : v.value();
    }
    CHECK(atoms == 0);
    CHECK(std::abs(s / n - 1.0) < 0.01);
}

namespace {

// Kolmogorov-Smirnov distance of the continuous draws to the conditional CDF,
// and atom counts, for 10^6 draws.
void check_sampler_law(const Family& fam, const Vec& th, std::uint64_t seed) {
    const NaturalParams p(fam, th);
    Rng rng(seed);
    const int n = 1'000'000;
    std::vector<double> cont;
    std::vector<int> atoms(static_cast<std::size_t>(fam.atom_count()), 0);
    int outside = 0;
    for (int i = 0; i < n; ++i) {
        const auto v = fam.sample(p, rng);
        outside += !fam.state_space().contains(v);
        if (v.is_atom()) ++atoms[static_cast<std::size_t>(v.atom_index() - 1)];
        else cont.push_back(v.value());
    }
    CHECK(outside == 0);
    for (int k = 1; k <= fam.atom_count(); ++k) {
        const double pk = fam.atom_probability(p, k);
        const double sd = std::sqrt(n * pk * (1 - pk));
        CHECK(std::abs(atoms[static_cast<std::size_t>(k - 1)] - n * pk) < 4.5 * sd + 1.0);
    }
    std::sort(cont.begin(), cont.end());
    const double upper = fam.state_space().domain().upper;
    const double pc = fam.continuous_mass(p, 0.0, upper);
    double d = 0.0;
    const double m = static_cast<double>(cont.size());
    for (std::size_t i = 0; i < cont.size(); ++i) {
        const double f = fam.continuous_mass(p, 0.0, cont[i]) / pc;
        d = std::max({d, std::abs(f - static_cast<double>(i) / m), std::abs(f - static_cast<double>(i + 1) / m)});
    }
    // 0.1% critical value of the one-sample KS statistic.
    CHECK(d < 1.95 / std::sqrt(m));
}

}  // namespace

TEST_CASE("sampler law: atom frequencies and continuous distribution at 10^6 draws") {
    check_sampler_law(Family::mixed_exponential(), vec({0.2, 1.5}), 11);
    check_sampler_law(Family::positive_gaussian(), vec({-0.3, 0.7}), 12);
    check_sampler_law(Family::truncated_exponential(1.5), vec({0.1, 0.8}), 13);
    check_sampler_law(Family::mixed_gamma(), vec({0.5, 2.0, 1.3}), 14);
    check_sampler_law(Family::censored_exponential(1.0), censored_natural_from_alpha_lambda(0.3, 1.2, 1.0), 15);
    check_sampler_law(Family::censored_exponential(2.0), vec({-0.4, 0.9, 0.6}), 16);
}

TEST_CASE("censored sampler puts mass (1 - alpha) e^{-lambda K} at K") {
    const auto cen = Family::censored_exponential(1.0);
    const double alpha = 0.3, lambda = 1.2;
    const NaturalParams p(cen, censored_natural_from_alpha_lambda(alpha, lambda, 1.0));
    Rng rng(99);
    const int n = 1'000'000;
    int at_k = 0;
    for (int i = 0; i < n; ++i) at_k += cen.sample(p, rng) == MixedValue::atom(2);
    const double expect = (1 - alpha) * std::exp(-lambda);
    CHECK(std::abs(static_cast<double>(at_k) / n - expect) < 4.5 * std::sqrt(expect * (1 - expect) / n));
}

TEST_CASE("sampling is deterministic given the seed") {
    const auto fam = Family::positive_gaussian();
    const NaturalParams p(fam, vec({0.0, 1.0}));
    Rng a(5), b(5);
    int same = 0;
    for (int i = 0; i < 1000; ++i) same += fam.sample(p, a) == fam.sample(p, b);
    CHECK(same == 1000);
}
