#include "mixstate/errors.hpp"
#include "mixstate/oracle.hpp"
#include "mixstate/sampler.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace mixstate;
using namespace mixstate::testing;

namespace {

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

Mat mat2(double c, double d, double f, double e) {
    Mat m(2, 2);
    m << c, d, f, e;
    return m;
}

AutoModel pg(double a, double b, double c1, double c2, std::size_t rows, std::size_t cols,
             Boundary boundary = Boundary::Free) {
    return AutoModel::translation_invariant(Family::positive_gaussian(), Lattice(rows, cols, boundary),
                                            {vec({a, b}), mat2(c1, 0, 0, 0), mat2(c2, 0, 0, 0)});
}

// Coarse bin of a value: 0 for the atom, then continuous bins of width w.
int coarse_bin(const MixedValue& v, double w, int bins) {
    if (v.is_atom()) return 0;
    return 1 + std::min(bins - 1, static_cast<int>(v.value() / w));
}

}  // namespace

TEST_CASE("configuration validation") {
    GibbsConfig c;
    c.sweeps = 10;
    c.burn_in = 10;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.sweeps = 0;
    c.burn_in = 0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    const auto model = pg(0, 1, 0, 0, 2, 2);
    GibbsConfig bad;
    bad.init = GibbsInit::all_continuous(-1.0);
    CHECK_THROWS_AS(simulate(model, bad), DomainError);
    bad.init = GibbsInit::from_field(Field(3, 3, {0.0}));
    CHECK_THROWS_AS(simulate(model, bad), DomainError);
}

TEST_CASE("energy trace has one entry per sweep and matches the final field") {
    const auto model = pg(-1.0, 1.0, 0.5, 0.3, 8, 8);
    GibbsConfig c;
    c.sweeps = 37;
    c.burn_in = 5;
    const auto r = simulate(model, c);
    CHECK(r.energy_trace.size() == 37);
    CHECK(r.energy_trace.back() == doctest::Approx(model.energy(r.field)).epsilon(1e-12));
}

TEST_CASE("fixed seed gives bit-identical output") {
    const auto model = AutoModel::translation_invariant(Family::censored_exponential(1.0), Lattice(6, 7),
                                                        {vec({0.1, 0.2, 1.0}), Mat::Zero(3, 3), Mat::Zero(3, 3)});
    for (auto scan : {ScanOrder::Raster, ScanOrder::Random}) {
        GibbsConfig c;
        c.sweeps = 20;
        c.burn_in = 0;
        c.scan = scan;
        c.seed = 42;
        const auto a = simulate(model, c), b = simulate(model, c);
        CHECK(a.field == b.field);
        CHECK(a.energy_trace == b.energy_trace);
        c.seed = 43;
        CHECK_FALSE(simulate(model, c).field == a.field);
    }
}

TEST_CASE("independent model: one sweep gives iid draws with the alpha-family atom rate") {
    const auto fam = Family::mixed_exponential();
    const Vec alpha = vec({0.2, 1.5});
    const auto model = AutoModel::translation_invariant(fam, Lattice(256, 256), {alpha, Mat::Zero(2, 2), Mat::Zero(2, 2)});
    for (auto scan : {ScanOrder::Raster, ScanOrder::Random}) {
        GibbsConfig c;
        c.sweeps = 1;
        c.burn_in = 0;
        c.scan = scan;
        const auto r = simulate(model, c);
        const double gamma = fam.atom_probability(NaturalParams(fam, alpha), 1);
        const double n = static_cast<double>(r.field.size());
        const double freq = static_cast<double>(r.field.atom_count_in_field()) / n;
        CHECK(std::abs(freq - gamma) < 3.0 * std::sqrt(gamma * (1 - gamma) / n));
    }
}

TEST_CASE("pair chain matches the oracle joint law") {
    // Mixed exponential on 1x2; coarse bins: atom, then [0, 0.5), ..., [2.5, inf).
    const auto fam = Family::mixed_exponential();
    const auto model = AutoModel::translation_invariant(fam, Lattice(1, 2), {vec({0.3, 1.2}), mat2(0.4, 0.2, 0.2, -0.1), Mat::Zero(2, 2)});
    const double w = 0.5;
    const int bins = 6;
    const auto table = joint_table(model, Discretization{0.01, 25.0});
    std::map<std::pair<int, int>, double> exact, empirical;
    const std::size_t g = table.grid.size();
    for (std::size_t a = 0; a < g; ++a)
        for (std::size_t b = 0; b < g; ++b)
            exact[{coarse_bin(table.grid[a].value, w, bins), coarse_bin(table.grid[b].value, w, bins)}] += table.prob[a + b * g];

    GibbsChain chain(model, Field(1, 2, {0.0}), 3);
    const int n = 1'000'000;
    for (int t = 0; t < n; ++t) {
        chain.sweep();
        empirical[{coarse_bin(chain.field()[0], w, bins), coarse_bin(chain.field()[1], w, bins)}] += 1.0 / n;
    }
    double tv = 0.0;
    for (int a = 0; a <= bins; ++a)
        for (int b = 0; b <= bins; ++b) tv += std::abs(exact[{a, b}] - empirical[{a, b}]);
    CHECK(0.5 * tv < 0.02);
}

TEST_CASE("2x2 chain matches the oracle joint law") {
    const auto fam = Family::truncated_exponential(1.0);
    const auto model = AutoModel::translation_invariant(fam, Lattice(2, 2), {vec({0.2, 2.0}), mat2(0.3, -0.2, -0.2, 0.4), mat2(0.1, -0.1, -0.1, 0.2)});
    const double w = 0.5;
    const int bins = 2;
    const auto table = joint_table(model, Discretization{1.0 / 64.0, 0.0});
    const std::size_t g = table.grid.size();
    auto key = [&](int b0, int b1, int b2, int b3) { return ((b0 * 3 + b1) * 3 + b2) * 3 + b3; };
    std::vector<double> exact(81, 0.0), empirical(81, 0.0);
    for (std::size_t idx = 0; idx < table.prob.size(); ++idx) {
        std::size_t r = idx;
        int b[4];
        for (int s = 0; s < 4; ++s) {
            b[s] = coarse_bin(table.grid[r % g].value, w, bins);
            r /= g;
        }
        exact[static_cast<std::size_t>(key(b[0], b[1], b[2], b[3]))] += table.prob[idx];
    }
    GibbsChain chain(model, Field(2, 2, {0.0}), 4);
    const int n = 1'000'000;
    for (int t = 0; t < n; ++t) {
        chain.sweep();
        const auto& f = chain.field();
        empirical[static_cast<std::size_t>(key(coarse_bin(f[0], w, bins), coarse_bin(f[1], w, bins), coarse_bin(f[2], w, bins),
                                               coarse_bin(f[3], w, bins)))] += 1.0 / n;
    }
    double tv = 0.0;
    for (std::size_t k = 0; k < exact.size(); ++k) tv += std::abs(exact[k] - empirical[k]);
    CHECK(0.5 * tv < 0.02);
}

TEST_CASE("Mann-Kendall statistic") {
    const std::vector<double> up{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    const auto t = mann_kendall(up);
    CHECK(t.s == 66.0);
    CHECK(t.trend());
    CHECK(t.z > 0.0);
    const std::vector<double> small{1, 2, 3};
    CHECK(mann_kendall(small).s == 3.0);
    const std::vector<double> flat(20, 1.0);
    CHECK_FALSE(mann_kendall(flat).trend());
    // Hand-computed: S = 3 - 1 + ... for a short zigzag.
    const std::vector<double> zig{1, 3, 2, 4};
    CHECK(mann_kendall(zig).s == 4.0);
}

TEST_CASE("energy trace is stationary after burn-in on three chains") {
    const auto model = pg(-1.0, 1.0, 0.6, 0.4, 32, 32);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        GibbsConfig c;
        c.sweeps = 2500;
        c.burn_in = 500;
        c.seed = seed;
        const auto r = simulate(model, c);
        // Thin by 10 so that neighbouring trace values are nearly independent.
        std::vector<double> thin;
        for (std::size_t k = c.burn_in; k < r.energy_trace.size(); k += 10) thin.push_back(r.energy_trace[k]);
        CHECK_FALSE(mann_kendall(thin).trend(0.05));
    }
}

TEST_CASE("two chains agree on the atom fraction of a mostly-atom model") {
    const auto model = pg(-3.0, 1.0, 0.5, 0.5, 64, 64);
    GibbsConfig c;
    c.sweeps = 300;
    c.burn_in = 100;
    c.seed = 10;
    const auto a = simulate(model, c);
    c.seed = 11;
    c.init = GibbsInit::all_continuous(1.0);
    const auto b = simulate(model, c);
    const double fa = static_cast<double>(a.field.atom_count_in_field()) / 4096.0;
    const double fb = static_cast<double>(b.field.atom_count_in_field()) / 4096.0;
    CHECK(fa > 0.5);
    CHECK(std::abs(fa - fb) < 0.05);
}

TEST_CASE("escalator parameters give anisotropic pair statistics") {
    const auto model = pg(-6.512, 0.320, 2.192, 3.598, 64, 64);
    GibbsConfig c;
    c.sweeps = 600;
    c.burn_in = 500;
    const auto r = simulate(model, c);
    const auto& f = r.field;
    double h = 0, v = 0;
    for (std::size_t row = 0; row < 64; ++row)
        for (std::size_t col = 0; col < 64; ++col) {
            if (col + 1 < 64) h += f.at(row, col).is_continuous() && f.at(row, col + 1).is_continuous();
            if (row + 1 < 64) v += f.at(row, col).is_continuous() && f.at(row + 1, col).is_continuous();
        }
    CHECK(v > 1.2 * h);
}

TEST_CASE("inadmissible local parameters stop the chain") {
    const auto fam = Family::mixed_exponential();
    const auto model = AutoModel::translation_invariant(fam, Lattice(3, 3), {vec({0.0, 0.1}), mat2(0, 0, 0, 0.5), mat2(0, 0, 0, 0.5)});
    GibbsChain chain(model, initial_field(model, GibbsInit::all_continuous(5.0)), 1);
    CHECK_THROWS_AS(chain.sweep(), InadmissibleParameter);
}

TEST_CASE("gibbs_sweep advances the caller's random source") {
    const auto model = pg(-1.0, 1.0, 0.5, 0.5, 4, 4);
    Field f1(4, 4, {0.0}), f2(4, 4, {0.0});
    Rng r1(9), r2(9);
    gibbs_sweep(model, f1, r1);
    gibbs_sweep(model, f2, r2);
    CHECK(f1 == f2);
    const auto next1 = r1.next();
    CHECK(next1 == r2.next());
    gibbs_sweep(model, f1, r1);
    CHECK_FALSE(f1 == f2);
}
