#include "mixstate/errors.hpp"
#include "mixstate/motion.hpp"
#include "mixstate/sampler.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace mixstate;

namespace {

AutoModel pg_model(double a, double b, double c1, double c2, std::size_t n) {
    Mat h = Mat::Zero(2, 2), v = Mat::Zero(2, 2);
    h(0, 0) = c1;
    v(0, 0) = c2;
    Vec alpha(2);
    alpha << a, b;
    return AutoModel::translation_invariant(Family::positive_gaussian(), Lattice(n, n), {alpha, h, v});
}

Field simulate_pg(double a, double b, double c1, double c2, std::size_t n, std::size_t sweeps, std::uint64_t seed) {
    GibbsConfig c;
    c.sweeps = sweeps;
    c.burn_in = 0;
    c.seed = seed;
    return simulate(pg_model(a, b, c1, c2, n), c).field;
}

std::string temp_path(const std::string& name) { return "/tmp/mixstate_test_" + name; }

}  // namespace

TEST_CASE("threshold rule") {
    const auto m = threshold_map(2, 3, {0.0, 0.5, 0.05, 2.0, 0.1, 0.0}, 0.1);
    CHECK(m.field[0].is_atom());
    CHECK(m.field[1].is_continuous());
    CHECK(m.field[2].is_atom());
    CHECK(m.field[4].is_atom());
    CHECK(m.field[3].value() == 2.0);
    CHECK(m.atom_fraction == doctest::Approx(4.0 / 6.0));
    CHECK_THROWS_AS(threshold_map(1, 2, {0.0, -1.0}), DomainError);
    CHECK_THROWS_AS(threshold_map(1, 2, {0.0, NAN}), DomainError);
    CHECK_THROWS_AS(threshold_map(1, 2, {0.0, 1.0}, -0.1), DomainError);
    CHECK_THROWS_AS(threshold_map(2, 2, {0.0, 1.0}), DomainError);
}

TEST_CASE("all-zero and zero-free maps") {
    const auto zeros = threshold_map(4, 4, std::vector<double>(16, 0.0));
    CHECK(zeros.atom_fraction == 1.0);
    CHECK(zeros.field.atom_count_in_field() == 16);
    std::vector<double> v(16);
    for (std::size_t i = 0; i < 16; ++i) v[i] = 0.01 * static_cast<double>(i + 1);
    const auto positive = threshold_map(4, 4, v);
    CHECK(positive.atom_fraction == 0.0);
}

TEST_CASE("raising the threshold never lowers the atom fraction") {
    Rng rng(1);
    std::vector<double> v(400);
    for (auto& x : v) x = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
    double last = -1.0;
    for (int k = 0; k <= 20; ++k) {
        const double f = threshold_map(20, 20, v, 0.05 * k).atom_fraction;
        CHECK(f >= last);
        last = f;
    }
    CHECK(last == 1.0);
}

TEST_CASE("CSV maps") {
    const auto m = motion_from_csv("0, 1.5\n0.25,0\n\n");
    CHECK(m.field.rows() == 2);
    CHECK(m.field.cols() == 2);
    CHECK(m.field[1].value() == 1.5);
    CHECK(m.atom_fraction == 0.5);
    CHECK_THROWS_AS(motion_from_csv("0,-1\n"), FormatError);
    CHECK_THROWS_AS(motion_from_csv("0,1\n2\n"), FormatError);
    CHECK_THROWS_AS(motion_from_csv("0,x\n"), FormatError);
    CHECK_THROWS_AS(motion_from_csv(""), FormatError);
}

TEST_CASE("PGM export and import round trip within half a gray level") {
    const auto field = simulate_pg(-1.0, 1.0, 0.5, 0.5, 32, 50, 3);
    double top = 0.0;
    for (const auto& v : field.cells())
        if (v.is_continuous()) top = std::max(top, v.value());
    for (int maxval : {255, 65535}) {
        const double scale = top;
        const auto img = field_to_pgm(field, scale, maxval);
        const auto back = motion_from_pgm(parse_pgm(write_pgm(img)), 0.0, scale);
        const double step = scale / maxval;
        bool within = true;
        for (std::size_t i = 0; i < field.size(); ++i) {
            const double x = field[i].is_atom() ? 0.0 : field[i].value();
            const double y = back.field[i].is_atom() ? 0.0 : back.field[i].value();
            within = within && std::abs(x - y) <= 0.5 * step * (1.0 + 1e-9);
            if (field[i].is_atom()) within = within && back.field[i].is_atom();
        }
        CHECK(within);
    }
}

TEST_CASE("ingest picks the format from the extension") {
    const auto pgm = temp_path("map.pgm"), csv = temp_path("map.csv"), txt = temp_path("map.txt");
    {
        std::ofstream(pgm, std::ios::binary) << write_pgm(GrayImage{1, 3, 255, {0, 51, 255}});
        std::ofstream(csv) << "0,0.2,1\n";
        std::ofstream(txt) << "0,0.2,1\n";
    }
    const auto a = ingest(pgm, MapFormat::Auto, 0.0, 5.0);
    CHECK(a.field[0].is_atom());
    CHECK(a.field[1].value() == doctest::Approx(1.0));
    CHECK(a.field[2].value() == doctest::Approx(5.0));
    const auto b = ingest(csv);
    CHECK(b.field[1].value() == 0.2);
    CHECK_THROWS_AS(ingest(txt), FormatError);
    CHECK(ingest(txt, MapFormat::Csv).atom_fraction == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(ingest(temp_path("missing.csv")), std::runtime_error);
    std::remove(pgm.c_str());
    std::remove(csv.c_str());
    std::remove(txt.c_str());
}

TEST_CASE("frame difference") {
    const GrayImage a{1, 3, 255, {10, 20, 30}}, b{1, 3, 255, {10, 25, 0}};
    const auto m = frame_difference(a, b, 0.0, 255.0);
    CHECK(m.field[0].is_atom());
    CHECK(m.field[1].value() == doctest::Approx(5.0));
    CHECK(m.field[2].value() == doctest::Approx(30.0));
    CHECK_THROWS_AS(frame_difference(a, GrayImage{3, 1, 255, {0, 0, 0}}), DomainError);
}

TEST_CASE("rendering keeps atoms white and continuous values darker") {
    Field f(1, 3, {0.0});
    f[1] = MixedValue::continuous(1.0);
    f[2] = MixedValue::continuous(1e-9);
    const auto img = render_field(f);
    CHECK(img.pixels[0] == 255);
    CHECK(img.pixels[1] == 0);
    CHECK(img.pixels[2] < 255);
}

TEST_CASE("mixed histogram conserves mass") {
    Rng rng(2);
    for (std::size_t bins : {1u, 7u, 40u}) {
        Field f(13, 11, {0.0});
        std::size_t atoms = 0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (rng.uniform() < 0.3) {
                ++atoms;
                continue;
            }
            f[i] = MixedValue::continuous(rng.uniform() * 3.0 + 1e-6);
        }
        const auto h = mixed_histogram(f, bins);
        CHECK(h.atom_mass == static_cast<double>(atoms) / 143.0);
        double total = h.atom_mass;
        for (double m : h.mass) total += m;
        CHECK(std::abs(total - 1.0) < 1e-12);
        CHECK(h.edges.size() == bins + 1);
    }
    CHECK_THROWS_AS(mixed_histogram(Field(2, 2, {0.0}), 0), DomainError);
    const auto csv = write_histogram_csv(mixed_histogram(Field(2, 2, {0.0}), 2));
    CHECK(csv.rfind("kind,lo,hi,mass,density\natom,0,0,1,", 0) == 0);
}

TEST_CASE("histogram of independent half-Gaussian data lies in multinomial bands") {
    // beta = 0: sites are iid; continuous part is |N(0, 1 / (2 b))|.
    const double a = 0.3, b = 0.8;
    const auto field = simulate_pg(a, b, 0.0, 0.0, 256, 1, 5);
    const std::size_t bins = 10;
    const auto h = mixed_histogram(field, bins);
    const double n = static_cast<double>(field.size());
    const double w = std::exp(a) * 0.5 * std::sqrt(M_PI / b);
    const double p_cont = w / (1.0 + w);
    const double sigma = std::sqrt(1.0 / (2.0 * b));
    auto cdf = [&](double x) { return std::erf(x / (sigma * std::sqrt(2.0))); };
    auto within = [&](double observed, double p) { return std::abs(observed - p) <= 3.0 * std::sqrt(p * (1.0 - p) / n); };
    CHECK(within(h.atom_mass, 1.0 - p_cont));
    int outside = 0;
    for (std::size_t k = 0; k < bins; ++k) {
        // The last bin closes at the sample maximum; the tail beyond it is negligible.
        const double p = p_cont * (cdf(h.edges[k + 1]) - cdf(h.edges[k]));
        outside += !within(h.mass[k], p);
    }
    CHECK(outside == 0);
}

TEST_CASE("transposing the field swaps the directional estimates") {
    const auto field = simulate_pg(-1.5, 1.2, 0.9, 0.3, 40, 200, 6);
    AnalyzeOptions o;
    o.bootstrap = 0;
    const auto r = analyze(field, o);
    const auto t = analyze(field.transposed(), o);
    REQUIRE(r.fit.converged);
    REQUIRE(t.fit.converged);
    CHECK(std::abs(r.fit.phi_hat[2] - t.fit.phi_hat[3]) < 1e-6);
    CHECK(std::abs(r.fit.phi_hat[3] - t.fit.phi_hat[2]) < 1e-6);
    CHECK(std::abs(r.fit.phi_hat[0] - t.fit.phi_hat[0]) < 1e-6);
    CHECK(r.diff == doctest::Approx(-t.diff).epsilon(1e-5));
}

TEST_CASE("analysis is deterministic given the seed") {
    const auto field = simulate_pg(-1.0, 1.0, 0.5, 0.5, 24, 100, 7);
    AnalyzeOptions o;
    o.bootstrap = 4;
    o.burn_in = 30;
    o.seed = 11;
    const auto a = write_isotropy_report(analyze(field, o));
    const auto b = write_isotropy_report(analyze(field, o));
    CHECK(a == b);
    CHECK(a.find("verdict") != std::string::npos);
    CHECK(a.find("atom_fraction") != std::string::npos);
    o.seed = 12;
    CHECK(write_isotropy_report(analyze(field, o)) != a);
}

TEST_CASE("verdict follows the interval") {
    const auto field = simulate_pg(-1.0, 1.0, 0.5, 0.5, 24, 100, 8);
    AnalyzeOptions o;
    o.bootstrap = 6;
    o.burn_in = 30;
    const auto r = analyze(field, o);
    CHECK(r.replicates + r.failures == 6);
    CHECK(r.ci_lo <= r.diff);
    CHECK(r.ci_hi >= r.diff);
    CHECK((r.verdict == Isotropy::Anisotropic) == (r.ci_lo > 0.0 || r.ci_hi < 0.0));
    CHECK(r.quantiles.size() == r.quantile_levels.size());
    o.level = 1.0;
    CHECK_THROWS_AS(analyze(field, o), DomainError);
}

TEST_CASE("degenerate maps are rejected") {
    Field constant(6, 6, {0.0});
    for (std::size_t i = 0; i < constant.size(); ++i) constant[i] = MixedValue::continuous(0.4);
    CHECK_THROWS_AS(analyze(constant), NonIdentifiable);
    CHECK_THROWS_AS(analyze(Field(6, 6, {0.0})), NonIdentifiable);
}
