#include "mixstate/motion.hpp"

#include "mixstate/errors.hpp"
#include "mixstate/keyvalue.hpp"
#include "mixstate/text.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>

namespace mixstate {

StateSpace motion_space() { return StateSpace({0.0}, ContinuousDomain::positive_half_line()); }

MotionMap threshold_map(std::size_t rows, std::size_t cols, const std::vector<double>& values, double eps) {
    if (!(eps >= 0.0)) throw DomainError("zero threshold must be non-negative");
    if (values.size() != rows * cols) throw DomainError("value count does not match the map size");
    MotionMap out{Field(rows, cols, {0.0}), 0.0};
    std::size_t atoms = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x = values[i];
        if (!std::isfinite(x) || x < 0.0) throw DomainError("motion magnitudes must be finite and non-negative");
        if (x <= eps) {
            out.field[i] = MixedValue::atom(1);
            ++atoms;
        } else {
            out.field[i] = MixedValue::continuous(x);
        }
    }
    out.atom_fraction = static_cast<double>(atoms) / static_cast<double>(values.size());
    return out;
}

MotionMap motion_from_pgm(const GrayImage& img, double eps, double scale) {
    if (!(scale > 0.0)) throw DomainError("scale must be positive");
    std::vector<double> v;
    v.reserve(img.pixels.size());
    for (int g : img.pixels) v.push_back(static_cast<double>(g) / img.maxval * scale);
    return threshold_map(img.rows, img.cols, v, eps);
}

MotionMap motion_from_csv(std::string_view text, double eps) {
    std::vector<double> v;
    std::size_t rows = 0, cols = 0;
    for (auto line : split(text, '\n')) {
        line = trim(line);
        if (line.empty()) continue;
        std::size_t n = 0;
        for (auto cell : split(line, ',')) {
            const auto x = parse_double(trim(cell));
            if (!x) throw FormatError("bad CSV value '" + std::string(trim(cell)) + "'");
            if (*x < 0.0) throw FormatError("negative value in motion map");
            v.push_back(*x);
            ++n;
        }
        if (rows && n != cols) throw FormatError("ragged CSV rows");
        cols = n;
        ++rows;
    }
    if (rows == 0) throw FormatError("empty CSV map");
    try {
        return threshold_map(rows, cols, v, eps);
    } catch (const DomainError& e) {
        throw FormatError(e.what());
    }
}

MotionMap ingest(const std::string& path, MapFormat format, double eps, double scale) {
    if (format == MapFormat::Auto) {
        const auto dot = path.rfind('.');
        std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (ext == "pgm") format = MapFormat::Pgm;
        else if (ext == "csv") format = MapFormat::Csv;
        else throw FormatError("cannot infer the map format of '" + path + "' (expected .pgm or .csv)");
    }
    const auto bytes = read_file(path);
    return format == MapFormat::Pgm ? motion_from_pgm(parse_pgm(bytes), eps, scale) : motion_from_csv(bytes, eps);
}

MotionMap frame_difference(const GrayImage& a, const GrayImage& b, double eps, double scale) {
    if (a.rows != b.rows || a.cols != b.cols || a.maxval != b.maxval) throw DomainError("frames differ in size or depth");
    GrayImage d = a;
    for (std::size_t i = 0; i < d.pixels.size(); ++i) d.pixels[i] = std::abs(a.pixels[i] - b.pixels[i]);
    return motion_from_pgm(d, eps, scale);
}

GrayImage field_to_pgm(const Field& field, double scale, int maxval) {
    if (!(scale > 0.0) || maxval < 1 || maxval > 65535) throw DomainError("bad PGM export range");
    GrayImage img{field.rows(), field.cols(), maxval, {}};
    for (const auto& v : field.cells()) {
        const double x = v.is_atom() ? 0.0 : v.value();
        const double g = std::round(x / scale * maxval);
        img.pixels.push_back(static_cast<int>(std::clamp(g, 0.0, static_cast<double>(maxval))));
    }
    return img;
}

GrayImage render_field(const Field& field, int maxval) {
    double top = 0.0;
    for (const auto& v : field.cells())
        if (v.is_continuous()) top = std::max(top, v.value());
    GrayImage img{field.rows(), field.cols(), maxval, {}};
    for (const auto& v : field.cells()) {
        if (v.is_atom() || top <= 0.0) {
            img.pixels.push_back(maxval);
            continue;
        }
        // Continuous values never render fully white, so they stay distinct from atoms.
        const double shade = (1.0 - v.value() / top) * (maxval - 1);
        img.pixels.push_back(static_cast<int>(std::floor(shade)));
    }
    return img;
}

MixedHistogram mixed_histogram(const Field& field, std::size_t bins) {
    if (bins < 1) throw DomainError("need at least one bin");
    MixedHistogram h;
    std::vector<double> cont;
    for (const auto& v : field.cells())
        if (v.is_continuous()) cont.push_back(v.value());
    const double n = static_cast<double>(field.size());
    const double top = cont.empty() ? 1.0 : *std::max_element(cont.begin(), cont.end());
    h.edges.resize(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k) h.edges[k] = top * static_cast<double>(k) / static_cast<double>(bins);
    std::vector<std::size_t> counts(bins, 0);
    for (double x : cont) ++counts[std::min(bins - 1, static_cast<std::size_t>(x / top * static_cast<double>(bins)))];
    h.atom_mass = static_cast<double>(field.size() - cont.size()) / n;
    for (auto c : counts) h.mass.push_back(static_cast<double>(c) / n);
    return h;
}

std::string write_histogram_csv(const MixedHistogram& h) {
    std::string out = "kind,lo,hi,mass,density\n";
    out += "atom,0,0," + format_double(h.atom_mass) + ",\n";
    for (std::size_t k = 0; k < h.mass.size(); ++k) {
        const double w = h.edges[k + 1] - h.edges[k];
        out += "bin," + format_double(h.edges[k]) + "," + format_double(h.edges[k + 1]) + "," + format_double(h.mass[k]) +
               "," + format_double(w > 0.0 ? h.mass[k] / w : 0.0) + "\n";
    }
    return out;
}

IsotropyReport analyze(const Field& field, const AnalyzeOptions& o) {
    if (!(o.level > 0.0 && o.level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
    const auto layout = ParameterLayout::make(Family::positive_gaussian());
    FitOptions fo;
    fo.boundary = o.boundary;

    IsotropyReport rep;
    rep.level = o.level;
    rep.fit = fit(layout, field, fo);
    const int c1 = layout.index_of("c1"), c2 = layout.index_of("c2");
    rep.diff = rep.fit.phi_hat[c1] - rep.fit.phi_hat[c2];

    BootstrapOptions bo;
    bo.burn_in = o.burn_in;
    bo.seed = o.seed;
    bo.fit = fo;
    const auto boot = bootstrap(layout, rep.fit.phi_hat, Lattice(field.rows(), field.cols(), o.boundary), o.bootstrap, bo);
    rep.replicates = static_cast<std::size_t>(boot.replicates.rows());
    rep.failures = boot.failures;
    if (rep.replicates >= 2) {
        rep.fit.se = boot.se;
        const Eigen::VectorXd d = boot.replicates.col(c1) - boot.replicates.col(c2);
        const double mean = d.mean();
        rep.diff_sd = std::sqrt((d.array() - mean).square().sum() / static_cast<double>(d.size() - 1));
    }
    const double z = boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * o.level);
    rep.ci_lo = rep.diff - z * rep.diff_sd;
    rep.ci_hi = rep.diff + z * rep.diff_sd;
    rep.verdict = (rep.ci_lo > 0.0 || rep.ci_hi < 0.0) ? Isotropy::Anisotropic : Isotropy::Isotropic;

    std::vector<double> cont;
    for (const auto& v : field.cells())
        if (v.is_continuous()) cont.push_back(v.value());
    std::sort(cont.begin(), cont.end());
    rep.atom_fraction = 1.0 - static_cast<double>(cont.size()) / static_cast<double>(field.size());
    rep.quantile_levels = {0.1, 0.25, 0.5, 0.75, 0.9};
    for (double q : rep.quantile_levels) {
        if (cont.empty()) break;
        const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(cont.size() - 1)));
        rep.quantiles.push_back(cont[k]);
    }
    return rep;
}

std::string write_isotropy_report(const IsotropyReport& r) {
    KvDocument doc;
    auto& est = doc.section_or_add("estimate");
    for (std::size_t k = 0; k < r.fit.names.size(); ++k) est.set(r.fit.names[k], r.fit.phi_hat[static_cast<Eigen::Index>(k)]);
    est.set("log_pl", r.fit.log_pl);
    est.set("grad_norm", r.fit.grad_norm);
    est.set("converged", r.fit.converged);
    if (r.fit.se) {
        auto& se = doc.section_or_add("standard_errors");
        for (std::size_t k = 0; k < r.fit.names.size(); ++k) se.set(r.fit.names[k], (*r.fit.se)[static_cast<Eigen::Index>(k)]);
    }
    auto& iso = doc.section_or_add("isotropy");
    iso.set("c1_minus_c2", r.diff);
    iso.set("bootstrap_sd", r.diff_sd);
    iso.set("ci_lo", r.ci_lo);
    iso.set("ci_hi", r.ci_hi);
    iso.set("level", r.level);
    iso.set("replicates", static_cast<double>(r.replicates));
    iso.set("failures", static_cast<double>(r.failures));
    iso.set("verdict", std::string(r.verdict == Isotropy::Anisotropic ? "anisotropic" : "isotropic"));
    auto& hist = doc.section_or_add("histogram");
    hist.set("atom_fraction", r.atom_fraction);
    hist.set("quantile_levels", r.quantile_levels);
    hist.set("quantiles", r.quantiles);
    return doc.write();
}

}  // namespace mixstate
