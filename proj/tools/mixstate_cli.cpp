// Command-line front end: simulate, check, fit, oracle, motion-report,
// histogram and export-pgm.

#include "mixstate/admissibility.hpp"
#include "mixstate/errors.hpp"
#include "mixstate/estimation.hpp"
#include "mixstate/keyvalue.hpp"
#include "mixstate/model_config.hpp"
#include "mixstate/motion.hpp"
#include "mixstate/oracle.hpp"
#include "mixstate/sampler.hpp"
#include "mixstate/text.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>

using namespace mixstate;

namespace {

void print_verdict(std::ostream& os, const AdmissibilityVerdict& v) {
    os << "well_defined: " << (v.well_defined ? "yes" : "no") << " (sufficient conditions only)\n";
    os << "behaviour: " << behaviour_name(v.behaviour) << "\n";
    for (const auto& c : v.conditions) os << "  [" << (c.passed ? "pass" : "FAIL") << "] " << c.name << ": " << c.detail << "\n";
    for (const auto& x : v.violated)
        os << "  violation " << x.condition << ": " << x.count << " offending, first at site " << x.site << " (" << x.detail << ")\n";
    for (const auto& n : v.notes) os << "  note: " << n << "\n";
}

struct SimulateArgs {
    std::string model, out, trace, pgm, scan = "raster", init = "reference";
    std::size_t sweeps = 1000, burn_in = 500;
    std::uint64_t seed = 1;
};

int run_simulate(const SimulateArgs& a) {
    const auto cfg = parse_model_config(read_file(a.model));
    const auto model = cfg.model();
    const auto verdict = check(model);
    if (!verdict.well_defined) {
        std::cerr << "warning: the model is not certified admissible; the chain may fail\n";
        print_verdict(std::cerr, verdict);
    }
    GibbsConfig gc;
    gc.sweeps = a.sweeps;
    gc.burn_in = a.burn_in;
    gc.seed = a.seed;
    if (a.scan == "random") gc.scan = ScanOrder::Random;
    else if (a.scan != "raster") throw DomainError("--scan must be raster or random");
    if (a.init.rfind("continuous:", 0) == 0) {
        const auto v = parse_double(std::string_view(a.init).substr(11));
        if (!v) throw DomainError("--init continuous:<value> needs a number");
        gc.init = GibbsInit::all_continuous(*v);
    } else if (a.init != "reference") {
        gc.init = GibbsInit::from_field(parse_field(read_file(a.init), cfg.family.state_space()));
    }
    const auto res = simulate(model, gc);
    write_file(a.out, write_field(res.field));
    if (!a.trace.empty()) {
        std::string t = "sweep,energy\n";
        for (std::size_t k = 0; k < res.energy_trace.size(); ++k)
            t += std::to_string(k + 1) + "," + format_double(res.energy_trace[k]) + "\n";
        write_file(a.trace, t);
    }
    if (!a.pgm.empty()) write_file(a.pgm, write_pgm(render_field(res.field)));
    const auto tail = std::span<const double>(res.energy_trace).subspan(gc.burn_in);
    const auto mk = mann_kendall(tail);
    std::cout << "atoms: " << res.field.atom_count_in_field() << " of " << res.field.size() << "\n"
              << "final energy: " << format_double(res.energy_trace.back()) << "\n"
              << "post-burn-in trend test: z = " << format_double(mk.z) << ", p = " << format_double(mk.p_value) << "\n";
    return 0;
}

int run_check(const std::string& path) {
    const auto cfg = parse_model_config(read_file(path));
    const auto v = check(cfg.model());
    print_verdict(std::cout, v);
    return v.well_defined ? 0 : 2;
}

struct FitArgs {
    std::string family = "positive-gaussian", field, out, layout = "anisotropic", boundary = "free", constraint;
    double k = 1.0;
    std::size_t bootstrap = 0, burn_in = 500;
    std::uint64_t seed = 1;
    bool interior = false;
};

int run_fit(const FitArgs& a) {
    const auto family = Family::from_name(a.family, a.k);
    const auto field = parse_field(read_file(a.field), family.state_space());
    const auto kind = a.layout == "isotropic" ? ParameterLayout::Kind::Isotropic
                      : a.layout == "alpha"   ? ParameterLayout::Kind::AlphaOnly
                                              : ParameterLayout::Kind::Anisotropic;
    if (a.layout != "isotropic" && a.layout != "alpha" && a.layout != "anisotropic")
        throw DomainError("--layout must be anisotropic, isotropic or alpha");
    const auto layout = ParameterLayout::make(family, kind);
    FitOptions fo;
    fo.boundary = parse_boundary(a.boundary);
    fo.interior_only = a.interior;
    if (a.constraint == "cooperative") fo.sign_constraint = Behaviour::Cooperative;
    else if (a.constraint == "competitive") fo.sign_constraint = Behaviour::Competitive;
    else if (!a.constraint.empty()) throw DomainError("--constraint must be cooperative or competitive");
    auto rep = fit(layout, field, fo);
    if (a.bootstrap > 0) {
        BootstrapOptions bo;
        bo.burn_in = a.burn_in;
        bo.seed = a.seed;
        bo.fit = fo;
        const auto boot = bootstrap(layout, rep.phi_hat, Lattice(field.rows(), field.cols(), fo.boundary), a.bootstrap, bo);
        rep.se = boot.se;
        if (boot.failures) std::cerr << boot.failures << " bootstrap refits failed and were excluded\n";
    }
    const auto text = write_fit_report(rep, layout);
    if (a.out.empty()) std::cout << text;
    else write_file(a.out, text);
    for (int k = 0; k < layout.size(); ++k)
        std::cout << rep.names[static_cast<std::size_t>(k)] << " = " << format_double(rep.phi_hat[k]) << "\n";
    std::cout << "converged: " << (rep.converged ? "yes" : "no") << " (" << rep.message << ")\n";
    return rep.converged ? 0 : 3;
}

struct OracleArgs {
    std::string model, lattice = "2x2", report;
    double h = 1e-3;
    std::size_t configs = 3;
    std::uint64_t seed = 1;
};

int run_oracle(const OracleArgs& a) {
    auto cfg = parse_model_config(read_file(a.model));
    const auto x = a.lattice.find('x');
    const auto r = x == std::string::npos ? std::nullopt : parse_int(std::string_view(a.lattice).substr(0, x));
    const auto c = x == std::string::npos ? std::nullopt : parse_int(std::string_view(a.lattice).substr(x + 1));
    if (!r || !c || *r < 1 || *c < 1) throw DomainError("--lattice must look like 2x2");
    cfg.rows = static_cast<std::size_t>(*r);
    cfg.cols = static_cast<std::size_t>(*c);
    cfg.boundary = Boundary::Free;
    const auto model = cfg.model();
    const auto& fam = model.family();

    KvDocument doc;
    write_family(doc, fam);
    auto& sum = doc.section_or_add("oracle");
    sum.set("lattice", a.lattice);
    sum.set("h", a.h);

    const auto disc = Discretization::for_theta(fam, cfg.params.alpha, a.h);
    try {
        const double lz = log_partition(model, disc);
        sum.set("log_z", lz);
        sum.set("p_reference", std::exp(-lz));
    } catch (const DomainError& e) {
        sum.set("log_z", std::string("skipped: ") + e.what());
    }

    // Conditionals at the reference configuration and at a few Gibbs states.
    std::vector<Field> fields{initial_field(model, GibbsInit::all_reference())};
    for (std::size_t k = 0; k < a.configs; ++k) {
        GibbsChain chain(model, fields.front(), a.seed + k);
        for (int t = 0; t < 5; ++t) chain.sweep();
        fields.push_back(chain.field());
    }
    double worst_tv = 0.0, worst_r = 0.0;
    auto& cond = doc.section_or_add("conditionals");
    for (std::size_t f = 0; f < fields.size(); ++f) {
        for (std::size_t s = 0; s < model.lattice().size(); ++s) {
            const auto theta = model.local_natural_params(fields[f], s);
            const auto grid = Discretization::for_theta(fam, theta.theta(), a.h).grid(fam);
            const auto sliced = conditional_from_energy(model, grid, fields[f], s);
            const auto exact = analytic_masses(fam, theta, grid);
            const double tv = total_variation(sliced, exact);
            auto pos = [&](const MixedValue& v) { return v.is_atom() ? fam.state_space().coordinate(v) : v.value(); };
            const double r_oracle = moment(sliced, pos);
            const double r_exact = fam.continuous_restricted_mean(theta);
            worst_tv = std::max(worst_tv, tv);
            worst_r = std::max(worst_r, std::abs(r_oracle - r_exact));
            const std::string key = "config" + std::to_string(f) + ".site" + std::to_string(s);
            cond.set(key + ".tv", tv);
            cond.set(key + ".r_oracle", r_oracle);
            cond.set(key + ".r_closed_form", r_exact);
        }
    }
    sum.set("max_tv", worst_tv);
    sum.set("max_r_difference", worst_r);
    const auto text = doc.write();
    if (a.report.empty()) std::cout << text;
    else write_file(a.report, text);
    std::cout << "max TV(analytic, sliced) = " << format_double(worst_tv) << "\n";
    return 0;
}

struct MotionArgs {
    std::string in, out, boundary = "free";
    double eps = 0.0, scale = 1.0, level = 0.95;
    std::size_t bootstrap = 50, burn_in = 500;
    std::uint64_t seed = 1;
};

MotionMap load_map(const std::string& path, double eps, double scale) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".msf") {
        const auto f = parse_field(read_file(path), motion_space());
        return {f, static_cast<double>(f.atom_count_in_field()) / static_cast<double>(f.size())};
    }
    return ingest(path, MapFormat::Auto, eps, scale);
}

int run_motion(const MotionArgs& a) {
    const auto map = load_map(a.in, a.eps, a.scale);
    AnalyzeOptions o;
    o.bootstrap = a.bootstrap;
    o.level = a.level;
    o.seed = a.seed;
    o.burn_in = a.burn_in;
    o.boundary = parse_boundary(a.boundary);
    const auto rep = analyze(map.field, o);
    const auto text = write_isotropy_report(rep);
    if (a.out.empty()) std::cout << text;
    else write_file(a.out, text);
    std::cout << "c1 - c2 = " << format_double(rep.diff) << ", " << rep.level * 100 << "% CI [" << format_double(rep.ci_lo)
              << ", " << format_double(rep.ci_hi) << "] -> "
              << (rep.verdict == Isotropy::Anisotropic ? "anisotropic" : "isotropic") << "\n";
    return 0;
}

int run_histogram(const std::string& in, const std::string& out, std::size_t bins, double eps, double scale) {
    const auto map = load_map(in, eps, scale);
    const auto text = write_histogram_csv(mixed_histogram(map.field, bins));
    if (out.empty()) std::cout << text;
    else write_file(out, text);
    return 0;
}

int run_export(const std::string& in, const std::string& out, double scale, int maxval, bool render, bool plain) {
    const auto field = parse_field(read_file(in));
    double top = scale;
    if (!(top > 0.0)) {
        top = 0.0;
        for (const auto& v : field.cells())
            if (v.is_continuous()) top = std::max(top, v.value());
        if (!(top > 0.0)) top = 1.0;
    }
    const auto img = render ? render_field(field, maxval) : field_to_pgm(field, top, maxval);
    write_file(out, write_pgm(img, !plain));
    if (!render) std::cout << "scale: " << format_double(top) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed-state auto-models: simulation, admissibility, pseudo-likelihood fitting"};
    app.require_subcommand(1);
    int status = 0;

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Gibbs-sample a field from a model config");
    sim->add_option("--model", sa.model, "model config")->required();
    sim->add_option("--out", sa.out, "output field (MSF1)")->required();
    sim->add_option("--sweeps", sa.sweeps, "total sweeps")->capture_default_str();
    sim->add_option("--burn-in", sa.burn_in, "sweeps excluded from the trend test")->capture_default_str();
    sim->add_option("--seed", sa.seed)->capture_default_str();
    sim->add_option("--scan", sa.scan, "raster or random")->capture_default_str();
    sim->add_option("--init", sa.init, "reference, continuous:<value>, or an MSF1 file")->capture_default_str();
    sim->add_option("--trace", sa.trace, "energy trace CSV");
    sim->add_option("--pgm", sa.pgm, "grayscale rendering (atoms white)");
    sim->callback([&] { status = run_simulate(sa); });

    std::string check_model;
    auto* chk = app.add_subcommand("check", "Admissibility verdict for a model config");
    chk->add_option("--model", check_model)->required();
    chk->callback([&] { status = run_check(check_model); });

    FitArgs fa;
    auto* fit_cmd = app.add_subcommand("fit", "Maximum pseudo-likelihood fit of a field");
    fit_cmd->add_option("--family", fa.family)->capture_default_str();
    fit_cmd->add_option("--K", fa.k, "truncation or censoring level")->capture_default_str();
    fit_cmd->add_option("--field", fa.field, "MSF1 field")->required();
    fit_cmd->add_option("--out", fa.out, "report file");
    fit_cmd->add_option("--layout", fa.layout, "anisotropic, isotropic or alpha")->capture_default_str();
    fit_cmd->add_option("--boundary", fa.boundary, "free or toroidal")->capture_default_str();
    fit_cmd->add_option("--constraint", fa.constraint, "cooperative or competitive sign constraint");
    fit_cmd->add_flag("--interior-only", fa.interior, "sum the pseudo-likelihood over interior sites only");
    fit_cmd->add_option("--bootstrap", fa.bootstrap, "parametric bootstrap replicates")->capture_default_str();
    fit_cmd->add_option("--burn-in", fa.burn_in)->capture_default_str();
    fit_cmd->add_option("--seed", fa.seed)->capture_default_str();
    fit_cmd->callback([&] { status = run_fit(fa); });

    OracleArgs oa;
    auto* orc = app.add_subcommand("oracle", "Brute-force checks on a tiny lattice");
    orc->add_option("--model", oa.model)->required();
    orc->add_option("--lattice", oa.lattice, "RxC, at most 4 sites")->capture_default_str();
    orc->add_option("--step", oa.h, "discretization step")->capture_default_str();
    orc->add_option("--configs", oa.configs, "random configurations to condition on")->capture_default_str();
    orc->add_option("--seed", oa.seed)->capture_default_str();
    orc->add_option("--report", oa.report);
    orc->callback([&] { status = run_oracle(oa); });

    MotionArgs ma;
    auto* mot = app.add_subcommand("motion-report", "Fit a motion map and test isotropy");
    mot->add_option("--in", ma.in, "PGM, CSV or MSF1 map")->required();
    mot->add_option("--out", ma.out);
    mot->add_option("--eps", ma.eps, "values <= eps become the zero atom")->capture_default_str();
    mot->add_option("--scale", ma.scale, "value of the maximal gray level")->capture_default_str();
    mot->add_option("--bootstrap", ma.bootstrap)->capture_default_str();
    mot->add_option("--level", ma.level)->capture_default_str();
    mot->add_option("--burn-in", ma.burn_in)->capture_default_str();
    mot->add_option("--seed", ma.seed)->capture_default_str();
    mot->add_option("--boundary", ma.boundary)->capture_default_str();
    mot->callback([&] { status = run_motion(ma); });

    std::string h_in, h_out;
    std::size_t bins = 20;
    double h_eps = 0.0, h_scale = 1.0;
    auto* hist = app.add_subcommand("histogram", "Mixed histogram: atom mass plus binned continuous part");
    hist->add_option("--in", h_in)->required();
    hist->add_option("--out", h_out);
    hist->add_option("--bins", bins)->capture_default_str();
    hist->add_option("--eps", h_eps)->capture_default_str();
    hist->add_option("--scale", h_scale)->capture_default_str();
    hist->callback([&] { status = run_histogram(h_in, h_out, bins, h_eps, h_scale); });

    std::string e_in, e_out;
    double e_scale = 0.0;
    int e_max = 255;
    bool e_render = false, e_plain = false;
    auto* exp = app.add_subcommand("export-pgm", "Write a field as a PGM image");
    exp->add_option("--field", e_in)->required();
    exp->add_option("--out", e_out)->required();
    exp->add_option("--scale", e_scale, "value mapped to maxval (default: field maximum)");
    exp->add_option("--maxval", e_max)->capture_default_str();
    exp->add_flag("--render", e_render, "visual rendering with atoms white");
    exp->add_flag("--plain", e_plain, "ASCII P2 instead of binary P5");
    exp->callback([&] { status = run_export(e_in, e_out, e_scale, e_max, e_render, e_plain); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return status;
}
