#include "mixstate/estimation.hpp"

#include "mixstate/errors.hpp"
#include "mixstate/keyvalue.hpp"
#include "mixstate/model_config.hpp"
#include "mixstate/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mixstate {

// ---------------------------------------------------------------- layout

void ParameterLayout::add(std::string name, std::vector<Target> targets) {
    names_.push_back(std::move(name));
    targets_.push_back(std::move(targets));
}

ParameterLayout ParameterLayout::make(const Family& family, Kind kind) {
    if (family.kind() == FamilyKind::MixedGamma) throw DomainError("the mixed-gamma auto-model is not estimable");
    ParameterLayout l(family, kind);
    const int d = family.dim();
    const bool censored = family.kind() == FamilyKind::CensoredMixedExponential;
    const std::vector<std::string> alpha = censored ? std::vector<std::string>{"r", "a", "b"} : std::vector<std::string>{"a", "b"};
    for (int k = 0; k < d; ++k) l.add(alpha[static_cast<std::size_t>(k)], {{0, k, 0}});
    l.positive_ = d - 1;
    if (kind == Kind::AlphaOnly) return l;

    struct Entry {
        const char* name;
        int row, col;
    };
    std::vector<Entry> entries;
    if (family.kind() == FamilyKind::PositiveMixedGaussian) entries = {{"c", 0, 0}};
    else if (censored) entries = {{"s", 0, 0}, {"u", 0, 1}, {"t", 0, 2}, {"c", 1, 1}, {"d", 1, 2}, {"e", 2, 2}};
    else entries = {{"c", 0, 0}, {"d", 0, 1}, {"e", 1, 1}};

    auto targets = [](const Entry& e, int block) {
        std::vector<Target> t{{block, e.row, e.col}};
        if (e.row != e.col) t.push_back({block, e.col, e.row});
        return t;
    };
    if (kind == Kind::Isotropic) {
        for (const auto& e : entries) {
            auto t = targets(e, 1);
            for (auto x : targets(e, 2)) t.push_back(x);
            l.add(e.name, t);
        }
    } else {
        for (int block : {1, 2})
            for (const auto& e : entries) l.add(e.name + std::to_string(block), targets(e, block));
    }
    return l;
}

int ParameterLayout::index_of(std::string_view name) const {
    for (std::size_t k = 0; k < names_.size(); ++k)
        if (names_[k] == name) return static_cast<int>(k);
    return -1;
}

int ParameterLayout::full_index(const Target& t) const {
    const int d = family_.dim();
    if (t.block == 0) return t.row;
    return d + (t.block - 1) * d * d + t.row * d + t.col;
}

TranslationInvariantParams ParameterLayout::params(const Eigen::VectorXd& phi) const {
    if (phi.size() != size()) throw DomainError("phi must have " + std::to_string(size()) + " components");
    const int d = family_.dim();
    TranslationInvariantParams p{Vec::Zero(d), Mat::Zero(d, d), Mat::Zero(d, d)};
    for (int k = 0; k < size(); ++k) {
        for (const auto& t : targets_[static_cast<std::size_t>(k)]) {
            if (t.block == 0) p.alpha[t.row] = phi[k];
            else if (t.block == 1) p.beta_h(t.row, t.col) = phi[k];
            else p.beta_v(t.row, t.col) = phi[k];
        }
    }
    return p;
}

Eigen::VectorXd ParameterLayout::phi(const TranslationInvariantParams& p) const {
    Eigen::VectorXd out(size());
    for (int k = 0; k < size(); ++k) {
        const auto& t = targets_[static_cast<std::size_t>(k)].front();
        out[k] = t.block == 0 ? p.alpha[t.row] : t.block == 1 ? p.beta_h(t.row, t.col) : p.beta_v(t.row, t.col);
    }
    return out;
}

Eigen::VectorXd ParameterLayout::pull_back(const Eigen::VectorXd& full) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(size());
    for (int k = 0; k < size(); ++k)
        for (const auto& t : targets_[static_cast<std::size_t>(k)]) g[k] += full[full_index(t)];
    return g;
}

// ------------------------------------------------------ pseudo-likelihood

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 16) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

PseudoLikelihood::PseudoLikelihood(Family family, Lattice lattice, const Field& data, bool interior_only)
    : family_(std::move(family)), lattice_(std::move(lattice)) {
    if (data.rows() != lattice_.rows() || data.cols() != lattice_.cols())
        throw DomainError("field does not match the lattice");
    validate_field(data, family_.state_space());
    const int d = family_.dim();
    stats_.reserve(data.size());
    for (const auto& v : data.cells()) stats_.push_back(family_.suff_stat(v));
    nbr_.assign(data.size(), {Vec::Zero(d), Vec::Zero(d), Vec::Zero(d), Vec::Zero(d)});
    for (std::size_t s = 0; s < data.size(); ++s) {
        for (const auto& n : lattice_.neighbours(s)) nbr_[s][static_cast<std::size_t>(n.dir)] = stats_[n.site];
        if (!interior_only || lattice_.interior(s)) sites_.push_back(s);
    }
    if (sites_.empty()) throw DomainError("no sites left for the pseudo-likelihood");
}

Vec PseudoLikelihood::theta(std::size_t s, const TranslationInvariantParams& p) const {
    const auto& n = nbr_[s];
    Vec t = p.alpha;
    t.noalias() += p.beta_h * n[0];
    t.noalias() += p.beta_h.transpose() * n[1];
    t.noalias() += p.beta_v * n[2];
    t.noalias() += p.beta_v.transpose() * n[3];
    return t;
}

std::optional<std::size_t> PseudoLikelihood::inadmissible_site(const TranslationInvariantParams& p) const {
    for (std::size_t s = 0; s < stats_.size(); ++s)
        if (!family_.admits(theta(s, p))) return s;
    return std::nullopt;
}

bool PseudoLikelihood::evaluate(const TranslationInvariantParams& p, double& value, Eigen::VectorXd* full_grad) const {
    const int d = family_.dim();
    const std::size_t n = sites_.size();
    const std::size_t width = full_grad ? static_cast<std::size_t>(d + 2 * d * d) : 0;
    // Column-major per-site contributions: value first, then gradient entries.
    std::vector<double> cols((1 + width) * n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t s = sites_[k];
        const Vec t = theta(s, p);
        if (!family_.admits(t)) return false;
        const NaturalParams np(family_, t);
        const Vec& b = stats_[s];
        cols[k] = t.dot(b) - family_.log_normalizer(np);
        if (!full_grad) continue;
        const Vec r = b - family_.grad_log_normalizer(np);
        const auto& nb = nbr_[s];
        std::size_t c = 1;
        for (int i = 0; i < d; ++i) cols[(c++) * n + k] = r[i];
        for (int blk = 0; blk < 2; ++blk) {
            const Vec& fwd = nb[blk == 0 ? 0 : 2];
            const Vec& back = nb[blk == 0 ? 1 : 3];
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) cols[(c++) * n + k] = r[i] * fwd[j] + back[i] * r[j];
        }
    }
    value = pairwise_sum(std::span<const double>(cols.data(), n));
    if (!std::isfinite(value)) return false;
    if (full_grad) {
        full_grad->resize(static_cast<Eigen::Index>(width));
        for (std::size_t c = 0; c < width; ++c)
            (*full_grad)[static_cast<Eigen::Index>(c)] = pairwise_sum(std::span<const double>(cols.data() + (c + 1) * n, n));
    }
    return true;
}

namespace {

PseudoLikelihood make_pl(const ParameterLayout& layout, const Field& field, Boundary boundary, bool interior_only) {
    return PseudoLikelihood(layout.family(), Lattice(field.rows(), field.cols(), boundary), field, interior_only);
}

}  // namespace

double log_pseudo_likelihood(const ParameterLayout& layout, const Eigen::VectorXd& phi, const Field& field,
                             Boundary boundary, bool interior_only) {
    const auto pl = make_pl(layout, field, boundary, interior_only);
    const auto p = layout.params(phi);
    if (auto s = pl.inadmissible_site(p)) throw InadmissibleParameter(*s, "local natural parameter outside " + layout.family().admissible_set_description());
    double v = 0.0;
    pl.evaluate(p, v, nullptr);
    return v;
}

Eigen::VectorXd grad_log_pseudo_likelihood(const ParameterLayout& layout, const Eigen::VectorXd& phi, const Field& field,
                                           Boundary boundary, bool interior_only) {
    const auto pl = make_pl(layout, field, boundary, interior_only);
    const auto p = layout.params(phi);
    if (auto s = pl.inadmissible_site(p)) throw InadmissibleParameter(*s, "local natural parameter outside " + layout.family().admissible_set_description());
    double v = 0.0;
    Eigen::VectorXd full;
    pl.evaluate(p, v, &full);
    return layout.pull_back(full);
}

// ------------------------------------------------------------------ fit

void require_identifiable(const Family& family, const Field& field) {
    const auto& space = family.state_space();
    validate_field(field, space);
    std::vector<std::size_t> counts(space.atom_count() + 1, 0);
    bool varied = false;
    double first = 0.0;
    bool seen = false;
    for (const auto& v : field.cells()) {
        if (v.is_atom()) {
            ++counts[static_cast<std::size_t>(v.atom_index() - 1)];
            continue;
        }
        ++counts.back();
        if (!seen) {
            first = v.value();
            seen = true;
        } else if (v.value() != first) {
            varied = true;
        }
    }
    for (std::size_t k = 0; k + 1 < counts.size(); ++k)
        if (counts[k] == 0)
            throw NonIdentifiable("atom " + std::to_string(k + 1) + " never occurs in the field; its natural parameter diverges");
    if (counts.back() == 0) throw NonIdentifiable("the field has no continuous values; the atom probability estimate is 1");
    if (!varied) throw NonIdentifiable("all continuous values are equal; the continuous parameters diverge");
}

namespace {

// Rate lambda with K psi(lambda K) equal to the target mean on (0, K).
double truncated_rate_for_mean(double mean, double k) {
    if (mean >= 0.5 * k) return 0.01 / k;
    double lo = std::log(1e-8 / k), hi = std::log(1e8 / k);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (truncated_exponential_mean(std::exp(mid), k) > mean) lo = mid;
        else hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

}  // namespace

TranslationInvariantParams iid_start(const Family& family, const Field& field) {
    require_identifiable(family, field);
    const int m = family.atom_count();
    std::vector<double> atoms(static_cast<std::size_t>(m), 0.0);
    double n_cont = 0.0, s1 = 0.0, s2 = 0.0;
    for (const auto& v : field.cells()) {
        if (v.is_atom()) {
            atoms[static_cast<std::size_t>(v.atom_index() - 1)] += 1.0;
        } else {
            n_cont += 1.0;
            s1 += v.value();
            s2 += v.value() * v.value();
        }
    }
    const double n = static_cast<double>(field.size());
    const double n_atoms = n - n_cont;
    OriginalParams o;
    o.gamma = n_atoms / n;
    for (double a : atoms) o.q.push_back(a / n_atoms);
    const double mean = s1 / n_cont;
    switch (family.kind()) {
        case FamilyKind::MixedExponential: o.xi = {1.0 / mean}; break;
        case FamilyKind::PositiveMixedGaussian: o.xi = {n_cont / (2.0 * s2)}; break;
        case FamilyKind::TruncatedMixedExponential:
        case FamilyKind::CensoredMixedExponential: o.xi = {truncated_rate_for_mean(mean, family.truncation())}; break;
        case FamilyKind::MixedGamma: {
            const double var = std::max(s2 / n_cont - mean * mean, 1e-12 * mean * mean);
            o.xi = {mean / var, mean * mean / var - 1.0};
            break;
        }
    }
    const int d = family.dim();
    return {family.natural_from_original(o).theta(), Mat::Zero(d, d), Mat::Zero(d, d)};
}

namespace {

bool signs_certify(const AdmissibilityVerdict& v, Behaviour b) {
    if (b == Behaviour::Undetermined) return true;
    const auto* c = v.condition(b == Behaviour::Cooperative ? "cooperation-signs" : "competition-signs");
    if (c) return c->passed;
    // Families without sign conditions: the positive Gaussian model is
    // cooperative by construction.
    return v.behaviour == b || (b == Behaviour::Cooperative && v.condition("zero-d-e"));
}

}  // namespace

FitReport fit(const ParameterLayout& layout, const Field& field, const FitOptions& options) {
    const Family& family = layout.family();
    require_identifiable(family, field);
    const Lattice lattice(field.rows(), field.cols(), options.boundary);
    const PseudoLikelihood pl(family, lattice, field, options.interior_only);
    // The checks are per site and only involve neighbour counts, so a 3x3
    // lattice with the same boundary covers every case of the full lattice.
    const Lattice probe(3, 3, options.boundary);
    const int pos = layout.positive_index();

    Eigen::VectorXd phi0 = options.start ? *options.start : layout.phi(iid_start(family, field));
    if (phi0.size() != layout.size()) throw DomainError("start vector has the wrong length");
    if (!(phi0[pos] > 0.0)) throw DomainError("start value of " + layout.names()[static_cast<std::size_t>(pos)] + " must be positive");

    auto to_phi = [pos](const Eigen::VectorXd& z) {
        Eigen::VectorXd phi = z;
        phi[pos] = std::exp(z[pos]);
        return phi;
    };
    Objective objective = [&](const Eigen::VectorXd& z, double& f, Eigen::VectorXd& g) {
        const Eigen::VectorXd phi = to_phi(z);
        if (!phi.allFinite() || !(phi[pos] > 0.0)) return false;
        const auto p = layout.params(phi);
        const auto verdict = check(AutoModel::translation_invariant(family, probe, p));
        if (!verdict.well_defined) return false;
        if (options.sign_constraint && !signs_certify(verdict, *options.sign_constraint)) return false;
        Eigen::VectorXd full;
        if (!pl.evaluate(p, f, &full)) return false;
        g = layout.pull_back(full);
        g[pos] *= phi[pos];
        return true;
    };
    OptimizerOptions opt = options.optimizer;
    opt.grad_norm = [pos](const Eigen::VectorXd& z, const Eigen::VectorXd& g) {
        Eigen::VectorXd gp = g;
        gp[pos] /= std::exp(z[pos]);
        return gp.norm();
    };

    Eigen::VectorXd z0 = phi0;
    z0[pos] = std::log(phi0[pos]);
    OptimizerResult r;
    try {
        r = maximize_bfgs(objective, z0, opt);
    } catch (const std::invalid_argument&) {
        throw DomainError("the starting point is not admissible");
    }

    FitReport rep;
    rep.names = layout.names();
    rep.phi_hat = to_phi(r.x);
    rep.log_pl = r.value;
    rep.grad_norm = r.grad_norm;
    rep.iterations = r.iterations;
    rep.converged = r.converged;
    rep.message = r.message;
    rep.admissible = check(AutoModel::translation_invariant(family, lattice, layout.params(rep.phi_hat)));
    return rep;
}

// ------------------------------------------------------------- bootstrap

BootstrapResult bootstrap(const ParameterLayout& layout, const Eigen::VectorXd& phi_hat, const Lattice& lattice,
                          std::size_t reps, const BootstrapOptions& options) {
    BootstrapResult out;
    const int p = layout.size();
    if (reps == 0) {
        out.replicates.resize(0, p);
        out.se.resize(0);
        return out;
    }
    const auto model = AutoModel::translation_invariant(layout.family(), lattice, layout.params(phi_hat));
    const auto verdict = check(model);
    if (!verdict.well_defined) throw DomainError("bootstrap parameters are not certified admissible");

    FitOptions fo = options.fit;
    fo.boundary = lattice.boundary();
    fo.start = phi_hat;
    std::vector<Eigen::VectorXd> rows;
    for (std::size_t r = 0; r < reps; ++r) {
        try {
            GibbsChain chain(model, initial_field(model, GibbsInit::all_reference()), options.seed + r);
            for (std::size_t t = 0; t < std::max<std::size_t>(options.burn_in, 1); ++t) chain.sweep();
            const auto rep = fit(layout, chain.field(), fo);
            if (!rep.converged) throw std::runtime_error("refit did not converge: " + rep.message);
            rows.push_back(rep.phi_hat);
        } catch (const std::exception& e) {
            ++out.failures;
            out.failure_messages.push_back("replicate " + std::to_string(r) + ": " + e.what());
        }
    }
    if (5 * out.failures > reps)
        throw std::runtime_error(std::to_string(out.failures) + " of " + std::to_string(reps) + " bootstrap refits failed");
    out.replicates.resize(static_cast<Eigen::Index>(rows.size()), p);
    for (std::size_t i = 0; i < rows.size(); ++i) out.replicates.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    out.se = Eigen::VectorXd::Zero(p);
    if (rows.size() >= 2) {
        const Eigen::RowVectorXd mean = out.replicates.colwise().mean();
        const Eigen::MatrixXd centred = out.replicates.rowwise() - mean;
        out.se = (centred.colwise().squaredNorm() / static_cast<double>(rows.size() - 1)).cwiseSqrt().transpose();
    }
    return out;
}

// --------------------------------------------------------------- report

namespace {

void write_verdict(KvDocument& doc, const AdmissibilityVerdict& v) {
    auto& s = doc.section_or_add("admissibility");
    s.set("well_defined", v.well_defined);
    s.set("behaviour", behaviour_name(v.behaviour));
    s.set("sufficient_only", v.sufficient_only);
    for (const auto& c : v.conditions) s.set("condition." + c.name, std::string(c.passed ? "pass: " : "fail: ") + c.detail);
    for (std::size_t k = 0; k < v.notes.size(); ++k) s.set("note." + std::to_string(k + 1), v.notes[k]);
}

}  // namespace

std::string write_fit_report(const FitReport& r, const ParameterLayout& layout) {
    KvDocument doc;
    write_family(doc, layout.family());
    auto& fit = doc.section_or_add("fit");
    fit.set("log_pl", r.log_pl);
    fit.set("grad_norm", r.grad_norm);
    fit.set("iterations", static_cast<double>(r.iterations));
    fit.set("converged", r.converged);
    fit.set("message", r.message);
    auto& est = doc.section_or_add("estimate");
    for (int k = 0; k < layout.size(); ++k) est.set(r.names[static_cast<std::size_t>(k)], r.phi_hat[k]);
    if (r.se) {
        auto& se = doc.section_or_add("standard_errors");
        for (int k = 0; k < layout.size(); ++k) se.set(r.names[static_cast<std::size_t>(k)], (*r.se)[k]);
    }
    write_verdict(doc, r.admissible);
    return doc.write();
}

}  // namespace mixstate
