#include "mixstate/admissibility.hpp"

#include "mixstate/errors.hpp"
#include "mixstate/text.hpp"

#include <algorithm>
#include <functional>
#include <limits>

namespace mixstate {

std::string behaviour_name(Behaviour b) {
    switch (b) {
        case Behaviour::Cooperative: return "cooperative";
        case Behaviour::Competitive: return "competitive";
        case Behaviour::Undetermined: return "undetermined";
    }
    return {};
}

const ConditionResult* AdmissibilityVerdict::condition(std::string_view name) const {
    for (const auto& c : conditions)
        if (c.name == name) return &c;
    return nullptr;
}

double worst_case_subset_margin(double b, std::span<const double> f) {
    double m = b;
    for (double x : f)
        if (x < 0.0) m += x;
    return m;
}

double exhaustive_subset_margin(double b, std::span<const double> f) {
    if (f.size() > 20) throw DomainError("exhaustive subset enumeration limited to 20 neighbours");
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = f.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        double s = b;
        for (std::size_t j = 0; j < n; ++j)
            if (mask & (std::size_t{1} << j)) s += f[j];
        best = std::min(best, s);
    }
    return best;
}

namespace {

using SiteMargin = std::function<double(std::size_t site)>;
// Receives the matrix multiplying B(x_j) in theta_i; returns an empty
// string when the edge passes, otherwise a description of the failure.
using EdgeRule = std::function<std::string(const Mat& m)>;

// Records "margin_i > 0 for every site".
bool site_condition(AdmissibilityVerdict& v, const AutoModel& model, const std::string& name, const std::string& rule,
                    const SiteMargin& margin) {
    double worst = std::numeric_limits<double>::infinity();
    std::size_t worst_site = 0, first = 0, count = 0;
    for (std::size_t s = 0; s < model.lattice().size(); ++s) {
        const double m = margin(s);
        if (m < worst) {
            worst = m;
            worst_site = s;
        }
        if (!(m > 0.0)) {
            if (count == 0) first = s;
            ++count;
        }
    }
    const bool ok = count == 0;
    v.conditions.push_back({name, ok, rule + "; smallest value " + format_double(worst) + " at site " + std::to_string(worst_site)});
    if (!ok)
        v.violated.push_back({name, first, count, rule + " fails at " + std::to_string(count) + " site(s)"});
    return ok;
}

// Records "rule holds for every ordered neighbour pair (i, j)".
bool edge_condition(AdmissibilityVerdict& v, const AutoModel& model, const std::string& name, const std::string& rule,
                    const EdgeRule& check) {
    std::size_t first = 0, count = 0;
    std::string first_detail;
    const auto& lat = model.lattice();
    for (std::size_t s = 0; s < lat.size(); ++s) {
        const auto nb = lat.neighbours(s);
        for (std::size_t k = 0; k < nb.size(); ++k) {
            const auto why = check(model.neighbour_beta(s, k));
            if (why.empty()) continue;
            if (count == 0) {
                first = s;
                first_detail = "site " + std::to_string(s) + ", neighbour " + std::to_string(nb[k].site) + ": " + why;
            }
            ++count;
        }
    }
    const bool ok = count == 0;
    v.conditions.push_back({name, ok, ok ? rule : rule + "; first failure " + first_detail});
    if (!ok) v.violated.push_back({name, first, count, first_detail});
    return ok;
}

std::string sign_failure(const char* what, double value, bool want_nonneg) {
    if (want_nonneg ? value >= 0.0 : value <= 0.0) return {};
    return std::string(what) + " = " + format_double(value);
}

void finish(AdmissibilityVerdict& v, const AutoModel& model, bool cooperative, bool competitive) {
    v.well_defined = v.violated.empty();
    if (!v.well_defined) {
        v.behaviour = Behaviour::Undetermined;
        return;
    }
    if (model.independent()) {
        v.behaviour = Behaviour::Undetermined;
        v.notes.push_back("all interaction parameters are zero: cooperation and competition hold only degenerately");
        return;
    }
    v.behaviour = cooperative ? Behaviour::Cooperative : competitive ? Behaviour::Competitive : Behaviour::Undetermined;
}

void require_family(const AutoModel& model, FamilyKind kind, const char* what) {
    if (model.family().kind() != kind) throw DomainError(std::string(what) + " check called with a " + model.family().name() + " model");
}

}  // namespace

AdmissibilityVerdict check_mixed_exponential(const AutoModel& model) {
    require_family(model, FamilyKind::MixedExponential, "mixed-exponential");
    AdmissibilityVerdict v;
    // theta_i = (a_i + sum c_ij d*(x_j) - d_ij x_j, b_i + sum f_ij d*(x_j) - e_ij x_j)
    edge_condition(v, model, "interaction-sign", "e_ij <= 0 for every neighbour pair",
                   [](const Mat& m) { return sign_failure("e_ij", m(1, 1), false); });
    site_condition(v, model, "worst-case-subset", "b_i + sum_{j: f_ij < 0} f_ij > 0", [&](std::size_t s) {
        double f[4];
        const auto nb = model.lattice().neighbours(s);
        for (std::size_t k = 0; k < nb.size(); ++k) f[k] = model.neighbour_beta(s, k)(1, 0);
        return worst_case_subset_margin(model.alpha(s)[1], std::span<const double>(f, nb.size()));
    });
    const bool competitive = edge_condition(v, model, "competition-signs", "d_ij >= 0 for every neighbour pair",
                                            [](const Mat& m) { return sign_failure("d_ij", m(0, 1), true); });
    // The conditions failing above only for behaviour are not violations of
    // well-definedness.
    if (!competitive) v.violated.pop_back();
    v.notes.push_back("the mixed exponential auto-model admits no cooperative certificate");
    finish(v, model, false, competitive);
    return v;
}

AdmissibilityVerdict check_truncated(const AutoModel& model) {
    require_family(model, FamilyKind::TruncatedMixedExponential, "truncated-exponential");
    const double k = model.family().truncation();
    if (!(k > 0.0)) throw DomainError("truncation level K must be positive");
    AdmissibilityVerdict v;
    site_condition(v, model, "truncated-integrability", "b_i + sum_j min(0, f_ij, f_ij - e_ij K) > 0", [&](std::size_t s) {
        double m = model.alpha(s)[1];
        const auto nb = model.lattice().neighbours(s);
        for (std::size_t j = 0; j < nb.size(); ++j) {
            const Mat& b = model.neighbour_beta(s, j);
            m += std::min({0.0, b(1, 0), b(1, 0) - b(1, 1) * k});
        }
        return m;
    });
    const std::size_t hard = v.violated.size();
    const bool coop = edge_condition(v, model, "cooperation-signs", "d_ij <= 0 and e_ij >= 0", [](const Mat& m) {
        auto a = sign_failure("d_ij", m(0, 1), false);
        return a.empty() ? sign_failure("e_ij", m(1, 1), true) : a;
    });
    const bool comp = edge_condition(v, model, "competition-signs", "d_ij >= 0 and e_ij <= 0", [](const Mat& m) {
        auto a = sign_failure("d_ij", m(0, 1), true);
        return a.empty() ? sign_failure("e_ij", m(1, 1), false) : a;
    });
    v.violated.resize(hard);
    finish(v, model, coop, comp);
    return v;
}

AdmissibilityVerdict check_censored(const AutoModel& model) {
    require_family(model, FamilyKind::CensoredMixedExponential, "censored-exponential");
    const double k = model.family().truncation();
    if (!(k > 0.0)) throw DomainError("censoring level K must be positive");
    AdmissibilityVerdict v;
    // Third row of beta_ij drives theta_{i,3}; x_j = K (reference) adds 0.
    site_condition(v, model, "censored-positivity", "b_i + sum_j min(0, t_ij, d_ij, d_ij - e_ij K) > 0", [&](std::size_t s) {
        double m = model.alpha(s)[2];
        const auto nb = model.lattice().neighbours(s);
        for (std::size_t j = 0; j < nb.size(); ++j) {
            const Mat& b = model.neighbour_beta(s, j);
            m += std::min({0.0, b(2, 0), b(2, 1), b(2, 1) - b(2, 2) * k});
        }
        return m;
    });
    const std::size_t hard = v.violated.size();
    // t - eK multiplies -x_j in theta_{i,1} - K theta_{i,3}.
    const bool coop = edge_condition(v, model, "cooperation-signs", "e_ij >= 0 and t_ij - e_ij K >= 0", [k](const Mat& m) {
        auto a = sign_failure("e_ij", m(2, 2), true);
        return a.empty() ? sign_failure("t_ij - e_ij K", m(0, 2) - m(2, 2) * k, true) : a;
    });
    const bool comp = edge_condition(v, model, "competition-signs", "e_ij <= 0 and t_ij - e_ij K <= 0", [k](const Mat& m) {
        auto a = sign_failure("e_ij", m(2, 2), false);
        return a.empty() ? sign_failure("t_ij - e_ij K", m(0, 2) - m(2, 2) * k, false) : a;
    });
    v.violated.resize(hard);
    finish(v, model, coop, comp);
    return v;
}

AdmissibilityVerdict check_positive_gaussian(const AutoModel& model) {
    require_family(model, FamilyKind::PositiveMixedGaussian, "positive-gaussian");
    AdmissibilityVerdict v;
    site_condition(v, model, "positive-b", "b_i > 0", [&](std::size_t s) { return model.alpha(s)[1]; });
    const bool constrained = edge_condition(v, model, "zero-d-e", "d_ij = e_ij = 0 (only c_ij may interact)", [](const Mat& m) {
        if (m(0, 1) != 0.0) return "d_ij = " + format_double(m(0, 1));
        if (m(1, 0) != 0.0) return "d_ji = " + format_double(m(1, 0));
        if (m(1, 1) != 0.0) return "e_ij = " + format_double(m(1, 1));
        return std::string();
    });
    if (!constrained) v.notes.push_back("no admissibility analysis is available for nonzero d or e; configuration refused");
    finish(v, model, true, false);
    return v;
}

AdmissibilityVerdict check(const AutoModel& model) {
    switch (model.family().kind()) {
        case FamilyKind::MixedExponential: return check_mixed_exponential(model);
        case FamilyKind::TruncatedMixedExponential: return check_truncated(model);
        case FamilyKind::CensoredMixedExponential: return check_censored(model);
        case FamilyKind::PositiveMixedGaussian: return check_positive_gaussian(model);
        case FamilyKind::MixedGamma: {
            AdmissibilityVerdict v;
            v.conditions.push_back({"sufficient-conditions", false, "no sufficient integrability conditions are known for this family"});
            v.violated.push_back({"sufficient-conditions", 0, model.lattice().size(), "no sufficient integrability conditions are known"});
            v.notes.push_back("mixed-gamma auto-models can be simulated and checked against the oracle but are not certified");
            return v;
        }
    }
    return {};
}

}  // namespace mixstate
