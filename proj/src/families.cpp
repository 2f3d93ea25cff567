#include "mixstate/families.hpp"

#include "mixstate/errors.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace mixstate {

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 - e^{-x}) for x > 0.
double log1mexp(double x) { return x < 0.693 ? std::log(-std::expm1(-x)) : std::log1p(-std::exp(-x)); }

// 1/u - 1/(e^u - 1); the truncated exponential mean in units of K.
double truncated_mean_ratio(double u) {
    if (u < 1e-3) return 0.5 - u / 12.0 + u * u * u / 720.0;
    return 1.0 / u - 1.0 / std::expm1(u);
}

// e^{-a} - e^{-b} for 0 <= a <= b, without cancellation.
double exp_neg_diff(double a, double b) { return std::exp(-a) * -std::expm1(-(b - a)); }

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

}  // namespace

double truncated_exponential_mean(double lambda, double k) {
    require(lambda > 0.0 && k > 0.0, "truncated mean needs lambda > 0 and K > 0");
    return k * truncated_mean_ratio(lambda * k);
}

double censored_exponential_mean(double lambda, double k) {
    require(lambda > 0.0 && k > 0.0, "censored mean needs lambda > 0 and K > 0");
    return -std::expm1(-lambda * k) / lambda;
}

Vec censored_natural_from_alpha_lambda(double alpha, double lambda, double k) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw BoundaryError("alpha must lie in (0, 1)");
    require(lambda > 0.0 && k > 0.0, "censored family needs lambda > 0 and K > 0");
    Vec theta(3);
    theta << std::log(alpha / (1.0 - alpha)) + lambda * k, std::log(lambda) + lambda * k, lambda;
    return theta;
}

NaturalParams::NaturalParams(const Family& family, Vec theta) : theta_(std::move(theta)) {
    if (theta_.size() != family.dim())
        throw DomainError(family.name() + ": natural parameter must have length " + std::to_string(family.dim()));
    if (!family.admits(theta_))
        throw DomainError(family.name() + ": natural parameter outside " + family.admissible_set_description());
}

Family Family::mixed_exponential() {
    return {FamilyKind::MixedExponential, 0.0, StateSpace({0.0}, ContinuousDomain::positive_half_line())};
}

Family Family::mixed_gamma() {
    return {FamilyKind::MixedGamma, 0.0, StateSpace({0.0}, ContinuousDomain::positive_half_line())};
}

Family Family::positive_gaussian() {
    return {FamilyKind::PositiveMixedGaussian, 0.0, StateSpace({0.0}, ContinuousDomain::positive_half_line())};
}

Family Family::truncated_exponential(double k) {
    require(k > 0.0 && std::isfinite(k), "truncation level K must be positive");
    return {FamilyKind::TruncatedMixedExponential, k, StateSpace({0.0}, ContinuousDomain::half_open(k))};
}

Family Family::censored_exponential(double k) {
    require(k > 0.0 && std::isfinite(k), "censoring level K must be positive");
    return {FamilyKind::CensoredMixedExponential, k, StateSpace({0.0, k}, ContinuousDomain::open(k))};
}

Family Family::from_name(std::string_view name, double k) {
    if (name == "mixed-exponential") return mixed_exponential();
    if (name == "mixed-gamma") return mixed_gamma();
    if (name == "positive-gaussian") return positive_gaussian();
    if (name == "truncated-exponential") return truncated_exponential(k);
    if (name == "censored-exponential") return censored_exponential(k);
    throw DomainError("unknown family '" + std::string(name) + "'");
}

std::string Family::name() const {
    switch (kind_) {
        case FamilyKind::MixedExponential: return "mixed-exponential";
        case FamilyKind::MixedGamma: return "mixed-gamma";
        case FamilyKind::PositiveMixedGaussian: return "positive-gaussian";
        case FamilyKind::TruncatedMixedExponential: return "truncated-exponential";
        case FamilyKind::CensoredMixedExponential: return "censored-exponential";
    }
    return {};
}

int Family::ell() const { return kind_ == FamilyKind::MixedGamma ? 2 : 1; }

bool Family::admits(const Vec& theta) const {
    if (theta.size() != dim() || !theta.allFinite()) return false;
    switch (kind_) {
        case FamilyKind::MixedGamma: return theta[1] > 0.0 && theta[2] > -1.0;
        case FamilyKind::CensoredMixedExponential: return theta[2] > 0.0;
        default: return theta[1] > 0.0;
    }
}

std::string Family::admissible_set_description() const {
    switch (kind_) {
        case FamilyKind::MixedGamma: return "{theta_2 > 0, theta_3 > -1}";
        case FamilyKind::CensoredMixedExponential: return "{theta_3 > 0}";
        default: return "{theta_2 > 0}";
    }
}

Vec Family::suff_stat(const MixedValue& v) const {
    space_.validate(v);
    Vec b = Vec::Zero(dim());
    if (kind_ == FamilyKind::CensoredMixedExponential) {
        if (v.is_continuous()) {
            b[1] = 1.0;
            b[2] = -v.value();
        } else if (v.atom_index() == 1) {
            b[0] = 1.0;
        }
        return b;
    }
    if (v.is_atom()) return b;
    const double x = v.value();
    b[0] = 1.0;
    switch (kind_) {
        case FamilyKind::PositiveMixedGaussian: b[1] = -x * x; break;
        case FamilyKind::MixedGamma:
            b[1] = -x;
            b[2] = std::log(x);
            break;
        default: b[1] = -x; break;
    }
    return b;
}

double Family::log_base_measure(const MixedValue& v) const {
    space_.validate(v);
    // L'(x) = 1 for all five families: every continuous density is fully
    // carried by exp<xi, T(x)> and H(xi).
    return 0.0;
}

double Family::log_h(const std::vector<double>& xi) const {
    require(static_cast<int>(xi.size()) == ell(), name() + ": xi must have length " + std::to_string(ell()));
    const double l = xi[0];
    switch (kind_) {
        case FamilyKind::MixedExponential:
            require(l > 0.0, "exponential rate must be positive");
            return std::log(l);
        case FamilyKind::MixedGamma: {
            const double shape = xi[1] + 1.0;
            require(l > 0.0 && shape > 0.0, "gamma needs rate > 0 and shape > 0");
            return shape * std::log(l) - std::lgamma(shape);
        }
        case FamilyKind::PositiveMixedGaussian:
            require(l > 0.0, "positive Gaussian needs xi = 1/(2 sigma^2) > 0");
            return std::log(2.0) + 0.5 * std::log(l / std::numbers::pi);
        case FamilyKind::TruncatedMixedExponential:
        case FamilyKind::CensoredMixedExponential:
            require(l > 0.0, "exponential rate must be positive");
            return std::log(l) - log1mexp(l * k_);
    }
    return 0.0;
}

double Family::log_h_from_theta(const Vec& theta) const {
    if (kind_ == FamilyKind::MixedGamma) return log_h({theta[1], theta[2]});
    return log_h({theta[dim() - 1]});
}

double Family::log_normalizer(const NaturalParams& p) const {
    const Vec& t = p.theta();
    const double lh = log_h_from_theta(t);
    if (kind_ == FamilyKind::CensoredMixedExponential) {
        // log(1 + e^{t1} + e^{t2} / H(t3))
        const double z1 = t[0];
        const double z2 = t[1] - lh;
        const double m = std::max({0.0, z1, z2});
        return m + std::log(std::exp(-m) + std::exp(z1 - m) + std::exp(z2 - m));
    }
    return softplus(t[0] - lh);
}

Vec Family::grad_log_normalizer(const NaturalParams& p) const {
    const Vec& t = p.theta();
    Vec g = Vec::Zero(dim());
    if (kind_ == FamilyKind::CensoredMixedExponential) {
        const double a = log_normalizer(p);
        const double p0 = std::exp(t[0] - a);
        const double pc = std::exp(t[1] - log_h_from_theta(t) - a);
        g[0] = p0;
        g[1] = pc;
        g[2] = -pc * k_ * truncated_mean_ratio(t[2] * k_);
        return g;
    }
    const double lh = log_h_from_theta(t);
    const double one_minus_gamma = sigmoid(t[0] - lh);
    g[0] = one_minus_gamma;
    switch (kind_) {
        case FamilyKind::MixedExponential: g[1] = -one_minus_gamma / t[1]; break;
        case FamilyKind::PositiveMixedGaussian: g[1] = -one_minus_gamma / (2.0 * t[1]); break;
        case FamilyKind::TruncatedMixedExponential: g[1] = -one_minus_gamma * k_ * truncated_mean_ratio(t[1] * k_); break;
        case FamilyKind::MixedGamma:
            g[1] = -one_minus_gamma * (t[2] + 1.0) / t[1];
            g[2] = one_minus_gamma * (boost::math::digamma(t[2] + 1.0) - std::log(t[1]));
            break;
        default: break;
    }
    return g;
}

double Family::log_density(const MixedValue& v, const NaturalParams& p) const {
    return p.theta().dot(suff_stat(v)) - log_normalizer(p) + log_base_measure(v);
}

double Family::atom_probability(const NaturalParams& p, int k) const {
    return std::exp(log_density(MixedValue::atom(k), p));
}

double Family::continuous_density(const NaturalParams& p, double x) const {
    return std::exp(log_density(MixedValue::continuous(x), p));
}

double Family::continuous_mass(const NaturalParams& p, double lo, double hi) const {
    const Vec& t = p.theta();
    lo = std::max(lo, 0.0);
    hi = std::min(hi, space_.domain().upper);
    if (!(hi > lo)) return 0.0;
    const double a = log_normalizer(p);
    const double lh = log_h_from_theta(t);
    const double p_cont = kind_ == FamilyKind::CensoredMixedExponential ? std::exp(t[1] - lh - a) : sigmoid(t[0] - lh);
    double cdf_diff = 0.0;
    switch (kind_) {
        case FamilyKind::MixedExponential:
            cdf_diff = std::isinf(hi) ? std::exp(-t[1] * lo) : exp_neg_diff(t[1] * lo, t[1] * hi);
            break;
        case FamilyKind::TruncatedMixedExponential:
        case FamilyKind::CensoredMixedExponential: {
            const double l = t[dim() - 1];
            cdf_diff = exp_neg_diff(l * lo, l * hi) / -std::expm1(-l * k_);
            break;
        }
        case FamilyKind::PositiveMixedGaussian: {
            const double s = std::sqrt(t[1]);
            cdf_diff = std::erfc(lo * s) - (std::isinf(hi) ? 0.0 : std::erfc(hi * s));
            break;
        }
        case FamilyKind::MixedGamma: {
            const double shape = t[2] + 1.0;
            const double upper = std::isinf(hi) ? 0.0 : boost::math::gamma_q(shape, t[1] * hi);
            cdf_diff = boost::math::gamma_q(shape, t[1] * lo) - upper;
            break;
        }
    }
    return p_cont * cdf_diff;
}

double Family::continuous_restricted_mean(const NaturalParams& p) const {
    const Vec& t = p.theta();
    const double lh = log_h_from_theta(t);
    if (kind_ == FamilyKind::CensoredMixedExponential) {
        const double a = log_normalizer(p);
        const double p_k = std::exp(-a);
        const double p_cont = std::exp(t[1] - lh - a);
        return k_ * p_k + p_cont * k_ * truncated_mean_ratio(t[2] * k_);
    }
    const double w = sigmoid(t[0] - lh);
    switch (kind_) {
        case FamilyKind::MixedExponential: return w / t[1];
        case FamilyKind::PositiveMixedGaussian: return w / std::sqrt(std::numbers::pi * t[1]);
        case FamilyKind::TruncatedMixedExponential: return w * k_ * truncated_mean_ratio(t[1] * k_);
        case FamilyKind::MixedGamma: return w * (t[2] + 1.0) / t[1];
        default: return 0.0;
    }
}

double Family::sample_continuous(const Vec& t, Rng& rng) const {
    switch (kind_) {
        case FamilyKind::MixedExponential: return rng.exponential() / t[1];
        case FamilyKind::MixedGamma: {
            double x = 0.0;
            while (!(x > 0.0)) x = rng.gamma(t[2] + 1.0) / t[1];
            return x;
        }
        case FamilyKind::PositiveMixedGaussian: {
            const double sigma = 1.0 / std::sqrt(2.0 * t[1]);
            double x = 0.0;
            while (!(x > 0.0)) x = std::abs(rng.normal()) * sigma;
            return x;
        }
        case FamilyKind::TruncatedMixedExponential:
        case FamilyKind::CensoredMixedExponential: {
            // Inverse CDF of the exponential law restricted to (0, K).
            const double l = t[dim() - 1];
            const double c = -std::expm1(-l * k_);
            double x = 0.0;
            while (!(x > 0.0)) x = -std::log1p(-rng.uniform() * c) / l;
            if (x >= k_) x = kind_ == FamilyKind::CensoredMixedExponential ? std::nextafter(k_, 0.0) : k_;
            return x;
        }
    }
    return 0.0;
}

MixedValue Family::sample(const NaturalParams& p, Rng& rng) const {
    const Vec& t = p.theta();
    const double lh = log_h_from_theta(t);
    const double u = rng.uniform();
    if (kind_ == FamilyKind::CensoredMixedExponential) {
        const double a = log_normalizer(p);
        const double p0 = std::exp(t[0] - a);
        const double p_cont = std::exp(t[1] - lh - a);
        if (u < p0) return MixedValue::atom(1);
        if (u < p0 + p_cont) return MixedValue::continuous(sample_continuous(t, rng));
        return MixedValue::atom(2);
    }
    if (u < sigmoid(t[0] - lh)) return MixedValue::continuous(sample_continuous(t, rng));
    return MixedValue::atom(1);
}

MixedValue Family::sample_original(const OriginalParams& p, Rng& rng) const {
    require(p.gamma >= 0.0 && p.gamma <= 1.0, "gamma must lie in [0, 1]");
    const int m = atom_count();
    require(static_cast<int>(p.q.size()) == m, "q must have one entry per atom");
    if (rng.uniform() < p.gamma) {
        double u = rng.uniform();
        for (int k = 0; k < m - 1; ++k) {
            if (u < p.q[static_cast<std::size_t>(k)]) return MixedValue::atom(k + 1);
            u -= p.q[static_cast<std::size_t>(k)];
        }
        return MixedValue::atom(m);
    }
    // Only xi matters for the continuous draw; build a theta carrying it.
    Vec t = Vec::Zero(dim());
    for (int i = 0; i < ell(); ++i) t[m + i] = p.xi[static_cast<std::size_t>(i)];
    return MixedValue::continuous(sample_continuous(NaturalParams(*this, t).theta(), rng));
}

NaturalParams Family::natural_from_original(const OriginalParams& p) const {
    if (!(p.gamma > 0.0 && p.gamma < 1.0)) throw BoundaryError("parameter maps need gamma in (0, 1)");
    const int m = atom_count();
    require(static_cast<int>(p.q.size()) == m, "q must have one entry per atom");
    double total = 0.0;
    for (double qi : p.q) {
        require(qi > 0.0, "atom probabilities must be positive");
        total += qi;
    }
    require(std::abs(total - 1.0) < 1e-9, "atom probabilities must sum to 1");
    const double qm = p.q.back();
    Vec t(dim());
    for (int k = 0; k < m - 1; ++k) t[k] = std::log(p.q[static_cast<std::size_t>(k)] / qm);
    t[m - 1] = std::log1p(-p.gamma) + log_h(p.xi) - std::log(p.gamma) - std::log(qm);
    for (int i = 0; i < ell(); ++i) t[m + i] = p.xi[static_cast<std::size_t>(i)];
    return NaturalParams(*this, t);
}

OriginalParams Family::original_from_natural(const NaturalParams& p) const {
    const Vec& t = p.theta();
    const int m = atom_count();
    OriginalParams out;
    // q_i = e^{k_i} / sum_j e^{k_j} with k_M = 0.
    double mx = 0.0;
    for (int k = 0; k < m - 1; ++k) mx = std::max(mx, t[k]);
    double z = std::exp(-mx);
    for (int k = 0; k < m - 1; ++k) z += std::exp(t[k] - mx);
    out.q.resize(static_cast<std::size_t>(m));
    for (int k = 0; k < m - 1; ++k) out.q[static_cast<std::size_t>(k)] = std::exp(t[k] - mx) / z;
    out.q.back() = std::exp(-mx) / z;
    for (int i = 0; i < ell(); ++i) out.xi.push_back(t[m + i]);
    out.gamma = sigmoid(-(t[m - 1] + std::log(out.q.back()) - log_h(out.xi)));
    return out;
}

}  // namespace mixstate
