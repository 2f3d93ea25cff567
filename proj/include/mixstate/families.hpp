#pragma once

#include "mixstate/linalg.hpp"
#include "mixstate/random.hpp"
#include "mixstate/state_space.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace mixstate {

enum class FamilyKind {
    MixedExponential,
    MixedGamma,
    PositiveMixedGaussian,
    TruncatedMixedExponential,
    CensoredMixedExponential,
};

class Family;

// A natural parameter known to lie in the family's admissible set.
class NaturalParams {
public:
    // Throws DomainError if theta has the wrong length or lies outside the set.
    NaturalParams(const Family& family, Vec theta);

    const Vec& theta() const { return theta_; }
    double operator[](int k) const { return theta_[k]; }
    int size() const { return static_cast<int>(theta_.size()); }

private:
    Vec theta_;
};

// gamma: total atom mass; q: law over the atoms (sums to 1);
// xi: parameter of the continuous exponential family.
struct OriginalParams {
    double gamma = 0.5;
    std::vector<double> q;
    std::vector<double> xi;
};

// One of the five mixed-state exponential families. The density with
// respect to m = sum_k delta_{e_k} + Lebesgue is
//     f(x) = exp(<theta, B(x)> - A(theta) + log L'(x)),
// and B vanishes at the reference atom e_M.
class Family {
public:
    static Family mixed_exponential();
    static Family mixed_gamma();
    static Family positive_gaussian();
    static Family truncated_exponential(double k);
    static Family censored_exponential(double k);

    // "mixed-exponential", "mixed-gamma", "positive-gaussian",
    // "truncated-exponential", "censored-exponential".
    static Family from_name(std::string_view name, double k = 1.0);

    FamilyKind kind() const { return kind_; }
    std::string name() const;
    double truncation() const { return k_; }
    int ell() const;
    int atom_count() const { return static_cast<int>(space_.atom_count()); }
    int dim() const { return ell() + atom_count(); }
    const StateSpace& state_space() const { return space_; }

    bool admits(const Vec& theta) const;
    std::string admissible_set_description() const;

    Vec suff_stat(const MixedValue& v) const;
    double log_base_measure(const MixedValue& v) const;

    double log_normalizer(const NaturalParams& theta) const;
    Vec grad_log_normalizer(const NaturalParams& theta) const;
    double log_density(const MixedValue& v, const NaturalParams& theta) const;

    // Probability of Atom(k), k in 1..M.
    double atom_probability(const NaturalParams& theta, int k) const;
    // P(X in (lo, hi) n G), from the closed-form continuous CDF.
    double continuous_mass(const NaturalParams& theta, double lo, double hi) const;
    // Continuous density w.r.t. Lebesgue at x in G (already multiplied by 1 - gamma).
    double continuous_density(const NaturalParams& theta, double x) const;

    // E[X 1{X > 0}]: the quantity whose monotonicity in the neighbours
    // defines spatial cooperation/competition.
    double continuous_restricted_mean(const NaturalParams& theta) const;

    MixedValue sample(const NaturalParams& theta, Rng& rng) const;
    // Two-stage draw in the original parametrization; accepts gamma in {0, 1}.
    MixedValue sample_original(const OriginalParams& p, Rng& rng) const;

    // Throws BoundaryError for gamma in {0, 1}, DomainError for other invalid input.
    NaturalParams natural_from_original(const OriginalParams& p) const;
    OriginalParams original_from_natural(const NaturalParams& theta) const;

    // log H(xi), the normalizer of the continuous component.
    double log_h(const std::vector<double>& xi) const;

private:
    Family(FamilyKind kind, double k, StateSpace space) : kind_(kind), k_(k), space_(std::move(space)) {}

    double log_h_from_theta(const Vec& theta) const;
    double sample_continuous(const Vec& theta, Rng& rng) const;

    FamilyKind kind_;
    double k_ = 0.0;
    StateSpace space_;
};

// Mean of the exponential law truncated to (0, K]: K (1/(lK) - 1/(e^{lK} - 1)).
double truncated_exponential_mean(double lambda, double k);
// Mean of the exponential law censored at K: (1 - e^{-lK}) / l.
double censored_exponential_mean(double lambda, double k);
// Natural parameter of the censored family from (alpha, lambda):
// (log(alpha/(1-alpha)) + lambda K, log lambda + lambda K, lambda).
Vec censored_natural_from_alpha_lambda(double alpha, double lambda, double k);

}  // namespace mixstate
