#pragma once

#include "mixstate/admissibility.hpp"
#include "mixstate/automodel.hpp"
#include "mixstate/optimizer.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mixstate {

// Linear map from an estimation vector phi to translation-invariant
// parameters (alpha, beta_h, beta_v). Every layout keeps the beta matrices
// symmetric and has exactly one strictly positive component, b.
class ParameterLayout {
public:
    enum class Kind { Anisotropic, Isotropic, AlphaOnly };

    // Positive Gaussian: (a, b, c1, c2) or (a, b, c); d = e = 0.
    // Dimension-2 families: (a, b, c1, d1, e1, c2, d2, e2) or (a, b, c, d, e).
    // Censored: (r, a, b, s1, u1, t1, c1, d1, e1, s2, ...) or unsuffixed.
    // AlphaOnly: the singleton parameters, beta = 0.
    // Throws DomainError for the mixed-gamma family.
    static ParameterLayout make(const Family& family, Kind kind = Kind::Anisotropic);

    const Family& family() const { return family_; }
    Kind kind() const { return kind_; }
    int size() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    int index_of(std::string_view name) const;  // -1 if absent
    int positive_index() const { return positive_; }

    TranslationInvariantParams params(const Eigen::VectorXd& phi) const;
    // Reads phi back from parameters; entries outside the layout are ignored.
    Eigen::VectorXd phi(const TranslationInvariantParams& p) const;
    // Full-parameter gradient [alpha, beta_h row-major, beta_v row-major]
    // pulled back to phi.
    Eigen::VectorXd pull_back(const Eigen::VectorXd& full_grad) const;

private:
    struct Target {
        int block;  // 0 alpha, 1 beta_h, 2 beta_v
        int row;
        int col;
    };

    ParameterLayout(Family family, Kind kind) : family_(std::move(family)), kind_(kind) {}
    void add(std::string name, std::vector<Target> targets);
    int full_index(const Target& t) const;

    Family family_;
    Kind kind_;
    std::vector<std::string> names_;
    std::vector<std::vector<Target>> targets_;
    int positive_ = -1;
};

// Pseudo-likelihood sum_i <theta_i, B(x_i)> - A(theta_i) of a fixed field
// under translation-invariant parameters. Sums use a pairwise tree
// reduction in site order, so results are bit-stable.
class PseudoLikelihood {
public:
    PseudoLikelihood(Family family, Lattice lattice, const Field& data, bool interior_only = false);

    // Returns the first site whose theta_i leaves the family's set, if any.
    std::optional<std::size_t> inadmissible_site(const TranslationInvariantParams& p) const;
    // False if some theta_i is outside the set. full_grad, if given, is laid
    // out as [alpha, beta_h row-major, beta_v row-major].
    bool evaluate(const TranslationInvariantParams& p, double& value, Eigen::VectorXd* full_grad) const;

    const Family& family() const { return family_; }
    const Lattice& lattice() const { return lattice_; }

private:
    Vec theta(std::size_t site, const TranslationInvariantParams& p) const;

    Family family_;
    Lattice lattice_;
    std::vector<Vec> stats_;
    // Per site: B of the east, west, north and south neighbours (zero when absent).
    std::vector<std::array<Vec, 4>> nbr_;
    std::vector<std::size_t> sites_;
};

double pairwise_sum(std::span<const double> values);

// Throw InadmissibleParameter naming the first offending site.
double log_pseudo_likelihood(const ParameterLayout& layout, const Eigen::VectorXd& phi, const Field& field,
                             Boundary boundary = Boundary::Free, bool interior_only = false);
Eigen::VectorXd grad_log_pseudo_likelihood(const ParameterLayout& layout, const Eigen::VectorXd& phi, const Field& field,
                                           Boundary boundary = Boundary::Free, bool interior_only = false);

struct FitOptions {
    Boundary boundary = Boundary::Free;
    bool interior_only = false;
    // Reject iterates whose interaction signs do not certify this behaviour.
    std::optional<Behaviour> sign_constraint;
    std::optional<Eigen::VectorXd> start;
    OptimizerOptions optimizer;
};

struct FitReport {
    std::vector<std::string> names;
    Eigen::VectorXd phi_hat;
    double log_pl = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string message;
    AdmissibilityVerdict admissible;
    std::optional<Eigen::VectorXd> se;
};

// Declares NonIdentifiable when some component of the state space (an atom
// or the continuous part) never occurs, or all continuous values are equal:
// the pseudo-likelihood then has no maximizer.
void require_identifiable(const Family& family, const Field& field);

// The independent-sites maximum likelihood fit, used as starting point.
TranslationInvariantParams iid_start(const Family& family, const Field& field);

FitReport fit(const ParameterLayout& layout, const Field& field, const FitOptions& options = {});

struct BootstrapOptions {
    std::size_t burn_in = 500;  // sweeps before the replicate field is taken
    std::uint64_t seed = 1;
    FitOptions fit;
};

struct BootstrapResult {
    Eigen::MatrixXd replicates;  // one successful refit per row
    Eigen::VectorXd se;
    std::size_t failures = 0;
    std::vector<std::string> failure_messages;
};

// Parametric bootstrap: simulate at phi_hat, refit, repeat. Replicate r
// uses seed + r. Throws DomainError if phi_hat is not certified admissible
// and std::runtime_error if more than 20% of the refits fail.
BootstrapResult bootstrap(const ParameterLayout& layout, const Eigen::VectorXd& phi_hat, const Lattice& lattice,
                          std::size_t reps, const BootstrapOptions& options = {});

// Writes the report as key-value text.
std::string write_fit_report(const FitReport& report, const ParameterLayout& layout);

}  // namespace mixstate
