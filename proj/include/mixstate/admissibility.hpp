#pragma once

#include "mixstate/automodel.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mixstate {

enum class Behaviour { Cooperative, Competitive, Undetermined };

std::string behaviour_name(Behaviour b);

struct ConditionResult {
    std::string name;
    bool passed = true;
    std::string detail;
};

// First offending site (and neighbour, when the condition is per edge)
// plus the number of offending sites or edges.
struct Violation {
    std::string condition;
    std::size_t site = 0;
    std::size_t count = 0;
    std::string detail;
};

// The checks are sufficient conditions only: well_defined == false does not
// prove that exp Q fails to be integrable.
struct AdmissibilityVerdict {
    bool well_defined = false;
    Behaviour behaviour = Behaviour::Undetermined;
    bool sufficient_only = true;
    std::vector<ConditionResult> conditions;
    std::vector<Violation> violated;
    std::vector<std::string> notes;

    const ConditionResult* condition(std::string_view name) const;
};

// Mixed exponential: e_ij <= 0 and b_i + sum_{j: f_ij < 0} f_ij > 0 for all
// sites. The model is never certified cooperative; it is competitive when
// in addition every d_ij >= 0.
AdmissibilityVerdict check_mixed_exponential(const AutoModel& model);
// Truncated at K: b_i + sum_j min(0, f_ij, f_ij - e_ij K) > 0; cooperative
// if also d_ij <= 0, e_ij >= 0; competitive if d_ij >= 0, e_ij <= 0.
AdmissibilityVerdict check_truncated(const AutoModel& model);
// Censored at K, beta_ij = [[s, u, t], [u, c, d], [t, d, e]]:
// b_i + sum_j min(0, t_ij, d_ij, d_ij - e_ij K) > 0; cooperative if also
// e_ij >= 0, t_ij - e_ij K >= 0; competitive if e_ij <= 0, t_ij - e_ij K <= 0.
AdmissibilityVerdict check_censored(const AutoModel& model);
// Positive Gaussian with d = e = 0 in every beta: well defined iff b > 0.
// Models with nonzero d or e are refused.
AdmissibilityVerdict check_positive_gaussian(const AutoModel& model);
// Dispatches on the family; mixed-gamma models get a verdict stating that
// no sufficient conditions are available.
AdmissibilityVerdict check(const AutoModel& model);

// b + sum of the strictly negative f: the smallest value of b + sum_{j in A} f_j
// over all subsets A.
double worst_case_subset_margin(double b, std::span<const double> f);
// Same minimum by enumerating all 2^n subsets; n <= 20.
double exhaustive_subset_margin(double b, std::span<const double> f);

}  // namespace mixstate
