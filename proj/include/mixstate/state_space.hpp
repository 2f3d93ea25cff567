#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace mixstate {

// Interval G = (0, upper) or (0, upper] carrying the continuous component.
struct ContinuousDomain {
    double upper = std::numeric_limits<double>::infinity();
    bool upper_closed = false;

    static ContinuousDomain positive_half_line() { return {}; }
    static ContinuousDomain half_open(double k) { return {k, true}; }  // (0, K]
    static ContinuousDomain open(double k) { return {k, false}; }      // (0, K)

    bool bounded() const { return upper < std::numeric_limits<double>::infinity(); }
    bool contains(double x) const {
        if (!(x > 0.0)) return false;
        return upper_closed ? x <= upper : x < upper;
    }
};

// A point of E = {e_1, ..., e_M} u G. Atom indices are 1-based, matching
// the "A<k>" notation of the field format.
class MixedValue {
public:
    MixedValue() = default;

    static MixedValue atom(int k) { return MixedValue(k, 0.0); }
    static MixedValue continuous(double r) { return MixedValue(0, r); }

    bool is_atom() const { return atom_ != 0; }
    bool is_continuous() const { return atom_ == 0; }
    int atom_index() const { return atom_; }
    double value() const { return value_; }

    friend bool operator==(const MixedValue& a, const MixedValue& b) {
        return a.atom_ == b.atom_ && (a.atom_ != 0 || a.value_ == b.value_);
    }

private:
    MixedValue(int k, double r) : atom_(k), value_(r) {}

    int atom_ = 1;
    double value_ = 0.0;
};

class StateSpace {
public:
    // Throws DomainError unless M >= 1, the atoms are distinct and lie
    // outside G, and G has positive length.
    StateSpace(std::vector<double> atoms, ContinuousDomain domain,
               std::vector<std::string> atom_labels = {});

    std::size_t atom_count() const { return atoms_.size(); }
    const std::vector<double>& atoms() const { return atoms_; }
    const ContinuousDomain& domain() const { return domain_; }
    const std::vector<std::string>& atom_labels() const { return labels_; }

    // e_M; B(reference) = 0 for every family.
    MixedValue reference() const { return MixedValue::atom(static_cast<int>(atoms_.size())); }

    bool contains(const MixedValue& v) const;
    void validate(const MixedValue& v) const;

    // Coordinate of v in R: the atom location or the continuous value.
    double coordinate(const MixedValue& v) const;

    // Exact-match rule: x becomes Atom(k) iff x == e_k, otherwise Continuous(x).
    // Throws DomainError when neither applies.
    MixedValue classify(double x) const;

private:
    std::vector<double> atoms_;
    ContinuousDomain domain_;
    std::vector<std::string> labels_;
};

// (1_{e_1}(x), ..., 1_{e_{M-1}}(x), 1_G(x)); all zero exactly at e_M.
Eigen::VectorXd indicator_vector(const MixedValue& v, const StateSpace& space);

}  // namespace mixstate
