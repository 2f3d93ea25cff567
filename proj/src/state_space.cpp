#include "mixstate/state_space.hpp"

#include "mixstate/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mixstate {

StateSpace::StateSpace(std::vector<double> atoms, ContinuousDomain domain,
                       std::vector<std::string> atom_labels)
    : atoms_(std::move(atoms)), domain_(domain), labels_(std::move(atom_labels)) {
    if (atoms_.empty()) throw DomainError("state space needs at least one atom");
    if (!(domain_.upper > 0.0)) throw DomainError("continuous domain must have positive length");
    if (!labels_.empty() && labels_.size() != atoms_.size())
        throw DomainError("atom_labels must match the atom count");
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (!std::isfinite(atoms_[i])) throw DomainError("atoms must be finite");
        if (domain_.contains(atoms_[i]))
            throw DomainError("atom " + std::to_string(i + 1) + " lies inside the continuous domain");
        for (std::size_t j = 0; j < i; ++j)
            if (atoms_[i] == atoms_[j]) throw DomainError("atoms must be pairwise distinct");
    }
}

bool StateSpace::contains(const MixedValue& v) const {
    if (v.is_atom()) return v.atom_index() >= 1 && static_cast<std::size_t>(v.atom_index()) <= atoms_.size();
    return domain_.contains(v.value());
}

void StateSpace::validate(const MixedValue& v) const {
    if (contains(v)) return;
    if (v.is_atom())
        throw DomainError("atom index " + std::to_string(v.atom_index()) + " outside 1.." +
                          std::to_string(atoms_.size()));
    throw DomainError("continuous value " + std::to_string(v.value()) + " outside the continuous domain");
}

double StateSpace::coordinate(const MixedValue& v) const {
    validate(v);
    return v.is_atom() ? atoms_[static_cast<std::size_t>(v.atom_index() - 1)] : v.value();
}

MixedValue StateSpace::classify(double x) const {
    for (std::size_t k = 0; k < atoms_.size(); ++k)
        if (x == atoms_[k]) return MixedValue::atom(static_cast<int>(k + 1));
    if (domain_.contains(x)) return MixedValue::continuous(x);
    throw DomainError("value " + std::to_string(x) + " is neither an atom nor in the continuous domain");
}

Eigen::VectorXd indicator_vector(const MixedValue& v, const StateSpace& space) {
    space.validate(v);
    const auto m = static_cast<Eigen::Index>(space.atom_count());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
    if (v.is_continuous()) {
        out[m - 1] = 1.0;
    } else if (v.atom_index() < m) {
        out[v.atom_index() - 1] = 1.0;
    }
    return out;
}

}  // namespace mixstate
