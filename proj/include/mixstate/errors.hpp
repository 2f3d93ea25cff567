#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mixstate {

// Value or parameter outside the state space / parameter domain.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Original-parameter maps evaluated at gamma in {0, 1}.
class BoundaryError : public DomainError {
public:
    using DomainError::DomainError;
};

// Malformed text input (field files, configs, images).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A local natural parameter left the family's admissible set.
class InadmissibleParameter : public std::runtime_error {
public:
    InadmissibleParameter(std::size_t site, const std::string& what)
        : std::runtime_error("site " + std::to_string(site) + ": " + what), site_(site) {}

    std::size_t site() const noexcept { return site_; }

private:
    std::size_t site_;
};

// Data for which the pseudo-likelihood maximizer does not exist.
class NonIdentifiable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mixstate
