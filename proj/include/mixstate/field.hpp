#pragma once

#include "mixstate/state_space.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mixstate {

// A rows x cols configuration x in E^S, stored row-major. The atom
// coordinates travel with the field so it can be written without a model.
class Field {
public:
    Field() = default;
    // Every cell starts at the reference atom e_M.
    Field(std::size_t rows, std::size_t cols, std::vector<double> atoms);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return cells_.size(); }
    const std::vector<double>& atoms() const { return atoms_; }

    MixedValue& operator[](std::size_t i) { return cells_[i]; }
    const MixedValue& operator[](std::size_t i) const { return cells_[i]; }
    MixedValue& at(std::size_t r, std::size_t c) { return cells_[r * cols_ + c]; }
    const MixedValue& at(std::size_t r, std::size_t c) const { return cells_[r * cols_ + c]; }

    std::span<MixedValue> cells() { return cells_; }
    std::span<const MixedValue> cells() const { return cells_; }

    std::size_t atom_count_in_field() const;
    Field transposed() const;
    Field rotated_180() const;

    friend bool operator==(const Field&, const Field&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> atoms_;
    std::vector<MixedValue> cells_;
};

// Throws DomainError if the atoms differ from the space or a cell is outside E.
void validate_field(const Field& field, const StateSpace& space);

// MSF1 text format:
//   MSF1 <rows> <cols> atoms=<e_1,...,e_M>
//   cells in row-major order, whitespace separated, each "A<k>" or a decimal.
Field parse_field(std::string_view text);
Field parse_field(std::string_view text, const StateSpace& space);
std::string write_field(const Field& field);

// Comma separated, one row per line. A cell maps to Atom(k) iff it equals e_k.
Field read_csv_field(std::string_view text, const StateSpace& space);
std::string write_csv_field(const Field& field);

}  // namespace mixstate
