#include "mixstate/field.hpp"

#include "mixstate/errors.hpp"
#include "mixstate/text.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mixstate {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

Field::Field(std::size_t rows, std::size_t cols, std::vector<double> atoms)
    : rows_(rows), cols_(cols), atoms_(std::move(atoms)) {
    if (rows == 0 || cols == 0) throw DomainError("field dimensions must be positive");
    if (atoms_.empty()) throw DomainError("field needs at least one atom");
    cells_.assign(rows * cols, MixedValue::atom(static_cast<int>(atoms_.size())));
}

std::size_t Field::atom_count_in_field() const {
    std::size_t n = 0;
    for (const auto& v : cells_) n += v.is_atom() ? 1 : 0;
    return n;
}

Field Field::transposed() const {
    Field out(cols_, rows_, atoms_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out.at(c, r) = at(r, c);
    return out;
}

Field Field::rotated_180() const {
    Field out(rows_, cols_, atoms_);
    for (std::size_t i = 0; i < cells_.size(); ++i) out.cells_[cells_.size() - 1 - i] = cells_[i];
    return out;
}

void validate_field(const Field& field, const StateSpace& space) {
    if (field.atoms() != space.atoms()) throw DomainError("field atoms do not match the state space");
    for (const auto& v : field.cells()) space.validate(v);
}

namespace {

std::vector<double> parse_atom_list(std::string_view spec) {
    std::vector<double> atoms;
    for (auto tok : split(spec, ',')) {
        auto x = parse_double(trim(tok));
        if (!x || !std::isfinite(*x)) throw FormatError("bad atom coordinate '" + std::string(tok) + "'");
        atoms.push_back(*x);
    }
    return atoms;
}

std::vector<std::string_view> tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace

Field parse_field(std::string_view text) {
    const auto nl = text.find('\n');
    const auto header = tokens(text.substr(0, nl));
    if (header.size() != 4 || header[0] != "MSF1") throw FormatError("expected header 'MSF1 <rows> <cols> atoms=...'");
    const auto rows = parse_int(header[1]);
    const auto cols = parse_int(header[2]);
    if (!rows || !cols || *rows <= 0 || *cols <= 0) throw FormatError("bad field dimensions");
    if (header[3].substr(0, 6) != "atoms=") throw FormatError("missing atoms= in header");
    auto atoms = parse_atom_list(header[3].substr(6));

    Field field(static_cast<std::size_t>(*rows), static_cast<std::size_t>(*cols), atoms);
    const auto body = nl == std::string_view::npos ? std::vector<std::string_view>{} : tokens(text.substr(nl + 1));
    if (body.size() != field.size())
        throw FormatError("expected " + std::to_string(field.size()) + " cells, found " + std::to_string(body.size()));

    for (std::size_t i = 0; i < body.size(); ++i) {
        const auto tok = body[i];
        if (tok.front() == 'A') {
            const auto k = parse_int(tok.substr(1));
            if (!k || *k < 1 || static_cast<std::size_t>(*k) > atoms.size())
                throw FormatError("cell " + std::to_string(i) + ": atom index out of range in '" + std::string(tok) + "'");
            field[i] = MixedValue::atom(static_cast<int>(*k));
            continue;
        }
        const auto x = parse_double(tok);
        if (!x || !std::isfinite(*x)) throw FormatError("cell " + std::to_string(i) + ": bad value '" + std::string(tok) + "'");
        for (double e : atoms)
            if (*x == e) throw FormatError("cell " + std::to_string(i) + ": continuous value coincides with an atom");
        field[i] = MixedValue::continuous(*x);
    }
    return field;
}

Field parse_field(std::string_view text, const StateSpace& space) {
    Field field = parse_field(text);
    try {
        validate_field(field, space);
    } catch (const DomainError& e) {
        throw FormatError(e.what());
    }
    return field;
}

std::string write_field(const Field& field) {
    std::string out = "MSF1 " + std::to_string(field.rows()) + " " + std::to_string(field.cols()) + " atoms=";
    for (std::size_t k = 0; k < field.atoms().size(); ++k) {
        if (k) out += ',';
        out += format_double(field.atoms()[k]);
    }
    out += '\n';
    for (std::size_t r = 0; r < field.rows(); ++r) {
        for (std::size_t c = 0; c < field.cols(); ++c) {
            const auto& v = field.at(r, c);
            if (c) out += ' ';
            out += v.is_atom() ? "A" + std::to_string(v.atom_index()) : format_double(v.value());
        }
        out += '\n';
    }
    return out;
}

Field read_csv_field(std::string_view text, const StateSpace& space) {
    std::vector<std::vector<MixedValue>> rows;
    for (auto line : split(text, '\n')) {
        line = trim(line);
        if (line.empty()) continue;
        std::vector<MixedValue> row;
        for (auto cell : split(line, ',')) {
            const auto x = parse_double(trim(cell));
            if (!x || !std::isfinite(*x)) throw FormatError("bad CSV value '" + std::string(cell) + "'");
            try {
                row.push_back(space.classify(*x));
            } catch (const DomainError& e) {
                throw FormatError(e.what());
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) throw FormatError("ragged CSV rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw FormatError("empty CSV field");
    Field field(rows.size(), rows.front().size(), space.atoms());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) field.at(r, c) = rows[r][c];
    return field;
}

std::string write_csv_field(const Field& field) {
    std::string out;
    for (std::size_t r = 0; r < field.rows(); ++r) {
        for (std::size_t c = 0; c < field.cols(); ++c) {
            const auto& v = field.at(r, c);
            if (c) out += ',';
            out += format_double(v.is_atom() ? field.atoms()[static_cast<std::size_t>(v.atom_index() - 1)] : v.value());
        }
        out += '\n';
    }
    return out;
}

}  // namespace mixstate
