#pragma once

#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mixstate {

// Values of the small TOML-like format used for model configs and reports:
// numbers, booleans, double-quoted strings and flat arrays of numbers.
using KvValue = std::variant<double, bool, std::string, std::vector<double>>;

struct KvEntry {
    std::string key;
    KvValue value;
};

struct KvSection {
    std::string name;
    std::vector<KvEntry> entries;

    const KvValue* find(std::string_view key) const;
    void set(std::string key, KvValue value);
};

class KvDocument {
public:
    // Throws FormatError with the offending line number.
    static KvDocument parse(std::string_view text);
    std::string write() const;

    const KvSection* section(std::string_view name) const;
    KvSection& section_or_add(std::string_view name);
    const std::deque<KvSection>& sections() const { return sections_; }

    // Typed lookups; throw FormatError on type mismatch or (for require_*) absence.
    std::optional<double> get_number(std::string_view section, std::string_view key) const;
    std::optional<std::string> get_string(std::string_view section, std::string_view key) const;
    std::optional<bool> get_bool(std::string_view section, std::string_view key) const;
    std::optional<std::vector<double>> get_array(std::string_view section, std::string_view key) const;
    double require_number(std::string_view section, std::string_view key) const;
    std::string require_string(std::string_view section, std::string_view key) const;

private:
    std::deque<KvSection> sections_;  // deque: references survive section_or_add
};

}  // namespace mixstate
