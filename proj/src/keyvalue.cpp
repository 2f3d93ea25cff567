#include "mixstate/keyvalue.hpp"

#include "mixstate/errors.hpp"
#include "mixstate/text.hpp"

#include <cctype>
#include <cmath>

namespace mixstate {

const KvValue* KvSection::find(std::string_view key) const {
    for (const auto& e : entries)
        if (e.key == key) return &e.value;
    return nullptr;
}

void KvSection::set(std::string key, KvValue value) {
    for (auto& e : entries) {
        if (e.key == key) {
            e.value = std::move(value);
            return;
        }
    }
    entries.push_back({std::move(key), std::move(value)});
}

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw FormatError("line " + std::to_string(line) + ": " + what);
}

std::string_view strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

bool valid_key(std::string_view k) {
    if (k.empty()) return false;
    for (char ch : k)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.')) return false;
    return true;
}

KvValue parse_value(std::string_view v, std::size_t line) {
    if (v.empty()) fail(line, "missing value");
    if (v == "true") return true;
    if (v == "false") return false;
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"') fail(line, "unterminated string");
        return std::string(v.substr(1, v.size() - 2));
    }
    if (v.front() == '[') {
        if (v.back() != ']') fail(line, "unterminated array");
        std::vector<double> out;
        const auto inner = trim(v.substr(1, v.size() - 2));
        if (inner.empty()) return out;
        for (auto tok : split(inner, ',')) {
            const auto x = parse_double(trim(tok));
            if (!x) fail(line, "bad array element '" + std::string(trim(tok)) + "'");
            out.push_back(*x);
        }
        return out;
    }
    const auto x = parse_double(v);
    if (!x) fail(line, "bad value '" + std::string(v) + "'");
    return *x;
}

std::string format_value(const KvValue& v) {
    if (const auto* d = std::get_if<double>(&v)) {
        if (std::isnan(*d)) return "nan";
        if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
        return format_double(*d);
    }
    if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    if (const auto* s = std::get_if<std::string>(&v)) return "\"" + *s + "\"";
    const auto& a = std::get<std::vector<double>>(v);
    std::string out = "[";
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out += ", ";
        out += format_value(a[i]);
    }
    return out + "]";
}

}  // namespace

KvDocument KvDocument::parse(std::string_view text) {
    KvDocument doc;
    doc.section_or_add("");
    std::size_t current = 0;
    std::size_t lineno = 0;
    for (auto raw : split(text, '\n')) {
        ++lineno;
        const auto line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(lineno, "unterminated section header");
            const auto name = trim(line.substr(1, line.size() - 2));
            if (!valid_key(name)) fail(lineno, "bad section name");
            if (doc.section(name)) fail(lineno, "duplicate section [" + std::string(name) + "]");
            doc.section_or_add(name);
            current = doc.sections_.size() - 1;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(lineno, "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        if (!valid_key(key)) fail(lineno, "bad key '" + std::string(key) + "'");
        auto& sec = doc.sections_[current];
        if (sec.find(key)) fail(lineno, "duplicate key '" + std::string(key) + "'");
        sec.entries.push_back({std::string(key), parse_value(trim(line.substr(eq + 1)), lineno)});
    }
    return doc;
}

std::string KvDocument::write() const {
    std::string out;
    for (const auto& s : sections_) {
        if (s.name.empty() && s.entries.empty()) continue;
        if (!s.name.empty()) {
            if (!out.empty()) out += '\n';
            out += "[" + s.name + "]\n";
        }
        for (const auto& e : s.entries) out += e.key + " = " + format_value(e.value) + "\n";
    }
    return out;
}

const KvSection* KvDocument::section(std::string_view name) const {
    for (const auto& s : sections_)
        if (s.name == name) return &s;
    return nullptr;
}

KvSection& KvDocument::section_or_add(std::string_view name) {
    for (auto& s : sections_)
        if (s.name == name) return s;
    sections_.push_back({std::string(name), {}});
    return sections_.back();
}

namespace {

template <class T>
std::optional<T> typed(const KvDocument& doc, std::string_view section, std::string_view key, const char* what) {
    const auto* s = doc.section(section);
    if (!s) return std::nullopt;
    const auto* v = s->find(key);
    if (!v) return std::nullopt;
    if (const auto* t = std::get_if<T>(v)) return *t;
    throw FormatError("[" + std::string(section) + "] " + std::string(key) + " must be " + what);
}

}  // namespace

std::optional<double> KvDocument::get_number(std::string_view section, std::string_view key) const {
    return typed<double>(*this, section, key, "a number");
}

std::optional<std::string> KvDocument::get_string(std::string_view section, std::string_view key) const {
    return typed<std::string>(*this, section, key, "a string");
}

std::optional<bool> KvDocument::get_bool(std::string_view section, std::string_view key) const {
    return typed<bool>(*this, section, key, "true or false");
}

std::optional<std::vector<double>> KvDocument::get_array(std::string_view section, std::string_view key) const {
    return typed<std::vector<double>>(*this, section, key, "an array of numbers");
}

double KvDocument::require_number(std::string_view section, std::string_view key) const {
    auto v = get_number(section, key);
    if (!v) throw FormatError("missing [" + std::string(section) + "] " + std::string(key));
    return *v;
}

std::string KvDocument::require_string(std::string_view section, std::string_view key) const {
    auto v = get_string(section, key);
    if (!v) throw FormatError("missing [" + std::string(section) + "] " + std::string(key));
    return *v;
}

}  // namespace mixstate
