#include "mixstate/model_config.hpp"

#include "mixstate/errors.hpp"

#include <cmath>
#include <set>

namespace mixstate {

namespace {

struct EntryName {
    std::string name;
    int row;
    int col;
};

// Named alpha components and upper-triangle (plus optional lower) beta
// entries; empty for families configured only through arrays.
std::vector<std::string> alpha_names(const Family& f) {
    switch (f.kind()) {
        case FamilyKind::MixedGamma: return {};
        case FamilyKind::CensoredMixedExponential: return {"r", "a", "b"};
        default: return {"a", "b"};
    }
}

std::vector<EntryName> beta_names(const Family& f) {
    switch (f.kind()) {
        case FamilyKind::MixedGamma: return {};
        case FamilyKind::CensoredMixedExponential:
            return {{"s", 0, 0}, {"u", 0, 1}, {"t", 0, 2}, {"c", 1, 1}, {"d", 1, 2}, {"e", 2, 2}};
        default: return {{"c", 0, 0}, {"d", 0, 1}, {"e", 1, 1}};
    }
}

bool has_lower_name(const Family& f) { return f.dim() == 2 && f.kind() != FamilyKind::MixedGamma; }

Mat matrix_from(const std::vector<double>& v, int d, const std::string& key) {
    if (static_cast<int>(v.size()) != d * d) throw FormatError(key + " needs " + std::to_string(d * d) + " entries");
    Mat m(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) m(r, c) = v[static_cast<std::size_t>(r * d + c)];
    return m;
}

std::vector<double> flatten(const Mat& m) {
    std::vector<double> out;
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
    return out;
}

double number_of(const KvSection& s, const std::string& key) {
    const auto* v = s.find(key);
    if (!v) return 0.0;
    if (const auto* d = std::get_if<double>(v)) return *d;
    throw FormatError("[params] " + key + " must be a number");
}

}  // namespace

std::string boundary_name(Boundary b) { return b == Boundary::Toroidal ? "toroidal" : "free"; }

Boundary parse_boundary(std::string_view name) {
    if (name == "free") return Boundary::Free;
    if (name == "toroidal") return Boundary::Toroidal;
    throw FormatError("boundary must be \"free\" or \"toroidal\"");
}

Family read_family(const KvDocument& doc) {
    const auto kind = doc.require_string("family", "kind");
    const auto k = doc.get_number("family", "K").value_or(1.0);
    try {
        return Family::from_name(kind, k);
    } catch (const DomainError& e) {
        throw FormatError(e.what());
    }
}

void write_family(KvDocument& doc, const Family& family) {
    auto& s = doc.section_or_add("family");
    s.set("kind", family.name());
    if (family.kind() == FamilyKind::TruncatedMixedExponential || family.kind() == FamilyKind::CensoredMixedExponential)
        s.set("K", family.truncation());
}

TranslationInvariantParams read_params(const KvSection& s, const Family& family) {
    const int d = family.dim();
    TranslationInvariantParams p;
    if (s.find("alpha")) {
        std::set<std::string> allowed{"alpha", "beta", "beta_h", "beta_v", "symmetric"};
        for (const auto& e : s.entries)
            if (!allowed.count(e.key)) throw FormatError("unexpected [params] key '" + e.key + "' next to alpha = [...]");
        auto array = [&](const std::string& key) -> std::optional<std::vector<double>> {
            const auto* v = s.find(key);
            if (!v) return std::nullopt;
            if (const auto* a = std::get_if<std::vector<double>>(v)) return *a;
            throw FormatError("[params] " + key + " must be an array");
        };
        const auto alpha = *array("alpha");
        if (static_cast<int>(alpha.size()) != d) throw FormatError("alpha needs " + std::to_string(d) + " entries");
        p.alpha = Eigen::Map<const Eigen::VectorXd>(alpha.data(), d);
        const auto iso = array("beta");
        const auto bh = array("beta_h");
        const auto bv = array("beta_v");
        if (iso && (bh || bv)) throw FormatError("give either beta or beta_h/beta_v, not both");
        const Mat zero = Mat::Zero(d, d);
        p.beta_h = iso ? matrix_from(*iso, d, "beta") : bh ? matrix_from(*bh, d, "beta_h") : zero;
        p.beta_v = iso ? matrix_from(*iso, d, "beta") : bv ? matrix_from(*bv, d, "beta_v") : zero;
        return p;
    }

    const auto an = alpha_names(family);
    if (an.empty()) throw FormatError(family.name() + " parameters must be given as alpha = [...], beta_h = [...], beta_v = [...]");
    std::set<std::string> allowed{"symmetric"};
    p.alpha = Vec(d);
    for (int k = 0; k < d; ++k) {
        const auto& name = an[static_cast<std::size_t>(k)];
        if (!s.find(name)) throw FormatError("missing [params] " + name);
        p.alpha[k] = number_of(s, name);
        allowed.insert(name);
    }
    auto entries = beta_names(family);
    if (has_lower_name(family)) entries.push_back({"f", 1, 0});
    p.beta_h = Mat::Zero(d, d);
    p.beta_v = Mat::Zero(d, d);
    for (const auto& e : entries) {
        const bool iso = s.find(e.name) != nullptr;
        const bool h = s.find(e.name + "1") != nullptr;
        const bool v = s.find(e.name + "2") != nullptr;
        if (iso && (h || v)) throw FormatError("give either " + e.name + " or " + e.name + "1/" + e.name + "2, not both");
        const double vh = number_of(s, h ? e.name + "1" : e.name);
        const double vv = number_of(s, v ? e.name + "2" : e.name);
        allowed.insert({e.name, e.name + "1", e.name + "2"});
        p.beta_h(e.row, e.col) = vh;
        p.beta_v(e.row, e.col) = vv;
        if (e.row != e.col && e.name != "f") {
            p.beta_h(e.col, e.row) = vh;
            p.beta_v(e.col, e.row) = vv;
        }
    }
    // f overrides the mirrored d only when given.
    if (has_lower_name(family)) {
        for (auto [suffix, m] : {std::pair{std::string("1"), &p.beta_h}, std::pair{std::string("2"), &p.beta_v}}) {
            const auto* specific = s.find("f" + suffix);
            const auto* iso = s.find("f");
            if (!specific && !iso) (*m)(1, 0) = (*m)(0, 1);
        }
    }
    for (const auto& e : s.entries)
        if (!allowed.count(e.key)) throw FormatError("unknown [params] key '" + e.key + "' for " + family.name());
    return p;
}

void write_params(KvSection& s, const Family& family, const TranslationInvariantParams& p) {
    const auto an = alpha_names(family);
    if (an.empty()) {
        s.set("alpha", std::vector<double>(p.alpha.data(), p.alpha.data() + p.alpha.size()));
        s.set("beta_h", flatten(p.beta_h));
        s.set("beta_v", flatten(p.beta_v));
        return;
    }
    const bool symmetric = p.beta_h == p.beta_h.transpose() && p.beta_v == p.beta_v.transpose();
    if (!symmetric && family.dim() == 3) {
        s.set("alpha", std::vector<double>(p.alpha.data(), p.alpha.data() + p.alpha.size()));
        s.set("beta_h", flatten(p.beta_h));
        s.set("beta_v", flatten(p.beta_v));
        return;
    }
    for (int k = 0; k < family.dim(); ++k) s.set(an[static_cast<std::size_t>(k)], p.alpha[k]);
    auto entries = beta_names(family);
    if (!symmetric) entries.push_back({"f", 1, 0});
    const bool isotropic = p.beta_h == p.beta_v;
    const bool gaussian = family.kind() == FamilyKind::PositiveMixedGaussian;
    for (const auto& e : entries) {
        const double h = p.beta_h(e.row, e.col);
        const double v = p.beta_v(e.row, e.col);
        // The positive-Gaussian model is written in its four-parameter form.
        if (gaussian && e.name != "c" && h == 0.0 && v == 0.0) continue;
        if (isotropic) {
            s.set(e.name, h);
        } else {
            s.set(e.name + "1", h);
            s.set(e.name + "2", v);
        }
    }
}

AutoModel ModelConfig::model() const {
    return AutoModel::translation_invariant(family, lattice(), params, require_symmetric);
}

ModelConfig parse_model_config(std::string_view text) {
    const auto doc = KvDocument::parse(text);
    ModelConfig cfg;
    cfg.family = read_family(doc);
    const auto rows = doc.require_number("lattice", "rows");
    const auto cols = doc.require_number("lattice", "cols");
    if (!(rows >= 1 && cols >= 1) || rows != std::floor(rows) || cols != std::floor(cols))
        throw FormatError("lattice rows and cols must be positive integers");
    cfg.rows = static_cast<std::size_t>(rows);
    cfg.cols = static_cast<std::size_t>(cols);
    cfg.boundary = parse_boundary(doc.get_string("lattice", "boundary").value_or("free"));
    const auto* params = doc.section("params");
    if (!params) throw FormatError("missing [params] section");
    cfg.params = read_params(*params, cfg.family);
    cfg.require_symmetric = doc.get_bool("params", "symmetric").value_or(true);
    try {
        (void)cfg.model();
    } catch (const DomainError& e) {
        throw FormatError(e.what());
    }
    return cfg;
}

std::string write_model_config(const ModelConfig& cfg) {
    KvDocument doc;
    write_family(doc, cfg.family);
    auto& lat = doc.section_or_add("lattice");
    lat.set("rows", static_cast<double>(cfg.rows));
    lat.set("cols", static_cast<double>(cfg.cols));
    lat.set("boundary", boundary_name(cfg.boundary));
    auto& params = doc.section_or_add("params");
    if (!cfg.require_symmetric) params.set("symmetric", false);
    write_params(params, cfg.family, cfg.params);
    return doc.write();
}

}  // namespace mixstate
