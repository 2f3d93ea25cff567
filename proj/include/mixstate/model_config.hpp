#pragma once

#include "mixstate/automodel.hpp"
#include "mixstate/keyvalue.hpp"

#include <string>
#include <string_view>

namespace mixstate {

// A translation-invariant model as stored on disk:
//
//   [family]
//   kind = "truncated-exponential"
//   K = 2
//
//   [lattice]
//   rows = 64
//   cols = 64
//   boundary = "free"        # or "toroidal"
//
//   [params]
//   a = 0.5                  # singleton parameters
//   b = 1
//   c = 0.1                  # isotropic entry, or c1 / c2 per direction
//   d = -0.1
//   e = 0.2
//
// Entry names follow the family: dimension-2 families use alpha = (a, b)
// and beta = [[c, d], [f, e]] with f = d unless given; the censored family
// uses alpha = (r, a, b) and beta = [[s, u, t], [u, c, d], [t, d, e]].
// Any family also accepts alpha = [...], beta_h = [...], beta_v = [...]
// with matrices row-major. Missing interaction entries are zero.
struct ModelConfig {
    Family family = Family::mixed_exponential();
    std::size_t rows = 1;
    std::size_t cols = 1;
    Boundary boundary = Boundary::Free;
    TranslationInvariantParams params;
    bool require_symmetric = true;

    Lattice lattice() const { return Lattice(rows, cols, boundary); }
    AutoModel model() const;
};

ModelConfig parse_model_config(std::string_view text);
std::string write_model_config(const ModelConfig& config);

Family read_family(const KvDocument& doc);
void write_family(KvDocument& doc, const Family& family);
TranslationInvariantParams read_params(const KvSection& section, const Family& family);
void write_params(KvSection& section, const Family& family, const TranslationInvariantParams& params);

std::string boundary_name(Boundary b);
Boundary parse_boundary(std::string_view name);

}  // namespace mixstate
