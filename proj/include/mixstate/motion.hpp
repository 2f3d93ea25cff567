#pragma once

#include "mixstate/estimation.hpp"
#include "mixstate/field.hpp"
#include "mixstate/pgm.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mixstate {

// State space {0} u (0, inf) of motion magnitudes.
StateSpace motion_space();

struct MotionMap {
    Field field;
    double atom_fraction = 0.0;
};

// Values <= eps become Atom(0); larger values stay continuous. Throws
// DomainError for negative or non-finite values or eps < 0.
MotionMap threshold_map(std::size_t rows, std::size_t cols, const std::vector<double>& values, double eps = 0.0);

// Gray level g maps to g / maxval * scale before thresholding.
MotionMap motion_from_pgm(const GrayImage& image, double eps = 0.0, double scale = 1.0);
MotionMap motion_from_csv(std::string_view text, double eps = 0.0);

enum class MapFormat { Auto, Pgm, Csv };
// Auto picks the format from the file extension (.pgm or .csv).
MotionMap ingest(const std::string& path, MapFormat format = MapFormat::Auto, double eps = 0.0, double scale = 1.0);

// Not a motion estimator: |I(t+1) - I(t)| per pixel, scaled like
// motion_from_pgm. Lets the pipeline run on raw frame pairs.
MotionMap frame_difference(const GrayImage& first, const GrayImage& second, double eps = 0.0, double scale = 1.0);

// Data export: gray = round(x / scale * maxval), clamped; atoms are 0.
GrayImage field_to_pgm(const Field& field, double scale, int maxval = 255);
// Visual rendering: atoms white, continuous values darker as they grow
// (black at the field maximum).
GrayImage render_field(const Field& field, int maxval = 255);

struct MixedHistogram {
    double atom_mass = 0.0;
    std::vector<double> edges;  // bins + 1 edges over [0, max continuous value]
    std::vector<double> mass;   // probability of each bin; atom_mass + sum = 1
};

MixedHistogram mixed_histogram(const Field& field, std::size_t bins);
std::string write_histogram_csv(const MixedHistogram& h);

struct AnalyzeOptions {
    std::size_t bootstrap = 50;
    double level = 0.95;
    std::uint64_t seed = 1;
    std::size_t burn_in = 500;
    Boundary boundary = Boundary::Free;
};

enum class Isotropy { Isotropic, Anisotropic };

struct IsotropyReport {
    FitReport fit;
    double diff = 0.0;     // c1_hat - c2_hat
    double diff_sd = 0.0;  // bootstrap standard deviation of c1 - c2
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double level = 0.95;
    std::size_t replicates = 0;
    std::size_t failures = 0;
    Isotropy verdict = Isotropy::Isotropic;
    double atom_fraction = 0.0;
    std::vector<double> quantile_levels;
    std::vector<double> quantiles;  // of the continuous values
};

// Fits the four-parameter positive-Gaussian model and builds a normal
// bootstrap interval for c1 - c2; Anisotropic iff it excludes 0.
IsotropyReport analyze(const Field& field, const AnalyzeOptions& options = {});
std::string write_isotropy_report(const IsotropyReport& report);

}  // namespace mixstate
