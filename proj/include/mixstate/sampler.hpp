#pragma once

#include "mixstate/automodel.hpp"
#include "mixstate/random.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mixstate {

enum class ScanOrder { Raster, Random };

struct GibbsInit {
    enum class Kind { AllReference, AllContinuous, FromField };
    Kind kind = Kind::AllReference;
    double value = 1.0;  // AllContinuous
    Field field;         // FromField

    static GibbsInit all_reference() { return {}; }
    static GibbsInit all_continuous(double v) { return {Kind::AllContinuous, v, {}}; }
    static GibbsInit from_field(Field f) { return {Kind::FromField, 0.0, std::move(f)}; }
};

// `sweeps` counts every sweep of the chain; the first `burn_in` of them are
// discarded for stationarity diagnostics. The output field is the state
// after the last sweep.
struct GibbsConfig {
    std::size_t sweeps = 1000;
    std::size_t burn_in = 500;
    ScanOrder scan = ScanOrder::Raster;
    std::uint64_t seed = 1;
    GibbsInit init;

    void validate() const;
};

struct SimulationResult {
    Field field;
    std::vector<double> energy_trace;  // Q after each sweep, length == sweeps
};

// Single-site Gibbs chain with cached sufficient statistics.
class GibbsChain {
public:
    GibbsChain(const AutoModel& model, Field initial, std::uint64_t seed);

    // Redraws every site once from its local conditional. Random order
    // visits a fresh permutation of the sites. Throws InadmissibleParameter
    // if a local parameter leaves the family's set.
    void sweep(ScanOrder order = ScanOrder::Raster);
    double energy() const;
    const Field& field() const { return field_; }
    Rng& rng() { return rng_; }

private:
    const AutoModel& model_;
    Field field_;
    std::vector<Vec> stats_;
    std::vector<std::size_t> order_;
    Rng rng_;
};

// One raster sweep over an external field.
void gibbs_sweep(const AutoModel& model, Field& field, Rng& rng, ScanOrder order = ScanOrder::Raster);

Field initial_field(const AutoModel& model, const GibbsInit& init);

SimulationResult simulate(const AutoModel& model, const GibbsConfig& config);

// Mann-Kendall monotone trend test (normal approximation with tie correction).
struct TrendTest {
    double s = 0.0;
    double z = 0.0;
    double p_value = 1.0;
    bool trend(double level = 0.05) const { return p_value < level; }
};
TrendTest mann_kendall(std::span<const double> series);

}  // namespace mixstate
