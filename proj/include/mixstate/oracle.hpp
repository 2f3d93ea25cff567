#pragma once

#include "mixstate/automodel.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace mixstate {

// One point of a discretized state space: an atom (weight 1) or the
// midpoint of a continuous cell (lo, hi] with weight hi - lo.
struct GridPoint {
    MixedValue value;
    double weight = 1.0;
    double lo = 0.0;
    double hi = 0.0;
};

// Approximates the reference measure m = sum_k delta_{e_k} + Lebesgue by the
// atoms plus equal cells of width close to h on (0, radius]. Bounded domains
// are tiled exactly, with h shrunk so that an integer number of cells fits.
struct Discretization {
    double h = 1e-3;
    double radius = 0.0;  // ignored for bounded domains

    std::vector<GridPoint> grid(const Family& family) const;

    // h = step, radius chosen so that the continuous tail beyond it has
    // mass below tail under theta.
    static Discretization for_theta(const Family& family, const Vec& theta, double step, double tail = 1e-8);
    // Default: h = 1e-3 x (typical continuous scale under theta).
    static Discretization standard(const Family& family, const Vec& theta);
};

// Probability masses over a grid; `outside` holds mass that falls beyond
// the truncation radius (zero for oracle-built distributions).
struct GridDistribution {
    std::vector<GridPoint> grid;
    std::vector<double> mass;
    double outside = 0.0;
};

double total_variation(const GridDistribution& p, const GridDistribution& q);
double moment(const GridDistribution& d, const std::function<double(const MixedValue&)>& fn);

// Exact masses of the family law at theta over the grid cells, from the
// closed-form atom probabilities and continuous CDF.
GridDistribution analytic_masses(const Family& family, const NaturalParams& theta, const std::vector<GridPoint>& grid);

// Normalized discretized joint P(x) = exp Q(x) prod w / Z over grid^|S|.
struct JointTable {
    std::vector<GridPoint> grid;  // shared by every site
    std::size_t sites = 0;
    std::vector<double> prob;     // index = sum_i g_i * G^i
    double log_z = 0.0;
};

// Maximum number of cells a JointTable may hold.
inline constexpr std::size_t kMaxTableCells = 20'000'000;

// Throws DomainError if the lattice has more than 4 sites or the table
// would exceed kMaxTableCells; std::runtime_error if exp Q is not finite.
JointTable joint_table(const AutoModel& model, const Discretization& disc);

// log Z computed by streaming over all tuples without storing them;
// same guards as joint_table except the cell limit is 1e9.
double log_partition(const AutoModel& model, const Discretization& disc);

// Slice of a table at `site`, other sites fixed to the grid indices in
// `others` (the entry for `site` is ignored), renormalized.
GridDistribution conditional_from_table(const JointTable& table, std::size_t site, const std::vector<std::size_t>& others);

// The same slice computed lazily from exp Q(x with x_site = g) * w(g);
// Z cancels, so no table is materialized. Throws std::runtime_error if the
// slice has zero or non-finite mass.
GridDistribution conditional_from_energy(const AutoModel& model, const std::vector<GridPoint>& grid, const Field& field,
                                         std::size_t site);

// Marginal law of one site under a table.
GridDistribution marginal(const JointTable& table, std::size_t site);

}  // namespace mixstate
