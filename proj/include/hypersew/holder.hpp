#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hypersew/grid.hpp"
#include "hypersew/increment.hpp"
#include "hypersew/point.hpp"

namespace hypersew {

// Per-axis exponent vector. Gauges accept any positive exponents; field-norm
// estimation additionally requires every entry below 1.
class HolderExponents {
  public:
    explicit HolderExponents(std::vector<double> values);

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t axis) const { return values_[axis]; }
    const std::vector<double>& values() const { return values_; }
    bool all_below_one() const;

  private:
    std::vector<double> values_;
};

// Product gauge  q_gamma(x, y) = prod_i |y_i - x_i|^{gamma_i}. Vanishes iff
// the pair is degenerate along some axis.
double q_gauge(const MultiPoint& x, const MultiPoint& y, const HolderExponents& gamma);

// Sum gauge  p_gamma(x, y) = sum_i |y_i - x_i|^{gamma_i}.
double p_gauge(const MultiPoint& x, const MultiPoint& y, const HolderExponents& gamma);

struct NormReport {
    // sup |box increment| / q_alpha over the sampled non-degenerate pairs.
    double box_norm = 0.0;
    // sum over axes of the largest axis-aligned quotient |D_i f| / |D_i|^{alpha_i}.
    double plus_norm = 0.0;
    // max |f| over the grid nodes.
    double sup_norm = 0.0;
    std::size_t pairs_evaluated = 0;

    // Full Holder functional: rectangular part plus axis-direction part.
    double total() const { return box_norm + plus_norm; }
};

// Deterministic sampled estimate of the Holder norms of f on the grid.
// The box part scans every grid cell's diagonal pair (the small scales that
// dominate the quotient) plus pair_budget seeded random non-degenerate node
// pairs; the axis part scans, per axis, every node pair inside every grid
// section, so 1-D sups are exact at grid resolution. f is tabulated at the
// nodes once, so grid-sampled fields need exactly the grid's nodes.
NormReport estimate_norms(const PointFn& f, const GridPartition& grid,
                          const HolderExponents& alpha, std::size_t pair_budget,
                          std::uint64_t seed);

// Checks the anchored sup bound: sampled sup-norm <= |f(anchor)| + plus_norm,
// with the anchor at the grid's lower corner. Holds with equality for fields
// whose largest axis increments start at the anchor.
bool sup_norm_bound_check(const PointFn& f, const GridPartition& grid, const NormReport& report);

} // namespace hypersew
