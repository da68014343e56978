#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "hypersew/grid.hpp"
#include "hypersew/holder.hpp"
#include "hypersew/increment.hpp"
#include "hypersew/point.hpp"

namespace hypersew {

// Scalar field on the unit cube: either a closed form evaluable everywhere or
// values tabulated on a tensor grid of nodes. Grid-sampled fields refuse
// off-node evaluation (NodeMismatch) rather than interpolating silently.
// Fields are immutable and cheap to copy; evaluation is thread safe.
class Field {
  public:
    static Field closed_form(std::size_t dimension, std::function<double(const MultiPoint&)> eval);
    static Field grid_sampled(GridPartition grid, std::vector<double> node_values);

    std::size_t dimension() const;
    double operator()(const MultiPoint& p) const;

    bool is_grid_sampled() const;
    // Node structure of a grid-sampled field; throws NodeMismatch on closed forms.
    const GridPartition& grid() const;
    const std::vector<double>& node_values() const;

  private:
    struct Impl;
    explicit Field(std::shared_ptr<const Impl> impl);
    std::shared_ptr<const Impl> impl_;
};

// Fractional Brownian sheet description. The covariance factors across axes,
// so sampling composes one factored per-axis covariance per dimension.
struct SheetSpec {
    std::vector<double> hurst;  // one exponent per axis, each in (0,1)
    GridPartition grid;         // node lists, at most 128 nodes per axis
    std::uint64_t seed = 0;
};

// Separable field  f(x) = prod_i factors[i](x_i).
Field product_field(std::vector<std::function<double(double)>> factors);

// Tensor product of truncated Weierstrass functions
//   w_a(t) = sum_{n=0}^{terms} 2^{-n a} cos(2 pi 2^n t),
// one factor per axis with exponent alpha[i]. Holder-alpha test field with
// known roughness.
Field weierstrass_field(const HolderExponents& alpha, unsigned terms);

// Gaussian sheet sample on the SheetSpec's grid with covariance
//   E[Z(s) Z(t)] = prod_i r_{H_i}(s_i, t_i),
//   r_H(s, t) = (s^{2H} + t^{2H} - |s - t|^{2H}) / 2.
// Samples vanish exactly on every face {x_i = 0} present in the grid and the
// variance at the all-ones corner is 1. Identical specs give bitwise
// identical value arrays. Throws CovarianceError when a per-axis covariance
// fails to factor (negative eigenvalue beyond tolerance).
Field fbm_sheet(const SheetSpec& spec);

// Tabulates f at the grid's nodes and returns the grid-sampled result.
Field sample_on_grid(const Field& f, const GridPartition& grid);

// Dense polynomial with coefficients drawn uniformly from [-1, 1] for every
// multi-degree up to `degree` per axis. Deterministic in the seed; used as a
// smooth test field with derivatives of known scale.
Field random_polynomial_field(std::size_t dimension, unsigned degree, std::uint64_t seed);

// ca * a + cb * b. Closed forms combine lazily; two grid-sampled fields must
// share the same nodes (GridMismatch otherwise); a mixed pair samples the
// closed form onto the sampled field's grid.
Field field_linear(double ca, const Field& a, double cb, const Field& b);
inline Field field_difference(const Field& a, const Field& b) {
    return field_linear(1.0, a, -1.0, b);
}

// Local Young integrand built from two fields of equal dimension:
//   Xi(x, y) = (mean of Y over the 2^k corners of [x, y]) * box_increment(X).
// Averaging over corners keeps the sewing limit of the lower-corner germ
// (their gap is bounded by the same Holder gauges) while converging at
// second order on smooth data, and it evaluates the fields at rectangle
// corners only, so refinement of grid-sampled inputs stays on nodes.
PairFunction young_pair(const Field& Y, const Field& X);

} // namespace hypersew
