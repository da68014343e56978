#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "hypersew/grid.hpp"
#include "hypersew/point.hpp"

namespace hypersew {

// Scalar field on the unit cube. Grid-sampled fields throw NodeMismatch when
// evaluated off their nodes; evaluation must be safe from multiple threads.
using PointFn = std::function<double(const MultiPoint&)>;

// Function of a pair of points (no ordering requirement between x and y).
struct PairFunction {
    std::size_t dimension = 0;
    std::function<double(const MultiPoint&, const MultiPoint&)> eval;

    double operator()(const MultiPoint& x, const MultiPoint& y) const { return eval(x, y); }
};

// Ordered, duplicate-free set of axis indices (0-based).
class AxisSet {
  public:
    explicit AxisSet(std::vector<std::size_t> axes);

    std::size_t size() const { return axes_.size(); }
    std::size_t operator[](std::size_t pos) const { return axes_[pos]; }
    const std::vector<std::size_t>& axes() const { return axes_; }
    std::size_t max_axis() const { return axes_.back(); }

    // {0, 1, ..., k-1}.
    static AxisSet full(std::size_t dimension);

  private:
    std::vector<std::size_t> axes_;
};

// Generalized increment of f over the corners of [x, y]: the signed corner
// sum where a corner taking m coordinates from x carries (-1)^m. Reduces to
// the product of 1-D increments for product fields and vanishes on
// degenerate rectangles. The two-point form does not require x <= y.
double box_increment(const PointFn& f, const MultiPoint& x, const MultiPoint& y);
double box_increment(const PointFn& f, const HyperRect& rect);

// Substitution average on pair functions:
//   (psi_i(z) f)(x, y) = f(x, y[i -> z_i]) + f(x[i -> z_i], y).
// Applications along distinct axes commute.
PairFunction psi(std::size_t axis, const MultiPoint& z, const PairFunction& f);

// Single-axis midpoint defect (I - psi_i(z)) f evaluated at (x, y):
//   f(x,y) - f(x, y[i -> z_i]) - f(x[i -> z_i], y).
// Requires z_i between x_i and y_i.
double delta_axis(std::size_t axis, const MultiPoint& z, const PairFunction& f,
                  const MultiPoint& x, const MultiPoint& y);

// Multi-axis defect prod_{i in theta} (I - psi_i(z)) applied to f at (x, y),
// expanded by inclusion-exclusion over subsets of theta. z is validated on
// the axes in theta only.
double delta_theta_direct(const AxisSet& theta, const MultiPoint& z, const PairFunction& f,
                          const MultiPoint& x, const MultiPoint& y);

// Same operator assembled from single-axis defects:
//   sum over nonempty subsets S of theta of (-1)^{|S|-1}
//     sum_{i in S} delta_axis(i) applied to (prod_{j in S, j > i} psi_j) f.
// Must agree with delta_theta_direct to round-off.
double delta_theta_decomposed(const AxisSet& theta, const MultiPoint& z, const PairFunction& f,
                              const MultiPoint& x, const MultiPoint& y);

// Local Young integrand Xi(x, y) = Y(x) * box_increment(X, x, y).
PairFunction young_pair(const PointFn& Y, const PointFn& X, std::size_t dimension);

} // namespace hypersew
