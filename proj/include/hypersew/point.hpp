#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "hypersew/errors.hpp"

namespace hypersew {

// Absolute tolerance used whenever coordinates are compared for identity
// (breakpoint lookup, node matching, tile alignment).
inline constexpr double kCoordTol = 1e-12;

// A point of the unit hyper-cube [0,1]^k, k >= 1. Immutable except through
// the checked setter; every constructor validates the bounds.
class MultiPoint {
  public:
    explicit MultiPoint(std::vector<double> coords);
    MultiPoint(std::initializer_list<double> coords);

    std::size_t dimension() const { return coords_.size(); }
    double operator[](std::size_t axis) const { return coords_[axis]; }
    const std::vector<double>& coords() const { return coords_; }

    // Checked in-place update of one coordinate.
    void set(std::size_t axis, double value);

    // Returns a copy with coordinate `axis` replaced by `value`; this is the
    // single-axis substitution every increment operator is built from.
    MultiPoint with_coord(std::size_t axis, double value) const;

    bool operator==(const MultiPoint& other) const = default;

  private:
    std::vector<double> coords_;
};

// Axis-parallel rectangle [lower, upper] inside the unit cube. Degenerate
// rectangles (zero width along some axis) are representable; operations that
// need positive volume reject them explicitly.
class HyperRect {
  public:
    HyperRect(MultiPoint lower, MultiPoint upper);

    std::size_t dimension() const { return lower_.dimension(); }
    const MultiPoint& lower() const { return lower_; }
    const MultiPoint& upper() const { return upper_; }
    double side(std::size_t axis) const { return upper_[axis] - lower_[axis]; }

    // True iff some axis has zero width.
    bool degenerate() const;

    // Largest side length.
    double max_side() const;

  private:
    MultiPoint lower_;
    MultiPoint upper_;
};

// The whole unit cube of the given dimension.
HyperRect unit_cube(std::size_t dimension);

} // namespace hypersew
