#include "hypersew/increment.hpp"

#include <algorithm>
#include <bit>
#include <string>
#include <utility>

namespace hypersew {

namespace {

void check_dimension(const MultiPoint& p, std::size_t k, const char* what) {
    if (p.dimension() != k)
        throw OutOfRange(std::string(what) + " has dimension " +
                         std::to_string(p.dimension()) + ", expected " + std::to_string(k));
}

void check_midpoint(const AxisSet& theta, const MultiPoint& z, const MultiPoint& x,
                    const MultiPoint& y) {
    for (std::size_t pos = 0; pos < theta.size(); ++pos) {
        const std::size_t a = theta[pos];
        const double lo = std::min(x[a], y[a]);
        const double hi = std::max(x[a], y[a]);
        if (z[a] < lo || z[a] > hi)
            throw OutOfRange("midpoint coordinate on axis " + std::to_string(a) +
                             " lies outside [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]");
    }
}

// (prod_{j in axes} psi_j(z) f)(x, y): expanding the product, every subset A
// of the axes routes its coordinates of z into x, the complement into y.
double psi_product_apply(const std::vector<std::size_t>& axes, const MultiPoint& z,
                         const PairFunction& f, const MultiPoint& x, const MultiPoint& y) {
    const std::size_t m = axes.size();
    double total = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
        std::vector<double> xc = x.coords();
        std::vector<double> yc = y.coords();
        for (std::size_t pos = 0; pos < m; ++pos) {
            const std::size_t a = axes[pos];
            if (mask & (std::size_t{1} << pos))
                xc[a] = z[a];
            else
                yc[a] = z[a];
        }
        total += f(MultiPoint(std::move(xc)), MultiPoint(std::move(yc)));
    }
    return total;
}

std::vector<std::size_t> mask_to_axes(const AxisSet& theta, std::size_t mask) {
    std::vector<std::size_t> axes;
    for (std::size_t pos = 0; pos < theta.size(); ++pos)
        if (mask & (std::size_t{1} << pos)) axes.push_back(theta[pos]);
    return axes;
}

} // namespace

AxisSet::AxisSet(std::vector<std::size_t> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw OutOfRange("axis set must be non-empty");
    for (std::size_t pos = 0; pos + 1 < axes_.size(); ++pos)
        if (axes_[pos] >= axes_[pos + 1])
            throw OutOfRange("axis set must be strictly increasing");
}

AxisSet AxisSet::full(std::size_t dimension) {
    std::vector<std::size_t> axes(dimension);
    for (std::size_t a = 0; a < dimension; ++a) axes[a] = a;
    return AxisSet(std::move(axes));
}

double box_increment(const PointFn& f, const MultiPoint& x, const MultiPoint& y) {
    const std::size_t k = x.dimension();
    check_dimension(y, k, "second corner");
    double total = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        std::vector<double> coords(k);
        int sign = 1;
        for (std::size_t a = 0; a < k; ++a) {
            if (mask & (std::size_t{1} << a)) {
                coords[a] = x[a];
                sign = -sign;
            } else {
                coords[a] = y[a];
            }
        }
        total += sign * f(MultiPoint(std::move(coords)));
    }
    return total;
}

double box_increment(const PointFn& f, const HyperRect& rect) {
    return box_increment(f, rect.lower(), rect.upper());
}

PairFunction psi(std::size_t axis, const MultiPoint& z, const PairFunction& f) {
    if (axis >= f.dimension) throw OutOfRange("psi axis exceeds pair-function dimension");
    check_dimension(z, f.dimension, "substitution point");
    const double zi = z[axis];
    auto inner = f.eval;
    PairFunction out;
    out.dimension = f.dimension;
    out.eval = [axis, zi, inner](const MultiPoint& x, const MultiPoint& y) {
        return inner(x, y.with_coord(axis, zi)) + inner(x.with_coord(axis, zi), y);
    };
    return out;
}

double delta_axis(std::size_t axis, const MultiPoint& z, const PairFunction& f,
                  const MultiPoint& x, const MultiPoint& y) {
    return delta_theta_direct(AxisSet({axis}), z, f, x, y);
}

double delta_theta_direct(const AxisSet& theta, const MultiPoint& z, const PairFunction& f,
                          const MultiPoint& x, const MultiPoint& y) {
    const std::size_t k = f.dimension;
    check_dimension(x, k, "first argument");
    check_dimension(y, k, "second argument");
    check_dimension(z, k, "substitution point");
    if (theta.max_axis() >= k) throw OutOfRange("axis set exceeds pair-function dimension");
    check_midpoint(theta, z, x, y);

    const std::size_t m = theta.size();
    double total = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
        const std::vector<std::size_t> axes = mask_to_axes(theta, mask);
        const int sign = (std::popcount(mask) % 2 == 0) ? 1 : -1;
        total += sign * psi_product_apply(axes, z, f, x, y);
    }
    return total;
}

double delta_theta_decomposed(const AxisSet& theta, const MultiPoint& z, const PairFunction& f,
                              const MultiPoint& x, const MultiPoint& y) {
    const std::size_t k = f.dimension;
    check_dimension(x, k, "first argument");
    check_dimension(y, k, "second argument");
    check_dimension(z, k, "substitution point");
    if (theta.max_axis() >= k) throw OutOfRange("axis set exceeds pair-function dimension");
    check_midpoint(theta, z, x, y);

    const std::size_t m = theta.size();
    double total = 0.0;
    for (std::size_t tilde = 1; tilde < (std::size_t{1} << m); ++tilde) {
        const int outer_sign = (std::popcount(tilde) % 2 == 1) ? 1 : -1;
        for (std::size_t pos = 0; pos < m; ++pos) {
            if (!(tilde & (std::size_t{1} << pos))) continue;
            const std::size_t axis_i = theta[pos];
            // Axes of the subset strictly after the position of i.
            std::vector<std::size_t> later;
            for (std::size_t q = pos + 1; q < m; ++q)
                if (tilde & (std::size_t{1} << q)) later.push_back(theta[q]);
            const double at_xy = psi_product_apply(later, z, f, x, y);
            const double at_xv = psi_product_apply(later, z, f, x, y.with_coord(axis_i, z[axis_i]));
            const double at_uy = psi_product_apply(later, z, f, x.with_coord(axis_i, z[axis_i]), y);
            total += outer_sign * (at_xy - at_xv - at_uy);
        }
    }
    return total;
}

PairFunction young_pair(const PointFn& Y, const PointFn& X, std::size_t dimension) {
    PairFunction out;
    out.dimension = dimension;
    out.eval = [Y, X](const MultiPoint& x, const MultiPoint& y) {
        return Y(x) * box_increment(X, x, y);
    };
    return out;
}

} // namespace hypersew
