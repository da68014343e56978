#include "hypersew/point.hpp"

#include <string>
#include <utility>

namespace hypersew {

namespace {

void check_coord(double value, std::size_t axis) {
    if (!(value >= 0.0 && value <= 1.0))
        throw OutOfRange("coordinate " + std::to_string(value) + " on axis " +
                         std::to_string(axis) + " is outside [0,1]");
}

} // namespace

MultiPoint::MultiPoint(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw OutOfRange("a point needs at least one coordinate");
    for (std::size_t a = 0; a < coords_.size(); ++a) check_coord(coords_[a], a);
}

MultiPoint::MultiPoint(std::initializer_list<double> coords)
    : MultiPoint(std::vector<double>(coords)) {}

void MultiPoint::set(std::size_t axis, double value) {
    check_coord(value, axis);
    coords_.at(axis) = value;
}

MultiPoint MultiPoint::with_coord(std::size_t axis, double value) const {
    MultiPoint copy = *this;
    copy.set(axis, value);
    return copy;
}

HyperRect::HyperRect(MultiPoint lower, MultiPoint upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.dimension() != upper_.dimension())
        throw OutOfRange("rectangle corners have different dimensions");
    for (std::size_t a = 0; a < lower_.dimension(); ++a)
        if (lower_[a] > upper_[a])
            throw OutOfRange("rectangle is inverted on axis " + std::to_string(a));
}

bool HyperRect::degenerate() const {
    for (std::size_t a = 0; a < dimension(); ++a)
        if (side(a) == 0.0) return true;
    return false;
}

double HyperRect::max_side() const {
    double m = 0.0;
    for (std::size_t a = 0; a < dimension(); ++a)
        if (side(a) > m) m = side(a);
    return m;
}

HyperRect unit_cube(std::size_t dimension) {
    return HyperRect(MultiPoint(std::vector<double>(dimension, 0.0)),
                     MultiPoint(std::vector<double>(dimension, 1.0)));
}

} // namespace hypersew
