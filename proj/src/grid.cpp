#include "hypersew/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace hypersew {

namespace {

std::vector<std::size_t> cell_dims(const std::vector<std::vector<double>>& axes) {
    std::vector<std::size_t> dims(axes.size());
    for (std::size_t a = 0; a < axes.size(); ++a) dims[a] = axes[a].size() - 1;
    return dims;
}

std::vector<std::size_t> node_dims(const std::vector<std::vector<double>>& axes) {
    std::vector<std::size_t> dims(axes.size());
    for (std::size_t a = 0; a < axes.size(); ++a) dims[a] = axes[a].size();
    return dims;
}

} // namespace

GridPartition::GridPartition(std::vector<std::vector<double>> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw DegenerateDomain("partition needs at least one axis");
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        const auto& bp = axes_[a];
        if (bp.size() < 2)
            throw InvalidBreakpoint("axis " + std::to_string(a) +
                                    " needs at least two breakpoints");
        for (std::size_t j = 0; j + 1 < bp.size(); ++j)
            if (!(bp[j + 1] - bp[j] > kCoordTol))
                throw InvalidBreakpoint("breakpoints on axis " + std::to_string(a) +
                                        " are not strictly increasing at index " +
                                        std::to_string(j));
        if (!(bp.front() >= 0.0 && bp.back() <= 1.0))
            throw OutOfRange("breakpoints on axis " + std::to_string(a) +
                             " leave the unit cube");
    }
    cell_indexer_ = TensorIndexer(cell_dims(axes_));
    node_indexer_ = TensorIndexer(node_dims(axes_));
}

HyperRect GridPartition::rect() const {
    std::vector<double> lo(dimension()), hi(dimension());
    for (std::size_t a = 0; a < dimension(); ++a) {
        lo[a] = axes_[a].front();
        hi[a] = axes_[a].back();
    }
    return HyperRect(MultiPoint(std::move(lo)), MultiPoint(std::move(hi)));
}

HyperRect GridPartition::cell(std::size_t flat) const {
    std::vector<std::size_t> multi = cell_indexer_.unflatten(flat);
    std::vector<double> lo(dimension()), hi(dimension());
    for (std::size_t a = 0; a < dimension(); ++a) {
        lo[a] = axes_[a][multi[a]];
        hi[a] = axes_[a][multi[a] + 1];
    }
    return HyperRect(MultiPoint(std::move(lo)), MultiPoint(std::move(hi)));
}

MultiPoint GridPartition::node(std::size_t flat) const {
    std::vector<std::size_t> multi = node_indexer_.unflatten(flat);
    std::vector<double> coords(dimension());
    for (std::size_t a = 0; a < dimension(); ++a) coords[a] = axes_[a][multi[a]];
    return MultiPoint(std::move(coords));
}

double GridPartition::mesh() const {
    // Grid-like structure: the largest cell side equals the largest
    // breakpoint gap over all axes.
    double m = 0.0;
    for (const auto& bp : axes_)
        for (std::size_t j = 0; j + 1 < bp.size(); ++j) m = std::max(m, bp[j + 1] - bp[j]);
    return m;
}

std::size_t GridPartition::breakpoint_index(std::size_t axis, double value) const {
    if (axis >= dimension()) throw OutOfRange("axis index out of range");
    const auto& bp = axes_[axis];
    auto it = std::lower_bound(bp.begin(), bp.end(), value - kCoordTol);
    if (it == bp.end() || std::abs(*it - value) > kCoordTol)
        throw InvalidBreakpoint("coordinate " + std::to_string(value) +
                                " is not a breakpoint of axis " + std::to_string(axis));
    return static_cast<std::size_t>(it - bp.begin());
}

GridPartition dyadic_partition(const HyperRect& rect, const std::vector<unsigned>& levels) {
    if (levels.size() != rect.dimension())
        throw OutOfRange("level list does not match rectangle dimension");
    std::vector<std::size_t> cells(levels.size());
    for (std::size_t a = 0; a < levels.size(); ++a) cells[a] = std::size_t{1} << levels[a];
    return uniform_partition(rect, cells);
}

GridPartition uniform_partition(const HyperRect& rect, const std::vector<std::size_t>& cells) {
    if (cells.size() != rect.dimension())
        throw OutOfRange("cell-count list does not match rectangle dimension");
    if (rect.degenerate())
        throw DegenerateDomain("cannot partition a degenerate rectangle");
    std::vector<std::vector<double>> axes(cells.size());
    for (std::size_t a = 0; a < cells.size(); ++a) {
        if (cells[a] == 0) throw DegenerateDomain("zero cells requested on an axis");
        const double lo = rect.lower()[a];
        const double hi = rect.upper()[a];
        axes[a].resize(cells[a] + 1);
        for (std::size_t j = 0; j <= cells[a]; ++j)
            axes[a][j] = lo + (hi - lo) * (static_cast<double>(j) / static_cast<double>(cells[a]));
        axes[a].front() = lo;
        axes[a].back() = hi;
    }
    return GridPartition(std::move(axes));
}

std::vector<SignedCorner> corners(const HyperRect& rect) {
    const std::size_t k = rect.dimension();
    std::vector<SignedCorner> out;
    out.reserve(std::size_t{1} << k);
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        std::vector<double> coords(k);
        int sign = 1;
        for (std::size_t a = 0; a < k; ++a) {
            if (mask & (std::size_t{1} << a)) {
                coords[a] = rect.lower()[a];
                sign = -sign;
            } else {
                coords[a] = rect.upper()[a];
            }
        }
        out.push_back({MultiPoint(std::move(coords)), sign});
    }
    return out;
}

GridPartition remove_point(const GridPartition& partition, std::size_t axis, double z) {
    const std::size_t idx = partition.breakpoint_index(axis, z);
    const auto& bp = partition.axis(axis);
    if (idx == 0 || idx + 1 == bp.size())
        throw InvalidBreakpoint("cannot remove an endpoint breakpoint");
    std::vector<std::vector<double>> axes = partition.axes();
    axes[axis].erase(axes[axis].begin() + static_cast<std::ptrdiff_t>(idx));
    return GridPartition(std::move(axes));
}

} // namespace hypersew
