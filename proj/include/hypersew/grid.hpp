#pragma once

#include <cstddef>
#include <vector>

#include "hypersew/point.hpp"
#include "hypersew/tensor_index.hpp"

namespace hypersew {

// One corner of a hyper-rectangle together with the parity sign it carries in
// the generalized increment: a corner taking m coordinates from the lower
// point contributes (-1)^m.
struct SignedCorner {
    MultiPoint point;
    int sign;
};

// Grid-like partition of a hyper-rectangle: the product of one sorted
// breakpoint list per axis. Immutable after construction; mutating operations
// return new partitions.
class GridPartition {
  public:
    // axes[i] must start at the rectangle's lower coordinate, end at the
    // upper one, and be strictly increasing (gaps larger than kCoordTol).
    explicit GridPartition(std::vector<std::vector<double>> axes);

    std::size_t dimension() const { return axes_.size(); }
    const std::vector<double>& axis(std::size_t i) const { return axes_[i]; }
    const std::vector<std::vector<double>>& axes() const { return axes_; }

    // Bounding rectangle spanned by the breakpoint extremes.
    HyperRect rect() const;

    std::size_t cells_along(std::size_t axis) const { return axes_[axis].size() - 1; }
    std::size_t cell_count() const { return cell_indexer_.size(); }
    const TensorIndexer& cell_indexer() const { return cell_indexer_; }
    HyperRect cell(std::size_t flat) const;

    std::size_t nodes_along(std::size_t axis) const { return axes_[axis].size(); }
    std::size_t node_count() const { return node_indexer_.size(); }
    const TensorIndexer& node_indexer() const { return node_indexer_; }
    MultiPoint node(std::size_t flat) const;

    // Mesh of the partition: the largest cell side over all cells and axes.
    double mesh() const;

    // Index of the breakpoint equal to `value` (within kCoordTol) on `axis`;
    // throws InvalidBreakpoint when absent.
    std::size_t breakpoint_index(std::size_t axis, double value) const;

  private:
    std::vector<std::vector<double>> axes_;
    TensorIndexer cell_indexer_;
    TensorIndexer node_indexer_;
};

// Partition splitting axis i into 2^levels[i] equal cells. Throws
// DegenerateDomain when the rectangle has zero width along some axis.
GridPartition dyadic_partition(const HyperRect& rect, const std::vector<unsigned>& levels);

// Partition splitting axis i into cells[i] equal cells (cells[i] >= 1).
GridPartition uniform_partition(const HyperRect& rect, const std::vector<std::size_t>& cells);

// All 2^k corners of the rectangle with their increment signs. Enumeration
// order: bit j of the corner index selects the lower coordinate on axis j,
// index ascending, so the upper corner (+1) comes first and the lower corner
// ((-1)^k) last.
std::vector<SignedCorner> corners(const HyperRect& rect);

// New partition with interior breakpoint z removed from the given axis.
// z must match an interior breakpoint within kCoordTol.
GridPartition remove_point(const GridPartition& partition, std::size_t axis, double z);

} // namespace hypersew
