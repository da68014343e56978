#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace hypersew {

// Row-major indexing over a k-dimensional lattice (axis 0 slowest, last axis
// fastest). Shared by grids, sampled fields and the solver's node arrays so
// that every module agrees on the flat layout.
class TensorIndexer {
  public:
    TensorIndexer() = default;
    explicit TensorIndexer(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
        strides_.assign(dims_.size(), 1);
        if (!dims_.empty()) {
            for (std::size_t a = dims_.size() - 1; a-- > 0;)
                strides_[a] = strides_[a + 1] * dims_[a + 1];
            size_ = 1;
            for (std::size_t d : dims_) size_ *= d;
        }
    }

    std::size_t dimension() const { return dims_.size(); }
    std::size_t dim(std::size_t axis) const { return dims_[axis]; }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t size() const { return size_; }
    std::size_t stride(std::size_t axis) const { return strides_[axis]; }

    std::size_t flatten(const std::vector<std::size_t>& multi) const {
        std::size_t flat = 0;
        for (std::size_t a = 0; a < dims_.size(); ++a) flat += multi[a] * strides_[a];
        return flat;
    }

    void unflatten(std::size_t flat, std::vector<std::size_t>& multi) const {
        multi.resize(dims_.size());
        for (std::size_t a = 0; a < dims_.size(); ++a) {
            multi[a] = flat / strides_[a];
            flat %= strides_[a];
        }
    }

    std::vector<std::size_t> unflatten(std::size_t flat) const {
        std::vector<std::size_t> multi;
        unflatten(flat, multi);
        return multi;
    }

  private:
    std::vector<std::size_t> dims_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
};

} // namespace hypersew
