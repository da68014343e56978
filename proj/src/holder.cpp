#include "hypersew/holder.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>

#include "hypersew/runtime.hpp"
#include "parallel_guard.hpp"

namespace hypersew {

namespace {

// Signed corner sum of tabulated node values over the box whose per-axis
// node indices run between lo[a] and hi[a].
double table_box(const std::vector<double>& table, const TensorIndexer& nodes,
                 const std::vector<std::size_t>& lo, const std::vector<std::size_t>& hi) {
    const std::size_t k = lo.size();
    double total = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        std::size_t flat = 0;
        int sign = 1;
        for (std::size_t a = 0; a < k; ++a) {
            if (mask & (std::size_t{1} << a)) {
                flat += lo[a] * nodes.stride(a);
                sign = -sign;
            } else {
                flat += hi[a] * nodes.stride(a);
            }
        }
        total += sign * table[flat];
    }
    return total;
}

std::vector<double> tabulate(const PointFn& f, const GridPartition& grid) {
    const TensorIndexer& nodes = grid.node_indexer();
    std::vector<double> table(nodes.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(nodes.size());
    ParallelGuard guard;
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        guard.run([&, i] {
            table[static_cast<std::size_t>(i)] = f(grid.node(static_cast<std::size_t>(i)));
        });
    }
    guard.rethrow();
    return table;
}

} // namespace

HolderExponents::HolderExponents(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw OutOfRange("exponent vector must be non-empty");
    for (double v : values_)
        if (!(v > 0.0)) throw OutOfRange("exponents must be positive");
}

bool HolderExponents::all_below_one() const {
    for (double v : values_)
        if (v >= 1.0) return false;
    return true;
}

double q_gauge(const MultiPoint& x, const MultiPoint& y, const HolderExponents& gamma) {
    if (x.dimension() != gamma.size() || y.dimension() != gamma.size())
        throw OutOfRange("gauge exponent count does not match point dimension");
    double prod = 1.0;
    for (std::size_t a = 0; a < gamma.size(); ++a)
        prod *= std::pow(std::abs(y[a] - x[a]), gamma[a]);
    return prod;
}

double p_gauge(const MultiPoint& x, const MultiPoint& y, const HolderExponents& gamma) {
    if (x.dimension() != gamma.size() || y.dimension() != gamma.size())
        throw OutOfRange("gauge exponent count does not match point dimension");
    double sum = 0.0;
    for (std::size_t a = 0; a < gamma.size(); ++a)
        sum += std::pow(std::abs(y[a] - x[a]), gamma[a]);
    return sum;
}

NormReport estimate_norms(const PointFn& f, const GridPartition& grid,
                          const HolderExponents& alpha, std::size_t pair_budget,
                          std::uint64_t seed) {
    const std::size_t k = grid.dimension();
    if (alpha.size() != k) throw OutOfRange("exponent count does not match grid dimension");
    if (!alpha.all_below_one())
        throw OutOfRange("field-norm exponents must lie in (0,1)");

    const TensorIndexer& nodes = grid.node_indexer();
    const std::vector<double> table = tabulate(f, grid);

    NormReport report;
    for (double v : table) report.sup_norm = std::max(report.sup_norm, std::abs(v));

    // Rectangular part, small scales: every cell's diagonal node pair.
    const TensorIndexer& cells = grid.cell_indexer();
    double box_max = 0.0;
    const std::ptrdiff_t ncells = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(static) num_threads(max_threads()) reduction(max : box_max)
    for (std::ptrdiff_t c = 0; c < ncells; ++c) {
        std::vector<std::size_t> lo = cells.unflatten(static_cast<std::size_t>(c));
        std::vector<std::size_t> hi(k);
        double q = 1.0;
        for (std::size_t a = 0; a < k; ++a) {
            hi[a] = lo[a] + 1;
            q *= std::pow(grid.axis(a)[hi[a]] - grid.axis(a)[lo[a]], alpha[a]);
        }
        box_max = std::max(box_max, std::abs(table_box(table, nodes, lo, hi)) / q);
    }
    std::size_t box_pairs = cells.size();

    // Rectangular part, large scales: seeded random non-degenerate node pairs.
    std::mt19937_64 rng(seed);
    std::vector<std::uniform_int_distribution<std::size_t>> pick;
    pick.reserve(k);
    for (std::size_t a = 0; a < k; ++a)
        pick.emplace_back(std::size_t{0}, grid.nodes_along(a) - 1);
    std::vector<std::size_t> lo(k), hi(k);
    for (std::size_t draw = 0; draw < pair_budget; ++draw) {
        bool degenerate = false;
        for (std::size_t a = 0; a < k; ++a) {
            const std::size_t u = pick[a](rng);
            const std::size_t v = pick[a](rng);
            lo[a] = std::min(u, v);
            hi[a] = std::max(u, v);
            if (u == v) degenerate = true;
        }
        if (degenerate) continue;
        double q = 1.0;
        for (std::size_t a = 0; a < k; ++a)
            q *= std::pow(grid.axis(a)[hi[a]] - grid.axis(a)[lo[a]], alpha[a]);
        box_max = std::max(box_max, std::abs(table_box(table, nodes, lo, hi)) / q);
        ++box_pairs;
    }
    if (box_pairs == 0) throw EmptySample("every sampled pair was degenerate");
    report.box_norm = box_max;
    report.pairs_evaluated = box_pairs;

    // Axis-direction part: exhaustive pair scan along every grid section.
    for (std::size_t a = 0; a < k; ++a) {
        const auto& bp = grid.axis(a);
        const std::size_t na = bp.size();
        const std::size_t stride = nodes.stride(a);
        double axis_max = 0.0;
        const std::ptrdiff_t total_nodes = static_cast<std::ptrdiff_t>(nodes.size());
#pragma omp parallel for schedule(static) num_threads(max_threads()) reduction(max : axis_max)
        for (std::ptrdiff_t base = 0; base < total_nodes; ++base) {
            const std::size_t b = static_cast<std::size_t>(base);
            if ((b / stride) % na != 0) continue; // not a section base
            for (std::size_t j1 = 0; j1 < na; ++j1)
                for (std::size_t j2 = j1 + 1; j2 < na; ++j2) {
                    const double num = std::abs(table[b + j2 * stride] - table[b + j1 * stride]);
                    axis_max = std::max(axis_max, num / std::pow(bp[j2] - bp[j1], alpha[a]));
                }
        }
        report.plus_norm += axis_max;
        report.pairs_evaluated += (nodes.size() / na) * (na * (na - 1) / 2);
    }
    return report;
}

bool sup_norm_bound_check(const PointFn& f, const GridPartition& grid, const NormReport& report) {
    const double anchor = std::abs(f(grid.rect().lower()));
    const double bound = anchor + report.plus_norm;
    return report.sup_norm <= bound + 1e-12 * std::max(1.0, bound);
}

} // namespace hypersew
