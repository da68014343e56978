#include "hypersew/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include <json.hpp>

#include "hypersew/runtime.hpp"
#include "parallel_guard.hpp"

namespace hypersew {

namespace {

// One tile's discrete data: local node lattice, tabulated X and boundary
// values, and a mask of nodes pinned to already-solved values.
struct TileData {
    TensorIndexer nodes;
    TensorIndexer cells;
    std::vector<double> x_values;
    std::vector<double> xi_values;
    std::vector<char> pinned;
};

struct TileOutcome {
    std::vector<double> y;
    std::vector<double> cell_contrib; // corner-averaged f(Y) times box(X), final iterate
    unsigned iterations = 0;
};

// Signed corner sum of a node table over one cell (lower corner `lo`).
double cell_box(const std::vector<double>& table, const TensorIndexer& nodes,
                const std::vector<std::size_t>& lo) {
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
                flat += (lo[a] + 1) * nodes.stride(a);
            }
        }
        total += sign * table[flat];
    }
    return total;
}

// Inclusive prefix sum of cell contributions onto node positions: out[m] is
// the sum of contrib over cells below node m, exactly zero on lower faces.
void accumulate_cells(const TensorIndexer& nodes, const TensorIndexer& cells,
                      const std::vector<double>& contrib, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t k = nodes.dimension();
    std::vector<std::size_t> multi(k);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        cells.unflatten(c, multi);
        std::size_t flat = 0;
        for (std::size_t a = 0; a < k; ++a) flat += (multi[a] + 1) * nodes.stride(a);
        out[flat] = contrib[c];
    }
    for (std::size_t a = 0; a < k; ++a) {
        const std::size_t stride = nodes.stride(a);
        const std::size_t na = nodes.dim(a);
        for (std::size_t i = 0; i < out.size(); ++i)
            if ((i / stride) % na != 0) out[i] += out[i - stride];
    }
}

TileOutcome run_picard(const TileData& tile, const std::function<double(double)>& f, double tol,
                       unsigned max_iter) {
    if (max_iter == 0) throw OutOfRange("max_iter must be at least 1");
    const std::size_t k = tile.nodes.dimension();
    const std::size_t n_nodes = tile.nodes.size();
    const std::size_t n_cells = tile.cells.size();

    // box(X) per cell is iteration independent.
    std::vector<double> box_x(n_cells);
    const std::ptrdiff_t ncells = static_cast<std::ptrdiff_t>(n_cells);
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (std::ptrdiff_t c = 0; c < ncells; ++c) {
        const std::vector<std::size_t> lo = tile.cells.unflatten(static_cast<std::size_t>(c));
        box_x[static_cast<std::size_t>(c)] = cell_box(tile.x_values, tile.nodes, lo);
    }

    TileOutcome result;
    result.y = tile.xi_values;
    std::vector<double> f_values(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) f_values[i] = f(result.y[i]);

    const double corner_weight = 1.0 / static_cast<double>(std::size_t{1} << k);
    std::vector<double> contrib(n_cells);
    std::vector<double> integral(n_nodes);
    std::vector<double> f_next(n_nodes);
    bool converged = false;
    double change = std::numeric_limits<double>::infinity();

    for (unsigned iter = 1; iter <= max_iter; ++iter) {
#pragma omp parallel for schedule(static) num_threads(max_threads())
        for (std::ptrdiff_t c = 0; c < ncells; ++c) {
            const std::vector<std::size_t> lo = tile.cells.unflatten(static_cast<std::size_t>(c));
            double favg = 0.0;
            for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
                std::size_t flat = 0;
                for (std::size_t a = 0; a < k; ++a)
                    flat += (lo[a] + ((mask >> a) & 1)) * tile.nodes.stride(a);
                favg += f_values[flat];
            }
            contrib[static_cast<std::size_t>(c)] =
                corner_weight * favg * box_x[static_cast<std::size_t>(c)];
        }
        accumulate_cells(tile.nodes, tile.cells, contrib, integral);

        change = 0.0;
        double f_change = 0.0;
        const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n_nodes);
#pragma omp parallel for schedule(static) num_threads(max_threads()) \
    reduction(max : change, f_change)
        for (std::ptrdiff_t i = 0; i < nn; ++i) {
            const std::size_t u = static_cast<std::size_t>(i);
            const double y_new =
                tile.pinned[u] ? result.y[u] : tile.xi_values[u] + integral[u];
            change = std::max(change, std::abs(y_new - result.y[u]));
            result.y[u] = y_new;
            f_next[u] = f(y_new);
            f_change = std::max(f_change, std::abs(f_next[u] - f_values[u]));
        }
        f_values.swap(f_next);
        result.iterations = iter;
        if (f_change == 0.0 || change < tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw ContractionFailure("Picard iteration did not contract within " +
                                 std::to_string(max_iter) + " sweeps (last change " +
                                 std::to_string(change) + "); the tile is too large");

    // Contributions consistent with the converged iterate, for gluing and
    // residual accounting downstream.
    result.cell_contrib.resize(n_cells);
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (std::ptrdiff_t c = 0; c < ncells; ++c) {
        const std::vector<std::size_t> lo = tile.cells.unflatten(static_cast<std::size_t>(c));
        double favg = 0.0;
        for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
            std::size_t flat = 0;
            for (std::size_t a = 0; a < k; ++a)
                flat += (lo[a] + ((mask >> a) & 1)) * tile.nodes.stride(a);
            favg += f_values[flat];
        }
        result.cell_contrib[static_cast<std::size_t>(c)] =
            corner_weight * favg * box_x[static_cast<std::size_t>(c)];
    }
    return result;
}

void check_unit_grid(const GridPartition& grid) {
    for (std::size_t a = 0; a < grid.dimension(); ++a) {
        if (std::abs(grid.axis(a).front()) > kCoordTol ||
            std::abs(grid.axis(a).back() - 1.0) > kCoordTol)
            throw OutOfRange("solver grids must span [0,1] on every axis");
    }
}

} // namespace

Coefficient::Coefficient(std::function<double(double)> f, std::function<double(double)> df,
                         double bound)
    : f_(std::move(f)), df_(std::move(df)), bound_(bound) {
    if (!f_ || !df_) throw OutOfRange("coefficient needs both f and df");
    // df must be the derivative of f: central differences at 100 probes.
    const double h = 1e-5;
    for (int i = 0; i < 100; ++i) {
        const double y = -2.0 + 4.0 * static_cast<double>(i) / 99.0;
        const double fd = (f_(y + h) - f_(y - h)) / (2.0 * h);
        if (std::abs(fd - df_(y)) > 1e-6)
            throw OutOfRange("df disagrees with the finite-difference derivative of f at y = " +
                             std::to_string(y));
    }
}

Field picard_tile(const Problem& problem, const HyperRect& tile, const Field& boundary,
                  double tol, unsigned max_iter) {
    const std::size_t k = problem.grid.dimension();
    if (tile.dimension() != k) throw OutOfRange("tile dimension does not match the grid");
    if (tile.degenerate()) throw DegenerateDomain("tile is degenerate");
    if (!(tol > 0.0)) throw OutOfRange("tolerance must be positive");

    // Local node lattice: the grid's breakpoints restricted to the tile.
    std::vector<std::vector<double>> axes(k);
    for (std::size_t a = 0; a < k; ++a) {
        const std::size_t lo = problem.grid.breakpoint_index(a, tile.lower()[a]);
        const std::size_t hi = problem.grid.breakpoint_index(a, tile.upper()[a]);
        const auto& bp = problem.grid.axis(a);
        axes[a].assign(bp.begin() + static_cast<std::ptrdiff_t>(lo),
                       bp.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    }
    GridPartition local(axes);

    TileData data;
    data.nodes = local.node_indexer();
    data.cells = local.cell_indexer();
    data.x_values.resize(data.nodes.size());
    data.xi_values.resize(data.nodes.size());
    data.pinned.assign(data.nodes.size(), 0);
    for (std::size_t i = 0; i < data.nodes.size(); ++i) {
        const MultiPoint node = local.node(i);
        data.x_values[i] = problem.x_field(node);
        data.xi_values[i] = boundary(node);
    }

    TileOutcome outcome = run_picard(data, problem.coefficient.f_fn(), tol, max_iter);
    return Field::grid_sampled(std::move(local), std::move(outcome.y));
}

Solution solve(const Problem& problem, const std::vector<double>& initial_tile_size, double tol,
               unsigned max_iter) {
    const std::size_t k = problem.grid.dimension();
    check_unit_grid(problem.grid);
    if (initial_tile_size.size() != k)
        throw OutOfRange("tile size needs one entry per axis");
    if (!(tol > 0.0)) throw OutOfRange("tolerance must be positive");
    for (double t : initial_tile_size) {
        if (!(t > 0.0 && t <= 1.0)) throw OutOfRange("tile sizes must lie in (0,1]");
        const double count = 1.0 / t;
        if (std::abs(count - std::round(count)) > 1e-9)
            throw OutOfRange("tile sizes must divide 1 evenly");
    }

    const GridPartition& grid = problem.grid;
    const TensorIndexer& nodes = grid.node_indexer();
    const TensorIndexer& cells = grid.cell_indexer();

    // Static tables reused across tile-size restarts.
    std::vector<double> xi0(nodes.size()), x_table(nodes.size());
    const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(nodes.size());
    ParallelGuard guard;
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (std::ptrdiff_t i = 0; i < nn; ++i) {
        guard.run([&, i] {
            const MultiPoint node = grid.node(static_cast<std::size_t>(i));
            xi0[static_cast<std::size_t>(i)] = problem.xi(node);
            x_table[static_cast<std::size_t>(i)] = problem.x_field(node);
        });
    }
    guard.rethrow();
    double xi0_sup = 0.0;
    for (double v : xi0) xi0_sup = std::max(xi0_sup, std::abs(v));

    std::vector<double> tile_size = initial_tile_size;
    for (;;) {
        // Tile lattice for the current size: offsets must hit breakpoints and
        // every tile must span at least 2 grid cells per axis.
        std::vector<std::size_t> tiles_per_axis(k);
        std::vector<std::vector<std::size_t>> tile_edges(k); // breakpoint index per offset
        bool aligned = true;
        bool wide_enough = true;
        for (std::size_t a = 0; a < k && aligned; ++a) {
            const std::size_t m = static_cast<std::size_t>(std::round(1.0 / tile_size[a]));
            tiles_per_axis[a] = m;
            tile_edges[a].resize(m + 1);
            for (std::size_t j = 0; j <= m && aligned; ++j) {
                const double edge = static_cast<double>(j) / static_cast<double>(m);
                try {
                    tile_edges[a][j] = grid.breakpoint_index(a, edge);
                } catch (const InvalidBreakpoint&) {
                    aligned = false;
                }
            }
            if (aligned)
                for (std::size_t j = 0; j < m; ++j)
                    if (tile_edges[a][j + 1] - tile_edges[a][j] < 2) wide_enough = false;
        }
        if (!aligned || !wide_enough)
            throw NoContraction(aligned
                                    ? "tile size underflow: tiles span fewer than 2 grid "
                                      "cells per axis"
                                    : "tile edges do not land on the grid's breakpoints");

        try {
            std::vector<TileRecord> tile_records;
            std::vector<double> y(nodes.size(), 0.0);
            std::vector<double> cell_contrib(cells.size(), 0.0);
            std::vector<double> integral(nodes.size(), 0.0); // prefix sums of cell_contrib
            bool warned = false;

            const TensorIndexer tile_indexer(tiles_per_axis);
            // Wavefront order: ascending sum of tile offsets, lexicographic
            // within a front. Every tile's lower-face data is then solved.
            std::vector<std::size_t> order(tile_indexer.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t lhs, std::size_t rhs) {
                const auto ml = tile_indexer.unflatten(lhs);
                const auto mr = tile_indexer.unflatten(rhs);
                const std::size_t sl = std::accumulate(ml.begin(), ml.end(), std::size_t{0});
                const std::size_t sr = std::accumulate(mr.begin(), mr.end(), std::size_t{0});
                return sl != sr ? sl < sr : lhs < rhs;
            });

            std::size_t front_sum = 0;
            for (std::size_t pos = 0; pos < order.size(); ++pos) {
                const std::vector<std::size_t> t = tile_indexer.unflatten(order[pos]);
                const std::size_t t_sum = std::accumulate(t.begin(), t.end(), std::size_t{0});
                if (t_sum != front_sum) {
                    // New wavefront: refresh the prefix-sum table so boundary
                    // assembly sees every finished tile.
                    accumulate_cells(nodes, cells, cell_contrib, integral);
                    front_sum = t_sum;
                }

                // Local lattice bounds (breakpoint indices) of this tile.
                std::vector<std::size_t> lo(k), hi(k), local_dims(k);
                for (std::size_t a = 0; a < k; ++a) {
                    lo[a] = tile_edges[a][t[a]];
                    hi[a] = tile_edges[a][t[a] + 1];
                    local_dims[a] = hi[a] - lo[a] + 1;
                }
                TileData data;
                data.nodes = TensorIndexer(local_dims);
                std::vector<std::size_t> cell_dims(k);
                for (std::size_t a = 0; a < k; ++a) cell_dims[a] = local_dims[a] - 1;
                data.cells = TensorIndexer(cell_dims);
                data.x_values.resize(data.nodes.size());
                data.xi_values.resize(data.nodes.size());
                data.pinned.assign(data.nodes.size(), 0);

                // Axes with a nonzero offset: boundary data mixes xi with the
                // already-accumulated integral below the tile.
                std::vector<std::size_t> theta;
                for (std::size_t a = 0; a < k; ++a)
                    if (t[a] > 0) theta.push_back(a);

                std::vector<std::size_t> local(k), global(k);
                for (std::size_t i = 0; i < data.nodes.size(); ++i) {
                    data.nodes.unflatten(i, local);
                    std::size_t gflat = 0;
                    for (std::size_t a = 0; a < k; ++a) {
                        global[a] = lo[a] + local[a];
                        gflat += global[a] * nodes.stride(a);
                    }
                    data.x_values[i] = x_table[gflat];

                    bool pin = false;
                    for (std::size_t a : theta)
                        if (local[a] == 0) pin = true;
                    if (pin) {
                        // Lower-face node of an interior tile: already solved.
                        data.pinned[i] = 1;
                        data.xi_values[i] = y[gflat];
                        continue;
                    }
                    // xi_tile(x) = xi(x) + sum over nonempty B in theta of
                    // (-1)^{|B|+1} integral(x with coords in B moved to the
                    // tile's lower corner): the solved part of int_0^x.
                    double value = xi0[gflat];
                    const std::size_t tb = theta.size();
                    for (std::size_t mask = 1; mask < (std::size_t{1} << tb); ++mask) {
                        std::size_t flat = 0;
                        int bits = 0;
                        for (std::size_t a = 0, pos = 0; a < k; ++a) {
                            std::size_t idx = global[a];
                            if (pos < tb && theta[pos] == a) {
                                if (mask & (std::size_t{1} << pos)) {
                                    idx = lo[a];
                                    ++bits;
                                }
                                ++pos;
                            }
                            flat += idx * nodes.stride(a);
                        }
                        value += (bits % 2 == 1 ? 1.0 : -1.0) * integral[flat];
                    }
                    data.xi_values[i] = value;
                }

                double xi_tile_sup = 0.0;
                for (double v : data.xi_values) xi_tile_sup = std::max(xi_tile_sup, std::abs(v));
                if (!warned && xi_tile_sup > 50.0 * std::max(1.0, xi0_sup)) {
                    std::cerr << "hypersew: warning: tile boundary data grew to "
                              << xi_tile_sup << " (initial data sup " << xi0_sup
                              << "); the uniform boundary-growth hypothesis looks violated\n";
                    warned = true;
                }

                TileOutcome outcome =
                    run_picard(data, problem.coefficient.f_fn(), 0.5 * tol, max_iter);

                // Glue: copy node values and final cell contributions back.
                for (std::size_t i = 0; i < data.nodes.size(); ++i) {
                    data.nodes.unflatten(i, local);
                    std::size_t gflat = 0;
                    for (std::size_t a = 0; a < k; ++a)
                        gflat += (lo[a] + local[a]) * nodes.stride(a);
                    y[gflat] = outcome.y[i];
                }
                std::vector<std::size_t> lc(k);
                for (std::size_t c = 0; c < data.cells.size(); ++c) {
                    data.cells.unflatten(c, lc);
                    std::size_t gcell = 0;
                    for (std::size_t a = 0; a < k; ++a)
                        gcell += (lo[a] + lc[a]) * cells.stride(a);
                    cell_contrib[gcell] = outcome.cell_contrib[c];
                }
                tile_records.push_back({t, outcome.iterations});
            }

            // Fixed-point residual of the glued solution.
            accumulate_cells(nodes, cells, cell_contrib, integral);
            double residual = 0.0;
            for (std::size_t i = 0; i < nodes.size(); ++i)
                residual = std::max(residual, std::abs(y[i] - (xi0[i] + integral[i])));
            return Solution{Field::grid_sampled(grid, std::move(y)), tile_size,
                            std::move(tile_records), residual};
        } catch (const ContractionFailure&) {
            for (double& t : tile_size) t *= 0.5;
        }
    }
}

StabilityReport stability_compare(const Problem& p1, const Problem& p2,
                                  const HolderExponents& beta, const Solution& s1,
                                  const Solution& s2, std::size_t pair_budget,
                                  std::uint64_t seed) {
    if (p1.grid.axes() != p2.grid.axes())
        throw GridMismatch("stability comparison needs a shared grid");
    if (s1.y.grid().axes() != p1.grid.axes() || s2.y.grid().axes() != p2.grid.axes())
        throw GridMismatch("solutions do not live on the problems' grid");
    const GridPartition& grid = p1.grid;

    StabilityReport report;
    const Field dy = field_difference(s1.y, s2.y);
    report.lhs = estimate_norms(PointFn(dy), grid, beta, pair_budget, seed).total();

    const Field dxi =
        field_difference(sample_on_grid(p1.xi, grid), sample_on_grid(p2.xi, grid));
    const MultiPoint origin = grid.rect().lower();
    report.rhs_origin_gap = std::abs(dxi(origin));
    report.rhs_xi_norm = estimate_norms(PointFn(dxi), grid, beta, pair_budget, seed).total();

    const Field dx =
        field_difference(sample_on_grid(p1.x_field, grid), sample_on_grid(p2.x_field, grid));
    report.rhs_x_norm = estimate_norms(PointFn(dx), grid, beta, pair_budget, seed).box_norm;

    const double rhs = report.rhs_origin_gap + report.rhs_xi_norm + report.rhs_x_norm;
    report.ratio = (report.lhs == 0.0 && rhs == 0.0) ? 0.0 : report.lhs / rhs;
    return report;
}

std::string solution_sidecar_json(const Solution& solution) {
    nlohmann::ordered_json j;
    j["tile_size"] = solution.tile_size;
    nlohmann::ordered_json tiles = nlohmann::ordered_json::array();
    for (const auto& rec : solution.tiles) {
        nlohmann::ordered_json row;
        row["tile"] = rec.offsets;
        row["iterations"] = rec.iterations;
        tiles.push_back(row);
    }
    j["iterations"] = tiles;
    j["residual"] = solution.residual;
    return j.dump(2);
}

} // namespace hypersew
