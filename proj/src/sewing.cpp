#include "hypersew/sewing.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include <json.hpp>

#include "hypersew/runtime.hpp"
#include "parallel_guard.hpp"

namespace hypersew {

namespace {

// Fixed-order pairwise reduction; independent of how the terms were filled.
double pairwise_sum(const double* terms, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += terms[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(terms, half) + pairwise_sum(terms + half, n - half);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

double riemann_sum(const PairFunction& xi, const GridPartition& partition) {
    if (xi.dimension != partition.dimension())
        throw OutOfRange("integrand and partition dimensions differ");
    std::vector<double> terms(partition.cell_count());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(terms.size());
    ParallelGuard guard;
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (std::ptrdiff_t c = 0; c < n; ++c) {
        guard.run([&, c] {
            const HyperRect cell = partition.cell(static_cast<std::size_t>(c));
            terms[static_cast<std::size_t>(c)] = xi(cell.lower(), cell.upper());
        });
    }
    guard.rethrow();
    return pairwise_sum(terms.data(), terms.size());
}

double riemann_sum_serial(const PairFunction& xi, const GridPartition& partition) {
    if (xi.dimension != partition.dimension())
        throw OutOfRange("integrand and partition dimensions differ");
    double total = 0.0;
    for (std::size_t c = 0; c < partition.cell_count(); ++c) {
        const HyperRect cell = partition.cell(c);
        total += xi(cell.lower(), cell.upper());
    }
    return total;
}

unsigned default_max_level(std::size_t dimension) {
    switch (dimension) {
        case 1: return 20;
        case 2: return 10;
        case 3: return 6;
        default: return 4;
    }
}

SewResult sew(const PairFunction& xi, const HyperRect& rect, double tol, unsigned max_level) {
    if (!(tol > 0.0)) throw OutOfRange("sewing tolerance must be positive");
    if (rect.degenerate()) throw DegenerateDomain("cannot sew over a degenerate rectangle");

    SewResult result;
    result.error_estimate = std::numeric_limits<double>::infinity();
    double prev = 0.0;
    for (unsigned level = 0; level <= max_level; ++level) {
        const GridPartition partition =
            dyadic_partition(rect, std::vector<unsigned>(rect.dimension(), level));
        const double value = riemann_sum(xi, partition);
        result.levels.push_back({level, partition.mesh(), value});
        result.value = value;
        if (level > 0) {
            result.error_estimate = std::abs(value - prev);
            if (result.error_estimate < tol) {
                result.converged = true;
                return result;
            }
        }
        prev = value;
    }
    return result;
}

SewResult young_integral(const Field& Y, const Field& X, const HyperRect& rect, double tol,
                         unsigned max_level) {
    return sew(young_pair(Y, X), rect, tol, max_level);
}

Field indefinite_integral(const Field& Y, const Field& X, const GridPartition& grid, double tol) {
    const std::size_t k = grid.dimension();
    if (Y.dimension() != k || X.dimension() != k)
        throw OutOfRange("fields and grid dimensions differ");
    if (!(tol > 0.0)) throw OutOfRange("tolerance must be positive");
    for (std::size_t a = 0; a < k; ++a)
        if (std::abs(grid.axis(a).front()) > kCoordTol)
            throw OutOfRange("accumulation grid must start at the origin");

    const PairFunction xi = young_pair(Y, X);
    const bool refinable = !Y.is_grid_sampled() && !X.is_grid_sampled();
    const double cell_tol = tol / static_cast<double>(grid.cell_count());
    const unsigned depth = default_max_level(k);

    std::vector<double> cell_values(grid.cell_count());
    const std::ptrdiff_t ncells = static_cast<std::ptrdiff_t>(cell_values.size());
    ParallelGuard guard;
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (std::ptrdiff_t c = 0; c < ncells; ++c) {
        guard.run([&, c] {
            const HyperRect cell = grid.cell(static_cast<std::size_t>(c));
            if (refinable)
                cell_values[static_cast<std::size_t>(c)] = sew(xi, cell, cell_tol, depth).value;
            else
                cell_values[static_cast<std::size_t>(c)] = xi(cell.lower(), cell.upper());
        });
    }
    guard.rethrow();

    // Scatter cell values to their upper-corner nodes, then run an inclusive
    // prefix sum along every axis; faces {x_i = 0} stay exactly zero.
    const TensorIndexer& nodes = grid.node_indexer();
    const TensorIndexer& cells = grid.cell_indexer();
    std::vector<double> z(nodes.size(), 0.0);
    std::vector<std::size_t> multi(k);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        cells.unflatten(c, multi);
        std::size_t flat = 0;
        for (std::size_t a = 0; a < k; ++a) flat += (multi[a] + 1) * nodes.stride(a);
        z[flat] = cell_values[c];
    }
    for (std::size_t a = 0; a < k; ++a) {
        const std::size_t stride = nodes.stride(a);
        const std::size_t na = nodes.dim(a);
        for (std::size_t i = 0; i < z.size(); ++i)
            if ((i / stride) % na != 0) z[i] += z[i - stride];
    }
    return Field::grid_sampled(grid, std::move(z));
}

ConvergenceStudy convergence_study(const PairFunction& xi, const HyperRect& rect,
                                   unsigned levels) {
    if (levels < 3) throw OutOfRange("a convergence study needs at least 3 levels");
    if (rect.degenerate()) throw DegenerateDomain("cannot study a degenerate rectangle");

    ConvergenceStudy study;
    for (unsigned level = 0; level < levels; ++level) {
        const GridPartition partition =
            dyadic_partition(rect, std::vector<unsigned>(rect.dimension(), level));
        study.rows.push_back({level, partition.mesh(), riemann_sum(xi, partition), 0.0});
    }
    const double finest = study.rows.back().value;
    for (auto& row : study.rows) row.err_vs_finest = std::abs(row.value - finest);

    // Slope of log err vs log mesh over the non-finest levels with nonzero
    // error; +infinity signals exact agreement at every level.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t used = 0;
    for (std::size_t r = 0; r + 1 < study.rows.size(); ++r) {
        if (study.rows[r].err_vs_finest <= 0.0) continue;
        const double lx = std::log(study.rows[r].mesh);
        const double ly = std::log(study.rows[r].err_vs_finest);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++used;
    }
    if (used < 2) {
        study.fitted_order = std::numeric_limits<double>::infinity();
    } else {
        const double n = static_cast<double>(used);
        study.fitted_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return study;
}

std::string sew_result_to_json(const SewResult& result) {
    nlohmann::ordered_json j;
    j["value"] = result.value;
    j["error_estimate"] = result.error_estimate;
    j["converged"] = result.converged;
    nlohmann::ordered_json levels = nlohmann::ordered_json::array();
    for (const auto& lvl : result.levels) {
        nlohmann::ordered_json row;
        row["level"] = lvl.level;
        row["mesh"] = lvl.mesh;
        row["value"] = lvl.value;
        levels.push_back(row);
    }
    j["levels"] = levels;
    return j.dump(2);
}

std::string convergence_to_csv(const ConvergenceStudy& study) {
    std::string out = "level,mesh,value,err_vs_finest\n";
    for (const auto& row : study.rows) {
        out += std::to_string(row.level);
        out += ',';
        out += format_double(row.mesh);
        out += ',';
        out += format_double(row.value);
        out += ',';
        out += format_double(row.err_vs_finest);
        out += '\n';
    }
    return out;
}

} // namespace hypersew
