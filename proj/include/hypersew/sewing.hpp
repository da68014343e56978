#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hypersew/fields.hpp"
#include "hypersew/grid.hpp"
#include "hypersew/holder.hpp"
#include "hypersew/increment.hpp"

namespace hypersew {

struct SewLevel {
    unsigned level = 0;
    double mesh = 0.0;
    double value = 0.0;
};

struct SewResult {
    double value = 0.0;
    // Last successive-refinement difference; infinity when only one level ran.
    double error_estimate = 0.0;
    bool converged = false;
    std::vector<SewLevel> levels;
};

// Constants of the maximal inequality |limit - Xi(x,y)| <= C q_a(x,y) p_b(x,y)
// carried alongside an integrand for diagnostics (never enforced).
struct IntegrandBounds {
    HolderExponents q_exponents;
    HolderExponents p_exponents;
    double constant = 1.0;

    double gauge(const MultiPoint& x, const MultiPoint& y) const {
        return constant * q_gauge(x, y, q_exponents) * p_gauge(x, y, p_exponents);
    }
};

// Sum of Xi(lower, upper) over the partition's cells. The parallel kernel
// evaluates cells concurrently and reduces with a fixed-order pairwise sum,
// so the result is identical for every worker count.
double riemann_sum(const PairFunction& xi, const GridPartition& partition);

// Plain left-to-right accumulation kept as the serial reference.
double riemann_sum_serial(const PairFunction& xi, const GridPartition& partition);

// Default refinement depth per dimension (cell counts grow like 2^(k*level)).
unsigned default_max_level(std::size_t dimension);

// Dyadic-refinement limit of the Riemann sums of Xi over rect: evaluates
// levels 0, 1, ... and stops once successive sums differ by less than tol.
// converged=false (with the full level table) when max_level is exhausted.
SewResult sew(const PairFunction& xi, const HyperRect& rect, double tol, unsigned max_level);

// sew applied to the local Young integrand Y(x) * box(X; x, y).
SewResult young_integral(const Field& Y, const Field& X, const HyperRect& rect, double tol,
                         unsigned max_level);

// Indefinite integral Z(x) = int_0^x Y dX on the grid's nodes, accumulated
// from per-cell sewing values so box(Z; u, v) equals the integral over [u,v]
// exactly at grid resolution and Z vanishes on every face {x_i = 0}. Cells
// are refined internally only when both fields are closed forms; the grid is
// the finest available scale otherwise.
Field indefinite_integral(const Field& Y, const Field& X, const GridPartition& grid, double tol);

struct ConvergenceRow {
    unsigned level = 0;
    double mesh = 0.0;
    double value = 0.0;
    double err_vs_finest = 0.0;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    // Least-squares slope of log err against log mesh over the non-finest
    // levels; +infinity when every error vanishes.
    double fitted_order = 0.0;
};

ConvergenceStudy convergence_study(const PairFunction& xi, const HyperRect& rect, unsigned levels);

// JSON with fields value, error_estimate, converged, levels.
std::string sew_result_to_json(const SewResult& result);

// CSV with columns level,mesh,value,err_vs_finest.
std::string convergence_to_csv(const ConvergenceStudy& study);

} // namespace hypersew
