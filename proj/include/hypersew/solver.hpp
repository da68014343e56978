#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hypersew/fields.hpp"
#include "hypersew/grid.hpp"
#include "hypersew/holder.hpp"
#include "hypersew/point.hpp"

namespace hypersew {

// Scalar coefficient f with its derivative. Construction cross-checks df
// against central finite differences at 100 probe points and rejects
// mismatches beyond 1e-6. `bound` is a sup surrogate for |f|, |f'|, |f''|
// carried for diagnostics (0 = not supplied).
class Coefficient {
  public:
    Coefficient(std::function<double(double)> f, std::function<double(double)> df,
                double bound = 0.0);

    double f(double y) const { return f_(y); }
    double df(double y) const { return df_(y); }
    double bound() const { return bound_; }
    const std::function<double(double)>& f_fn() const { return f_; }

  private:
    std::function<double(double)> f_;
    std::function<double(double)> df_;
    double bound_;
};

// Fixed-point problem on the unit cube:
//   Y(x) = xi(x) + int_0^x f(Y(z)) X(dz)
// discretized on the grid's nodes. The grid must span [0,1]^k.
struct Problem {
    Coefficient coefficient;
    Field xi;
    Field x_field;
    GridPartition grid;
};

struct TileRecord {
    std::vector<std::size_t> offsets; // tile multi-index, per-axis
    unsigned iterations = 0;
};

struct Solution {
    Field y;
    std::vector<double> tile_size; // final tile extent per axis
    std::vector<TileRecord> tiles; // wavefront processing order
    double residual = 0.0;         // max-node gap of the fixed-point identity
};

// Picard iteration on one tile [rho, rho + T] whose corners are grid
// breakpoints. `boundary` is the tile's data field xi_rho, evaluable at every
// tile node; the returned field equals it exactly on the tile's lower faces.
// Starts from Y = xi_rho, updates through the corner-averaged Young sum of
// f(Y) against X at grid resolution, and stops when the max-node change
// drops below tol (or the coefficient values stop changing entirely).
// Throws ContractionFailure when max_iter sweeps do not converge, which
// signals the tile is too large.
Field picard_tile(const Problem& problem, const HyperRect& tile, const Field& boundary,
                  double tol, unsigned max_iter = 50);

// Global solve: covers [0,1]^k with tiles of the given size (which must
// divide 1 evenly per axis and align with grid breakpoints), processes them
// in wavefronts ordered by the sum of tile offsets so every tile's boundary
// data is assembled from xi and previously solved tiles, and glues the tile
// solutions into one field with exact node agreement across shared faces.
// On ContractionFailure the tile size halves globally and the solve
// restarts; halving below 2 grid cells per axis (or off the grid's
// breakpoints) raises NoContraction.
Solution solve(const Problem& problem, const std::vector<double>& initial_tile_size, double tol,
               unsigned max_iter = 50);

struct StabilityReport {
    double lhs = 0.0;            // ||Y1 - Y2||_beta estimate (box + axis parts)
    double rhs_origin_gap = 0.0; // |xi1(0) - xi2(0)|
    double rhs_xi_norm = 0.0;    // ||xi1 - xi2||_beta estimate
    double rhs_x_norm = 0.0;     // ||X1 - X2||_{beta,box} estimate
    double ratio = 0.0;          // lhs over the rhs sum; 0 when both vanish
};

// Continuity-of-the-solution-map diagnostics: compares two solved problems on
// the same grid (GridMismatch otherwise) through sampled beta-Holder norms.
StabilityReport stability_compare(const Problem& p1, const Problem& p2,
                                  const HolderExponents& beta, const Solution& s1,
                                  const Solution& s2, std::size_t pair_budget = 4000,
                                  std::uint64_t seed = 1);

// JSON with the tile size, per-tile iteration counts and the residual.
std::string solution_sidecar_json(const Solution& solution);

} // namespace hypersew
