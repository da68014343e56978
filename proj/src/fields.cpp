#include "hypersew/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "hypersew/runtime.hpp"
#include "parallel_guard.hpp"

namespace hypersew {

namespace {

constexpr std::size_t kMaxSheetNodes = 128;
constexpr double kEigenvalueFloor = 1e-12; // relative to the covariance trace

std::size_t locate_node(const std::vector<double>& axis_nodes, double value, std::size_t axis) {
    auto it = std::lower_bound(axis_nodes.begin(), axis_nodes.end(), value - kCoordTol);
    if (it == axis_nodes.end() || std::abs(*it - value) > kCoordTol)
        throw NodeMismatch("coordinate " + std::to_string(value) + " on axis " +
                           std::to_string(axis) + " is not a grid node");
    return static_cast<std::size_t>(it - axis_nodes.begin());
}

} // namespace

struct Field::Impl {
    std::size_t dimension = 0;
    std::function<double(const MultiPoint&)> eval; // closed form when set
    std::shared_ptr<const GridPartition> grid;     // sampled otherwise
    std::vector<double> values;
};

Field::Field(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

Field Field::closed_form(std::size_t dimension, std::function<double(const MultiPoint&)> eval) {
    if (dimension == 0) throw OutOfRange("field dimension must be at least 1");
    if (!eval) throw OutOfRange("closed-form field needs an evaluator");
    auto impl = std::make_shared<Impl>();
    impl->dimension = dimension;
    impl->eval = std::move(eval);
    return Field(std::move(impl));
}

Field Field::grid_sampled(GridPartition grid, std::vector<double> node_values) {
    if (node_values.size() != grid.node_count())
        throw NodeMismatch("value count " + std::to_string(node_values.size()) +
                           " does not match node count " + std::to_string(grid.node_count()));
    auto impl = std::make_shared<Impl>();
    impl->dimension = grid.dimension();
    impl->grid = std::make_shared<const GridPartition>(std::move(grid));
    impl->values = std::move(node_values);
    return Field(std::move(impl));
}

std::size_t Field::dimension() const { return impl_->dimension; }

bool Field::is_grid_sampled() const { return impl_->grid != nullptr; }

const GridPartition& Field::grid() const {
    if (!is_grid_sampled()) throw NodeMismatch("closed-form field has no node grid");
    return *impl_->grid;
}

const std::vector<double>& Field::node_values() const {
    if (!is_grid_sampled()) throw NodeMismatch("closed-form field has no node values");
    return impl_->values;
}

double Field::operator()(const MultiPoint& p) const {
    if (p.dimension() != impl_->dimension)
        throw OutOfRange("evaluation point dimension does not match field dimension");
    if (!is_grid_sampled()) return impl_->eval(p);
    const GridPartition& g = *impl_->grid;
    std::size_t flat = 0;
    for (std::size_t a = 0; a < g.dimension(); ++a)
        flat += locate_node(g.axis(a), p[a], a) * g.node_indexer().stride(a);
    return impl_->values[flat];
}

Field product_field(std::vector<std::function<double(double)>> factors) {
    if (factors.empty()) throw OutOfRange("product field needs at least one factor");
    for (const auto& fn : factors)
        if (!fn) throw OutOfRange("product field factor is empty");
    const std::size_t k = factors.size();
    auto shared = std::make_shared<const std::vector<std::function<double(double)>>>(std::move(factors));
    return Field::closed_form(k, [shared](const MultiPoint& p) {
        double prod = 1.0;
        for (std::size_t a = 0; a < shared->size(); ++a) prod *= (*shared)[a](p[a]);
        return prod;
    });
}

Field weierstrass_field(const HolderExponents& alpha, unsigned terms) {
    if (!alpha.all_below_one()) throw OutOfRange("Weierstrass exponents must lie in (0,1)");
    std::vector<std::function<double(double)>> factors;
    factors.reserve(alpha.size());
    for (std::size_t a = 0; a < alpha.size(); ++a) {
        const double exponent = alpha[a];
        factors.push_back([exponent, terms](double t) {
            double sum = 0.0;
            for (unsigned n = 0; n <= terms; ++n)
                sum += std::pow(2.0, -static_cast<double>(n) * exponent) *
                       std::cos(2.0 * std::numbers::pi * std::pow(2.0, n) * t);
            return sum;
        });
    }
    return product_field(std::move(factors));
}

Field fbm_sheet(const SheetSpec& spec) {
    const std::size_t k = spec.grid.dimension();
    if (spec.hurst.size() != k)
        throw OutOfRange("Hurst exponent count does not match grid dimension");
    for (double h : spec.hurst)
        if (!(h > 0.0 && h < 1.0)) throw OutOfRange("Hurst exponents must lie in (0,1)");
    for (std::size_t a = 0; a < k; ++a)
        if (spec.grid.nodes_along(a) > kMaxSheetNodes)
            throw OutOfRange("sheet grids are capped at " + std::to_string(kMaxSheetNodes) +
                             " nodes per axis");

    // Factor the per-axis covariance r_H(s,t); rows of nodes with zero
    // variance are zeroed exactly so boundary pinning survives round-off.
    std::vector<Eigen::MatrixXd> factors;
    factors.reserve(k);
    for (std::size_t a = 0; a < k; ++a) {
        const auto& t = spec.grid.axis(a);
        const double h2 = 2.0 * spec.hurst[a];
        const std::size_t n = t.size();
        Eigen::MatrixXd cov(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    0.5 * (std::pow(t[i], h2) + std::pow(t[j], h2) -
                           std::pow(std::abs(t[i] - t[j]), h2));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        if (eig.info() != Eigen::Success)
            throw CovarianceError("eigendecomposition failed on axis " + std::to_string(a));
        const double tol = kEigenvalueFloor * std::max(cov.trace(), 1.0);
        Eigen::VectorXd lam = eig.eigenvalues();
        for (Eigen::Index i = 0; i < lam.size(); ++i) {
            if (lam(i) < -tol)
                throw CovarianceError("covariance on axis " + std::to_string(a) +
                                      " is not positive semidefinite");
            lam(i) = lam(i) < tol ? 0.0 : lam(i);
        }
        Eigen::MatrixXd L = eig.eigenvectors() * lam.cwiseSqrt().asDiagonal();
        for (std::size_t i = 0; i < n; ++i)
            if (cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) == 0.0)
                L.row(static_cast<Eigen::Index>(i)).setZero();
        factors.push_back(std::move(L));
    }

    const TensorIndexer& nodes = spec.grid.node_indexer();
    std::vector<double> values(nodes.size());
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& v : values) v = gauss(rng);

    // Apply the axis factor along each mode of the value tensor.
    std::vector<double> scratch(values.size());
    for (std::size_t a = 0; a < k; ++a) {
        const Eigen::MatrixXd& L = factors[a];
        const std::size_t n = nodes.dim(a);
        const std::size_t stride = nodes.stride(a);
        for (std::size_t base = 0; base < nodes.size(); ++base) {
            if ((base / stride) % n != 0) continue;
            for (std::size_t i = 0; i < n; ++i) {
                double sum = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                    sum += L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                           values[base + j * stride];
                scratch[base + i * stride] = sum;
            }
        }
        values.swap(scratch);
    }
    return Field::grid_sampled(spec.grid, std::move(values));
}

Field sample_on_grid(const Field& f, const GridPartition& grid) {
    if (f.dimension() != grid.dimension())
        throw OutOfRange("field and grid dimensions differ");
    std::vector<double> values(grid.node_count());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(values.size());
    ParallelGuard guard;
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        guard.run([&, i] {
            values[static_cast<std::size_t>(i)] = f(grid.node(static_cast<std::size_t>(i)));
        });
    }
    guard.rethrow();
    return Field::grid_sampled(grid, std::move(values));
}

Field random_polynomial_field(std::size_t dimension, unsigned degree, std::uint64_t seed) {
    if (dimension == 0) throw OutOfRange("field dimension must be at least 1");
    const TensorIndexer powers(std::vector<std::size_t>(dimension, degree + 1));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto coeffs = std::make_shared<std::vector<double>>(powers.size());
    for (double& c : *coeffs) c = unit(rng);
    return Field::closed_form(dimension, [coeffs, powers, dimension, degree](const MultiPoint& p) {
        // Tabulate x_a^e once, then accumulate monomials.
        std::vector<double> pw(dimension * (degree + 1));
        for (std::size_t a = 0; a < dimension; ++a) {
            pw[a * (degree + 1)] = 1.0;
            for (unsigned e = 1; e <= degree; ++e)
                pw[a * (degree + 1) + e] = pw[a * (degree + 1) + e - 1] * p[a];
        }
        double total = 0.0;
        std::vector<std::size_t> multi(dimension);
        for (std::size_t flat = 0; flat < coeffs->size(); ++flat) {
            powers.unflatten(flat, multi);
            double mono = (*coeffs)[flat];
            for (std::size_t a = 0; a < dimension; ++a) mono *= pw[a * (degree + 1) + multi[a]];
            total += mono;
        }
        return total;
    });
}

Field field_linear(double ca, const Field& a, double cb, const Field& b) {
    if (a.dimension() != b.dimension()) throw GridMismatch("field dimensions differ");
    if (a.is_grid_sampled() && b.is_grid_sampled()) {
        if (a.grid().axes() != b.grid().axes())
            throw GridMismatch("grid-sampled fields live on different node sets");
        std::vector<double> values(a.node_values().size());
        for (std::size_t i = 0; i < values.size(); ++i)
            values[i] = ca * a.node_values()[i] + cb * b.node_values()[i];
        return Field::grid_sampled(a.grid(), std::move(values));
    }
    if (a.is_grid_sampled()) return field_linear(cb, sample_on_grid(b, a.grid()), ca, a);
    if (b.is_grid_sampled()) return field_linear(ca, sample_on_grid(a, b.grid()), cb, b);
    Field fa = a, fb = b;
    return Field::closed_form(a.dimension(), [ca, fa, cb, fb](const MultiPoint& p) {
        return ca * fa(p) + cb * fb(p);
    });
}

PairFunction young_pair(const Field& Y, const Field& X) {
    if (Y.dimension() != X.dimension())
        throw OutOfRange("integrand and integrator dimensions differ");
    const PointFn py(Y), px(X);
    const std::size_t k = Y.dimension();
    const double weight = std::ldexp(1.0, -static_cast<int>(k));
    PairFunction out;
    out.dimension = k;
    out.eval = [py, px, weight, k](const MultiPoint& x, const MultiPoint& y) {
        // Corner-averaged germ: same sewing limit as the lower-corner form
        // (their difference is controlled by the same Holder gauges), exact
        // on affine-per-axis integrands and second-order on smooth ones, and
        // it only ever evaluates the fields at rectangle corners, which are
        // grid nodes during refinement of sampled data.
        double base = 0.0;
        std::vector<double> c(k);
        for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
            for (std::size_t a = 0; a < k; ++a) c[a] = ((mask >> a) & 1U) != 0 ? y[a] : x[a];
            base += py(MultiPoint(c));
        }
        return weight * base * box_increment(px, x, y);
    };
    return out;
}

} // namespace hypersew
