#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <hypersew/errors.hpp>
#include <hypersew/grid.hpp>
#include <hypersew/increment.hpp>
#include <hypersew/point.hpp>

#include "oracles.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace hypersew;

namespace {

PointFn wrap(const oracles::RawFn& raw) {
    return [raw](const MultiPoint& p) { return raw(p.coords()); };
}

PairFunction pair_from(std::size_t dim,
                       std::function<double(const MultiPoint&, const MultiPoint&)> eval) {
    return PairFunction{dim, std::move(eval)};
}

} // namespace

TEST_CASE("increment of the coordinate product over the unit square") {
    PointFn f = [](const MultiPoint& p) { return p[0] * p[1]; };
    CHECK(box_increment(f, unit_cube(2)) == doctest::Approx(1.0).epsilon(1e-15));
    // sub-rectangle [(0.25,0.5),(0.75,1.0)] -> 0.5 * 0.5 = 0.25
    HyperRect r(MultiPoint({0.25, 0.5}), MultiPoint({0.75, 1.0}));
    CHECK(box_increment(f, r) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("increment vanishes on degenerate rectangles") {
    PointFn f = [](const MultiPoint& p) { return std::sin(7.0 * p[0]) + p[1] * p[1]; };
    HyperRect thin(MultiPoint({0.3, 0.0}), MultiPoint({0.3, 1.0}));
    CHECK(box_increment(f, thin) == 0.0);
}

TEST_CASE("increment vanishes for fields constant in some axis") {
    PointFn f = [](const MultiPoint& p) { return std::exp(p[0]); }; // ignores axis 1
    HyperRect r(MultiPoint({0.1, 0.2}), MultiPoint({0.9, 0.8}));
    CHECK(box_increment(f, r) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("product fields factor into per-axis differences") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        auto s = oracles::random_pair(3, rng);
        PointFn f = [](const MultiPoint& p) {
            return std::sin(3.0 * p[0]) * std::exp(p[1]) * (p[2] * p[2] + 1.0);
        };
        const double expected = (std::sin(3.0 * s.y[0]) - std::sin(3.0 * s.x[0])) *
                                (std::exp(s.y[1]) - std::exp(s.x[1])) *
                                (s.y[2] * s.y[2] - s.x[2] * s.x[2]);
        CHECK(box_increment(f, MultiPoint(s.x), MultiPoint(s.y)) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("corner sum agrees with the recursive axis-peeling oracle") {
    std::mt19937_64 rng(42);
    int done = 0;
    for (std::size_t k = 1; k <= 4; ++k) {
        for (int trial = 0; trial < 250; ++trial) {
            auto poly = oracles::Polynomial::random(k, 3, 1000 * k + static_cast<unsigned>(trial));
            oracles::RawFn raw = [&poly](const std::vector<double>& p) { return poly(p); };
            auto s = oracles::random_pair(k, rng);
            const double lib = box_increment(wrap(raw), MultiPoint(s.x), MultiPoint(s.y));
            const double ref = oracles::box_recursive(raw, s.x, s.y);
            CHECK(lib == doctest::Approx(ref).epsilon(1e-12));
            ++done;
        }
    }
    CHECK(done == 1000);
}

TEST_CASE("corner sum matches hand-expanded formulas in one and two dimensions") {
    oracles::RawFn raw = [](const std::vector<double>& p) {
        double v = 1.0;
        for (double c : p) v *= std::cos(2.0 * c) + c;
        return v;
    };
    CHECK(box_increment(wrap(raw), MultiPoint({0.2}), MultiPoint({0.9})) ==
          doctest::Approx(oracles::box_k1(raw, 0.2, 0.9)).epsilon(1e-14));
    CHECK(box_increment(wrap(raw), MultiPoint({0.2, 0.1}), MultiPoint({0.9, 0.7})) ==
          doctest::Approx(oracles::box_k2(raw, {0.2, 0.1}, {0.9, 0.7})).epsilon(1e-14));
}

TEST_CASE("two-point form is unordered: swapping one axis flips the sign") {
    PointFn f = [](const MultiPoint& p) { return std::sin(p[0] + 2.0 * p[1]); };
    MultiPoint x({0.1, 0.2}), y({0.8, 0.9});
    const double fwd = box_increment(f, x, y);
    // swap on axis 0 only: the increment picks up one sign flip
    MultiPoint xs = x.with_coord(0, 0.8), ys = y.with_coord(0, 0.1);
    CHECK(box_increment(f, xs, ys) == doctest::Approx(-fwd).epsilon(1e-13));
    // swapping both axes restores the sign
    CHECK(box_increment(f, y, x) == doctest::Approx(fwd).epsilon(1e-13));
}

TEST_CASE("increment is additive under an axis split") {
    std::mt19937_64 rng(7);
    PointFn f = [](const MultiPoint& p) {
        return std::sin(4.0 * p[0]) * std::log1p(p[1]) + p[0] * p[1] * p[1];
    };
    for (int trial = 0; trial < 50; ++trial) {
        auto s = oracles::random_pair(2, rng);
        for (std::size_t axis = 0; axis < 2; ++axis) {
            MultiPoint x(s.x), y(s.y);
            const double whole = box_increment(f, x, y);
            const double left = box_increment(f, x, y.with_coord(axis, s.z[axis]));
            const double right = box_increment(f, x.with_coord(axis, s.z[axis]), y);
            CHECK(whole == doctest::Approx(left + right).epsilon(1e-12));
        }
    }
}

TEST_CASE("substitution average: one-dimensional additivity example") {
    // f(x, y) = y_1 - x_1 is additive, so psi_1(z) reproduces it exactly.
    PairFunction f = pair_from(1, [](const MultiPoint& x, const MultiPoint& y) {
        return y[0] - x[0];
    });
    MultiPoint z({0.5});
    PairFunction g = psi(0, z, f);
    CHECK(g(MultiPoint({0.1}), MultiPoint({0.9})) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(delta_axis(0, z, f, MultiPoint({0.1}), MultiPoint({0.9})) ==
          doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("single-axis defect of the one-dimensional Young pair") {
    // Y = X = identity: Xi(x,y) = x (y - x); delta at z gives -(z-x)(y-z).
    PointFn id = [](const MultiPoint& p) { return p[0]; };
    PairFunction xi = young_pair(id, id, 1);
    const double d = delta_axis(0, MultiPoint({0.5}), xi, MultiPoint({0.0}), MultiPoint({1.0}));
    CHECK(d == doctest::Approx(-0.25).epsilon(1e-15));
}

TEST_CASE("midpoint must lie between the endpoints on every defect axis") {
    PointFn id = [](const MultiPoint& p) { return p[0]; };
    PairFunction xi = young_pair(id, id, 1);
    CHECK_THROWS_AS(
        delta_axis(0, MultiPoint({0.05}), xi, MultiPoint({0.1}), MultiPoint({0.9})),
        OutOfRange);
    // z only needs to be admissible on the defect axes, not elsewhere
    PointFn g2 = [](const MultiPoint& p) { return p[0] * p[1]; };
    PairFunction xi2 = young_pair(g2, g2, 2);
    AxisSet only0({0});
    CHECK_NOTHROW(delta_theta_direct(only0, MultiPoint({0.5, 0.99}), xi2,
                                     MultiPoint({0.1, 0.2}), MultiPoint({0.9, 0.8})));
}

TEST_CASE("two-axis defect matches the hand-expanded nine-term sum") {
    PointFn yf = [](const MultiPoint& p) { return p[0] * p[1]; };
    PointFn xf = [](const MultiPoint& p) { return (p[0] + 1.0) * (2.0 * p[1] + 0.5); };
    PairFunction xi = young_pair(yf, xf, 2);
    MultiPoint x({0.1, 0.2}), y({0.9, 0.8}), z({0.4, 0.6});

    auto sub = [](const MultiPoint& p, const MultiPoint& zz, unsigned mask) {
        MultiPoint out = p;
        if (mask & 1u) out.set(0, zz[0]);
        if (mask & 2u) out.set(1, zz[1]);
        return out;
    };
    // (I - psi_1)(I - psi_2) f = f
    //   - [f(x, y[1->z]) + f(x[1->z], y)]
    //   - [f(x, y[2->z]) + f(x[2->z], y)]
    //   + [f(x, y[12->z]) + f(x[1->z], y[2->z]) + f(x[2->z], y[1->z]) + f(x[12->z], y)]
    const double hand = xi(x, y)
        - (xi(x, sub(y, z, 1)) + xi(sub(x, z, 1), y))
        - (xi(x, sub(y, z, 2)) + xi(sub(x, z, 2), y))
        + (xi(x, sub(y, z, 3)) + xi(sub(x, z, 1), sub(y, z, 2))
           + xi(sub(x, z, 2), sub(y, z, 1)) + xi(sub(x, z, 3), y));
    AxisSet both({0, 1});
    CHECK(delta_theta_direct(both, z, xi, x, y) == doctest::Approx(hand).epsilon(1e-12));
    CHECK(delta_theta_decomposed(both, z, xi, x, y) == doctest::Approx(hand).epsilon(1e-12));
}

TEST_CASE("two-axis defect admits the half-substitution split") {
    // For k = 2: delta^{12} f = delta^(1) f - delta^(1) psi_2 f  (and symmetrically).
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        auto poly = oracles::Polynomial::random(4, 2, 5000 + static_cast<unsigned>(trial));
        PairFunction f = pair_from(2, [poly](const MultiPoint& x, const MultiPoint& y) {
            return poly({x[0], x[1], y[0], y[1]});
        });
        auto s = oracles::random_pair(2, rng);
        MultiPoint x(s.x), y(s.y), z(s.z);
        const double lhs = delta_theta_direct(AxisSet({0, 1}), z, f, x, y);
        const double rhs = delta_axis(0, z, f, x, y) - delta_axis(0, z, psi(1, z, f), x, y);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("decomposed defect equals the direct expansion up to dimension four") {
    std::mt19937_64 rng(99);
    for (std::size_t k = 1; k <= 4; ++k) {
        for (int trial = 0; trial < 25; ++trial) {
            auto poly =
                oracles::Polynomial::random(2 * k, 2, 77 * k + static_cast<unsigned>(trial));
            PairFunction f = pair_from(k, [poly, k](const MultiPoint& x, const MultiPoint& y) {
                std::vector<double> joint(2 * k);
                for (std::size_t a = 0; a < k; ++a) {
                    joint[a] = x[a];
                    joint[k + a] = y[a];
                }
                return poly(joint);
            });
            auto s = oracles::random_pair(k, rng);
            MultiPoint x(s.x), y(s.y), z(s.z);
            std::vector<std::size_t> all(k);
            for (std::size_t a = 0; a < k; ++a) all[a] = a;
            AxisSet theta(all);
            const double direct = delta_theta_direct(theta, z, f, x, y);
            const double decomposed = delta_theta_decomposed(theta, z, f, x, y);
            CHECK(decomposed == doctest::Approx(direct).epsilon(1e-11));
        }
    }
}

TEST_CASE("defect of a pure increment pair vanishes") {
    // f(x,y) = box_increment(F, x, y) is additive along every axis, so any
    // defect of it is zero.
    PointFn F = [](const MultiPoint& p) { return std::sin(2.0 * p[0]) * std::cosh(p[1]); };
    PairFunction f = pair_from(2, [&F](const MultiPoint& x, const MultiPoint& y) {
        return box_increment(F, x, y);
    });
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        auto s = oracles::random_pair(2, rng);
        MultiPoint x(s.x), y(s.y), z(s.z);
        CHECK(delta_theta_direct(AxisSet({0, 1}), z, f, x, y) ==
              doctest::Approx(0.0).epsilon(1e-12));
        CHECK(delta_axis(0, z, f, x, y) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(delta_axis(1, z, f, x, y) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("defect of the Young pair telescopes into increment products") {
    // delta^(j) at z of Y(x) box X(x,y) equals
    //   -(Y(x[j->z]) - Y(x)) * box X over [x[j->z], y].
    PointFn Y = [](const MultiPoint& p) { return std::exp(p[0] - p[1]); };
    PointFn X = [](const MultiPoint& p) { return std::sin(p[0]) * p[1]; };
    PairFunction xi = young_pair(Y, X, 2);
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        auto s = oracles::random_pair(2, rng);
        MultiPoint x(s.x), y(s.y), z(s.z);
        for (std::size_t j = 0; j < 2; ++j) {
            MultiPoint xj = x.with_coord(j, z[j]);
            const double expected =
                -(Y(xj) - Y(x)) * box_increment(X, xj, y);
            CHECK(delta_axis(j, z, xi, x, y) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("axis sets validate their contents") {
    CHECK_THROWS_AS(AxisSet({}), OutOfRange);
    CHECK_THROWS_AS(AxisSet({1, 1}), OutOfRange);
    CHECK_THROWS_AS(AxisSet({2, 1}), OutOfRange);
    AxisSet s({0, 2});
    CHECK(s.size() == 2);
    CHECK(s.max_axis() == 2);
    CHECK(AxisSet::full(3).axes() == std::vector<std::size_t>({0, 1, 2}));
}
