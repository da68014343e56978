#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <hypersew/errors.hpp>
#include <hypersew/fields.hpp>
#include <hypersew/grid.hpp>
#include <hypersew/increment.hpp>
#include <hypersew/runtime.hpp>
#include <hypersew/sewing.hpp>

#include <json.hpp>

#include <cmath>
#include <limits>

using namespace hypersew;

namespace {

Field identity_product(std::size_t k) {
    return Field::closed_form(k, [k](const MultiPoint& p) {
        double prod = 1.0;
        for (std::size_t a = 0; a < k; ++a) prod *= p[a];
        return prod;
    });
}

} // namespace

TEST_CASE("constant integrand sums to the exact increment at every level") {
    Field one = Field::closed_form(2, [](const MultiPoint&) { return 1.0; });
    Field x = identity_product(2);
    SewResult r = young_integral(one, x, unit_cube(2), 1e-12, 6);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-15));
    // dyadic meshes make every level sum exactly 1
    for (const auto& lvl : r.levels) CHECK(lvl.value == 1.0);
}

TEST_CASE("one-dimensional calculus: integral of t dt") {
    // The corner-averaged germ is exact on affine integrands, so every level
    // already equals 1/2 and refinement stops at the first comparison.
    Field id = Field::closed_form(1, [](const MultiPoint& p) { return p[0]; });
    SewResult r = young_integral(id, id, unit_cube(1), 2e-6, default_max_level(1));
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.error_estimate < 2e-6);
    CHECK(r.levels.size() == 2);
    for (const auto& lvl : r.levels) CHECK(lvl.value == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("one-dimensional calculus: integral of exp") {
    Field ex = Field::closed_form(1, [](const MultiPoint& p) { return std::exp(p[0]); });
    Field id = Field::closed_form(1, [](const MultiPoint& p) { return p[0]; });
    SewResult r = young_integral(ex, id, unit_cube(1), 2e-6, default_max_level(1));
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-5));
}

TEST_CASE("two-dimensional calculus: coordinate product against itself") {
    // int_{[0,1]^2} s t d(s t) = (int s ds)(int t dt) = 1/4
    Field id2 = identity_product(2);
    SewResult r = young_integral(id2, id2, unit_cube(2), 5e-4, 12);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(0.25).epsilon(2e-3));
}

TEST_CASE("two-dimensional calculus on a sub-rectangle") {
    Field y = Field::closed_form(2, [](const MultiPoint& p) { return p[0] * p[0] * p[1]; });
    Field x = identity_product(2);
    // int_0^1 int_0^1 s^2 t ds dt = 1/3 * 1/2 = 1/6
    SewResult r = young_integral(y, x, unit_cube(2), 5e-4, 12);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0 / 6.0).epsilon(3e-3));
}

TEST_CASE("parallel Riemann sums are bitwise stable across worker counts") {
    Field y = weierstrass_field(HolderExponents({0.7, 0.8}), 14);
    Field x = weierstrass_field(HolderExponents({0.8, 0.7}), 14);
    PairFunction xi = young_pair(y, x);
    GridPartition grid = dyadic_partition(unit_cube(2), {5, 5});

    const unsigned saved = max_threads();
    set_max_threads(1);
    const double one_worker = riemann_sum(xi, grid);
    set_max_threads(4);
    const double four_workers = riemann_sum(xi, grid);
    set_max_threads(saved);
    CHECK(one_worker == four_workers); // bitwise

    const double serial = riemann_sum_serial(xi, grid);
    CHECK(serial == doctest::Approx(one_worker).epsilon(1e-12));
}

TEST_CASE("sewing validates its inputs") {
    Field id = Field::closed_form(1, [](const MultiPoint& p) { return p[0]; });
    PairFunction xi = young_pair(id, id);
    CHECK_THROWS_AS(sew(xi, unit_cube(1), 0.0, 4), OutOfRange);
    CHECK_THROWS_AS(sew(xi, unit_cube(1), -1.0, 4), OutOfRange);
    HyperRect thin(MultiPoint({0.25, 0.0}), MultiPoint({0.25, 1.0}));
    PairFunction xi2 = young_pair(identity_product(2), identity_product(2));
    CHECK_THROWS_AS(sew(xi2, thin, 1e-6, 4), DegenerateDomain);
    GridPartition g1 = dyadic_partition(unit_cube(1), {2});
    CHECK_THROWS_AS(riemann_sum(xi2, g1), OutOfRange);
}

TEST_CASE("node mismatch inside the parallel sum propagates as an exception") {
    GridPartition coarse = dyadic_partition(unit_cube(2), {2, 2});
    Field x_sheet = fbm_sheet(SheetSpec{{0.5, 0.5}, coarse, 7});
    // A non-constant integrand, so the level sums differ and refinement digs
    // past the sheet's 4x4 sample grid.
    Field rough = weierstrass_field(HolderExponents({0.7, 0.7}), 10);
    PairFunction xi = young_pair(rough, x_sheet);
    GridPartition fine = dyadic_partition(unit_cube(2), {3, 3});
    CHECK_THROWS_AS(riemann_sum(xi, fine), NodeMismatch);
    CHECK_THROWS_AS(sew(xi, unit_cube(2), 1e-12, 5), NodeMismatch);
}

TEST_CASE("an exhausted level budget reports non-convergence honestly") {
    Field ex = Field::closed_form(1, [](const MultiPoint& p) { return std::exp(p[0]); });
    Field id = Field::closed_form(1, [](const MultiPoint& p) { return p[0]; });
    SewResult r = young_integral(ex, id, unit_cube(1), 1e-12, 3);
    CHECK(!r.converged);
    CHECK(r.levels.size() == 4); // levels 0..3 all evaluated
    CHECK(r.error_estimate > 1e-12);
}

TEST_CASE("a single-level run leaves the error estimate infinite") {
    Field id = Field::closed_form(1, [](const MultiPoint& p) { return p[0]; });
    SewResult r = young_integral(id, id, unit_cube(1), 1e-12, 0);
    CHECK(!r.converged);
    CHECK(std::isinf(r.error_estimate));
    CHECK(r.levels.size() == 1);
}

TEST_CASE("default refinement depths shrink with dimension") {
    CHECK(default_max_level(1) == 20);
    CHECK(default_max_level(2) == 10);
    CHECK(default_max_level(3) == 6);
    CHECK(default_max_level(4) == 4);
    CHECK(default_max_level(7) == 4);
}

TEST_CASE("indefinite integral vanishes on zero faces and accumulates cells") {
    Field y = identity_product(2);
    Field x = identity_product(2);
    GridPartition grid = dyadic_partition(unit_cube(2), {2, 2});
    Field z = indefinite_integral(y, x, grid, 2e-3);
    REQUIRE(z.is_grid_sampled());

    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const MultiPoint node = grid.node(i);
        if (node[0] == 0.0 || node[1] == 0.0) CHECK(z.node_values()[i] == 0.0);
    }
    // Z(1,1) = int st d(st) over the whole square = 1/4
    CHECK(z(MultiPoint({1.0, 1.0})) == doctest::Approx(0.25).epsilon(0.01));
    // grid-resolution additivity: the increment over an aligned sub-rectangle
    // equals the directly sewn integral over it
    HyperRect sub(MultiPoint({0.25, 0.5}), MultiPoint({0.75, 1.0}));
    const double via_nodes = box_increment(PointFn(z), sub.lower(), sub.upper());
    SewResult direct = sew(young_pair(y, x), sub, 1e-6, 12);
    CHECK(via_nodes == doctest::Approx(direct.value).epsilon(5e-3));
}

TEST_CASE("indefinite integral of sampled data uses the grid as finest scale") {
    GridPartition grid = dyadic_partition(unit_cube(1), {3});
    Field x_sheet = fbm_sheet(SheetSpec{{0.5}, grid, 31}); // sampled, not refinable
    Field one = Field::closed_form(1, [](const MultiPoint&) { return 1.0; });
    Field z = indefinite_integral(one, x_sheet, grid, 1e-9);
    // integrating 1 dX telescopes exactly to X - X(0) = X at grid nodes
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const MultiPoint node = grid.node(i);
        CHECK(z(node) == doctest::Approx(x_sheet(node)).epsilon(1e-12));
    }
}

TEST_CASE("indefinite integral requires an origin-anchored grid") {
    Field y = identity_product(1);
    GridPartition off({{0.25, 0.5, 1.0}});
    CHECK_THROWS_AS(indefinite_integral(y, y, off, 1e-6), OutOfRange);
}

TEST_CASE("convergence study recovers second-order decay on smooth data") {
    Field ex = Field::closed_form(1, [](const MultiPoint& p) { return std::exp(p[0]); });
    Field id = Field::closed_form(1, [](const MultiPoint& p) { return p[0]; });
    ConvergenceStudy study = convergence_study(young_pair(ex, id), unit_cube(1), 9);
    REQUIRE(study.rows.size() == 9);
    CHECK(study.rows.front().mesh == 1.0);
    CHECK(study.rows.back().err_vs_finest == 0.0);
    // Corner averaging acts as a trapezoid germ on smooth integrands.
    CHECK(study.fitted_order == doctest::Approx(2.0).epsilon(0.2));
    CHECK_THROWS_AS(convergence_study(young_pair(id, id), unit_cube(1), 2), OutOfRange);
}

TEST_CASE("convergence study signals exact agreement with an infinite order") {
    Field one = Field::closed_form(2, [](const MultiPoint&) { return 1.0; });
    Field x = identity_product(2);
    ConvergenceStudy study = convergence_study(young_pair(one, x), unit_cube(2), 4);
    CHECK(std::isinf(study.fitted_order));
    for (const auto& row : study.rows) CHECK(row.err_vs_finest == 0.0);
}

TEST_CASE("sew results serialize to parseable JSON") {
    Field id = Field::closed_form(1, [](const MultiPoint& p) { return p[0]; });
    SewResult r = young_integral(id, id, unit_cube(1), 1e-3, 12);
    const nlohmann::json j = nlohmann::json::parse(sew_result_to_json(r));
    CHECK(j["value"].get<double>() == r.value);
    CHECK(j["error_estimate"].get<double>() == r.error_estimate);
    CHECK(j["converged"].get<bool>() == r.converged);
    REQUIRE(j["levels"].size() == r.levels.size());
    CHECK(j["levels"][0]["mesh"].get<double>() == 1.0);
}

TEST_CASE("convergence tables serialize to CSV with a fixed header") {
    Field id = Field::closed_form(1, [](const MultiPoint& p) { return p[0]; });
    ConvergenceStudy study = convergence_study(young_pair(id, id), unit_cube(1), 4);
    const std::string csv = convergence_to_csv(study);
    CHECK(csv.rfind("level,mesh,value,err_vs_finest\n", 0) == 0);
    std::size_t lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 5); // header + 4 rows
}
