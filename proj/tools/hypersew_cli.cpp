// Command-line front end: field generation, Young integration, convergence
// studies, equation solving, defect-identity checks and stability sweeps.
// Every command reads an optional JSON config (overridden by flags), runs with
// a capped worker count and emits CSV/JSON with fixed 17-digit formatting so
// reruns are byte identical.

#include <CLI11.hpp>
#include <json.hpp>

#include <hypersew/errors.hpp>
#include <hypersew/field_io.hpp>
#include <hypersew/fields.hpp>
#include <hypersew/grid.hpp>
#include <hypersew/holder.hpp>
#include <hypersew/increment.hpp>
#include <hypersew/point.hpp>
#include <hypersew/runtime.hpp>
#include <hypersew/sewing.hpp>
#include <hypersew/solver.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace hypersew;

namespace {

// Config/usage problems surface as exit 2 with a message naming the key.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// JSON config handling: one flat object per command, every key checked.

class Config {
  public:
    Config() = default;

    static Config load(const std::string& path, const std::vector<std::string>& allowed) {
        Config cfg;
        if (path.empty()) return cfg;
        std::ifstream in(path);
        if (!in) throw ConfigError("config file '" + path + "' cannot be opened");
        try {
            in >> cfg.root_;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
        }
        if (!cfg.root_.is_object())
            throw ConfigError("config file '" + path + "' must hold a JSON object");
        for (const auto& item : cfg.root_.items()) {
            bool known = false;
            for (const auto& key : allowed)
                if (item.key() == key) known = true;
            if (!known)
                throw ConfigError("config key '" + item.key() +
                                  "' is not recognized for this command");
        }
        return cfg;
    }

    template <typename T>
    T get(const std::string& key, const T& fallback) const {
        if (!root_.contains(key)) return fallback;
        try {
            return root_.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError("config key '" + key + "' has the wrong type");
        }
    }

    bool has(const std::string& key) const { return root_.contains(key); }

  private:
    nlohmann::json root_ = nlohmann::json::object();
};

// Flag beats config beats default; `counted` says whether the flag was given.
template <typename T>
T merge(bool counted, const T& flag_value, const Config& cfg, const std::string& key,
        const T& fallback) {
    if (counted) return flag_value;
    return cfg.get<T>(key, fallback);
}

std::vector<double> parse_double_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': '" + cell + "' is not a number");
        }
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

// ---------------------------------------------------------------------------
// Field and coefficient catalogs.

constexpr unsigned kWeierstrassTerms = 16;

Field identity_product_field(std::size_t k) {
    return Field::closed_form(k, [k](const MultiPoint& p) {
        double prod = 1.0;
        for (std::size_t a = 0; a < k; ++a) prod *= p[a];
        return prod;
    });
}

// Builtin names: const1 | prod_id | exp_sum | weierstrass:<alpha> |
// fbm:<H>:<seed>, or a CSV path produced by gen-field. `n_nodes` sizes the
// sampling grid of fbm sources.
Field make_field(const std::string& spec, std::size_t k, std::size_t n_nodes,
                 const std::string& key) {
    if (spec == "const1")
        return Field::closed_form(k, [](const MultiPoint&) { return 1.0; });
    if (spec == "prod_id") return identity_product_field(k);
    if (spec == "exp_sum")
        return Field::closed_form(k, [k](const MultiPoint& p) {
            double s = 0.0;
            for (std::size_t a = 0; a < k; ++a) s += p[a];
            return std::exp(s);
        });
    if (spec.rfind("weierstrass:", 0) == 0) {
        const auto vals = parse_double_list(spec.substr(12), key);
        if (vals.size() != 1 && vals.size() != k)
            throw ConfigError("config key '" + key + "': weierstrass needs 1 or k exponents");
        std::vector<double> alpha(k, vals[0]);
        if (vals.size() == k) alpha = vals;
        for (double a : alpha)
            if (!(a > 0.0 && a < 1.0))
                throw ConfigError("config key '" + key +
                                  "': weierstrass exponents must lie in (0,1)");
        return weierstrass_field(HolderExponents(alpha), kWeierstrassTerms);
    }
    if (spec.rfind("fbm:", 0) == 0) {
        const std::string rest = spec.substr(4);
        const std::size_t colon = rest.find(':');
        if (colon == std::string::npos)
            throw ConfigError("config key '" + key + "': fbm spec needs fbm:<H>:<seed>");
        const auto hs = parse_double_list(rest.substr(0, colon), key);
        if (hs.size() != 1 && hs.size() != k)
            throw ConfigError("config key '" + key + "': fbm needs 1 or k Hurst entries");
        std::vector<double> hurst(k, hs[0]);
        if (hs.size() == k) hurst = hs;
        for (double h : hurst)
            if (!(h > 0.0 && h < 1.0))
                throw ConfigError("config key '" + key + "': H must lie in (0,1), got " +
                                  fmt(h));
        std::uint64_t seed = 0;
        try {
            seed = std::stoull(rest.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': bad fbm seed '" +
                              rest.substr(colon + 1) + "'");
        }
        if (n_nodes < 2) throw ConfigError("config key 'n': need at least 2 nodes per axis");
        GridPartition grid =
            uniform_partition(unit_cube(k), std::vector<std::size_t>(k, n_nodes - 1));
        return fbm_sheet(SheetSpec{hurst, grid, seed});
    }
    if (spec.size() > 4 && spec.substr(spec.size() - 4) == ".csv") {
        LoadedField loaded = read_field_csv(spec);
        if (loaded.field.dimension() != k)
            throw ConfigError("config key '" + key + "': field in '" + spec + "' has dimension " +
                              std::to_string(loaded.field.dimension()) + ", expected " +
                              std::to_string(k));
        return loaded.field;
    }
    throw ConfigError("config key '" + key + "': unknown field '" + spec +
                      "' (use const1, prod_id, exp_sum, weierstrass:<a>, fbm:<H>:<seed> or a "
                      "CSV path)");
}

// Coefficient names: one | id | sin | scale:<c>.
Coefficient make_coefficient(const std::string& spec) {
    if (spec == "one")
        return Coefficient([](double) { return 1.0; }, [](double) { return 0.0; }, 1.0);
    if (spec == "id") return Coefficient([](double y) { return y; }, [](double) { return 1.0; }, 1.0);
    if (spec == "sin")
        return Coefficient([](double y) { return std::sin(y); },
                           [](double y) { return std::cos(y); }, 1.0);
    if (spec.rfind("scale:", 0) == 0) {
        const auto vals = parse_double_list(spec.substr(6), "f");
        if (vals.size() != 1) throw ConfigError("config key 'f': scale:<c> takes one number");
        const double c = vals[0];
        return Coefficient([c](double y) { return c * y; }, [c](double) { return c; },
                           std::abs(c));
    }
    throw ConfigError("config key 'f': unknown coefficient '" + spec +
                      "' (use one, id, sin or scale:<c>)");
}

HyperRect parse_rect(const std::string& spec, std::size_t k) {
    if (spec == "unit") return unit_cube(k);
    const std::size_t colon = spec.find(':');
    if (colon == std::string::npos)
        throw ConfigError("config key 'rect': use 'unit' or '<lo,...>:<hi,...>'");
    const auto lo = parse_double_list(spec.substr(0, colon), "rect");
    const auto hi = parse_double_list(spec.substr(colon + 1), "rect");
    if (lo.size() != k || hi.size() != k)
        throw ConfigError("config key 'rect': needs k coordinates per corner");
    try {
        return HyperRect(MultiPoint(lo), MultiPoint(hi));
    } catch (const Error& e) {
        throw ConfigError(std::string("config key 'rect': ") + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// Commands. Each returns the process exit code.

struct GenFieldArgs {
    std::string kind = "fbm";
    std::size_t k = 2;
    std::string hurst_text = "0.5";
    std::size_t n = 33;
    std::uint64_t seed = 0;
    std::string out = "field.csv";
};

int cmd_gen_field(const GenFieldArgs& a) {
    const auto hs = parse_double_list(a.hurst_text, "H");
    if (hs.size() != 1 && hs.size() != a.k)
        throw ConfigError("config key 'H': needs 1 or k entries");
    std::vector<double> hurst(a.k, hs[0]);
    if (hs.size() == a.k) hurst = hs;
    if (a.k == 0) throw ConfigError("config key 'k': dimension must be at least 1");
    if (a.n < 2 || a.n > 128)
        throw ConfigError("config key 'n': nodes per axis must lie in [2,128]");
    for (double h : hurst)
        if (!(h > 0.0 && h < 1.0))
            throw ConfigError("config key 'H': entries must lie in (0,1), got " + fmt(h));

    GridPartition grid =
        uniform_partition(unit_cube(a.k), std::vector<std::size_t>(a.k, a.n - 1));
    Field field = [&]() {
        if (a.kind == "fbm") return fbm_sheet(SheetSpec{hurst, grid, a.seed});
        if (a.kind == "weierstrass")
            return sample_on_grid(weierstrass_field(HolderExponents(hurst), kWeierstrassTerms),
                                  grid);
        throw ConfigError("config key 'kind': unknown generator '" + a.kind +
                          "' (use fbm or weierstrass)");
    }();
    write_field_csv(a.out, field, hurst, a.seed);
    std::cout << a.out << "\n";
    return 0;
}

struct IntegrateArgs {
    std::string y = "prod_id";
    std::string x = "prod_id";
    std::size_t k = 2;
    std::size_t n = 33;
    std::string rect = "unit";
    double tol = 1e-6;
    unsigned max_level = 0; // 0 = dimension default
    std::string out;
};

int cmd_integrate(const IntegrateArgs& a) {
    if (a.k == 0) throw ConfigError("config key 'k': dimension must be at least 1");
    if (!(a.tol > 0.0)) throw ConfigError("config key 'tol': tolerance must be positive");
    Field fy = make_field(a.y, a.k, a.n, "y");
    Field fx = make_field(a.x, a.k, a.n, "x");
    const HyperRect rect = parse_rect(a.rect, a.k);
    const unsigned depth = a.max_level > 0 ? a.max_level : default_max_level(a.k);
    SewResult result = young_integral(fy, fx, rect, a.tol, depth);
    const std::string json = sew_result_to_json(result);
    if (!a.out.empty()) write_text(a.out, json + "\n");
    std::cout << json << "\n";
    if (!result.converged) {
        std::cerr << "hypersew: integration did not converge within level " << depth
                  << " (last refinement difference " << fmt(result.error_estimate) << ")\n";
        return 4;
    }
    return 0;
}

struct SolveArgs {
    std::string f = "id";
    std::string xi = "const1";
    std::string x = "prod_id";
    std::size_t k = 2;
    std::size_t n = 33;
    std::string tile_text = "0.5";
    double tol = 1e-8;
    unsigned max_iter = 50;
    double x_scale = 1.0;
    std::string out = "solution.csv";
    std::string sidecar;
};

int cmd_solve(const SolveArgs& a) {
    if (a.k == 0) throw ConfigError("config key 'k': dimension must be at least 1");
    if (!(a.tol > 0.0)) throw ConfigError("config key 'tol': tolerance must be positive");
    if (a.n < 3) throw ConfigError("config key 'n': need at least 3 nodes per axis");
    const auto tiles = parse_double_list(a.tile_text, "tile");
    std::vector<double> tile(a.k, tiles[0]);
    if (tiles.size() == a.k)
        tile = tiles;
    else if (tiles.size() != 1)
        throw ConfigError("config key 'tile': needs 1 or k entries");

    GridPartition grid =
        uniform_partition(unit_cube(a.k), std::vector<std::size_t>(a.k, a.n - 1));
    Field fx = make_field(a.x, a.k, a.n, "x");
    if (a.x_scale != 1.0) fx = field_linear(a.x_scale, fx, 0.0, fx);
    Problem problem{make_coefficient(a.f), make_field(a.xi, a.k, a.n, "xi"), fx, grid};
    Solution sol = solve(problem, tile, a.tol, a.max_iter);

    write_field_csv(a.out, sol.y, std::vector<double>(a.k, 0.0), 0);
    const std::string sidecar = a.sidecar.empty() ? a.out + ".json" : a.sidecar;
    write_text(sidecar, solution_sidecar_json(sol) + "\n");
    std::cout << a.out << "\n" << sidecar << "\n"
              << "residual=" << fmt(sol.residual) << "\n";
    return 0;
}

struct ConvergenceArgs {
    std::string y = "prod_id";
    std::string x = "prod_id";
    std::size_t k = 2;
    std::size_t n = 33;
    std::string rect = "unit";
    unsigned levels = 6;
    std::string out;
};

int cmd_convergence(const ConvergenceArgs& a) {
    if (a.k == 0) throw ConfigError("config key 'k': dimension must be at least 1");
    if (a.levels < 3) throw ConfigError("config key 'levels': need at least 3 levels");
    Field fy = make_field(a.y, a.k, a.n, "y");
    Field fx = make_field(a.x, a.k, a.n, "x");
    ConvergenceStudy study =
        convergence_study(young_pair(fy, fx), parse_rect(a.rect, a.k), a.levels);

    // Library columns plus the fitted order repeated on every row.
    std::string csv = "level,mesh,value,err_vs_finest,fitted_order\n";
    for (const auto& row : study.rows) {
        csv += std::to_string(row.level);
        csv += ',';
        csv += fmt(row.mesh);
        csv += ',';
        csv += fmt(row.value);
        csv += ',';
        csv += fmt(row.err_vs_finest);
        csv += ',';
        csv += fmt(study.fitted_order);
        csv += '\n';
    }
    if (!a.out.empty()) write_text(a.out, csv);
    std::cout << csv;
    return 0;
}

struct DeltaCheckArgs {
    std::size_t k = 2;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_delta_check(const DeltaCheckArgs& a) {
    if (a.k == 0 || a.k > 6) throw ConfigError("config key 'k': dimension must lie in [1,6]");
    if (a.trials == 0) throw ConfigError("config key 'trials': need at least one trial");
    constexpr double kIdentityTol = 1e-9;

    std::mt19937_64 rng(a.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::size_t> all(a.k);
    for (std::size_t i = 0; i < a.k; ++i) all[i] = i;
    const AxisSet theta(all);

    double r_box = 0.0, r_decomp = 0.0, r_half = 0.0, r_chen = 0.0;
    for (std::size_t trial = 0; trial < a.trials; ++trial) {
        Field fy = random_polynomial_field(a.k, 3, a.seed * 1000 + 2 * trial);
        Field fx = random_polynomial_field(a.k, 3, a.seed * 1000 + 2 * trial + 1);
        std::vector<double> xs(a.k), ys(a.k), zs(a.k);
        for (std::size_t i = 0; i < a.k; ++i) {
            double u = unit(rng), v = unit(rng);
            if (u > v) std::swap(u, v);
            if (v - u < 1e-3) v = std::min(1.0, u + 1e-3);
            xs[i] = u;
            ys[i] = v;
            zs[i] = u + (v - u) * unit(rng);
        }
        const MultiPoint x(xs), y(ys), z(zs);
        const PointFn py(fy), px(fx);
        const PairFunction xi = young_pair(py, px, a.k);

        // (a) the full defect of a generalized increment vanishes
        const PairFunction inc{a.k, [&px](const MultiPoint& u, const MultiPoint& v) {
                                   return box_increment(px, u, v);
                               }};
        r_box = std::max(r_box, std::abs(delta_theta_direct(theta, z, inc, x, y)));

        // (b) subset decomposition equals the direct expansion
        r_decomp = std::max(r_decomp, std::abs(delta_theta_direct(theta, z, xi, x, y) -
                                               delta_theta_decomposed(theta, z, xi, x, y)));

        // (c) two-axis half-substitution split
        if (a.k == 2) {
            const double lhs = delta_theta_direct(theta, z, xi, x, y);
            const double rhs =
                delta_axis(0, z, xi, x, y) - delta_axis(0, z, psi(1, z, xi), x, y);
            r_half = std::max(r_half, std::abs(lhs - rhs));
        }

        // (d) single-axis defect of the Young pair telescopes
        for (std::size_t j = 0; j < a.k; ++j) {
            const MultiPoint xj = x.with_coord(j, z[j]);
            const double expected = -(py(xj) - py(x)) * box_increment(px, xj, y);
            r_chen = std::max(r_chen, std::abs(delta_axis(j, z, xi, x, y) - expected));
        }
    }

    std::string csv = "identity,trials,max_residual\n";
    csv += "defect_of_increment," + std::to_string(a.trials) + ',' + fmt(r_box) + '\n';
    csv += "decomposition," + std::to_string(a.trials) + ',' + fmt(r_decomp) + '\n';
    if (a.k == 2) csv += "half_substitution," + std::to_string(a.trials) + ',' + fmt(r_half) + '\n';
    csv += "young_chen," + std::to_string(a.trials) + ',' + fmt(r_chen) + '\n';
    if (!a.out.empty()) write_text(a.out, csv);
    std::cout << csv;

    const double worst = std::max(std::max(r_box, r_decomp), std::max(r_half, r_chen));
    if (worst > kIdentityTol) {
        std::cerr << "hypersew: defect identity residual " << fmt(worst) << " exceeds "
                  << fmt(kIdentityTol) << "\n";
        return 4;
    }
    return 0;
}

struct StabilityArgs {
    std::string f = "sin";
    std::string xi = "const1";
    std::string x = "weierstrass:0.75";
    std::size_t k = 2;
    std::size_t n = 17;
    std::string eps_text = "0.1,0.01,0.001";
    std::string perturb = "xi";
    std::string beta_text = "0.9";
    std::string tile_text = "0.5";
    double tol = 1e-8;
    std::string out;
};

int cmd_stability(const StabilityArgs& a) {
    if (a.k == 0) throw ConfigError("config key 'k': dimension must be at least 1");
    if (a.perturb != "xi" && a.perturb != "x")
        throw ConfigError("config key 'perturb': use 'xi' or 'x'");
    const auto eps_list = parse_double_list(a.eps_text, "eps");
    auto betas = parse_double_list(a.beta_text, "beta");
    if (betas.size() == 1) betas.assign(a.k, betas[0]);
    if (betas.size() != a.k) throw ConfigError("config key 'beta': needs 1 or k entries");
    for (double b : betas)
        if (!(b > 0.0 && b < 1.0))
            throw ConfigError("config key 'beta': entries must lie in (0,1)");
    const auto tiles = parse_double_list(a.tile_text, "tile");
    std::vector<double> tile(a.k, tiles[0]);
    if (tiles.size() == a.k)
        tile = tiles;
    else if (tiles.size() != 1)
        throw ConfigError("config key 'tile': needs 1 or k entries");

    GridPartition grid =
        uniform_partition(unit_cube(a.k), std::vector<std::size_t>(a.k, a.n - 1));
    Problem base{make_coefficient(a.f), make_field(a.xi, a.k, a.n, "xi"),
                 make_field(a.x, a.k, a.n, "x"), grid};
    Solution base_sol = solve(base, tile, a.tol);
    const HolderExponents beta(betas);

    std::string csv = "eps,lhs,rhs_origin_gap,rhs_xi_norm,rhs_x_norm,ratio\n";
    for (double eps : eps_list) {
        Field xi2 = a.perturb == "xi"
                        ? field_linear(1.0, base.xi,
                                       eps, Field::closed_form(a.k, [](const MultiPoint&) {
                                           return 1.0;
                                       }))
                        : base.xi;
        Field x2 = a.perturb == "x" ? field_linear(1.0 + eps, base.x_field, 0.0, base.x_field)
                                    : base.x_field;
        Problem other{base.coefficient, xi2, x2, grid};
        Solution other_sol = solve(other, tile, a.tol);
        StabilityReport rep = stability_compare(base, other, beta, base_sol, other_sol);
        csv += fmt(eps);
        csv += ',';
        csv += fmt(rep.lhs);
        csv += ',';
        csv += fmt(rep.rhs_origin_gap);
        csv += ',';
        csv += fmt(rep.rhs_xi_norm);
        csv += ',';
        csv += fmt(rep.rhs_x_norm);
        csv += ',';
        csv += fmt(rep.ratio);
        csv += '\n';
    }
    if (!a.out.empty()) write_text(a.out, csv);
    std::cout << csv;
    return 0;
}

// ---------------------------------------------------------------------------

int dispatch(int argc, char** argv) {
    CLI::App app{"hypersew: multi-parameter sewing, Young integration and tiled solving"};
    app.require_subcommand(1);

    std::string config_path;
    unsigned threads = 0;
    app.add_option("--config", config_path, "JSON config file (flags override its keys)");
    auto* threads_opt =
        app.add_option("--threads", threads, "worker cap (default HYPERSEW_THREADS or 1)");

    GenFieldArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-field", "sample a random field and write CSV");
    gen_cmd->fallthrough();
    auto* gen_kind = gen_cmd->add_option("--kind", gen.kind, "fbm | weierstrass");
    auto* gen_k = gen_cmd->add_option("--k", gen.k, "dimension");
    auto* gen_h = gen_cmd->add_option("--H", gen.hurst_text, "Hurst/roughness list");
    auto* gen_n = gen_cmd->add_option("--n", gen.n, "nodes per axis (2..128)");
    auto* gen_seed = gen_cmd->add_option("--seed", gen.seed, "RNG seed");
    auto* gen_out = gen_cmd->add_option("--out", gen.out, "output CSV path");

    IntegrateArgs intg;
    auto* int_cmd = app.add_subcommand("integrate", "sew the Young integral of Y against X");
    int_cmd->fallthrough();
    auto* int_y = int_cmd->add_option("--Y", intg.y, "integrand field");
    auto* int_x = int_cmd->add_option("--X", intg.x, "integrator field");
    auto* int_k = int_cmd->add_option("--k", intg.k, "dimension");
    auto* int_n = int_cmd->add_option("--n", intg.n, "nodes per axis for sampled sources");
    auto* int_rect = int_cmd->add_option("--rect", intg.rect, "'unit' or lo,..:hi,..");
    auto* int_tol = int_cmd->add_option("--tol", intg.tol, "refinement stop tolerance");
    auto* int_lvl = int_cmd->add_option("--max-level", intg.max_level, "dyadic level cap");
    auto* int_out = int_cmd->add_option("--out", intg.out, "result JSON path");

    SolveArgs sol;
    auto* sol_cmd = app.add_subcommand("solve", "solve Y = xi + int f(Y) dX by tiled Picard");
    sol_cmd->fallthrough();
    auto* sol_f = sol_cmd->add_option("--f", sol.f, "coefficient: one|id|sin|scale:<c>");
    auto* sol_xi = sol_cmd->add_option("--xi", sol.xi, "boundary data field");
    auto* sol_x = sol_cmd->add_option("--X", sol.x, "driving field");
    auto* sol_k = sol_cmd->add_option("--k", sol.k, "dimension");
    auto* sol_n = sol_cmd->add_option("--n", sol.n, "nodes per axis");
    auto* sol_tile = sol_cmd->add_option("--tile", sol.tile_text, "initial tile size list");
    auto* sol_tol = sol_cmd->add_option("--tol", sol.tol, "fixed-point tolerance");
    auto* sol_iter = sol_cmd->add_option("--max-iter", sol.max_iter, "Picard sweep cap");
    auto* sol_scale = sol_cmd->add_option("--x-scale", sol.x_scale, "scale factor on X");
    auto* sol_out = sol_cmd->add_option("--out", sol.out, "solution CSV path");
    auto* sol_side = sol_cmd->add_option("--sidecar", sol.sidecar, "sidecar JSON path");

    ConvergenceArgs cnv;
    auto* cnv_cmd = app.add_subcommand("convergence", "Riemann-sum refinement study");
    cnv_cmd->fallthrough();
    auto* cnv_y = cnv_cmd->add_option("--Y", cnv.y, "integrand field");
    auto* cnv_x = cnv_cmd->add_option("--X", cnv.x, "integrator field");
    auto* cnv_k = cnv_cmd->add_option("--k", cnv.k, "dimension");
    auto* cnv_n = cnv_cmd->add_option("--n", cnv.n, "nodes per axis for sampled sources");
    auto* cnv_rect = cnv_cmd->add_option("--rect", cnv.rect, "'unit' or lo,..:hi,..");
    auto* cnv_lvl = cnv_cmd->add_option("--levels", cnv.levels, "number of dyadic levels");
    auto* cnv_out = cnv_cmd->add_option("--out", cnv.out, "CSV path");

    DeltaCheckArgs dlt;
    auto* dlt_cmd = app.add_subcommand("delta-check", "randomized defect-identity suite");
    dlt_cmd->fallthrough();
    auto* dlt_k = dlt_cmd->add_option("--k", dlt.k, "dimension");
    auto* dlt_trials = dlt_cmd->add_option("--trials", dlt.trials, "random trials");
    auto* dlt_seed = dlt_cmd->add_option("--seed", dlt.seed, "RNG seed");
    auto* dlt_out = dlt_cmd->add_option("--out", dlt.out, "CSV path");

    StabilityArgs stb;
    auto* stb_cmd = app.add_subcommand("stability", "solution-map perturbation sweep");
    stb_cmd->fallthrough();
    auto* stb_f = stb_cmd->add_option("--f", stb.f, "coefficient");
    auto* stb_xi = stb_cmd->add_option("--xi", stb.xi, "boundary data field");
    auto* stb_x = stb_cmd->add_option("--X", stb.x, "driving field");
    auto* stb_k = stb_cmd->add_option("--k", stb.k, "dimension");
    auto* stb_n = stb_cmd->add_option("--n", stb.n, "nodes per axis");
    auto* stb_eps = stb_cmd->add_option("--eps", stb.eps_text, "perturbation sizes");
    auto* stb_pert = stb_cmd->add_option("--perturb", stb.perturb, "'xi' or 'x'");
    auto* stb_beta = stb_cmd->add_option("--beta", stb.beta_text, "comparison exponents");
    auto* stb_tile = stb_cmd->add_option("--tile", stb.tile_text, "tile size list");
    auto* stb_tol = stb_cmd->add_option("--tol", stb.tol, "fixed-point tolerance");
    auto* stb_out = stb_cmd->add_option("--out", stb.out, "CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    // Worker cap: flag > config > HYPERSEW_THREADS (read at startup) > 1.
    auto resolve_threads = [&](const Config& cfg) {
        const unsigned fallback = static_cast<unsigned>(max_threads());
        const unsigned resolved =
            merge(threads_opt->count() > 0, threads, cfg, "threads", fallback);
        if (resolved == 0) throw ConfigError("config key 'threads': must be at least 1");
        set_max_threads(static_cast<int>(resolved));
    };

    if (gen_cmd->parsed()) {
        const Config cfg = Config::load(config_path, {"kind", "k", "H", "n", "seed", "out",
                                                      "threads"});
        gen.kind = merge(gen_kind->count() > 0, gen.kind, cfg, "kind", gen.kind);
        gen.k = merge(gen_k->count() > 0, gen.k, cfg, "k", gen.k);
        gen.hurst_text = merge(gen_h->count() > 0, gen.hurst_text, cfg, "H", gen.hurst_text);
        gen.n = merge(gen_n->count() > 0, gen.n, cfg, "n", gen.n);
        gen.seed = merge(gen_seed->count() > 0, gen.seed, cfg, "seed", gen.seed);
        gen.out = merge(gen_out->count() > 0, gen.out, cfg, "out", gen.out);
        resolve_threads(cfg);
        return cmd_gen_field(gen);
    }
    if (int_cmd->parsed()) {
        const Config cfg = Config::load(config_path, {"y", "x", "k", "n", "rect", "tol",
                                                      "max_level", "out", "threads"});
        intg.y = merge(int_y->count() > 0, intg.y, cfg, "y", intg.y);
        intg.x = merge(int_x->count() > 0, intg.x, cfg, "x", intg.x);
        intg.k = merge(int_k->count() > 0, intg.k, cfg, "k", intg.k);
        intg.n = merge(int_n->count() > 0, intg.n, cfg, "n", intg.n);
        intg.rect = merge(int_rect->count() > 0, intg.rect, cfg, "rect", intg.rect);
        intg.tol = merge(int_tol->count() > 0, intg.tol, cfg, "tol", intg.tol);
        intg.max_level = merge(int_lvl->count() > 0, intg.max_level, cfg, "max_level",
                               intg.max_level);
        intg.out = merge(int_out->count() > 0, intg.out, cfg, "out", intg.out);
        resolve_threads(cfg);
        return cmd_integrate(intg);
    }
    if (sol_cmd->parsed()) {
        const Config cfg = Config::load(config_path, {"f", "xi", "x", "k", "n", "tile", "tol",
                                                      "max_iter", "x_scale", "out", "sidecar",
                                                      "threads"});
        sol.f = merge(sol_f->count() > 0, sol.f, cfg, "f", sol.f);
        sol.xi = merge(sol_xi->count() > 0, sol.xi, cfg, "xi", sol.xi);
        sol.x = merge(sol_x->count() > 0, sol.x, cfg, "x", sol.x);
        sol.k = merge(sol_k->count() > 0, sol.k, cfg, "k", sol.k);
        sol.n = merge(sol_n->count() > 0, sol.n, cfg, "n", sol.n);
        sol.tile_text = merge(sol_tile->count() > 0, sol.tile_text, cfg, "tile", sol.tile_text);
        sol.tol = merge(sol_tol->count() > 0, sol.tol, cfg, "tol", sol.tol);
        sol.max_iter = merge(sol_iter->count() > 0, sol.max_iter, cfg, "max_iter", sol.max_iter);
        sol.x_scale = merge(sol_scale->count() > 0, sol.x_scale, cfg, "x_scale", sol.x_scale);
        sol.out = merge(sol_out->count() > 0, sol.out, cfg, "out", sol.out);
        sol.sidecar = merge(sol_side->count() > 0, sol.sidecar, cfg, "sidecar", sol.sidecar);
        resolve_threads(cfg);
        return cmd_solve(sol);
    }
    if (cnv_cmd->parsed()) {
        const Config cfg = Config::load(config_path, {"y", "x", "k", "n", "rect", "levels",
                                                      "out", "threads"});
        cnv.y = merge(cnv_y->count() > 0, cnv.y, cfg, "y", cnv.y);
        cnv.x = merge(cnv_x->count() > 0, cnv.x, cfg, "x", cnv.x);
        cnv.k = merge(cnv_k->count() > 0, cnv.k, cfg, "k", cnv.k);
        cnv.n = merge(cnv_n->count() > 0, cnv.n, cfg, "n", cnv.n);
        cnv.rect = merge(cnv_rect->count() > 0, cnv.rect, cfg, "rect", cnv.rect);
        cnv.levels = merge(cnv_lvl->count() > 0, cnv.levels, cfg, "levels", cnv.levels);
        cnv.out = merge(cnv_out->count() > 0, cnv.out, cfg, "out", cnv.out);
        resolve_threads(cfg);
        return cmd_convergence(cnv);
    }
    if (dlt_cmd->parsed()) {
        const Config cfg = Config::load(config_path, {"k", "trials", "seed", "out", "threads"});
        dlt.k = merge(dlt_k->count() > 0, dlt.k, cfg, "k", dlt.k);
        dlt.trials = merge(dlt_trials->count() > 0, dlt.trials, cfg, "trials", dlt.trials);
        dlt.seed = merge(dlt_seed->count() > 0, dlt.seed, cfg, "seed", dlt.seed);
        dlt.out = merge(dlt_out->count() > 0, dlt.out, cfg, "out", dlt.out);
        resolve_threads(cfg);
        return cmd_delta_check(dlt);
    }
    const Config cfg = Config::load(config_path, {"f", "xi", "x", "k", "n", "eps", "perturb",
                                                  "beta", "tile", "tol", "out", "threads"});
    stb.f = merge(stb_f->count() > 0, stb.f, cfg, "f", stb.f);
    stb.xi = merge(stb_xi->count() > 0, stb.xi, cfg, "xi", stb.xi);
    stb.x = merge(stb_x->count() > 0, stb.x, cfg, "x", stb.x);
    stb.k = merge(stb_k->count() > 0, stb.k, cfg, "k", stb.k);
    stb.n = merge(stb_n->count() > 0, stb.n, cfg, "n", stb.n);
    stb.eps_text = merge(stb_eps->count() > 0, stb.eps_text, cfg, "eps", stb.eps_text);
    stb.perturb = merge(stb_pert->count() > 0, stb.perturb, cfg, "perturb", stb.perturb);
    stb.beta_text = merge(stb_beta->count() > 0, stb.beta_text, cfg, "beta", stb.beta_text);
    stb.tile_text = merge(stb_tile->count() > 0, stb.tile_text, cfg, "tile", stb.tile_text);
    stb.tol = merge(stb_tol->count() > 0, stb.tol, cfg, "tol", stb.tol);
    stb.out = merge(stb_out->count() > 0, stb.out, cfg, "out", stb.out);
    resolve_threads(cfg);
    return cmd_stability(stb);
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "hypersew: error: " << e.what() << "\n";
        return 2;
    } catch (const NoContraction& e) {
        std::cerr << "hypersew: error: " << e.what() << "\n";
        return 5;
    } catch (const ContractionFailure& e) {
        std::cerr << "hypersew: error: " << e.what() << "\n";
        return 5;
    } catch (const NodeMismatch& e) {
        std::cerr << "hypersew: error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "hypersew: error: " << e.what() << "\n";
        return 3;
    } catch (const GridMismatch& e) {
        std::cerr << "hypersew: error: " << e.what() << "\n";
        return 3;
    } catch (const CovarianceError& e) {
        std::cerr << "hypersew: error: " << e.what() << "\n";
        return 3;
    } catch (const EmptySample& e) {
        std::cerr << "hypersew: error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "hypersew: error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "hypersew: error: " << e.what() << "\n";
        return 2;
    }
}
