#include "hypersew/field_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

namespace hypersew {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const std::string& path, std::size_t line) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE)
        throw IoError(path + ":" + std::to_string(line) + ": bad float '" + s + "'");
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

} // namespace

void write_field_csv(const std::string& path, const Field& field,
                     const std::vector<double>& hurst, std::uint64_t seed) {
    if (!field.is_grid_sampled())
        throw IoError("only grid-sampled fields serialize to CSV");
    const std::size_t k = field.dimension();
    if (hurst.size() != k)
        throw IoError("metadata needs one Hurst entry per axis");

    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << k;
    for (double h : hurst) out << ',' << format_double(h);
    out << ',' << seed << '\n';

    const GridPartition& grid = field.grid();
    const std::vector<double>& values = field.node_values();
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const MultiPoint node = grid.node(i);
        for (std::size_t a = 0; a < k; ++a) out << format_double(node[a]) << ',';
        out << format_double(values[i]) << '\n';
    }
    if (!out) throw IoError("write to '" + path + "' failed");
}

LoadedField read_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");

    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    const std::vector<std::string> head = split_csv(line);
    if (head.size() < 3) throw IoError(path + ": header needs k, Hurst entries and seed");
    const long k_raw = std::strtol(head[0].c_str(), nullptr, 10);
    if (k_raw < 1) throw IoError(path + ": bad dimension '" + head[0] + "'");
    const std::size_t k = static_cast<std::size_t>(k_raw);
    if (head.size() != k + 2)
        throw IoError(path + ": header has " + std::to_string(head.size()) +
                      " cells, expected " + std::to_string(k + 2));
    std::vector<double> hurst(k);
    for (std::size_t a = 0; a < k; ++a) hurst[a] = parse_double(head[a + 1], path, 1);
    const std::uint64_t seed = std::strtoull(head[k + 1].c_str(), nullptr, 10);

    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv(line);
        if (cells.size() != k + 1)
            throw IoError(path + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(k + 1) + " cells, got " + std::to_string(cells.size()));
        std::vector<double> row(k + 1);
        for (std::size_t c = 0; c <= k; ++c) row[c] = parse_double(cells[c], path, lineno);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError(path + ": no data rows");

    // Axis node lists: sorted unique coordinates seen per axis (values round
    // trip exactly, so exact comparison is safe).
    std::vector<std::vector<double>> axes(k);
    for (std::size_t a = 0; a < k; ++a) {
        for (const auto& row : rows) axes[a].push_back(row[a]);
        std::sort(axes[a].begin(), axes[a].end());
        axes[a].erase(std::unique(axes[a].begin(), axes[a].end()), axes[a].end());
    }
    auto grid = [&]() -> GridPartition {
        try {
            return GridPartition(axes);
        } catch (const Error& e) {
            throw IoError(path + ": node coordinates do not form a valid grid: " + e.what());
        }
    }();
    if (rows.size() != grid.node_count())
        throw IoError(path + ": " + std::to_string(rows.size()) + " rows do not fill a " +
                      std::to_string(grid.node_count()) + "-node tensor grid");

    std::vector<double> values(grid.node_count());
    std::vector<bool> seen(grid.node_count(), false);
    for (const auto& row : rows) {
        std::size_t flat = 0;
        for (std::size_t a = 0; a < k; ++a) {
            const auto& ax = axes[a];
            const std::size_t idx = static_cast<std::size_t>(
                std::lower_bound(ax.begin(), ax.end(), row[a]) - ax.begin());
            flat += idx * grid.node_indexer().stride(a);
        }
        if (seen[flat]) throw IoError(path + ": duplicate node row");
        seen[flat] = true;
        values[flat] = row[k];
    }
    return LoadedField{Field::grid_sampled(std::move(grid), std::move(values)), hurst, seed};
}

} // namespace hypersew
