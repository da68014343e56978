#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypersew/errors.hpp"
#include "hypersew/fields.hpp"

namespace hypersew {

// File or parse failure on field CSV data.
struct IoError : Error {
    using Error::Error;
};

struct LoadedField {
    Field field;
    std::vector<double> hurst;
    std::uint64_t seed = 0;
};

// Grid-sampled field CSV layout:
//   line 1:  k,H_1,...,H_k,seed
//   line 2+: coord_1,...,coord_k,value      (row-major node order)
// Every float is written with 17 significant digits so a read-back is
// bit-exact. `hurst` entries are metadata only; pass zeros for fields that
// did not come from a sheet sampler.
void write_field_csv(const std::string& path, const Field& field,
                     const std::vector<double>& hurst, std::uint64_t seed);

LoadedField read_field_csv(const std::string& path);

} // namespace hypersew
