#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cdk/mat2.hpp"

namespace cdk {

/// Export container for kernel grids: one index (n or L), a list of (z,w)
/// pairs and the corresponding rescaled kernel values, matrix or scalar.
struct KernelTable {
    std::string model_id;
    double xi = 0.0;
    double scale = 0.0;  // tau or f * K(xi,xi)
    double index = 0.0;  // n or L
    bool matrix = false;
    std::vector<std::pair<Complex, Complex>> grid;
    std::vector<Mat2C> mvalues;   // used when matrix
    std::vector<Complex> svalues;  // used when scalar

    size_t size() const { return grid.size(); }

    /// CSV with one row per grid pair; numbers printed with up to 17
    /// significant digits so a reread round-trips exactly.
    std::string to_csv() const;
    /// Deterministic JSON (sorted keys, round-trip doubles).
    std::string to_json_string() const;
};

}  // namespace cdk
