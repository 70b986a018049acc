#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "srq/error.hpp"

namespace srq {

// The H x W similarity grid between a query token feature and image features.
// Row-major, unitless similarity scores. Sole required input of the toolkit.
struct ResponseMap {
    int height = 0;
    int width = 0;
    std::vector<double> values;

    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(col);
    }
    double at(int row, int col) const { return values[index(row, col)]; }
    double& at(int row, int col) { return values[index(row, col)]; }
    std::size_t size() const { return values.size(); }
};

// Ingestion contract: H >= 2, W >= 2, H*W entries, all finite.
inline void validate(const ResponseMap& map) {
    if (map.height < 2 || map.width < 2)
        throw IngestionError("response map must be at least 2x2, got " +
                             std::to_string(map.height) + "x" + std::to_string(map.width));
    const std::size_t expected =
        static_cast<std::size_t>(map.height) * static_cast<std::size_t>(map.width);
    if (map.values.size() != expected)
        throw IngestionError("response map has " + std::to_string(map.values.size()) +
                             " values, expected " + std::to_string(expected));
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        if (!std::isfinite(map.values[i]))
            throw IngestionError("response map contains a non-finite value at index " +
                                 std::to_string(i));
    }
}

}  // namespace srq
