#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace fris {

/// Planar lattice of reflecting elements. `my` counts elements along the
/// y axis (columns), `mz` along the z axis (rows); linear element indices
/// are row-major with index m at (row, col) = (m / my, m % my).
struct surface_grid {
    int my = 1;
    int mz = 1;
    double spacing_m = 0.0;
    double wavelength_m = 0.0;

    int element_count() const noexcept { return my * mz; }

    /// The dense-grid premise asks for spacing below half a wavelength.
    /// Violating it is a configuration smell, not an error.
    bool spacing_below_half_wavelength() const noexcept {
        return spacing_m < wavelength_m / 2.0;
    }

    void validate() const {
        if (my < 1 || mz < 1)
            throw std::invalid_argument("surface_grid: element counts must be >= 1");
        if (!(spacing_m > 0.0))
            throw std::invalid_argument("surface_grid: spacing must be positive");
        if (!(wavelength_m > 0.0))
            throw std::invalid_argument("surface_grid: wavelength must be positive");
    }
};

struct lattice_coord {
    int row = 0;
    int col = 0;
};

inline lattice_coord element_coords(int m, const surface_grid& grid) {
    if (m < 0 || m >= grid.element_count())
        throw std::out_of_range("element_coords: index " + std::to_string(m) +
                                " outside [0, " + std::to_string(grid.element_count()) + ")");
    return {m / grid.my, m % grid.my};
}

/// Euclidean distance between two lattice sites in meters.
inline double pairwise_distance(int i, int j, const surface_grid& grid) {
    const lattice_coord a = element_coords(i, grid);
    const lattice_coord b = element_coords(j, grid);
    const double dr = static_cast<double>(a.row - b.row);
    const double dc = static_cast<double>(a.col - b.col);
    return grid.spacing_m * std::sqrt(dr * dr + dc * dc);
}

} // namespace fris
