#pragma once

#include <cstddef>

#include "t3e/errors.hpp"

namespace t3e {

/// Uniform N^3 sampling of [0,1)^3.  N even so the Nyquist convention below
/// is unambiguous.
struct GridSpec {
    int n = 0;

    GridSpec() = default;
    explicit GridSpec(int n_) : n(n_) {
        if (n < 4 || n % 2 != 0) throw DomainError("GridSpec: n must be even and >= 4");
    }

    double spacing() const { return 1.0 / n; }
    std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }
    // row-major, axis order x1 x2 x3 (x3 fastest)
    std::size_t idx(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n + j) * n + k;
    }
    double coord(int i) const { return static_cast<double>(i) / n; }

    bool operator==(const GridSpec&) const = default;
};

/// Signed wavenumber of mode index i, with the Nyquist mode mapped to zero:
/// differentiation of the trigonometric interpolant drops it.
inline int k_tilde(int i, int n) {
    if (2 * i == n) return 0;
    return (i <= n / 2) ? i : i - n;
}

}  // namespace t3e
