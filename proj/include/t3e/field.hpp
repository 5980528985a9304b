#pragma once

#include <fftw3.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstring>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <vector>

#include "t3e/errors.hpp"
#include "t3e/grid.hpp"

// Periodic fields on the unit 3-torus with spectral calculus: exact
// differentiation of the trigonometric interpolant, Lp/Sobolev norms by the
// uniform-grid Riemann sum (spectrally accurate for smooth periodic
// integrands), and the inverse flat Laplacian on mean-zero fields.
// Everything is by-value and pure; transforms go through cached FFTW plans.

namespace t3e {

class ScalarField {
  public:
    explicit ScalarField(GridSpec g) : grid(g), v(g.size(), 0.0) {}

    GridSpec grid;
    std::vector<double> v;

    double& at(int i, int j, int k) { return v[grid.idx(i, j, k)]; }
    double at(int i, int j, int k) const { return v[grid.idx(i, j, k)]; }
};

struct OneFormField {
    explicit OneFormField(GridSpec g) : grid(g), comp{ScalarField(g), ScalarField(g), ScalarField(g)} {}
    GridSpec grid;
    std::array<ScalarField, 3> comp;  // coefficients in the dx_i basis
};

/// Components T_ij in the dx_i (x) dx_j basis; no symmetry is assumed.
struct TwoTensorField {
    explicit TwoTensorField(GridSpec g)
        : grid(g), comp{ScalarField(g), ScalarField(g), ScalarField(g),
                        ScalarField(g), ScalarField(g), ScalarField(g),
                        ScalarField(g), ScalarField(g), ScalarField(g)} {}
    GridSpec grid;
    std::array<ScalarField, 9> comp;
    ScalarField& at(int i, int j) { return comp[3 * i + j]; }
    const ScalarField& at(int i, int j) const { return comp[3 * i + j]; }
};

/// Half-spectrum (r2c layout) of a real field; coefficients are the true
/// Fourier coefficients (forward transform divides by N^3).
class SpectralField {
  public:
    explicit SpectralField(GridSpec g)
        : grid(g), c(static_cast<std::size_t>(g.n) * g.n * (g.n / 2 + 1), {0.0, 0.0}) {}

    GridSpec grid;
    std::vector<std::complex<double>> c;

    std::size_t idx(int i, int j, int k3) const {
        return (static_cast<std::size_t>(i) * grid.n + j) * (grid.n / 2 + 1) + k3;
    }
};

namespace detail {

struct FftwPlans {
    explicit FftwPlans(int n) : n(n) {
        const std::size_t nreal = static_cast<std::size_t>(n) * n * n;
        const std::size_t ncplx = static_cast<std::size_t>(n) * n * (n / 2 + 1);
        real_buf = fftw_alloc_real(nreal);
        cplx_buf = fftw_alloc_complex(ncplx);
        fwd = fftw_plan_dft_r2c_3d(n, n, n, real_buf, cplx_buf, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_3d(n, n, n, cplx_buf, real_buf, FFTW_ESTIMATE);
    }
    ~FftwPlans() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(real_buf);
        fftw_free(cplx_buf);
    }
    int n;
    double* real_buf;
    fftw_complex* cplx_buf;
    fftw_plan fwd, bwd;
};

inline FftwPlans& plans_for(int n) {
    static std::map<int, std::unique_ptr<FftwPlans>> cache;
    auto& p = cache[n];
    if (!p) p = std::make_unique<FftwPlans>(n);
    return *p;
}

}  // namespace detail

inline SpectralField fft_forward(const ScalarField& u) {
    auto& plans = detail::plans_for(u.grid.n);
    std::memcpy(plans.real_buf, u.v.data(), u.v.size() * sizeof(double));
    fftw_execute(plans.fwd);
    SpectralField s(u.grid);
    const double scale = 1.0 / static_cast<double>(u.grid.size());
    auto* raw = reinterpret_cast<std::complex<double>*>(plans.cplx_buf);
    for (std::size_t i = 0; i < s.c.size(); ++i) s.c[i] = raw[i] * scale;
    return s;
}

inline ScalarField fft_inverse(const SpectralField& s) {
    auto& plans = detail::plans_for(s.grid.n);
    std::memcpy(plans.cplx_buf, s.c.data(), s.c.size() * sizeof(fftw_complex));
    fftw_execute(plans.bwd);  // c2r scrambles the input buffer; it is scratch
    ScalarField u(s.grid);
    std::memcpy(u.v.data(), plans.real_buf, u.v.size() * sizeof(double));
    return u;
}

// ---------------------------------------------------------------------------
// pointwise helpers

inline ScalarField sample(GridSpec g, const std::function<double(double, double, double)>& f) {
    ScalarField u(g);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k)
                u.at(i, j, k) = f(g.coord(i), g.coord(j), g.coord(k));
    return u;
}

inline ScalarField constant_field(GridSpec g, double c) {
    ScalarField u(g);
    for (double& x : u.v) x = c;
    return u;
}

inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    ScalarField r(a.grid);
    for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] = a.v[i] + b.v[i];
    return r;
}
inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    ScalarField r(a.grid);
    for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] = a.v[i] - b.v[i];
    return r;
}
inline ScalarField operator*(double s, const ScalarField& a) {
    ScalarField r(a.grid);
    for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] = s * a.v[i];
    return r;
}
inline ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    ScalarField r(a.grid);
    for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] = a.v[i] * b.v[i];
    return r;
}

inline double grid_max_abs(const ScalarField& u) {
    double m = 0.0;
    for (double x : u.v) m = std::max(m, std::abs(x));
    return m;
}

inline double mean(const ScalarField& u) {
    double s = 0.0;
    for (double x : u.v) s += x;
    return s / static_cast<double>(u.v.size());
}

// ---------------------------------------------------------------------------
// spectral calculus

/// Applies a mode-wise multiplier m(k1,k2,k3) built from the Nyquist-zeroed
/// signed wavenumbers.
inline ScalarField apply_multiplier(
    const ScalarField& u, const std::function<std::complex<double>(int, int, int)>& m) {
    SpectralField s = fft_forward(u);
    const int n = u.grid.n;
    for (int i = 0; i < n; ++i) {
        const int k1 = k_tilde(i, n);
        for (int j = 0; j < n; ++j) {
            const int k2 = k_tilde(j, n);
            for (int k = 0; k <= n / 2; ++k) {
                const int k3 = k_tilde(k, n);
                s.c[s.idx(i, j, k)] *= m(k1, k2, k3);
            }
        }
    }
    return fft_inverse(s);
}

/// d/dx_axis of the trigonometric interpolant (axis 0, 1 or 2); the Nyquist
/// mode's derivative is zero by the k_tilde convention.
inline ScalarField spectral_derivative(const ScalarField& u, int axis) {
    if (axis < 0 || axis > 2) throw DomainError("spectral_derivative: axis must be 0, 1 or 2");
    const double two_pi = 2.0 * M_PI;
    return apply_multiplier(u, [axis, two_pi](int k1, int k2, int k3) {
        const int k[3] = {k1, k2, k3};
        return std::complex<double>(0.0, two_pi * k[axis]);
    });
}

inline OneFormField gradient(const ScalarField& u) {
    OneFormField w(u.grid);
    for (int a = 0; a < 3; ++a) w.comp[a] = spectral_derivative(u, a);
    return w;
}

/// Flat Hessian (d_i d_j u); symmetric by construction since (i,j) and (j,i)
/// share one spectral multiplier.
inline TwoTensorField hessian(const ScalarField& u) {
    TwoTensorField h(u.grid);
    const double four_pi_sq = 4.0 * M_PI * M_PI;
    for (int a = 0; a < 3; ++a) {
        for (int b = a; b < 3; ++b) {
            ScalarField hab = apply_multiplier(u, [a, b, four_pi_sq](int k1, int k2, int k3) {
                const int k[3] = {k1, k2, k3};
                return std::complex<double>(-four_pi_sq * k[a] * k[b], 0.0);
            });
            h.at(a, b) = hab;
            if (a != b) h.at(b, a) = hab;
        }
    }
    return h;
}

/// Trace of the flat Hessian, assembled from the three diagonal
/// second-derivative transforms so that it agrees bit-for-bit with the
/// Laplace-Beltrami operator evaluated on an exactly flat metric.
inline ScalarField laplacian_flat(const ScalarField& u) {
    const double four_pi_sq = 4.0 * M_PI * M_PI;
    ScalarField r(u.grid);
    for (int a = 0; a < 3; ++a) {
        ScalarField daa = apply_multiplier(u, [a, four_pi_sq](int k1, int k2, int k3) {
            const int k[3] = {k1, k2, k3};
            return std::complex<double>(-four_pi_sq * k[a] * k[a], 0.0);
        });
        for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] += daa.v[i];
    }
    return r;
}

inline ScalarField mean_zero_project(const ScalarField& u) {
    const double m = mean(u);
    ScalarField r(u.grid);
    for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] = u.v[i] - m;
    return r;
}

/// Inverse of laplacian_flat on mean-zero fields: divides each nonzero mode
/// by -4 pi^2 |k|^2.  Modes invisible to the derivative convention (the zero
/// mode and pure-Nyquist modes) stay zero.
inline ScalarField inverse_laplacian_flat(const ScalarField& u) {
    double l2 = 0.0;
    for (double x : u.v) l2 += x * x;
    l2 = std::sqrt(l2 / static_cast<double>(u.v.size()));
    if (std::abs(mean(u)) > 1e-10 * std::max(l2, 1e-300))
        throw NotMeanZero("inverse_laplacian_flat: field has nonzero mean");
    const double four_pi_sq = 4.0 * M_PI * M_PI;
    return apply_multiplier(u, [four_pi_sq](int k1, int k2, int k3) {
        const int ksq = k1 * k1 + k2 * k2 + k3 * k3;
        if (ksq == 0) return std::complex<double>(0.0, 0.0);
        return std::complex<double>(-1.0 / (four_pi_sq * ksq), 0.0);
    });
}

// ---------------------------------------------------------------------------
// norms (uniform-grid quadrature)

inline double lp_norm(const ScalarField& u, double p) {
    if (p < 1.0) throw DomainError("lp_norm: p >= 1 required");
    double s = 0.0;
    const long ip = std::lround(p);
    if (std::abs(p - ip) < 1e-14 && ip >= 1) {
        for (double x : u.v) {
            double a = std::abs(x), t = a;
            for (long q = 1; q < ip; ++q) t *= a;
            s += t;
        }
    } else {
        for (double x : u.v) s += std::pow(std::abs(x), p);
    }
    s /= static_cast<double>(u.v.size());
    return std::pow(s, 1.0 / p);
}

/// Euclidean pointwise norm of a 1-form (flat metric).
inline ScalarField pointwise_norm(const OneFormField& w) {
    ScalarField r(w.grid);
    for (std::size_t i = 0; i < r.v.size(); ++i)
        r.v[i] = std::sqrt(w.comp[0].v[i] * w.comp[0].v[i] + w.comp[1].v[i] * w.comp[1].v[i] +
                           w.comp[2].v[i] * w.comp[2].v[i]);
    return r;
}

/// Frobenius pointwise norm of a 2-tensor (flat metric).
inline ScalarField pointwise_norm(const TwoTensorField& t) {
    ScalarField r(t.grid);
    for (std::size_t i = 0; i < r.v.size(); ++i) {
        double s = 0.0;
        for (int c = 0; c < 9; ++c) s += t.comp[c].v[i] * t.comp[c].v[i];
        r.v[i] = std::sqrt(s);
    }
    return r;
}

inline double lp_norm(const OneFormField& w, double p) { return lp_norm(pointwise_norm(w), p); }
inline double lp_norm(const TwoTensorField& t, double p) { return lp_norm(pointwise_norm(t), p); }

/// W^{k,p} norm with flat pointwise tensor norms:
/// sum_{i<=k} || |grad^i u| ||_p, k in {1,2}.
inline double sobolev_norm_flat(const ScalarField& u, int k, double p) {
    if (k < 1 || k > 2) throw DomainError("sobolev_norm_flat: k must be 1 or 2");
    double s = lp_norm(u, p) + lp_norm(gradient(u), p);
    if (k == 2) s += lp_norm(hessian(u), p);
    return s;
}

// ---------------------------------------------------------------------------
// deterministic test-function families

inline double uniform_pm1(std::mt19937_64& rng) {
    return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

/// Seeded random field with modes |k~|_inf <= kmax, mildly decaying
/// coefficients, zero mean.  The same (kmax, seed) gives the same continuum
/// function on any grid resolving those modes.
inline ScalarField random_band_limited(GridSpec g, int kmax, std::uint64_t seed) {
    if (kmax < 1 || 2 * kmax >= g.n)
        throw DomainError("random_band_limited: need 1 <= kmax < n/2");
    std::mt19937_64 rng(seed);
    SpectralField s(g);
    const int n = g.n;
    auto wrap = [n](int k) { return k >= 0 ? k : k + n; };
    // k3 > 0 half: free coefficients
    for (int k1 = -kmax; k1 <= kmax; ++k1)
        for (int k2 = -kmax; k2 <= kmax; ++k2)
            for (int k3 = 1; k3 <= kmax; ++k3) {
                const double amp = 1.0 / (1.0 + k1 * k1 + k2 * k2 + k3 * k3);
                s.c[s.idx(wrap(k1), wrap(k2), k3)] =
                    amp * std::complex<double>(uniform_pm1(rng), uniform_pm1(rng));
            }
    // k3 = 0 plane: conjugate pairs; the zero mode stays zero
    for (int k1 = -kmax; k1 <= kmax; ++k1)
        for (int k2 = -kmax; k2 <= kmax; ++k2) {
            if (k1 < 0 || (k1 == 0 && k2 <= 0)) continue;
            const double amp = 1.0 / (1.0 + k1 * k1 + k2 * k2);
            std::complex<double> c(uniform_pm1(rng), uniform_pm1(rng));
            s.c[s.idx(wrap(k1), wrap(k2), 0)] = amp * c;
            s.c[s.idx(wrap(-k1), wrap(-k2), 0)] = amp * std::conj(c);
        }
    return fft_inverse(s);
}

}  // namespace t3e
