#pragma once

#include <cmath>
#include <vector>

#include "t3e/field.hpp"

// The cutoff chi on Q~ = [-1,2]^3: a product of one-axis ramps built from the
// smootherstep polynomial, equal to 1 on [0,1]^3, vanishing on the boundary,
// and twice continuously differentiable.  Closed-form derivatives throughout;
// quadrature over Q~ samples each axis at 3N points aligned with the torus
// grid so periodic fields restrict without interpolation.

namespace t3e {

inline double smootherstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

inline double smootherstep_d1(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 30.0 * t * t * (t - 1.0) * (t - 1.0);
}

inline double smootherstep_d2(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 60.0 * t * (2.0 * t - 1.0) * (t - 1.0);
}

/// One-axis factor f(t) = S(t+1) S(2-t) on [-1,2]: ramps up on [-1,0], is 1
/// on [0,1], ramps down on [1,2].
inline double cutoff_factor(double t) { return smootherstep(t + 1.0) * smootherstep(2.0 - t); }

inline double cutoff_factor_d1(double t) {
    return smootherstep_d1(t + 1.0) * smootherstep(2.0 - t) -
           smootherstep(t + 1.0) * smootherstep_d1(2.0 - t);
}

inline double cutoff_factor_d2(double t) {
    return smootherstep_d2(t + 1.0) * smootherstep(2.0 - t) -
           2.0 * smootherstep_d1(t + 1.0) * smootherstep_d1(2.0 - t) +
           smootherstep(t + 1.0) * smootherstep_d2(2.0 - t);
}

inline double cutoff_chi(double x, double y, double z) {
    return cutoff_factor(x) * cutoff_factor(y) * cutoff_factor(z);
}

/// Sampled maxima of the cutoff derivatives over Q~ (per-axis sampling; the
/// product structure makes the 3-d extrema products of 1-d extrema, but the
/// Laplacian is summed honestly over a 3-d lattice).
struct CutoffMaxima {
    double second_diagonal;   // max |d^2 chi / dx_i^2|
    double first_partial;     // max |d chi / dx_i|
    double second_mixed;      // max |d^2 chi / dx_i dx_j|, i != j
    double laplacian;         // max |Laplace chi|
    double gradient_norm;     // max |D chi|
    double hessian_entry;     // max entry of D^2 chi (diagonal or mixed)
    double smootherstep_d1_max;  // sampled max of |S'| on [0,1]
};

inline CutoffMaxima sampled_cutoff_maxima(int samples_per_axis) {
    if (samples_per_axis < 300)
        throw DomainError("sampled_cutoff_maxima: need at least 300 samples per axis");
    int m = samples_per_axis;
    if ((m - 1) % 6 != 0) m += 6 - (m - 1) % 6;  // keep t = -0.5, 0.5, ... on the lattice
    std::vector<double> f(m), d1(m), d2(m);
    for (int i = 0; i < m; ++i) {
        const double t = -1.0 + 3.0 * i / (m - 1);
        f[i] = cutoff_factor(t);
        d1[i] = cutoff_factor_d1(t);
        d2[i] = cutoff_factor_d2(t);
    }
    double fmax = 0.0, d1max = 0.0, d2max = 0.0;
    for (int i = 0; i < m; ++i) {
        fmax = std::max(fmax, std::abs(f[i]));
        d1max = std::max(d1max, std::abs(d1[i]));
        d2max = std::max(d2max, std::abs(d2[i]));
    }
    CutoffMaxima r{};
    r.second_diagonal = d2max * fmax * fmax;
    r.first_partial = d1max * fmax * fmax;
    r.second_mixed = d1max * d1max * fmax;
    r.hessian_entry = std::max(r.second_diagonal, r.second_mixed);

    // Laplacian and gradient norm need the joint lattice
    double lap = 0.0, grad = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                const double l = d2[i] * f[j] * f[k] + f[i] * d2[j] * f[k] + f[i] * f[j] * d2[k];
                lap = std::max(lap, std::abs(l));
                const double gx = d1[i] * f[j] * f[k];
                const double gy = f[i] * d1[j] * f[k];
                const double gz = f[i] * f[j] * d1[k];
                grad = std::max(grad, std::sqrt(gx * gx + gy * gy + gz * gz));
            }
    r.laplacian = lap;
    r.gradient_norm = grad;

    double s1 = 0.0;
    for (int i = 0; i < m; ++i) {
        const double t = static_cast<double>(i) / (m - 1);
        s1 = std::max(s1, std::abs(smootherstep_d1(t)));
    }
    r.smootherstep_d1_max = s1;
    return r;
}

/// Riemann-sum quadrature over Q~ = [-1,2]^3 for chi * (periodic field),
/// sampling each axis at 3N torus-aligned points.
class QtildeQuadrature {
  public:
    explicit QtildeQuadrature(GridSpec g) : grid_(g), m_(3 * g.n) {
        chi_.resize(m_);
        dchi_.resize(m_);
        wrap_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            const double t = -1.0 + static_cast<double>(i) / g.n;
            chi_[i] = cutoff_factor(t);
            dchi_[i] = cutoff_factor_d1(t);
            wrap_[i] = i % g.n;  // torus index of this Q~ point
        }
    }

    /// || chi u ||_{L^p(Q~)} for a periodic u.
    double lp_norm_cutoff(const ScalarField& u, double p) const {
        double s = 0.0;
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < m_; ++j)
                for (int k = 0; k < m_; ++k) {
                    const double v =
                        chi_[i] * chi_[j] * chi_[k] * u.at(wrap_[i], wrap_[j], wrap_[k]);
                    s += std::pow(std::abs(v), p);
                }
        s /= static_cast<double>(grid_.size());  // h^3 = N^{-3}
        return std::pow(s, 1.0 / p);
    }

    /// || D(chi u) ||_{L^p(Q~)}: product rule with the closed-form d chi and
    /// the spectral derivatives of u.
    double lp_norm_gradient_cutoff(const ScalarField& u, double p) const {
        std::array<ScalarField, 3> du{spectral_derivative(u, 0), spectral_derivative(u, 1),
                                      spectral_derivative(u, 2)};
        double s = 0.0;
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < m_; ++j)
                for (int k = 0; k < m_; ++k) {
                    const std::size_t q = grid_.idx(wrap_[i], wrap_[j], wrap_[k]);
                    const double uu = u.v[q];
                    const double cx = chi_[i], cy = chi_[j], cz = chi_[k];
                    const double gx = dchi_[i] * cy * cz * uu + cx * cy * cz * du[0].v[q];
                    const double gy = cx * dchi_[j] * cz * uu + cx * cy * cz * du[1].v[q];
                    const double gz = cx * cy * dchi_[k] * uu + cx * cy * cz * du[2].v[q];
                    s += std::pow(std::sqrt(gx * gx + gy * gy + gz * gz), p);
                }
        s /= static_cast<double>(grid_.size());
        return std::pow(s, 1.0 / p);
    }

  private:
    GridSpec grid_;
    int m_;
    std::vector<double> chi_, dchi_;
    std::vector<int> wrap_;
};

}  // namespace t3e
