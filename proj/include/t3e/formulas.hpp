#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "t3e/errors.hpp"
#include "t3e/interval.hpp"

// Closed-form constants for the elliptic estimates on the unit 3-torus,
// evaluated as rigorous enclosures.  The fixed-dimension instances that make
// up the published table live in ledger.hpp; the functions here expose the
// generic formulas and the delta-parametric comparison chain.

namespace t3e {

/// The proof chain bounds |g^{-1} - I| in two inconsistent ways; both are
/// carried, the stated 2*delta being the default downstream.
enum class InverseBoundMode { stated, derived };

/// Christoffel bound: the quadratic 9 delta^2 of the source chain, or the
/// first-order (9/2) delta (1 + inv) bound the same triangle inequality
/// actually yields.
enum class ChristoffelMode { quadratic, first_order };

/// omega_{n-1} in the Sobolev embedding constant: surface measure of the
/// unit (n-1)-sphere, or volume of the unit (n-1)-ball.
enum class SobolevOmegaMode { sphere_surface, ball_volume };

struct LedgerOptions {
    InverseBoundMode inverse_bound = InverseBoundMode::stated;
    ChristoffelMode christoffel = ChristoffelMode::quadratic;
    SobolevOmegaMode sobolev_omega = SobolevOmegaMode::sphere_surface;
};

// ---------------------------------------------------------------------------
// generic closed forms

/// Marcinkiewicz interpolation constant 2 (p(r-q)/((p-q)(r-p)))^{1/p},
/// for weak-(q,q) + weak-(r,r) bounds interpolated at p, q < p < r.
inline Interval marcinkiewicz_constant(double p, double q, double r) {
    if (!(q < p && p < r)) throw DomainError("marcinkiewicz_constant: need q < p < r");
    Interval P(p), Q(q), R(r);
    Interval ratio = P * (R - Q) / ((P - Q) * (R - P));
    return Interval(2.0) * pow(ratio, Interval(1.0) / P);
}

/// Weak-type (1,1) distribution constant T1 = 2^{n+2} + 8 n^2 (n+5)
/// + omega_n n^{n/2} from the cube-decomposition argument; T2 = 1.
inline Interval t1_distribution_constant(int n) {
    if (n < 1) throw DomainError("t1_distribution_constant: n >= 1 required");
    Interval c7 = Interval(2.0) * pow_int(Interval(double(n)), 2) * Interval(double(n + 5));
    Interval c8 = unit_ball_volume(n) * pow(Interval(double(n)), Interval::rational(n, 2));
    return pow_int(Interval(2.0), n + 2) + Interval(4.0) * c7 + c8;
}

inline Interval t2_distribution_constant() { return Interval(1.0); }

/// Calderon-Zygmund constant for the Newtonian potential: 1 at p = 2,
/// otherwise Marcinkiewicz between the weak (1,1) and strong (2,2) bounds,
/// extended past p = 2 by duality (p is canonicalized to min(p, p/(p-1)),
/// so conjugate exponents give bit-identical intervals).
inline Interval calderon_zygmund_constant(int n, double p) {
    if (p <= 1.0) throw DomainError("calderon_zygmund_constant: p > 1 required");
    if (p == 2.0) return Interval(1.0);
    if (p > 2.0) return calderon_zygmund_constant(n, p / (p - 1.0));
    Interval P(p);
    Interval cm = marcinkiewicz_constant(p, 1.0, 2.0);
    Interval alpha = Interval(2.0) / P - Interval(1.0);
    Interval t1 = t1_distribution_constant(n);
    return cm * pow(t1, alpha) * pow(t2_distribution_constant(), Interval(1.0) - alpha);
}

/// Poincare constant (|Omega| / omega_n)^{1/n} for W^{1,p}_0(Omega).
inline Interval poincare_constant(int n, double volume) {
    if (volume <= 0.0) throw DomainError("poincare_constant: volume must be positive");
    return pow(Interval(volume) / unit_ball_volume(n), Interval::rational(1, n));
}

/// ||D^2 u|| + ||Du|| <= C ||Laplace u|| on W^{2,p}_0(Omega):
/// C = n^2 C_CZ(n,p) (n C_Poincare + 1).
inline Interval grad_plus_hessian_constant(int n, double p, double volume) {
    return pow_int(Interval(double(n)), 2) * calderon_zygmund_constant(n, p) *
           (Interval(double(n)) * poincare_constant(n, volume) + Interval(1.0));
}

/// Sharp Sobolev constant K(n,q) for ||u||_{L^{nq/(n-q)}} <= K ||Du||_{L^q}
/// on W^{1,q}_0(R^n).  Gamma arguments must be integers or half-integers.
inline Interval sobolev_embedding_constant(int n, double q,
                                           SobolevOmegaMode mode = SobolevOmegaMode::sphere_surface) {
    if (q >= n) throw DomainError("sobolev_embedding_constant: q < n required");
    if (q <= 1.0)
        throw DomainError("sobolev_embedding_constant: the closed form needs q > 1");
    const double two_nq = 2.0 * n / q;
    const int two_nq_int = static_cast<int>(std::lround(two_nq));
    if (std::abs(two_nq - two_nq_int) > 1e-9)
        throw DomainError("sobolev_embedding_constant: n/q must be a half-integer");
    Interval gamma_nq = gamma_half_integer(two_nq_int);
    Interval gamma_rest = gamma_half_integer(2 * (n + 1) - two_nq_int);
    Interval omega = (mode == SobolevOmegaMode::sphere_surface)
                         ? Interval(double(n)) * unit_ball_volume(n)
                         : unit_ball_volume(n - 1);
    Interval N{double(n)}, Q{q};
    Interval front = (Q - Interval(1.0)) / (N - Q);
    Interval middle = pow((N - Q) / (N * (Q - Interval(1.0))), Interval(1.0) / Q);
    Interval last = pow(factorial(n) / (gamma_nq * gamma_rest * omega), Interval::rational(1, n));
    return front * middle * last;
}

/// Tabulated W^{1,2} -> L^4 embedding constant on the unit cube
/// (Mizuguchi, Tanaka, Sekine, Oishi 2017, table 6, p. 15).
inline Interval cube_sobolev_constant() { return Interval(13.25); }

/// Morrey bound ||u||_{C^0} <= C ||u||_{W^{1,4}} on the unit 3-torus:
/// C = max(omega_3^{-1/4}, (int_{B(0,1)} |y|^{8/3} dy)^{3/4}), where the
/// radial integral evaluates to 12 pi / 17.
inline Interval morrey_constant() {
    Interval w3 = unit_ball_volume(3);
    Interval radial = Interval(12.0) * Interval::pi() / Interval(17.0);
    return max(pow(w3, Interval::rational(-1, 4)), pow(radial, Interval::rational(3, 4)));
}

/// Derivative bounds for the smootherstep-based cutoff: the three factor
/// extrema b1, b2, b3 and the assembled bounds on |Laplace chi|, |D chi| and
/// the largest entry of D^2 chi.
struct CutoffBounds {
    Interval b1, b2, b3;
    Interval laplacian;  // 3 b1
    Interval gradient;   // sqrt(3) b2
    Interval hessian;    // 3 b3
};

inline CutoffBounds cutoff_derivative_bounds() {
    Interval s3 = sqrt(Interval(3.0));
    Interval u = Interval(9.0) + s3;
    Interval b1 = Interval(-60.0) * (Interval(-6.0) + Interval::rational(13, 6) * u -
                                     pow_int(u, 2) / Interval(4.0) +
                                     pow_int(u, 3) / Interval(108.0));
    Interval b2 = Interval(60.0) * (Interval(2.0) * s3 - Interval(3.0));
    Interval b3 = Interval(20.0) * (Interval(5.0) * s3 - Interval(6.0));
    return {b1, b2, b3, Interval(3.0) * b1, s3 * b2, Interval(3.0) * b3};
}

/// Schauder-type constant on the torus assembled from its parts; exposed so
/// the structure (collapse at C3 = 0, monotonicity) can be probed directly.
inline Interval schauder_from_parts(const Interval& c3, const Interval& cutoff_laplacian,
                                    const Interval& holder, const Interval& cutoff_hessian,
                                    const Interval& sobolev_k) {
    Interval bracket = Interval(2.0) + Interval(54.0) * Interval(27.0) * sqrt(Interval(17.0));
    return Interval(27.0) *
           (Interval(1.0) + c3 * cutoff_laplacian + bracket * c3 * holder * cutoff_hessian * sobolev_k);
}

/// Flat injectivity constant from the Schauder constant:
/// (1/4pi^2) CS * 13.25 * (1 + 27 sqrt(17)) + CS (1 + 27 * 13.25).
inline Interval flat_injectivity_from_schauder(const Interval& cs) {
    Interval s17 = sqrt(Interval(17.0));
    Interval four_pi_sq = Interval(4.0) * pow_int(Interval::pi(), 2);
    Interval first = cs * cube_sobolev_constant() * (Interval(1.0) + Interval(27.0) * s17) / four_pi_sq;
    Interval second = cs * (Interval(1.0) + Interval(27.0) * cube_sobolev_constant());
    return first + second;
}

// ---------------------------------------------------------------------------
// delta-parametric comparison chain (p = 4 throughout, so 1/(2p) = 1/8)

namespace chain {

inline void require_nonneg(double delta) {
    if (!(delta >= 0.0)) throw DeltaOutOfDomain("delta must be nonnegative");
}

inline void require_below_sixth(double delta) {
    require_nonneg(delta);
    if (delta >= 1.0 / 6.0)
        throw DeltaOutOfDomain("delta >= 1/6: the inverse-metric series bound fails");
}

inline Interval inverse_bound(double delta, const LedgerOptions& opts) {
    require_below_sixth(delta);
    Interval d(delta);
    if (opts.inverse_bound == InverseBoundMode::stated) return Interval(2.0) * d;
    return Interval(6.0) * d + Interval(36.0) * pow_int(d, 3);
}

/// det_hi - 1 expanded to 3d + 6d^2 + 6d^3: no cancellation at tiny delta.
inline Interval det_hi_minus_one(double delta) {
    require_nonneg(delta);
    Interval d(delta);
    return d * (Interval(3.0) + d * (Interval(6.0) + Interval(6.0) * d));
}

inline Interval det_hi(double delta) { return Interval(1.0) + det_hi_minus_one(delta); }

inline Interval det_lo(double delta) {
    require_nonneg(delta);
    Interval d(delta);
    return pow_int(Interval(1.0) - d, 3) - Interval(2.0) * pow_int(d, 3) -
           Interval(3.0) * (Interval(1.0) + d) * pow_int(d, 2);
}

inline Interval covector_hi(double delta) {
    require_nonneg(delta);
    return sqrt(Interval(1.0) + Interval(3.0) * Interval(delta));
}

inline Interval covector_lo(double delta) {
    require_nonneg(delta);
    Interval rad = Interval(1.0) - Interval(3.0) * Interval(delta);
    if (rad.lo() < 0.0) throw DomainError("covector_lo: radicand negative");
    return sqrt(rad);
}

inline Interval two_tensor_hi(double delta) {
    require_nonneg(delta);
    Interval d(delta);
    return sqrt(Interval(1.0) + Interval(9.0) * (Interval(2.0) + Interval(2.0) * d) * Interval(2.0) * d);
}

inline Interval two_tensor_lo(double delta) {
    require_nonneg(delta);
    Interval d(delta);
    Interval rad = Interval(1.0) - Interval(9.0) * (Interval(2.0) + Interval(2.0) * d) * Interval(2.0) * d;
    if (rad.lo() < 0.0) throw DomainError("two_tensor_lo: radicand negative at this delta");
    return sqrt(rad);
}

/// Bound on |Gamma^k_ij|: sum over the contraction index of
/// (1/2) |g^{kn}| (3 delta), with |g^{kn}| read per the Christoffel mode.
inline Interval christoffel_bound(double delta, const LedgerOptions& opts) {
    Interval inv = inverse_bound(delta, opts);
    Interval d(delta);
    Interval per_entry = (opts.christoffel == ChristoffelMode::quadratic)
                             ? inv
                             : Interval(1.0) + inv;
    return Interval::rational(3, 2) * per_entry * Interval(3.0) * d;
}

inline Interval w1p_hi(double delta) {
    return covector_hi(delta) * pow(det_hi(delta), Interval::rational(1, 8));
}

inline Interval w1p_lo(double delta) {
    Interval dl = det_lo(delta);
    if (dl.lo() <= 0.0) throw DomainError("w1p_lo: lower determinant bound not positive");
    return covector_lo(delta) * pow(dl, Interval::rational(1, 8));
}

/// Upper W^{2,4} norm-comparison constant:
/// C_W1p_hi (1 + 3 sqrt(3) C_Gamma) C_2t_hi C_det_hi^{1/8}.
inline Interval w2p_hi(double delta, const LedgerOptions& opts) {
    Interval gam = christoffel_bound(delta, opts);
    return w1p_hi(delta) * (Interval(1.0) + Interval(3.0) * sqrt(Interval(3.0)) * gam) *
           two_tensor_hi(delta) * pow(det_hi(delta), Interval::rational(1, 8));
}

/// Lower W^{2,4} norm-comparison constant (mirror product).
inline Interval w2p_lo(double delta, const LedgerOptions& opts) {
    Interval gam = christoffel_bound(delta, opts);
    Interval dl = det_lo(delta);
    if (dl.lo() <= 0.0) throw DomainError("w2p_lo: lower determinant bound not positive");
    Interval one_minus = Interval(1.0) - Interval(3.0) * sqrt(Interval(3.0)) * gam;
    if (one_minus.lo() < 0.0) throw DomainError("w2p_lo: Christoffel correction exceeds 1");
    return w1p_lo(delta) * one_minus * two_tensor_lo(delta) * pow(dl, Interval::rational(1, 8));
}

/// Laplacian comparison coefficient:
/// 3 ((C_det_hi^{1/8} - 1)(1 + inv) + inv) + 9 sqrt(3) (1 + inv) C_Gamma C_det_hi^{1/8}.
/// The ^{1/8} - 1 difference is evaluated through pow1pm1: at delta near the
/// admissible threshold (~1e-15) it is itself of machine-epsilon size, and the
/// naive pow-then-subtract route would swamp it with rounding padding.
inline Interval laplacian_comparison(double delta, const LedgerOptions& opts) {
    Interval inv = inverse_bound(delta, opts);
    Interval gam = christoffel_bound(delta, opts);
    Interval dh8m1 = pow1pm1(det_hi_minus_one(delta), Interval::rational(1, 8));
    Interval first = Interval(3.0) * (dh8m1 * (Interval(1.0) + inv) + inv);
    Interval second = Interval(9.0) * (Interval(1.0) + inv) * gam * sqrt(Interval(3.0)) *
                      (Interval(1.0) + dh8m1);
    return first + second;
}

/// Injectivity constant for the perturbed metric:
/// C_W2p_hi C_flat / (1 - C_flat C_lap_cmp(delta)).
inline Interval nonflat_injectivity(double delta, const LedgerOptions& opts, const Interval& c_flat) {
    Interval absorb = c_flat * laplacian_comparison(delta, opts);
    if (!(absorb.hi() < 1.0))
        throw AbsorptionFailure("cannot certify C_flat * C_lap_cmp(delta) < 1 at delta = " +
                                std::to_string(delta));
    return w2p_hi(delta, opts) * c_flat / (Interval(1.0) - absorb);
}

/// C^0 bound constant for d(xi): C_Morrey C_cov_hi C_nonflat / C_W2p_lo.
inline Interval one_form_estimate(double delta, const LedgerOptions& opts, const Interval& c_flat) {
    return morrey_constant() * covector_hi(delta) * nonflat_injectivity(delta, opts, c_flat) /
           w2p_lo(delta, opts);
}

/// Lower bound on min |dx_1 - d xi|_g:
/// C_cov_lo - C_oneform (3 + 9 inv) C_Gamma C_det_hi^{1/8}.
inline Interval epsilon_one_form(double delta, const LedgerOptions& opts, const Interval& c_flat) {
    Interval inv = inverse_bound(delta, opts);
    Interval gam = christoffel_bound(delta, opts);
    Interval co = one_form_estimate(delta, opts, c_flat);
    return covector_lo(delta) -
           co * (Interval(3.0) + Interval(9.0) * inv) * gam * pow(det_hi(delta), Interval::rational(1, 8));
}

}  // namespace chain

}  // namespace t3e
