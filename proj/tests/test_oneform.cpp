#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "t3e/oneform.hpp"

using namespace t3e;

namespace {
const Ledger& ledger() {
    static Ledger l;
    return l;
}

double rel_l2_diff(const ScalarField& a, const ScalarField& b) {
    ScalarField d = a - b;
    return lp_norm(d, 2.0) / std::max(lp_norm(b, 2.0), 1e-300);
}
}  // namespace

TEST_CASE("flat pipeline short-circuits to dx1 bit-for-bit") {
    GridSpec g(32);
    MetricContext ctx(perturbation_family(0.0, PerturbationKind::conformal, g, 0));
    SolveResult sol = solve_xi(ctx);
    CHECK(sol.degenerate);
    CHECK(sol.iterations == 0);
    CHECK(grid_max_abs(sol.xi) == 0.0);

    OneFormCertificate cert = certify_one_form(ledger(), ctx);
    CHECK(cert.pass);
    CHECK(cert.min_pointwise_norm == 1.0);
    CHECK(cert.residual_codifferential == 0.0);
    CHECK(cert.residual_exterior == 0.0);
    CHECK(cert.periods[0] == 1.0);
    CHECK(cert.periods[1] == 0.0);
    CHECK(cert.periods[2] == 0.0);
    CHECK(cert.epsilon_defined);
    CHECK(cert.epsilon_bound == Interval(1.0));
    CHECK(cert.sign_choice == "dx - dxi");
}

TEST_CASE("build_one_form components") {
    GridSpec g(16);
    ScalarField xi = random_band_limited(g, 3, 5);
    OneFormField w = build_one_form(g, xi, 0);
    OneFormField dxi = gradient(xi);
    for (std::size_t p = 0; p < g.size(); ++p) {
        CHECK(w.comp[0].v[p] == 1.0 - dxi.comp[0].v[p]);
        CHECK(w.comp[1].v[p] == -dxi.comp[1].v[p]);
        CHECK(w.comp[2].v[p] == -dxi.comp[2].v[p]);
    }
    // d omega = 0: mixed spectral partials commute
    CHECK(exterior_derivative_norm(w) < 1e-12);
}

TEST_CASE("manufactured solution is recovered") {
    GridSpec g(32);
    MetricContext ctx(perturbation_family(1e-2, PerturbationKind::conformal, g, 9));
    ScalarField xi_star = mean_zero_project_g(random_band_limited(g, 4, 17), ctx);
    ScalarField rhs = codifferential(ctx, gradient(xi_star));
    SolveResult sol = solve_codifferential_system(ctx, rhs, 1e-11, 200);
    CHECK_FALSE(sol.degenerate);
    CHECK(sol.iterations < 200);
    CHECK(rel_l2_diff(sol.xi, xi_star) < 1e-8);
}

TEST_CASE("solver residual tracks the tolerance") {
    GridSpec g(32);
    MetricContext ctx(perturbation_family(1e-2, PerturbationKind::offdiag, g, 3));
    double prev = 1.0;
    for (double tol : {1e-6, 1e-8, 1e-10}) {
        SolveResult sol = solve_xi(ctx, 0, tol, 200);
        CHECK(sol.relative_residual <= tol);
        CHECK(sol.relative_residual < prev);
        prev = sol.relative_residual;
    }
    CHECK_THROWS_AS(solve_xi(ctx, 0, 1e-10, 1), NoConvergence);
}

TEST_CASE("certificate at moderate delta: beyond-theorem regime") {
    GridSpec g(32);
    MetricContext ctx(perturbation_family(1e-2, PerturbationKind::conformal, g, 21));
    OneFormCertificate cert = certify_one_form(ledger(), ctx);
    CHECK(cert.pass);
    CHECK(cert.beyond_theorem);
    CHECK_FALSE(cert.epsilon_defined);
    CHECK(cert.min_pointwise_norm > 0.0);
    CHECK(cert.min_pointwise_norm < 1.1);
    CHECK(cert.residual_codifferential_relative <= 1e-8);
    CHECK(std::abs(cert.periods[0] - 1.0) < 1e-10);
    CHECK(std::abs(cert.periods[1]) < 1e-10);
    CHECK(std::abs(cert.periods[2]) < 1e-10);
    CHECK(cert.sign_choice == "dx - dxi");
    CHECK(cert.solver_iterations > 0);
}

TEST_CASE("certificate inside the admissible range: epsilon clause active") {
    GridSpec g(32);
    MetricContext ctx(perturbation_family(1e-15, PerturbationKind::conformal, g, 1));
    OneFormCertificate cert = certify_one_form(ledger(), ctx);
    CHECK(cert.pass);
    CHECK_FALSE(cert.beyond_theorem);
    CHECK(cert.epsilon_defined);
    CHECK(cert.epsilon_bound.lo() > 0.0);
    CHECK(cert.epsilon_bound.lo() > 0.99);
    CHECK(cert.min_pointwise_norm >= cert.epsilon_bound.lo() - 1e-9);
    // the O(delta) Christoffel reading inflates C14 roughly tenfold, so its
    // admissible range ends below 1e-15: the variant bound is not evaluable
    CHECK_FALSE(cert.epsilon_first_order_defined);
}

TEST_CASE("both epsilon variants certify at delta = 1e-16") {
    GridSpec g(32);
    MetricContext ctx(perturbation_family(1e-16, PerturbationKind::conformal, g, 1));
    OneFormCertificate cert = certify_one_form(ledger(), ctx);
    CHECK(cert.pass);
    CHECK(cert.epsilon_defined);
    CHECK(cert.epsilon_bound.lo() > 0.0);
    CHECK(cert.epsilon_first_order_defined);
    CHECK(cert.epsilon_first_order.lo() > 0.0);
    // the first-order reading gives the weaker (smaller) lower bound
    CHECK(cert.epsilon_first_order.lo() <= cert.epsilon_bound.hi());
}

TEST_CASE("axis symmetry") {
    GridSpec g(32);
    MetricContext ctx(perturbation_family(1e-2, PerturbationKind::random_seeded, g, 8));
    for (int axis : {0, 1, 2}) {
        OneFormCertificate cert = certify_one_form(ledger(), ctx, axis);
        CHECK(cert.pass);
        for (int a = 0; a < 3; ++a) {
            double want = (a == axis) ? 1.0 : 0.0;
            CHECK(std::abs(cert.periods[a] - want) < 1e-10);
        }
    }
}

TEST_CASE("codifferential residual shrinks with the perturbation") {
    GridSpec g(32);
    MetricContext small(perturbation_family(1e-3, PerturbationKind::conformal, g, 4));
    MetricContext big(perturbation_family(1e-2, PerturbationKind::conformal, g, 4));
    OneFormCertificate cs = certify_one_form(ledger(), small);
    OneFormCertificate cb = certify_one_form(ledger(), big);
    CHECK(cs.rhs_norm < cb.rhs_norm);
    CHECK(cs.pass);
    CHECK(cb.pass);
    // min |omega|_g stays near 1 in both regimes
    CHECK(cs.min_pointwise_norm > 0.9);
    CHECK(cb.min_pointwise_norm > 0.9);
}
