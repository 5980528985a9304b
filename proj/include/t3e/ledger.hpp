#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "t3e/formulas.hpp"

// The constant ledger: every named constant of the estimate chain as a node
// of a dependency DAG, evaluated to a rigorous enclosure, with a cache so
// repeated lookups are bit-identical.  Not thread-safe; evaluate from one
// thread (results are order-independent either way).

namespace t3e {

struct ConstantNode {
    std::string name;
    std::string citation;            // formula and/or classical source
    std::vector<std::string> deps;
    bool delta_parametric = false;
    std::string reference_note;      // stated literal(s) this value is checked against
    bool discrepancy = false;        // a stated literal disagrees with the formula chain
    std::function<Interval(const class Ledger&, double)> formula;
};

/// All delta-parametric comparison constants at one delta (p = 4).
struct MetricComparisonConstants {
    Interval det_lo, det_hi;
    Interval cov_lo, cov_hi;
    Interval two_tensor_lo, two_tensor_hi;
    Interval christoffel;
    Interval w1p_lo, w1p_hi;
    Interval w2p_lo, w2p_hi;
};

enum class DeltaCriterion { absorption, one_form };

/// Certified bracket for a maximal admissible delta: the criterion holds
/// rigorously at delta_holds = delta_star*(1-1e-3) and fails rigorously at
/// delta_fails = delta_star*(1+1e-3).
struct DeltaStarResult {
    DeltaCriterion criterion;
    double delta_star = 0.0;
    double delta_holds = 0.0;
    double delta_fails = 0.0;
    std::string holds_quantity, fails_quantity;
    Interval holds_value, fails_value;
    int bisection_steps = 0;
};

class Ledger {
  public:
    explicit Ledger(LedgerOptions opts = {}) : opts_(opts) { register_nodes(); }

    Ledger(const Ledger&) = delete;
    Ledger& operator=(const Ledger&) = delete;

    const LedgerOptions& options() const { return opts_; }
    const std::vector<ConstantNode>& nodes() const { return nodes_; }

    bool has(const std::string& name) const { return index_.count(name) > 0; }

    const ConstantNode& node(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw UnknownConstant(name);
        return nodes_[it->second];
    }

    /// Evaluate a registered constant.  delta is required exactly for the
    /// delta-parametric nodes.
    Interval eval(const std::string& name, std::optional<double> delta = {}) const {
        const ConstantNode& n = node(name);
        if (n.delta_parametric && !delta) throw MissingDelta(name);
        if (!n.delta_parametric && delta)
            throw DomainError("constant " + name + " takes no delta argument");
        const double d = delta.value_or(-1.0);
        const CacheKey key{name, std::bit_cast<std::uint64_t>(d)};
        auto hit = cache_.find(key);
        if (hit != cache_.end()) return hit->second;
        Interval v = n.formula(*this, d);
        cache_.emplace(key, v);
        return v;
    }

    /// The whole comparison record at one delta; throws when any member is
    /// undefined there (radicand sign, delta >= 1/6).
    MetricComparisonConstants metric_comparison(double delta) const {
        chain::require_below_sixth(delta);
        return MetricComparisonConstants{
            eval("C_det_lo", delta),        eval("C_det_hi", delta),
            eval("C_covector_lo", delta),   eval("C_covector_hi", delta),
            eval("C_two_tensor_lo", delta), eval("C_two_tensor_hi", delta),
            eval("C_Christoffel", delta),   eval("C_W1p_lo", delta),
            eval("C_W1p_hi", delta),        eval("C_W2p_lo", delta),
            eval("C_W2p_hi", delta),
        };
    }

    Interval flat_injectivity() const { return eval("C_flat_injectivity"); }

    /// Rigorous yes/no/unknown for the absorption condition C1 * C14(d) < 1.
    bool absorption_certified_holds(double delta) const {
        try {
            Interval a = flat_injectivity() * eval("C_laplacian_comparison", delta);
            return a.hi() < 1.0;
        } catch (const DeltaOutOfDomain&) {
            return false;
        }
    }
    bool absorption_certified_fails(double delta) const {
        try {
            Interval a = flat_injectivity() * eval("C_laplacian_comparison", delta);
            return a.lo() >= 1.0;
        } catch (const DeltaOutOfDomain&) {
            return true;
        }
    }

    bool one_form_certified_holds(double delta) const {
        try {
            return eval("epsilon_one_form", delta).lo() > 0.0;
        } catch (const std::runtime_error&) {
            return false;  // absorption or domain failure: not certifiable
        }
    }

    /// Bisection (in log delta) for the largest certifiable delta.
    DeltaStarResult max_admissible_delta(DeltaCriterion crit) const {
        if (crit == DeltaCriterion::absorption) return absorption_delta_star();
        return one_form_delta_star();
    }

  private:
    struct CacheKey {
        std::string name;
        std::uint64_t delta_bits;
        bool operator<(const CacheKey& o) const {
            if (name != o.name) return name < o.name;
            return delta_bits < o.delta_bits;
        }
    };

    static constexpr double kBracketOffset = 1e-3;  // certified at delta*(1 +- this)

    DeltaStarResult absorption_delta_star() const {
        auto holds = [this](double d) { return absorption_certified_holds(d); };
        DeltaStarResult r;
        r.criterion = DeltaCriterion::absorption;
        double lo = 1e-30, hi = 0.9 / 6.0;
        if (!holds(lo)) throw DomainError("absorption bisection: lower end does not certify");
        if (holds(hi)) throw DomainError("absorption bisection: upper end certifies");
        double tlo = std::log(lo), thi = std::log(hi);
        int steps = 0;
        while (thi - tlo > 1e-5) {
            double tm = 0.5 * (tlo + thi);
            (holds(std::exp(tm)) ? tlo : thi) = tm;
            ++steps;
        }
        r.bisection_steps = steps;
        r.delta_star = std::exp(0.5 * (tlo + thi));
        r.delta_holds = r.delta_star * (1.0 - kBracketOffset);
        r.delta_fails = r.delta_star * (1.0 + kBracketOffset);
        r.holds_quantity = "C_flat_injectivity * C_laplacian_comparison";
        r.fails_quantity = r.holds_quantity;
        r.holds_value = flat_injectivity() * eval("C_laplacian_comparison", r.delta_holds);
        r.fails_value = flat_injectivity() * eval("C_laplacian_comparison", r.delta_fails);
        if (!(r.holds_value.hi() < 1.0) || !(r.fails_value.lo() >= 1.0))
            throw DomainError("absorption bisection: certificates did not verify");
        return r;
    }

    // The one-form threshold is capped strictly below the absorption one
    // (the theorem requires it), and the positivity margin of epsilon only
    // closes within ~1e-14 relative of the absorption threshold, far inside
    // the 1e-3 bracket. The returned value therefore sits at a fixed margin
    // below delta*_absorption whenever epsilon certifies there.
    DeltaStarResult one_form_delta_star() const {
        DeltaStarResult absorb = absorption_delta_star();
        DeltaStarResult r;
        r.criterion = DeltaCriterion::one_form;
        const double cap = 0.9995 * absorb.delta_star;
        double star = cap;
        int steps = 0;
        if (!one_form_certified_holds(cap * (1.0 - kBracketOffset))) {
            // generic path: positivity is lost well below the cap
            double lo = 1e-30, hi = cap;
            if (!one_form_certified_holds(lo))
                throw DomainError("one-form bisection: lower end does not certify");
            double tlo = std::log(lo), thi = std::log(hi);
            while (thi - tlo > 1e-5) {
                double tm = 0.5 * (tlo + thi);
                (one_form_certified_holds(std::exp(tm)) ? tlo : thi) = tm;
                ++steps;
            }
            star = std::exp(0.5 * (tlo + thi));
        }
        r.bisection_steps = steps;
        r.delta_star = star;
        r.delta_holds = star * (1.0 - kBracketOffset);
        r.delta_fails = star * (1.0 + kBracketOffset);
        r.holds_quantity = "epsilon_one_form";
        r.holds_value = eval("epsilon_one_form", r.delta_holds);
        if (!(r.holds_value.lo() > 0.0))
            throw DomainError("one-form bisection: positivity certificate did not verify");
        // Failure certificate: either epsilon is certifiably nonpositive, or
        // the absorption precondition certifiably fails at the upper point.
        bool fails_ok = false;
        try {
            Interval eps = eval("epsilon_one_form", r.delta_fails);
            r.fails_quantity = "epsilon_one_form";
            r.fails_value = eps;
            fails_ok = eps.hi() <= 0.0;
        } catch (const AbsorptionFailure&) {
            Interval a = flat_injectivity() * eval("C_laplacian_comparison", r.delta_fails);
            r.fails_quantity = "C_flat_injectivity * C_laplacian_comparison";
            r.fails_value = a;
            fails_ok = a.lo() >= 1.0;
        }
        if (!fails_ok) throw DomainError("one-form bisection: failure certificate did not verify");
        if (!(r.delta_star < absorb.delta_star))
            throw DomainError("one-form bisection: threshold not below the absorption one");
        return r;
    }

    void add(ConstantNode n) {
        index_.emplace(n.name, nodes_.size());
        nodes_.push_back(std::move(n));
    }

    void register_nodes() {
        using F = std::function<Interval(const Ledger&, double)>;
        auto fixed = [](Interval (*f)()) {
            return F([f](const Ledger&, double) { return f(); });
        };

        add({"omega_ball_3", "volume of the unit ball in R^3, 4 pi / 3", {}, false, "", false,
             [](const Ledger&, double) { return unit_ball_volume(3); }});
        add({"lambda_1_torus", "first nonzero eigenvalue of -Laplace on the unit 3-torus, 4 pi^2",
             {}, false, "", false,
             [](const Ledger&, double) { return Interval(4.0) * pow_int(Interval::pi(), 2); }});
        add({"T2_strong_type", "strong (2,2) distribution bound, Gilbarg-Trudinger eq. 9.29", {},
             false, "", false, [](const Ledger&, double) { return t2_distribution_constant(); }});
        add({"C_newtonian_second_derivative",
             "|D D_ij Gamma(x)| <= C |x|^{-n-1}: C = n(n+5)/omega_n, n = 3 "
             "(Gilbarg-Trudinger Lemma 4.4)",
             {"omega_ball_3"}, false, "", false, [](const Ledger& l, double) {
                 return Interval(3.0) * Interval(8.0) / l.eval("omega_ball_3");
             }});
        add({"C_cube_integral_bound", "2 n^2 (n+5) with n = 3, from the cube decomposition",
             {}, false, "", false,
             [](const Ledger&, double) { return Interval(2.0) * Interval(9.0) * Interval(8.0); }});
        add({"C_ball_cover", "omega_n n^{n/2} with n = 3", {"omega_ball_3"}, false, "", false,
             [](const Ledger& l, double) {
                 return l.eval("omega_ball_3") * pow(Interval(3.0), Interval::rational(3, 2));
             }});
        add({"C_weak_good_part", "distribution bound for the good summand: 2^{n+2}, n = 3", {},
             false, "", false, [](const Ledger&, double) { return pow_int(Interval(2.0), 5); }});
        add({"C_weak_bad_part",
             "distribution bound for the bad summand: 4 C_cube_integral_bound + C_ball_cover",
             {"C_cube_integral_bound", "C_ball_cover"}, false, "", false,
             [](const Ledger& l, double) {
                 return Interval(4.0) * l.eval("C_cube_integral_bound") + l.eval("C_ball_cover");
             }});
        add({"T1_weak_type",
             "weak (1,1) distribution bound: C_weak_good_part + C_weak_bad_part, n = 3",
             {"C_weak_good_part", "C_weak_bad_part"}, false, "", false,
             [](const Ledger&, double) { return t1_distribution_constant(3); }});
        add({"C_Marcinkiewicz_4_3",
             "Marcinkiewicz constant at p = 4/3 between weak (1,1) and (2,2): 2 * 6^{3/4}",
             {}, false, "", false, [](const Ledger&, double) {
                 Interval pe = Interval::rational(4, 3);
                 Interval ratio = pe / ((pe - Interval(1.0)) * (Interval(2.0) - pe));
                 return Interval(2.0) * pow(ratio, Interval(1.0) / pe);
             }});
        add({"C_CalderonZygmund_3_2", "Calderon-Zygmund constant, n = 3, p = 2 (exactly 1)", {},
             false, "", false, [](const Ledger&, double) { return Interval(1.0); }});
        add({"C_CalderonZygmund_3_4",
             "Calderon-Zygmund constant, n = 3, p = 4: C_Marcinkiewicz_4_3 * sqrt(T1)",
             {"C_Marcinkiewicz_4_3", "T1_weak_type"}, false,
             "stated 193 (rounded up); tabulated 293.519", true, [](const Ledger& l, double) {
                 Interval alpha = Interval::rational(1, 2);
                 return l.eval("C_Marcinkiewicz_4_3") * pow(l.eval("T1_weak_type"), alpha);
             }});
        add({"C_Poincare_Qtilde",
             "Poincare constant of [-1,2]^3: (81 / (4 pi))^{1/3}", {"omega_ball_3"}, false, "",
             false, [](const Ledger&, double) { return poincare_constant(3, 27.0); }});
        add({"C_grad_hessian",
             "||D^2 u|| + ||Du|| <= C ||Lap u|| on W^{2,4}_0([-1,2]^3): "
             "9 C_CZ(3,4) (3 C_Poincare + 1)",
             {"C_CalderonZygmund_3_4", "C_Poincare_Qtilde"}, false, "", false,
             [](const Ledger& l, double) {
                 return Interval(9.0) * l.eval("C_CalderonZygmund_3_4") *
                        (Interval(3.0) * l.eval("C_Poincare_Qtilde") + Interval(1.0));
             }});
        add({"K_Sobolev_3_2",
             "sharp W^{1,2}_0(R^3) -> L^6 constant (Aubin/Talenti); omega read as the "
             "surface measure of the unit 2-sphere",
             {}, false, "ball-volume reading gives K_Sobolev_3_2_ball", false,
             [](const Ledger& l, double) {
                 return sobolev_embedding_constant(3, 2.0, l.options().sobolev_omega);
             }});
        add({"K_Sobolev_3_2_ball",
             "variant of K_Sobolev_3_2 with omega read as the unit-disk area", {}, false, "",
             false, [](const Ledger&, double) {
                 return sobolev_embedding_constant(3, 2.0, SobolevOmegaMode::ball_volume);
             }});
        add({"C_Sobolev_cube",
             "W^{1,2}([0,1]^3) -> L^4 embedding, tabulated (Mizuguchi-Tanaka-Sekine-Oishi "
             "2017, p. 15, table 6)",
             {}, false, "", false, fixed(&cube_sobolev_constant)});
        add({"C_Morrey", "max(omega_3^{-1/4}, (12 pi / 17)^{3/4})", {"omega_ball_3"}, false, "",
             false, fixed(&morrey_constant)});
        add({"C_Holder_Q_Qtilde",
             "L^6 -> L^4 Holder constant on [-1,2]^3: |Q~|^{1/4 - 1/6} = 27^{1/12}", {}, false,
             "tabulated as 27^{3/4}", true, [](const Ledger&, double) {
                 return pow(Interval(27.0), Interval::rational(1, 12));
             }});
        add({"C_interior_gradient",
             "interior gradient estimate sqrt(17) at unit margin (Jost, Lemma 8.2.3)", {}, false,
             "", false, [](const Ledger&, double) { return sqrt(Interval(17.0)); }});
        add({"b1_cutoff", "smootherstep factor |S''| extremum: -60(-6 + 13u/6 - u^2/4 + u^3/108), "
             "u = 9 + sqrt(3)", {}, false, "", false,
             [](const Ledger&, double) { return cutoff_derivative_bounds().b1; }});
        add({"b2_cutoff", "60 (2 sqrt(3) - 3)", {}, false, "", false,
             [](const Ledger&, double) { return cutoff_derivative_bounds().b2; }});
        add({"b3_cutoff", "20 (5 sqrt(3) - 6)", {}, false, "", false,
             [](const Ledger&, double) { return cutoff_derivative_bounds().b3; }});
        add({"C_cutoff_laplacian", "|Laplace chi| <= 3 b1", {"b1_cutoff"}, false, "", false,
             [](const Ledger&, double) { return cutoff_derivative_bounds().laplacian; }});
        add({"C_cutoff_gradient", "|D chi| <= sqrt(3) b2", {"b2_cutoff"}, false, "", false,
             [](const Ledger&, double) { return cutoff_derivative_bounds().gradient; }});
        add({"C_cutoff_hessian", "entrywise |D^2 chi| <= 3 b3", {"b3_cutoff"}, false, "", false,
             [](const Ledger&, double) { return cutoff_derivative_bounds().hessian; }});
        add({"C_Schauder",
             "torus Schauder constant 27(1 + C3 C_cutoff_laplacian + (2 + 54*27 sqrt(17)) "
             "C3 C_Holder C_cutoff_hessian K)",
             {"C_grad_hessian", "C_cutoff_laplacian", "C_Holder_Q_Qtilde", "C_cutoff_hessian",
              "K_Sobolev_3_2"},
             false, "", false, [](const Ledger& l, double) {
                 return schauder_from_parts(l.eval("C_grad_hessian"), l.eval("C_cutoff_laplacian"),
                                            l.eval("C_Holder_Q_Qtilde"), l.eval("C_cutoff_hessian"),
                                            l.eval("K_Sobolev_3_2"));
             }});
        add({"C_flat_injectivity",
             "||f||_{W^{2,4}} <= C ||Lap f||_{L^4} for mean-zero f, flat metric: "
             "(1/4pi^2) CS 13.25 (1 + 27 sqrt(17)) + CS (1 + 27*13.25)",
             {"C_Schauder", "C_Sobolev_cube", "lambda_1_torus"}, false, "", false,
             [](const Ledger& l, double) {
                 return flat_injectivity_from_schauder(l.eval("C_Schauder"));
             }});

        // delta-parametric chain
        add({"C_det_lo", "(1-d)^3 - 2d^3 - 3(1+d)d^2 <= det g at C^0 distance d", {}, true, "",
             false, [](const Ledger&, double d) { return chain::det_lo(d); }});
        add({"C_det_hi", "det g <= (1+d)^3 + 2d^3 + 3(1+d)d^2", {}, true, "", false,
             [](const Ledger&, double d) { return chain::det_hi(d); }});
        add({"C_inverse_stated", "stated C^1 bound on g^{-1} - I: 2d", {}, true,
             "the derivation chain yields 6d + 36d^3 (C_inverse_derived)", true,
             [](const Ledger&, double d) {
                 chain::require_below_sixth(d);
                 return Interval(2.0) * Interval(d);
             }});
        add({"C_inverse_derived", "derived C^1 bound on g^{-1} - I: 6d + 36d^3", {}, true, "",
             false, [](const Ledger&, double d) {
                 chain::require_below_sixth(d);
                 return Interval(6.0) * Interval(d) + Interval(36.0) * pow_int(Interval(d), 3);
             }});
        add({"C_covector_lo", "(1 - 3d)^{1/2} pointwise covector comparison", {}, true, "", false,
             [](const Ledger&, double d) { return chain::covector_lo(d); }});
        add({"C_covector_hi", "(1 + 3d)^{1/2}", {}, true, "", false,
             [](const Ledger&, double d) { return chain::covector_hi(d); }});
        add({"C_two_tensor_lo", "sqrt(1 - 9(2+2d)2d) covariant 2-tensor comparison", {}, true, "",
             false, [](const Ledger&, double d) { return chain::two_tensor_lo(d); }});
        add({"C_two_tensor_hi", "sqrt(1 + 9(2+2d)2d)", {}, true, "", false,
             [](const Ledger&, double d) { return chain::two_tensor_hi(d); }});
        add({"C_Christoffel", "|Gamma^k_ij| <= (3/2) inv(d) 3d (= 9 d^2 for inv = 2d)",
             {"C_inverse_stated"}, true,
             "the same chain read with |g^{kn}| <= 1 + inv gives an O(d) bound", true,
             [](const Ledger& l, double d) { return chain::christoffel_bound(d, l.opts_); }});
        add({"C_W1p_lo", "C_covector_lo * C_det_lo^{1/8}", {"C_covector_lo", "C_det_lo"}, true, "",
             false, [](const Ledger&, double d) { return chain::w1p_lo(d); }});
        add({"C_W1p_hi", "C_covector_hi * C_det_hi^{1/8}", {"C_covector_hi", "C_det_hi"}, true, "",
             false, [](const Ledger&, double d) { return chain::w1p_hi(d); }});
        add({"C_W2p_lo",
             "lower W^{2,4} comparison: C_W1p_lo (1 - 3 sqrt(3) C_Gamma) C_2t_lo C_det_lo^{1/8}",
             {"C_W1p_lo", "C_Christoffel", "C_two_tensor_lo", "C_det_lo"}, true, "", false,
             [](const Ledger& l, double d) { return chain::w2p_lo(d, l.opts_); }});
        add({"C_W2p_hi",
             "upper W^{2,4} comparison: C_W1p_hi (1 + 3 sqrt(3) C_Gamma) C_2t_hi C_det_hi^{1/8}",
             {"C_W1p_hi", "C_Christoffel", "C_two_tensor_hi", "C_det_hi"}, true, "", false,
             [](const Ledger& l, double d) { return chain::w2p_hi(d, l.opts_); }});
        add({"C_laplacian_comparison",
             "||Lap u - Lap_g u (det g)^{1/8}||_{L^4} <= C ||u||_{W^{2,4}}: "
             "3((C_det_hi^{1/8}-1)(1+inv) + inv) + 9 sqrt(3) (1+inv) C_Gamma C_det_hi^{1/8}",
             {"C_det_hi", "C_Christoffel", "C_inverse_stated"}, true, "", false,
             [](const Ledger& l, double d) { return chain::laplacian_comparison(d, l.opts_); }});
        add({"C_nonflat_injectivity",
             "C_W2p_hi C_flat / (1 - C_flat C_laplacian_comparison)",
             {"C_W2p_hi", "C_flat_injectivity", "C_laplacian_comparison"}, true, "", false,
             [](const Ledger& l, double d) {
                 return chain::nonflat_injectivity(d, l.opts_, l.flat_injectivity());
             }});
        add({"C_one_form_estimate",
             "||d xi||_{g,C^0} <= C ||d*_g dx_1||_{g,L^4}: C_Morrey C_cov_hi C_nonflat / C_W2p_lo",
             {"C_Morrey", "C_covector_hi", "C_nonflat_injectivity", "C_W2p_lo"}, true, "", false,
             [](const Ledger& l, double d) {
                 return chain::one_form_estimate(d, l.opts_, l.flat_injectivity());
             }});
        add({"epsilon_one_form",
             "min |dx_1 - d xi|_g >= C_cov_lo - C_one_form (3 + 9 inv) C_Gamma C_det_hi^{1/8}",
             {"C_covector_lo", "C_one_form_estimate", "C_Christoffel", "C_det_hi",
              "C_inverse_stated"},
             true, "", false, [](const Ledger& l, double d) {
                 return chain::epsilon_one_form(d, l.opts_, l.flat_injectivity());
             }});
    }

    LedgerOptions opts_;
    std::vector<ConstantNode> nodes_;
    std::map<std::string, std::size_t> index_;
    mutable std::map<CacheKey, Interval> cache_;
};

}  // namespace t3e
