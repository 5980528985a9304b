#pragma once

#include <cfenv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "t3e/errors.hpp"

// Outward-rounded interval arithmetic on double endpoints.
//
// +, -, *, / and sqrt are evaluated twice under hardware directed rounding
// (FE_DOWNWARD for the lower endpoint, FE_UPWARD for the upper), which keeps
// exact operations exact: [1,1]*[1,1] stays [1,1].  pow with a non-integer
// exponent goes through libm, which is not correctly rounded, so the result
// is widened by a few ulps on each side instead.  Translation units using
// this header must be compiled with -frounding-math.

namespace t3e {

namespace detail {

struct RoundingMode {
    explicit RoundingMode(int mode) { std::fesetround(mode); }
    ~RoundingMode() { std::fesetround(FE_TONEAREST); }
    RoundingMode(const RoundingMode&) = delete;
    RoundingMode& operator=(const RoundingMode&) = delete;
};

// volatile blocks constant folding across the rounding-mode switch
inline double add_dir(double a, double b, int mode) {
    RoundingMode rm(mode);
    volatile double r = a + b;
    return r;
}
inline double sub_dir(double a, double b, int mode) {
    RoundingMode rm(mode);
    volatile double r = a - b;
    return r;
}
inline double mul_dir(double a, double b, int mode) {
    RoundingMode rm(mode);
    volatile double r = a * b;
    return r;
}
inline double div_dir(double a, double b, int mode) {
    RoundingMode rm(mode);
    volatile double r = a / b;
    return r;
}
inline double sqrt_dir(double a, int mode) {
    RoundingMode rm(mode);
    volatile double r = std::sqrt(a);
    return r;
}

inline double step_down(double x, int ulps) {
    for (int i = 0; i < ulps; ++i) x = std::nextafter(x, -std::numeric_limits<double>::infinity());
    return x;
}
inline double step_up(double x, int ulps) {
    for (int i = 0; i < ulps; ++i) x = std::nextafter(x, std::numeric_limits<double>::infinity());
    return x;
}

}  // namespace detail

class Interval {
  public:
    Interval() : lo_(0.0), hi_(0.0) {}
    Interval(double point) : lo_(point), hi_(point) { check(); }  // exact value, implicit on purpose
    Interval(double lo, double hi) : lo_(lo), hi_(hi) { check(); }

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double mid() const { return 0.5 * (lo_ + hi_); }
    double width() const { return hi_ - lo_; }
    bool contains(double x) const { return lo_ <= x && x <= hi_; }
    bool is_point() const { return lo_ == hi_; }

    bool certainly_positive() const { return lo_ > 0.0; }
    bool certainly_nonpositive() const { return hi_ <= 0.0; }
    bool certainly_less(const Interval& o) const { return hi_ < o.lo_; }
    bool certainly_geq(double x) const { return lo_ >= x; }

    static Interval pi() {
        const double lo = std::numbers::pi_v<double>;  // below the true value
        return Interval(lo, detail::step_up(lo, 1));
    }

    /// Exact rational p/q as a tight enclosure.
    static Interval rational(long long p, long long q) {
        if (q == 0) throw DomainError("rational: zero denominator");
        return Interval(static_cast<double>(p)) / Interval(static_cast<double>(q));
    }

    friend Interval operator-(const Interval& a) { return Interval(-a.hi_, -a.lo_); }

    friend Interval operator+(const Interval& a, const Interval& b) {
        return Interval(detail::add_dir(a.lo_, b.lo_, FE_DOWNWARD),
                        detail::add_dir(a.hi_, b.hi_, FE_UPWARD));
    }
    friend Interval operator-(const Interval& a, const Interval& b) {
        return Interval(detail::sub_dir(a.lo_, b.hi_, FE_DOWNWARD),
                        detail::sub_dir(a.hi_, b.lo_, FE_UPWARD));
    }
    friend Interval operator*(const Interval& a, const Interval& b) {
        double lo, hi;
        {
            detail::RoundingMode rm(FE_DOWNWARD);
            volatile double p1 = a.lo_ * b.lo_;
            volatile double p2 = a.lo_ * b.hi_;
            volatile double p3 = a.hi_ * b.lo_;
            volatile double p4 = a.hi_ * b.hi_;
            lo = std::fmin(std::fmin(p1, p2), std::fmin(p3, p4));
        }
        {
            detail::RoundingMode rm(FE_UPWARD);
            volatile double p1 = a.lo_ * b.lo_;
            volatile double p2 = a.lo_ * b.hi_;
            volatile double p3 = a.hi_ * b.lo_;
            volatile double p4 = a.hi_ * b.hi_;
            hi = std::fmax(std::fmax(p1, p2), std::fmax(p3, p4));
        }
        return Interval(lo, hi);
    }
    friend Interval operator/(const Interval& a, const Interval& b) {
        if (b.lo_ <= 0.0 && b.hi_ >= 0.0)
            throw DomainError("interval division by an interval containing zero");
        double lo, hi;
        {
            detail::RoundingMode rm(FE_DOWNWARD);
            volatile double p1 = a.lo_ / b.lo_;
            volatile double p2 = a.lo_ / b.hi_;
            volatile double p3 = a.hi_ / b.lo_;
            volatile double p4 = a.hi_ / b.hi_;
            lo = std::fmin(std::fmin(p1, p2), std::fmin(p3, p4));
        }
        {
            detail::RoundingMode rm(FE_UPWARD);
            volatile double p1 = a.lo_ / b.lo_;
            volatile double p2 = a.lo_ / b.hi_;
            volatile double p3 = a.hi_ / b.lo_;
            volatile double p4 = a.hi_ / b.hi_;
            hi = std::fmax(std::fmax(p1, p2), std::fmax(p3, p4));
        }
        return Interval(lo, hi);
    }

    friend bool operator==(const Interval& a, const Interval& b) {
        return a.lo_ == b.lo_ && a.hi_ == b.hi_;
    }

  private:
    void check() const {
        if (std::isnan(lo_) || std::isnan(hi_) || lo_ > hi_)
            throw DomainError("malformed interval [" + std::to_string(lo_) + ", " +
                              std::to_string(hi_) + "]");
    }

    double lo_, hi_;
};

inline Interval sqrt(const Interval& x) {
    if (x.lo() < 0.0) throw DomainError("sqrt of an interval reaching below zero");
    return Interval(detail::sqrt_dir(x.lo(), FE_DOWNWARD), detail::sqrt_dir(x.hi(), FE_UPWARD));
}

inline Interval max(const Interval& a, const Interval& b) {
    return Interval(std::fmax(a.lo(), b.lo()), std::fmax(a.hi(), b.hi()));
}

inline Interval min(const Interval& a, const Interval& b) {
    return Interval(std::fmin(a.lo(), b.lo()), std::fmin(a.hi(), b.hi()));
}

inline Interval abs(const Interval& x) {
    if (x.lo() >= 0.0) return x;
    if (x.hi() <= 0.0) return -x;
    return Interval(0.0, std::fmax(-x.lo(), x.hi()));
}

/// Integer power by repeated multiplication; exact for exact inputs.
inline Interval pow_int(const Interval& x, int n) {
    if (n < 0) return Interval(1.0) / pow_int(x, -n);
    if (n == 0) return Interval(1.0);
    Interval acc = x;
    for (int i = 1; i < n; ++i) acc = acc * x;
    if (x.lo() < 0.0 && n % 2 == 0) return abs(acc);  // even powers are nonnegative
    return acc;
}

/// x^e for a positive base.  libm pow is within a couple of ulps of the true
/// value but not correctly rounded, so each endpoint is padded by 4 ulps.
inline Interval pow(const Interval& base, const Interval& expo) {
    if (base == Interval(1.0)) return Interval(1.0);
    if (expo == Interval(1.0)) return base;
    if (expo == Interval(0.0)) {
        if (base.lo() <= 0.0) throw DomainError("pow: 0^0 not defined here");
        return Interval(1.0);
    }
    if (base == Interval(0.0)) {
        if (expo.lo() <= 0.0) throw DomainError("pow: zero base needs a positive exponent");
        return Interval(0.0);
    }
    if (base.lo() <= 0.0) throw DomainError("pow: base interval must be positive");
    double vals[4] = {
        std::pow(base.lo(), expo.lo()),
        std::pow(base.lo(), expo.hi()),
        std::pow(base.hi(), expo.lo()),
        std::pow(base.hi(), expo.hi()),
    };
    double lo = vals[0], hi = vals[0];
    for (double v : vals) {
        lo = std::fmin(lo, v);
        hi = std::fmax(hi, v);
    }
    return Interval(detail::step_down(lo, 4), detail::step_up(hi, 4));
}

inline Interval pow(const Interval& base, double e) { return pow(base, Interval(e)); }

/// log(1+x), monotone, padded outward by 4 ulps of the result (relative
/// padding, so it stays tight for x near 0).
inline Interval log1p(const Interval& x) {
    if (x.lo() <= -1.0) throw DomainError("log1p: argument reaching -1");
    if (x == Interval(0.0)) return Interval(0.0);
    return Interval(detail::step_down(std::log1p(x.lo()), 4),
                    detail::step_up(std::log1p(x.hi()), 4));
}

/// exp(x) - 1, monotone, same padding policy as log1p.
inline Interval expm1(const Interval& x) {
    if (x == Interval(0.0)) return Interval(0.0);
    return Interval(detail::step_down(std::expm1(x.lo()), 4),
                    detail::step_up(std::expm1(x.hi()), 4));
}

/// (1+u)^a - 1 without the cancellation of pow followed by a subtraction;
/// essential where u is comparable to machine epsilon.
inline Interval pow1pm1(const Interval& u, const Interval& a) {
    return expm1(a * log1p(u));
}

/// Enclosure of n! via the interval product chain (rigorous past 2^53 too).
inline Interval factorial(int n) {
    if (n < 0) throw DomainError("factorial of a negative integer");
    Interval acc(1.0);
    for (int k = 2; k <= n; ++k) acc = acc * Interval(static_cast<double>(k));
    return acc;
}

/// Gamma(x) for x = two_x/2 > 0.  Integers come from factorials; half-integers
/// from Gamma(m + 1/2) = (2m)! sqrt(pi) / (4^m m!).
inline Interval gamma_half_integer(int two_x) {
    if (two_x <= 0) throw DomainError("gamma: argument must be positive");
    if (two_x % 2 == 0) return factorial(two_x / 2 - 1);
    const int m = (two_x - 1) / 2;
    return factorial(2 * m) * sqrt(Interval::pi()) / (pow_int(Interval(4.0), m) * factorial(m));
}

/// Volume of the unit ball in R^n: pi^(n/2) / Gamma(n/2 + 1).
inline Interval unit_ball_volume(int n) {
    if (n < 1) throw DomainError("unit_ball_volume: n must be >= 1");
    Interval pi_pow = (n % 2 == 0) ? pow_int(Interval::pi(), n / 2)
                                   : pow_int(Interval::pi(), n / 2) * sqrt(Interval::pi());
    return pi_pow / gamma_half_integer(n + 2);
}

}  // namespace t3e
