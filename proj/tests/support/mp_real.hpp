#pragma once

// Thin RAII wrapper around a 256-bit mpfr_t.  Test-only: serves as the
// independent high-precision reference the interval results are checked
// against, and stays off the library's own evaluation path.

#include <mpfr.h>

#include <string>

namespace t3e_test {

class MpReal {
  public:
    static constexpr int kPrec = 256;

    MpReal() { mpfr_init2(v_, kPrec); mpfr_set_zero(v_, 1); }
    explicit MpReal(double x) { mpfr_init2(v_, kPrec); mpfr_set_d(v_, x, MPFR_RNDN); }
    MpReal(const MpReal& o) { mpfr_init2(v_, kPrec); mpfr_set(v_, o.v_, MPFR_RNDN); }
    MpReal& operator=(const MpReal& o) {
        if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDN);
        return *this;
    }
    ~MpReal() { mpfr_clear(v_); }

    friend MpReal operator+(const MpReal& a, const MpReal& b) {
        MpReal r; mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
    }
    friend MpReal operator-(const MpReal& a, const MpReal& b) {
        MpReal r; mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
    }
    friend MpReal operator*(const MpReal& a, const MpReal& b) {
        MpReal r; mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
    }
    friend MpReal operator/(const MpReal& a, const MpReal& b) {
        MpReal r; mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
    }
    friend MpReal sqrt(const MpReal& a) {
        MpReal r; mpfr_sqrt(r.v_, a.v_, MPFR_RNDN); return r;
    }
    friend MpReal pow(const MpReal& a, const MpReal& b) {
        MpReal r; mpfr_pow(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
    }
    friend MpReal max(const MpReal& a, const MpReal& b) {
        MpReal r; mpfr_max(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
    }
    friend MpReal min(const MpReal& a, const MpReal& b) {
        MpReal r; mpfr_min(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
    }
    friend MpReal abs(const MpReal& a) {
        MpReal r; mpfr_abs(r.v_, a.v_, MPFR_RNDN); return r;
    }

    static MpReal pi() { MpReal r; mpfr_const_pi(r.v_, MPFR_RNDN); return r; }
    static MpReal gamma_of(const MpReal& x) {
        MpReal r; mpfr_gamma(r.v_, x.v_, MPFR_RNDN); return r;
    }
    static MpReal from_int(long n) { MpReal r; mpfr_set_si(r.v_, n, MPFR_RNDN); return r; }

    int cmp(double x) const { return mpfr_cmp_d(v_, x); }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    bool positive() const { return mpfr_sgn(v_) > 0; }
    bool negative() const { return mpfr_sgn(v_) < 0; }

  private:
    mpfr_t v_;
};

}  // namespace t3e_test
