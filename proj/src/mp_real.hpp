#ifndef FRACORDER_SRC_MP_REAL_HPP
#define FRACORDER_SRC_MP_REAL_HPP

#include <mpfr.h>

#include <algorithm>
#include <utility>

namespace fracorder::detail {

// Value-semantic wrapper over mpfr_t. Binary results take the larger operand precision.
class MpReal {
public:
    MpReal(double value, mpfr_prec_t bits) {
        mpfr_init2(v_, bits);
        mpfr_set_d(v_, value, MPFR_RNDN);
    }
    MpReal(const MpReal& other) {
        mpfr_init2(v_, mpfr_get_prec(other.v_));
        mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    MpReal(MpReal&& other) noexcept {
        mpfr_init2(v_, mpfr_get_prec(other.v_));
        mpfr_swap(v_, other.v_);
    }
    MpReal& operator=(const MpReal& other) {
        if (this != &other) {
            mpfr_set_prec(v_, mpfr_get_prec(other.v_));
            mpfr_set(v_, other.v_, MPFR_RNDN);
        }
        return *this;
    }
    MpReal& operator=(MpReal&& other) noexcept {
        mpfr_swap(v_, other.v_);
        return *this;
    }
    ~MpReal() { mpfr_clear(v_); }

    mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

    MpReal& operator+=(const MpReal& o) {
        mpfr_add(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }
    MpReal& operator-=(const MpReal& o) {
        mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }
    MpReal& operator*=(const MpReal& o) {
        mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }

    friend MpReal operator+(MpReal a, const MpReal& b) { return a += b; }
    friend MpReal operator-(MpReal a, const MpReal& b) { return a -= b; }
    friend MpReal operator*(const MpReal& a, const MpReal& b) {
        MpReal out(0.0, std::max(a.precision(), b.precision()));
        mpfr_mul(out.v_, a.v_, b.v_, MPFR_RNDN);
        return out;
    }

    friend MpReal exp(const MpReal& a) {
        MpReal out(0.0, a.precision());
        mpfr_exp(out.v_, a.v_, MPFR_RNDN);
        return out;
    }
    // log|Gamma(a)|
    friend MpReal log_gamma(const MpReal& a) {
        MpReal out(0.0, a.precision());
        int sign = 0;
        mpfr_lgamma(out.v_, &sign, a.v_, MPFR_RNDN);
        return out;
    }

private:
    mpfr_t v_;
};

}  // namespace fracorder::detail

#endif  // FRACORDER_SRC_MP_REAL_HPP
