#ifndef CRFORGE_COEFF_HPP
#define CRFORGE_COEFF_HPP

#include <gmpxx.h>
#include <cstdint>
#include <string>

namespace crforge {

/// Exact Gaussian rational re + i*im over arbitrary-precision rationals.
/// Both parts are kept canonical (reduced, positive denominator), so the
/// zero test and equality are exact.
class Coeff {
public:
    Coeff() : re_(0), im_(0) {}
    Coeff(long v) : re_(v), im_(0) {}
    Coeff(const mpq_class& re, const mpq_class& im = 0) : re_(re), im_(im) {
        re_.canonicalize();
        im_.canonicalize();
    }
    Coeff(long num, long den, long inum = 0, long iden = 1)
        : re_(num, den), im_(inum, iden) {
        re_.canonicalize();
        im_.canonicalize();
    }

    static Coeff zero() { return Coeff(); }
    static Coeff one() { return Coeff(1); }
    static Coeff i() { return Coeff(mpq_class(0), mpq_class(1)); }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return re_ == 0 && im_ == 0; }
    bool is_real() const { return im_ == 0; }

    Coeff conj() const { return Coeff(re_, mpq_class(-im_)); }

    Coeff operator-() const { return Coeff(mpq_class(-re_), mpq_class(-im_)); }

    Coeff& operator+=(const Coeff& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    Coeff& operator-=(const Coeff& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    Coeff& operator*=(const Coeff& o) {
        mpq_class r = re_ * o.re_ - im_ * o.im_;
        mpq_class i = re_ * o.im_ + im_ * o.re_;
        re_ = r;
        im_ = i;
        return *this;
    }

    friend Coeff operator+(Coeff a, const Coeff& b) { return a += b; }
    friend Coeff operator-(Coeff a, const Coeff& b) { return a -= b; }
    friend Coeff operator*(Coeff a, const Coeff& b) { return a *= b; }

    /// Multiplicative inverse; requires a nonzero value.
    Coeff inv() const;
    friend Coeff operator/(const Coeff& a, const Coeff& b) { return a * b.inv(); }

    friend bool operator==(const Coeff& a, const Coeff& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const Coeff& a, const Coeff& b) { return !(a == b); }

    /// Deterministic total order (used only for reproducible reports).
    friend bool operator<(const Coeff& a, const Coeff& b) {
        int c = cmp(a.re_, b.re_);
        if (c != 0) return c < 0;
        return cmp(a.im_, b.im_) < 0;
    }

    /// Serialized as "a/b+c/d*i" with canonical mpq strings.
    std::string str() const;

private:
    mpq_class re_, im_;
};

/// Parse a decimal integer or "p/q" into an exact rational.
mpq_class parse_rational(const std::string& text);

} // namespace crforge

#endif
