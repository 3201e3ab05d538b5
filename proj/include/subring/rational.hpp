#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "subring/bigint.hpp"

namespace subring {

/// Exact rational number, always reduced, denominator > 0.
/// Fitting and interpolation never touch floating point; equality here is
/// literal equality of counts.
class BigRational {
public:
    BigRational() : num_(0), den_(1) {}
    BigRational(BigInt n) : num_(std::move(n)), den_(1) {}
    BigRational(long long n) : num_(n), den_(1) {}
    BigRational(int n) : num_(n), den_(1) {}
    BigRational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_integer() const { return den_ == BigInt(1); }

    friend BigRational operator+(const BigRational& a, const BigRational& b) {
        return BigRational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend BigRational operator-(const BigRational& a, const BigRational& b) {
        return BigRational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend BigRational operator*(const BigRational& a, const BigRational& b) {
        return BigRational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend BigRational operator/(const BigRational& a, const BigRational& b) {
        if (b.num_.is_zero()) throw std::domain_error("BigRational: division by zero");
        return BigRational(a.num_ * b.den_, a.den_ * b.num_);
    }
    BigRational operator-() const {
        BigRational r = *this;
        r.num_ = -r.num_;
        return r;
    }
    BigRational& operator+=(const BigRational& b) { return *this = *this + b; }
    BigRational& operator-=(const BigRational& b) { return *this = *this - b; }
    BigRational& operator*=(const BigRational& b) { return *this = *this * b; }
    BigRational& operator/=(const BigRational& b) { return *this = *this / b; }

    friend bool operator==(const BigRational& a, const BigRational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const BigRational& a, const BigRational& b) { return !(a == b); }

    std::string str() const {
        if (is_integer()) return num_.str();
        return num_.str() + "/" + den_.str();
    }

private:
    BigInt num_, den_;

    void normalize() {
        if (den_.is_zero()) throw std::domain_error("BigRational: zero denominator");
        if (den_.is_negative()) {
            num_ = -num_;
            den_ = -den_;
        }
        if (num_.is_zero()) {
            den_ = BigInt(1);
            return;
        }
        BigInt g = BigInt::gcd(num_, den_);
        if (g != BigInt(1)) {
            num_ = num_.div_exact(g);
            den_ = den_.div_exact(g);
        }
    }
};

inline std::string to_string(const BigRational& v) { return v.str(); }

}  // namespace subring
