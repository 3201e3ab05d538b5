#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace subring {

/// Signals a division that was required to be exact but left a remainder.
/// Closed-form count evaluation treats this as a transcription bug, never
/// something to round away.
struct DivisibilityError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Arbitrary-precision signed integer, sign/magnitude over 32-bit limbs.
/// All counts in the engine flow through this type; nothing is ever
/// truncated to a machine word.
class BigInt {
public:
    BigInt() = default;

    BigInt(long long v) {
        if (v == 0) return;
        sign_ = v < 0 ? -1 : 1;
        unsigned long long m = v < 0 ? 0ULL - static_cast<unsigned long long>(v)
                                     : static_cast<unsigned long long>(v);
        append_u64(m);
    }
    BigInt(int v) : BigInt(static_cast<long long>(v)) {}
    BigInt(unsigned v) : BigInt(static_cast<unsigned long long>(v)) {}
    BigInt(long v) : BigInt(static_cast<long long>(v)) {}
    BigInt(unsigned long long v) {
        if (v == 0) return;
        sign_ = 1;
        append_u64(v);
    }
    BigInt(unsigned long v) : BigInt(static_cast<unsigned long long>(v)) {}

    static BigInt from_string(std::string_view s) {
        if (s.empty()) throw std::invalid_argument("BigInt: empty string");
        int sign = 1;
        size_t i = 0;
        if (s[0] == '+' || s[0] == '-') {
            sign = s[0] == '-' ? -1 : 1;
            i = 1;
        }
        if (i == s.size()) throw std::invalid_argument("BigInt: sign without digits");
        BigInt r;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9')
                throw std::invalid_argument("BigInt: bad digit in \"" + std::string(s) + "\"");
            r.mul_small(10);
            r.add_small(static_cast<uint32_t>(s[i] - '0'));
        }
        if (!r.limbs_.empty()) r.sign_ = sign;
        return r;
    }

    bool is_zero() const { return sign_ == 0; }
    int sign() const { return sign_; }
    bool is_negative() const { return sign_ < 0; }

    bool fits_u64() const {
        return sign_ >= 0 && limbs_.size() <= 2;
    }
    uint64_t to_u64() const {
        if (!fits_u64()) throw std::overflow_error("BigInt: does not fit in u64");
        uint64_t v = 0;
        for (size_t i = limbs_.size(); i-- > 0;) v = (v << 32) | limbs_[i];
        return v;
    }
    long long to_i64() const {
        BigInt a = abs();
        if (!a.fits_u64()) throw std::overflow_error("BigInt: does not fit in i64");
        uint64_t m = a.to_u64();
        if (sign_ >= 0) {
            if (m > 0x7fffffffffffffffULL) throw std::overflow_error("BigInt: does not fit in i64");
            return static_cast<long long>(m);
        }
        if (m > 0x8000000000000000ULL) throw std::overflow_error("BigInt: does not fit in i64");
        return -static_cast<long long>(m - 1) - 1;
    }

    BigInt abs() const {
        BigInt r = *this;
        if (r.sign_ < 0) r.sign_ = 1;
        return r;
    }

    BigInt operator-() const {
        BigInt r = *this;
        r.sign_ = -r.sign_;
        return r;
    }

    friend BigInt operator+(const BigInt& a, const BigInt& b) {
        if (a.sign_ == 0) return b;
        if (b.sign_ == 0) return a;
        BigInt r;
        if (a.sign_ == b.sign_) {
            r.limbs_ = add_mag(a.limbs_, b.limbs_);
            r.sign_ = a.sign_;
        } else {
            int c = cmp_mag(a.limbs_, b.limbs_);
            if (c == 0) return BigInt();
            if (c > 0) {
                r.limbs_ = sub_mag(a.limbs_, b.limbs_);
                r.sign_ = a.sign_;
            } else {
                r.limbs_ = sub_mag(b.limbs_, a.limbs_);
                r.sign_ = b.sign_;
            }
        }
        return r;
    }
    friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

    friend BigInt operator*(const BigInt& a, const BigInt& b) {
        if (a.sign_ == 0 || b.sign_ == 0) return BigInt();
        BigInt r;
        r.sign_ = a.sign_ * b.sign_;
        r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
        for (size_t i = 0; i < a.limbs_.size(); ++i) {
            uint64_t carry = 0;
            uint64_t ai = a.limbs_[i];
            for (size_t j = 0; j < b.limbs_.size(); ++j) {
                uint64_t cur = r.limbs_[i + j] + ai * b.limbs_[j] + carry;
                r.limbs_[i + j] = static_cast<uint32_t>(cur);
                carry = cur >> 32;
            }
            size_t k = i + b.limbs_.size();
            while (carry) {
                uint64_t cur = r.limbs_[k] + carry;
                r.limbs_[k] = static_cast<uint32_t>(cur);
                carry = cur >> 32;
                ++k;
            }
        }
        r.trim();
        return r;
    }

    /// Truncated division: quotient rounds toward zero, remainder keeps the
    /// sign of the dividend, |r| < |b|.
    static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
        if (b.sign_ == 0) throw std::domain_error("BigInt: division by zero");
        int c = cmp_mag(a.limbs_, b.limbs_);
        if (c < 0) {
            q = BigInt();
            r = a;
            return;
        }
        std::vector<uint32_t> qm, rm;
        divmod_mag(a.limbs_, b.limbs_, qm, rm);
        q = BigInt();
        q.limbs_ = std::move(qm);
        q.trim();
        if (!q.limbs_.empty()) q.sign_ = a.sign_ * b.sign_;
        r = BigInt();
        r.limbs_ = std::move(rm);
        r.trim();
        if (!r.limbs_.empty()) r.sign_ = a.sign_;
    }

    friend BigInt operator/(const BigInt& a, const BigInt& b) {
        BigInt q, r;
        divmod(a, b, q, r);
        return q;
    }
    friend BigInt operator%(const BigInt& a, const BigInt& b) {
        BigInt q, r;
        divmod(a, b, q, r);
        return r;
    }

    /// Exact quotient; throws DivisibilityError when d does not divide this.
    BigInt div_exact(const BigInt& d) const {
        BigInt q, r;
        divmod(*this, d, q, r);
        if (!r.is_zero())
            throw DivisibilityError("BigInt: inexact division " + str() + " / " + d.str());
        return q;
    }

    bool divisible_by(const BigInt& d) const { return (*this % d).is_zero(); }

    BigInt& operator+=(const BigInt& b) { return *this = *this + b; }
    BigInt& operator-=(const BigInt& b) { return *this = *this - b; }
    BigInt& operator*=(const BigInt& b) { return *this = *this * b; }
    BigInt& operator/=(const BigInt& b) { return *this = *this / b; }

    friend bool operator==(const BigInt& a, const BigInt& b) {
        return a.sign_ == b.sign_ && a.limbs_ == b.limbs_;
    }
    friend bool operator!=(const BigInt& a, const BigInt& b) { return !(a == b); }
    friend bool operator<(const BigInt& a, const BigInt& b) { return compare(a, b) < 0; }
    friend bool operator>(const BigInt& a, const BigInt& b) { return compare(a, b) > 0; }
    friend bool operator<=(const BigInt& a, const BigInt& b) { return compare(a, b) <= 0; }
    friend bool operator>=(const BigInt& a, const BigInt& b) { return compare(a, b) >= 0; }

    static int compare(const BigInt& a, const BigInt& b) {
        if (a.sign_ != b.sign_) return a.sign_ < b.sign_ ? -1 : 1;
        int c = cmp_mag(a.limbs_, b.limbs_);
        return a.sign_ >= 0 ? c : -c;
    }

    static BigInt pow(const BigInt& base, uint64_t exp) {
        BigInt r(1), b = base;
        while (exp) {
            if (exp & 1) r *= b;
            b *= b;
            exp >>= 1;
        }
        return r;
    }

    static BigInt gcd(BigInt a, BigInt b) {
        a = a.abs();
        b = b.abs();
        while (!b.is_zero()) {
            BigInt r = a % b;
            a = std::move(b);
            b = std::move(r);
        }
        return a;
    }

    std::string str() const {
        if (sign_ == 0) return "0";
        std::vector<uint32_t> chunks;  // base 1e9, little endian
        std::vector<uint32_t> work = limbs_;
        while (!work.empty()) {
            uint64_t rem = 0;
            for (size_t i = work.size(); i-- > 0;) {
                uint64_t cur = (rem << 32) | work[i];
                work[i] = static_cast<uint32_t>(cur / 1000000000u);
                rem = cur % 1000000000u;
            }
            while (!work.empty() && work.back() == 0) work.pop_back();
            chunks.push_back(static_cast<uint32_t>(rem));
        }
        std::string out = sign_ < 0 ? "-" : "";
        out += std::to_string(chunks.back());
        for (size_t i = chunks.size() - 1; i-- > 0;) {
            std::string part = std::to_string(chunks[i]);
            out += std::string(9 - part.size(), '0') + part;
        }
        return out;
    }

private:
    int sign_ = 0;                 // 0 iff limbs_ empty
    std::vector<uint32_t> limbs_;  // little endian, no trailing zero limb

    void append_u64(uint64_t v) {
        limbs_.push_back(static_cast<uint32_t>(v));
        if (v >> 32) limbs_.push_back(static_cast<uint32_t>(v >> 32));
    }

    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
        if (limbs_.empty()) sign_ = 0;
    }

    void mul_small(uint32_t m) {
        uint64_t carry = 0;
        for (auto& limb : limbs_) {
            uint64_t cur = static_cast<uint64_t>(limb) * m + carry;
            limb = static_cast<uint32_t>(cur);
            carry = cur >> 32;
        }
        if (carry) limbs_.push_back(static_cast<uint32_t>(carry));
        trim();
    }

    void add_small(uint32_t v) {
        if (v == 0) return;
        if (limbs_.empty()) {
            limbs_.push_back(v);
            sign_ = 1;
            return;
        }
        uint64_t carry = v;
        for (size_t i = 0; i < limbs_.size() && carry; ++i) {
            uint64_t cur = limbs_[i] + carry;
            limbs_[i] = static_cast<uint32_t>(cur);
            carry = cur >> 32;
        }
        if (carry) limbs_.push_back(static_cast<uint32_t>(carry));
    }

    static int cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
        if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
        for (size_t i = a.size(); i-- > 0;)
            if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
        return 0;
    }

    static std::vector<uint32_t> add_mag(const std::vector<uint32_t>& a,
                                         const std::vector<uint32_t>& b) {
        const auto& lo = a.size() >= b.size() ? b : a;
        const auto& hi = a.size() >= b.size() ? a : b;
        std::vector<uint32_t> r;
        r.reserve(hi.size() + 1);
        uint64_t carry = 0;
        for (size_t i = 0; i < hi.size(); ++i) {
            uint64_t cur = carry + hi[i] + (i < lo.size() ? lo[i] : 0u);
            r.push_back(static_cast<uint32_t>(cur));
            carry = cur >> 32;
        }
        if (carry) r.push_back(static_cast<uint32_t>(carry));
        return r;
    }

    // requires |a| >= |b|
    static std::vector<uint32_t> sub_mag(const std::vector<uint32_t>& a,
                                         const std::vector<uint32_t>& b) {
        std::vector<uint32_t> r = a;
        int64_t borrow = 0;
        for (size_t i = 0; i < r.size(); ++i) {
            int64_t cur = static_cast<int64_t>(r[i]) - borrow - (i < b.size() ? b[i] : 0u);
            if (cur < 0) {
                cur += 1LL << 32;
                borrow = 1;
            } else {
                borrow = 0;
            }
            r[i] = static_cast<uint32_t>(cur);
        }
        while (!r.empty() && r.back() == 0) r.pop_back();
        return r;
    }

    // Knuth algorithm D on magnitudes; requires |a| >= |b| > 0.
    static void divmod_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b,
                           std::vector<uint32_t>& q, std::vector<uint32_t>& r) {
        if (b.size() == 1) {
            uint64_t d = b[0], rem = 0;
            q.assign(a.size(), 0);
            for (size_t i = a.size(); i-- > 0;) {
                uint64_t cur = (rem << 32) | a[i];
                q[i] = static_cast<uint32_t>(cur / d);
                rem = cur % d;
            }
            r.clear();
            if (rem) r.push_back(static_cast<uint32_t>(rem));
            return;
        }
        // Normalize so the top divisor limb has its high bit set.
        int shift = 0;
        for (uint32_t top = b.back(); !(top & 0x80000000u); top <<= 1) ++shift;
        std::vector<uint32_t> u = shl_bits(a, shift);
        std::vector<uint32_t> v = shl_bits(b, shift);
        u.push_back(0);
        const size_t n = v.size(), m = u.size() - n - 1;
        q.assign(m + 1, 0);
        const uint64_t vtop = v[n - 1], vnext = v[n - 2];
        for (size_t j = m + 1; j-- > 0;) {
            uint64_t hi = (static_cast<uint64_t>(u[j + n]) << 32) | u[j + n - 1];
            uint64_t qhat = hi / vtop, rhat = hi % vtop;
            while (qhat >= (1ULL << 32) ||
                   qhat * vnext > ((rhat << 32) | u[j + n - 2])) {
                --qhat;
                rhat += vtop;
                if (rhat >= (1ULL << 32)) break;
            }
            // Multiply-subtract qhat*v from u[j .. j+n].
            int64_t borrow = 0;
            uint64_t carry = 0;
            for (size_t i = 0; i < n; ++i) {
                uint64_t prod = qhat * v[i] + carry;
                carry = prod >> 32;
                int64_t cur = static_cast<int64_t>(u[i + j]) - static_cast<int64_t>(prod & 0xffffffffu) - borrow;
                if (cur < 0) {
                    cur += 1LL << 32;
                    borrow = 1;
                } else {
                    borrow = 0;
                }
                u[i + j] = static_cast<uint32_t>(cur);
            }
            int64_t cur = static_cast<int64_t>(u[j + n]) - static_cast<int64_t>(carry) - borrow;
            if (cur < 0) {
                // qhat was one too large: add v back.
                cur += 1LL << 32;
                --qhat;
                uint64_t c2 = 0;
                for (size_t i = 0; i < n; ++i) {
                    uint64_t s = static_cast<uint64_t>(u[i + j]) + v[i] + c2;
                    u[i + j] = static_cast<uint32_t>(s);
                    c2 = s >> 32;
                }
                cur += static_cast<int64_t>(c2);
            }
            u[j + n] = static_cast<uint32_t>(cur);
            q[j] = static_cast<uint32_t>(qhat);
        }
        u.resize(n);
        r = shr_bits(u, shift);
    }

    static std::vector<uint32_t> shl_bits(const std::vector<uint32_t>& a, int s) {
        if (s == 0) return a;
        std::vector<uint32_t> r(a.size() + 1, 0);
        for (size_t i = 0; i < a.size(); ++i) {
            r[i] |= a[i] << s;
            r[i + 1] = a[i] >> (32 - s);
        }
        while (!r.empty() && r.back() == 0) r.pop_back();
        return r;
    }

    static std::vector<uint32_t> shr_bits(const std::vector<uint32_t>& a, int s) {
        std::vector<uint32_t> r = a;
        if (s != 0) {
            for (size_t i = 0; i < r.size(); ++i) {
                r[i] >>= s;
                if (i + 1 < r.size()) r[i] |= r[i + 1] << (32 - s);
            }
        }
        while (!r.empty() && r.back() == 0) r.pop_back();
        return r;
    }
};

inline std::string to_string(const BigInt& v) { return v.str(); }

}  // namespace subring
