#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "subring/bigint.hpp"

namespace subring::core {

/// Raised when a requested enumeration would exceed the configured budget of
/// assignments. Carries the exact search-space size so callers can report it;
/// counting is never silently truncated.
struct BudgetExceeded : std::runtime_error {
    BigInt search_space;
    uint64_t budget;
    BudgetExceeded(BigInt space, uint64_t b)
        : std::runtime_error("search space " + space.str() + " exceeds budget " +
                             std::to_string(b)),
          search_space(std::move(space)),
          budget(b) {}
};

/// Raised when an in-flight enumeration is abandoned (interrupt). A cancelled
/// run never reports a partial count as if it were complete.
struct Cancelled : std::runtime_error {
    Cancelled() : std::runtime_error("counting cancelled") {}
};

/// p-adic valuation of zero is undefined; rejected with its own type.
struct ValuationOfZero : std::domain_error {
    ValuationOfZero() : std::domain_error("p-adic valuation of 0 is undefined") {}
};

inline bool is_prime(uint64_t p) {
    if (p < 2) return false;
    for (uint64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

inline void require_prime(uint64_t p) {
    if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
}

inline std::vector<uint64_t> first_primes(size_t k) {
    std::vector<uint64_t> out;
    for (uint64_t v = 2; out.size() < k; ++v)
        if (is_prime(v)) out.push_back(v);
    return out;
}

inline BigInt binomial(uint64_t a, uint64_t b) {
    if (b > a) return BigInt(0);
    if (b > a - b) b = a - b;
    BigInt r(1);
    for (uint64_t i = 1; i <= b; ++i) r = (r * BigInt(a - b + i)).div_exact(BigInt(i));
    return r;
}

/// Ordered tuple of positive integers; the diagonal exponent vector of an
/// irreducible subring matrix. An empty composition is the n = 1 degenerate
/// case. Immutable once constructed.
class Composition {
public:
    Composition() = default;
    explicit Composition(std::vector<unsigned> parts) : parts_(std::move(parts)) {
        for (unsigned part : parts_)
            if (part < 1) throw std::invalid_argument("composition parts must be >= 1");
    }

    static Composition parse(std::string_view text) {
        std::vector<unsigned> parts;
        size_t pos = 0;
        while (pos < text.size()) {
            size_t next = text.find(',', pos);
            if (next == std::string_view::npos) next = text.size();
            std::string piece(text.substr(pos, next - pos));
            size_t used = 0;
            long v = std::stol(piece, &used);
            if (used != piece.size() || v < 1)
                throw std::invalid_argument("bad composition part \"" + piece + "\"");
            parts.push_back(static_cast<unsigned>(v));
            pos = next + 1;
        }
        return Composition(std::move(parts));
    }

    const std::vector<unsigned>& parts() const { return parts_; }
    unsigned length() const { return static_cast<unsigned>(parts_.size()); }
    /// Matrix dimension this diagonal belongs to.
    unsigned n() const { return length() + 1; }
    unsigned sum() const { return std::accumulate(parts_.begin(), parts_.end(), 0u); }

    friend bool operator==(const Composition& a, const Composition& b) {
        return a.parts_ == b.parts_;
    }

    std::string str() const {
        std::string out;
        for (size_t i = 0; i < parts_.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(parts_[i]);
        }
        return out;
    }

private:
    std::vector<unsigned> parts_;
};

/// All compositions of e into `parts` positive parts, lexicographic.
/// Empty when e < parts. parts == 0 yields the empty composition iff e == 0.
inline std::vector<Composition> compositions(unsigned e, unsigned parts) {
    std::vector<Composition> out;
    if (parts == 0) {
        if (e == 0) out.emplace_back();
        return out;
    }
    if (e < parts) return out;
    std::vector<unsigned> cur(parts, 1);
    auto rec = [&](auto&& self, unsigned pos, unsigned remaining) -> void {
        if (pos + 1 == parts) {
            cur[pos] = remaining;
            out.push_back(Composition(cur));
            return;
        }
        for (unsigned v = 1; v + (parts - pos - 1) <= remaining; ++v) {
            cur[pos] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    rec(rec, 0, e);
    return out;
}

/// Largest k with p^k | x; x must be nonzero.
inline unsigned p_valuation(const BigInt& x, uint64_t p) {
    require_prime(p);
    if (x.is_zero()) throw ValuationOfZero();
    BigInt v = x.abs();
    BigInt divisor(p);
    unsigned k = 0;
    while (true) {
        BigInt q, r;
        BigInt::divmod(v, divisor, q, r);
        if (!r.is_zero()) return k;
        v = std::move(q);
        ++k;
    }
}

inline unsigned p_valuation(long long x, uint64_t p) { return p_valuation(BigInt(x), p); }

/// Descriptor of what a count refers to: a kind tag plus named parameters,
/// e.g. {"g_alpha", {{"alpha","3,2"}}}.
struct TargetDescriptor {
    std::string kind;
    std::vector<std::pair<std::string, std::string>> params;

    std::string str() const {
        std::string out = kind;
        for (const auto& [key, value] : params) out += " " + key + "=" + value;
        return out;
    }
};

/// One counted data point. The prime is primality-checked on construction.
class CountRecord {
public:
    CountRecord(TargetDescriptor target, uint64_t prime, BigInt count)
        : target_(std::move(target)), prime_(prime), count_(std::move(count)) {
        require_prime(prime_);
        if (count_.is_negative()) throw std::invalid_argument("counts are nonnegative");
    }

    const TargetDescriptor& target() const { return target_; }
    uint64_t prime() const { return prime_; }
    const BigInt& count() const { return count_; }

private:
    TargetDescriptor target_;
    uint64_t prime_;
    BigInt count_;
};

}  // namespace subring::core
