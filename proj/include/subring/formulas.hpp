#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "subring/bigint.hpp"
#include "subring/core.hpp"

namespace subring::formulas {

/// Gaussian binomial [a choose b]_p, evaluated exactly. Each partial product
/// prod_{t<=i} (p^{a-b+t}-1)/(p^t-1) is itself a Gaussian binomial, so every
/// intermediate division is exact.
inline BigInt p_binomial(unsigned a, unsigned b, uint64_t p) {
    core::require_prime(p);
    if (b > a) throw std::invalid_argument("p_binomial: b > a");
    BigInt r(1);
    for (unsigned i = 1; i <= b; ++i) {
        r *= BigInt::pow(BigInt(p), a - b + i) - BigInt(1);
        r = r.div_exact(BigInt::pow(BigInt(p), i) - BigInt(1));
    }
    return r;
}

enum class FormulaName {
    g_basic_e_lt,
    g_basic_n_minus_1,
    g_basic_n,
    g_n_plus_1,
    g_n_plus_2,
    lemma_beta4,
    lemma_2beta,
    lemma_3beta,
    lemma_222,
    cor_2beta,
    cor_32,
    cor_222,
};

inline const std::vector<std::pair<FormulaName, std::string>>& formula_names() {
    static const std::vector<std::pair<FormulaName, std::string>> table = {
        {FormulaName::g_basic_e_lt, "g_basic_e_lt"},
        {FormulaName::g_basic_n_minus_1, "g_basic_n_minus_1"},
        {FormulaName::g_basic_n, "g_basic_n"},
        {FormulaName::g_n_plus_1, "g_n_plus_1"},
        {FormulaName::g_n_plus_2, "g_n_plus_2"},
        {FormulaName::lemma_beta4, "lemma_beta4"},
        {FormulaName::lemma_2beta, "lemma_2beta"},
        {FormulaName::lemma_3beta, "lemma_3beta"},
        {FormulaName::lemma_222, "lemma_222"},
        {FormulaName::cor_2beta, "cor_2beta"},
        {FormulaName::cor_32, "cor_32"},
        {FormulaName::cor_222, "cor_222"},
    };
    return table;
}

inline std::string to_string(FormulaName name) {
    for (const auto& [value, text] : formula_names())
        if (value == name) return text;
    throw std::logic_error("unknown formula name");
}

inline FormulaName formula_name_from_string(const std::string& text) {
    for (const auto& [value, name] : formula_names())
        if (name == text) return value;
    throw std::invalid_argument("unknown formula \"" + text + "\"");
}

/// A named closed form plus its integer parameters (n, and k / l / beta / e
/// where applicable).
struct FormulaId {
    FormulaName name;
    std::map<std::string, long long> params;

    long long param(const std::string& key) const {
        auto it = params.find(key);
        if (it == params.end())
            throw std::invalid_argument("formula " + formulas::to_string(name) +
                                        " needs parameter " + key);
        return it->second;
    }
    long long param_or(const std::string& key, long long fallback) const {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    }
};

namespace detail {

/// One monomial c * p^exp of a closed form after the integer parameters have
/// been substituted. Exponents may be negative; the evaluator clears them
/// against the denominator.
struct Term {
    long long coef;
    long long exp;
};

/// Evaluates (sum_k c_k p^{e_k}) / (den_const * (p-1)^a * (p+1)^b) exactly,
/// asserting divisibility. Negative exponents are cleared by shifting both
/// sides by a power of p.
inline BigInt eval_terms(const std::vector<Term>& terms, uint64_t p, long long den_const,
                         unsigned pow_p_minus_1, unsigned pow_p_plus_1) {
    long long min_exp = 0;
    for (const Term& t : terms) min_exp = std::min(min_exp, t.exp);
    const uint64_t shift = static_cast<uint64_t>(-min_exp);
    BigInt numerator(0);
    for (const Term& t : terms)
        numerator += BigInt(t.coef) * BigInt::pow(BigInt(p), static_cast<uint64_t>(t.exp - min_exp));
    BigInt denominator(den_const);
    denominator *= BigInt::pow(BigInt(p) - BigInt(1), pow_p_minus_1);
    denominator *= BigInt::pow(BigInt(p) + BigInt(1), pow_p_plus_1);
    denominator *= BigInt::pow(BigInt(p), shift);
    BigInt value = numerator.div_exact(denominator);
    if (value.is_negative())
        throw DivisibilityError("closed form evaluated to a negative count");
    return value;
}

}  // namespace detail

/// Evaluates one closed-form count at prime p. Numerators are computed
/// exactly over the integers, then divided by the stated denominator with an
/// exactness assertion; a failed division signals a transcription bug.
inline BigInt eval_formula(const FormulaId& id, uint64_t p) {
    core::require_prime(p);
    using detail::Term;
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw std::invalid_argument("formula parameter out of range: " + what);
    };
    const long long n = id.param_or("n", 0);

    switch (id.name) {
        case FormulaName::g_basic_e_lt: {
            const long long e = id.param("e");
            require(n >= 1 && e >= 0 && e < n - 1, "need 0 <= e < n-1");
            return BigInt(0);
        }
        case FormulaName::g_basic_n_minus_1:
            require(n >= 1, "need n >= 1");
            return BigInt(1);
        case FormulaName::g_basic_n:
            require(n >= 1, "need n >= 1");
            return (BigInt::pow(BigInt(p), n - 1) - BigInt(1)).div_exact(BigInt(p) - BigInt(1));
        case FormulaName::g_n_plus_1: {
            require(n >= 1 && n <= 1000, "need 1 <= n <= 1000");
            const long long m = n * n - n;
            std::vector<Term> terms = {{2, 2 * n - 3}, {m, n + 1},     {-m, n},
                                       {-(m + 2), n - 1}, {m - 2, n - 2}, {2, 0}};
            return detail::eval_terms(terms, p, 2, 2, 1);
        }
        case FormulaName::g_n_plus_2: {
            require(n > 2 && n <= 1000, "need 2 < n <= 1000");
            const long long s = n - 5;  // global p^{n-5} prefactor
            std::vector<Term> terms = {
                {24, s + 2 * n - 5},
                {-24, s + 2 * n - 6},
                {24, s + 2 * n - 7},
                {12 * n * (n - 1), s + n + 1},
                {-12 * n * (n - 1), s + n},
                {-24, s + n - 2},
                {-12 * (n - 2) * (n - 3), s + n - 3},
                {12 * (n - 1) * (n - 4), s + n - 4},
                {n * (n - 1) * (n - 2) * (n - 3), s + 6},
                {-4 * n * (n - 1) * (n - 1) * (n - 5), s + 5},
                {7 * n * n * n * n - 50 * n * n * n + 41 * n * n + 98 * n - 120, s + 4},
                {-4 * (n - 2) * (n + 7) * (n * n - 7 * n + 9), s + 3},
                {-5 * n * n * n * n + 102 * n * n * n - 619 * n * n + 1482 * n - 1200, s + 2},
                {4 * (n - 2) * (n - 3) * (n - 4) * (2 * n - 15), s + 1},
                {-(n - 4) * (n - 5) * (n - 6) * (3 * n - 5), s + 0},
            };
            return detail::eval_terms(terms, p, 24, 2, 0);
        }
        case FormulaName::lemma_beta4:
            // diagonal (4, 1, ..., 1) of length n-1
            require(n >= 2, "need n >= 2");
            return BigInt(n - 1) * BigInt::pow(BigInt(p), n - 2);
        case FormulaName::lemma_2beta: {
            // diagonal (2, 1, ..., beta, 1, ..., 1), beta > 1 in position k
            const long long k = id.param("k");
            const long long beta = id.param("beta");
            require(n >= 3 && k >= 2 && k <= n - 1 && beta >= 2, "need n>=3, 2<=k<=n-1, beta>=2");
            if (beta == 2) {
                std::vector<Term> terms = {{1, 2 * n - k - 4}, {n - k, n - 2}, {-(n - k), n - 3}};
                return detail::eval_terms(terms, p, 1, 0, 0);
            }
            std::vector<Term> terms = {
                {n - k, 2 * n - k - 4}, {n - k, n - 2}, {-(n - k), n - 3}};
            return detail::eval_terms(terms, p, 1, 0, 0);
        }
        case FormulaName::lemma_3beta: {
            // diagonal (3, 1, ..., beta, 1, ..., 1), beta > 1 in position k+1
            const long long k = id.param("k");
            const long long beta = id.param("beta");
            require(n >= 3 && k >= 1 && k <= n - 2 && beta >= 2, "need n>=3, 1<=k<=n-2, beta>=2");
            const long long a = n - k - 1, b = n - k - 2, c = n - k - 3;
            if (beta == 2) {
                // (n-1)p^{2n-k-5} + a(n-2)p^{n-3}(p-1) - a p^{n-3}
                //   + (b + C(b,2)) p^{n-3}(p-2)(p-3)
                const long long pairs = b + b * (b - 1) / 2;
                std::vector<Term> terms = {
                    {n - 1, 2 * n - k - 5},
                    {a * (n - 2), n - 2},
                    {-a * (n - 2), n - 3},
                    {-a, n - 3},
                    {pairs, n - 1},
                    {-5 * pairs, n - 2},
                    {6 * pairs, n - 3},
                };
                return detail::eval_terms(terms, p, 1, 0, 0);
            }
            // a(n-2)p^{2n-k-5} + (a(k-1) + 1 + b*c) p^{n-3}(p-1)
            //   + b p^{n-3}(p-1)^2 + b p^{n-2}(p-1) + b*c p^{n-3}(p-1)(p-2)
            const long long lin = a * (k - 1) + 1 + b * c;
            std::vector<Term> terms = {
                {a * (n - 2), 2 * n - k - 5},
                {lin, n - 2},
                {-lin, n - 3},
                {b, n - 1},
                {-2 * b, n - 2},
                {b, n - 3},
                {b, n - 1},
                {-b, n - 2},
                {b * c, n - 1},
                {-3 * b * c, n - 2},
                {2 * b * c, n - 3},
            };
            return detail::eval_terms(terms, p, 1, 0, 0);
        }
        case FormulaName::lemma_222: {
            // diagonal (2, 1, ..., 2, 1, ..., 2, 1, ..., 1) with 2s in
            // positions 1, k+1, l+1, 1 <= k < l <= n-2
            const long long k = id.param("k");
            const long long l = id.param("l");
            require(n >= 4 && k >= 1 && k < l && l <= n - 2, "need n>=4, 1<=k<l<=n-2");
            const long long u = n - l - 1, v = n - k - 1, w = n - l - 2;
            const long long pairs = w + w * (w - 1) / 2;
            std::vector<Term> terms = {
                {1, 3 * n - k - l - 9},
                // u (p-1)(p+1) p^{2n-k-7}
                {u, 2 * n - k - 5},
                {-u, 2 * n - k - 7},
                // v (p-1) p^{2n-l-6}
                {v, 2 * n - l - 5},
                {-v, 2 * n - l - 6},
                // -u p^{n-4}(p-1)
                {-u, n - 3},
                {u, n - 4},
                // (n-k-2) u (p-1)^2 p^{n-4}
                {(v - 1) * u, n - 2},
                {-2 * (v - 1) * u, n - 3},
                {(v - 1) * u, n - 4},
                // pairs (p-1)(p-2)(p-3) p^{n-4}
                {pairs, n - 1},
                {-6 * pairs, n - 2},
                {11 * pairs, n - 3},
                {-6 * pairs, n - 4},
            };
            return detail::eval_terms(terms, p, 1, 0, 0);
        }
        case FormulaName::cor_2beta: {
            const long long beta = id.param_or("beta", 3);
            require(n >= 3 && beta >= 3, "need n >= 3, beta >= 3");
            // sum over k in [2, n-1] of lemma_2beta with beta >= 3
            std::vector<Term> first = {{n - 2, 2 * n - 4}, {-(n - 1), 2 * n - 5}, {1, n - 3}};
            BigInt total = detail::eval_terms(first, p, 1, 2, 0);
            const long long choose2 = (n - 1) * (n - 2) / 2;
            std::vector<Term> second = {{choose2, n - 2}, {-choose2, n - 3}};
            total += detail::eval_terms(second, p, 1, 0, 0);
            return total;
        }
        case FormulaName::cor_32: {
            require(n >= 3 && n <= 1000, "need 3 <= n <= 1000");
            std::vector<Term> terms = {
                {6 * (n - 1), 2 * n - 5},
                {(n - 1) * (n - 2) * (n - 3), n},
                {-3 * (n - 1) * (n - 2) * (n - 4), n - 1},
                {(n - 1) * (n - 2) * (5 * n - 24), n - 2},
                {-3 * (n - 1) * (n - 3) * (n - 4), n - 3},
            };
            return detail::eval_terms(terms, p, 6, 1, 0);
        }
        case FormulaName::cor_222: {
            require(n >= 4 && n <= 1000, "need 4 <= n <= 1000");
            const long long s = n - 4;  // global p^{n-4} prefactor
            std::vector<Term> terms = {
                {12 * (n - 2) * (n - 3), s + n + 1},
                {24, s + n},
                {-24 * (n - 1) * (n - 3), s + n - 1},
                {-24, s + n - 2},
                {12 * n * (n - 3), s + n - 3},
                {24, s + 2 * n - 5},
                {(n - 1) * (n - 2) * (n - 3) * (n - 4), s + 6},
                {-4 * (n - 1) * (n - 2) * (n - 3) * (n - 5), s + 5},
                {(n - 1) * (n - 2) * (n - 3) * (7 * n - 44), s + 4},
                {-4 * (n - 1) * (n - 2) * (n * n - 11 * n + 27), s + 3},
                {-(n - 3) * (5 * n * n * n - 43 * n * n + 82 * n - 56), s + 2},
                {4 * (n - 3) * (2 * n * n * n - 19 * n * n + 46 * n - 26), s + 1},
                {-(n - 3) * (n - 4) * (n - 5) * (3 * n - 2), s + 0},
            };
            return detail::eval_terms(terms, p, 24, 2, 1);
        }
    }
    throw std::logic_error("unhandled formula");
}

/// Recognizes composition shapes with a known closed form, after stripping
/// leading 1s (which leave the count unchanged): trailing-1 singletons with
/// head 2 or 4, a 2 or 3 head paired with one later entry > 1, and the three-2s
/// pattern. Returns nullopt for shapes without a closed form.
inline std::optional<BigInt> g_alpha_formula(const core::Composition& alpha, uint64_t p) {
    core::require_prime(p);
    std::vector<unsigned> parts = alpha.parts();
    size_t lead = 0;
    while (lead < parts.size() && parts[lead] == 1) ++lead;
    parts.erase(parts.begin(), parts.begin() + static_cast<long>(lead));
    const long long n = static_cast<long long>(parts.size()) + 1;

    if (parts.empty()) return BigInt(1);

    std::vector<size_t> big;  // positions (1-based) of entries > 1
    for (size_t i = 0; i < parts.size(); ++i)
        if (parts[i] > 1) big.push_back(i + 1);

    if (big.size() == 1) {
        // (beta, 1, ..., 1)
        const unsigned beta = parts[0];
        if (beta == 2) return BigInt::pow(BigInt(p), n - 2);
        if (beta == 4)
            return eval_formula({FormulaName::lemma_beta4, {{"n", n}}}, p);
        return std::nullopt;
    }
    if (big.size() == 2 && parts[0] == 2) {
        const long long k = static_cast<long long>(big[1]);
        const long long beta = parts[big[1] - 1];
        return eval_formula(
            {FormulaName::lemma_2beta, {{"n", n}, {"k", k}, {"beta", beta}}}, p);
    }
    if (big.size() == 2 && parts[0] == 3) {
        const long long k = static_cast<long long>(big[1]) - 1;
        const long long beta = parts[big[1] - 1];
        return eval_formula(
            {FormulaName::lemma_3beta, {{"n", n}, {"k", k}, {"beta", beta}}}, p);
    }
    if (big.size() == 3 && parts[0] == 2 && parts[big[1] - 1] == 2 && parts[big[2] - 1] == 2) {
        const long long k = static_cast<long long>(big[1]) - 1;
        const long long l = static_cast<long long>(big[2]) - 1;
        return eval_formula({FormulaName::lemma_222, {{"n", n}, {"k", k}, {"l", l}}}, p);
    }
    return std::nullopt;
}

namespace detail {

/// Local factor of the subring zeta function of Z^n as numerator polynomial
/// in t (coefficients polynomial in p, low degree first) over a product of
/// factors (1 - p^a t^b).
struct LocalFactor {
    std::vector<std::vector<long long>> numerator;       // [t-power][p-power]
    std::vector<std::pair<unsigned, unsigned>> denominator;  // (a, b) pairs
};

inline LocalFactor local_factor(unsigned n) {
    switch (n) {
        case 2:
            return {{{1}}, {{0, 1}}};
        case 3:
            // (1 - t^2)^2 / ((1 - t)^3 (1 - p t^3))
            return {{{1}, {0}, {-2}, {0}, {1}}, {{0, 1}, {0, 1}, {0, 1}, {1, 3}}};
        case 4:
            return {{{1},
                     {4},
                     {2},
                     {-3, 4},
                     {-1, 5},
                     {0, -5, 1},
                     {0, -4, 3},
                     {0, 0, -2},
                     {0, 0, -4},
                     {0, 0, -1}},
                    {{0, 1}, {0, 1}, {2, 4}, {3, 6}}};
        default:
            throw std::invalid_argument("zeta local factor known only for n in {2,3,4}");
    }
}

}  // namespace detail

/// Coefficients f_n(p^0), ..., f_n(p^E) of the local subring zeta factor of
/// Z^n at p, n in {2,3,4}, via exact geometric-series expansion of each
/// denominator factor.
inline std::vector<BigInt> zeta_local_coefficients(unsigned n, uint64_t p, unsigned max_e) {
    core::require_prime(p);
    const detail::LocalFactor factor = detail::local_factor(n);
    std::vector<BigInt> series(max_e + 1, BigInt(0));
    for (size_t t = 0; t < factor.numerator.size() && t <= max_e; ++t) {
        BigInt c(0);
        for (size_t k = factor.numerator[t].size(); k-- > 0;)
            c = c * BigInt(p) + BigInt(factor.numerator[t][k]);
        series[t] = c;
    }
    for (auto [a, b] : factor.denominator) {
        // multiply by sum_m p^{a m} t^{b m}
        std::vector<BigInt> next(max_e + 1, BigInt(0));
        for (unsigned e = 0; e <= max_e; ++e) {
            BigInt scale(1);
            for (unsigned m = 0; e + static_cast<unsigned long long>(m) * b <= max_e; ++m) {
                next[e + m * b] += series[e] * scale;
                scale *= BigInt::pow(BigInt(p), a);
            }
        }
        series = std::move(next);
    }
    if (series[0] != BigInt(1))
        throw std::logic_error("zeta local factor must start at 1");
    return series;
}

}  // namespace subring::formulas
