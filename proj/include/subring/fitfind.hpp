#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "subring/bigint.hpp"
#include "subring/core.hpp"
#include "subring/rational.hpp"

namespace subring::fitfind {

struct SamplePoint {
    uint64_t prime;
    BigInt count;
};

using Polynomial = std::vector<BigRational>;  // coefficients, low degree first

inline BigRational eval_polynomial(const Polynomial& coeffs, uint64_t p) {
    BigRational value(0);
    for (size_t k = coeffs.size(); k-- > 0;) value = value * BigRational(BigInt(p)) + coeffs[k];
    return value;
}

inline std::string polynomial_str(const Polynomial& coeffs) {
    if (coeffs.empty()) return "0";
    std::string out;
    for (size_t k = coeffs.size(); k-- > 0;) {
        if (coeffs[k].is_zero() && coeffs.size() > 1) continue;
        if (!out.empty()) out += " + ";
        out += coeffs[k].str();
        if (k >= 1) out += "*p";
        if (k >= 2) out += "^" + std::to_string(k);
    }
    return out.empty() ? "0" : out;
}

/// The unique polynomial of degree <= d through the first d+1 points, with
/// exact rational coefficients (expanded Lagrange basis).
inline Polynomial interpolate_exact(const std::vector<SamplePoint>& points, unsigned degree) {
    if (points.size() < degree + 1)
        throw std::invalid_argument("interpolate_exact: need degree+1 points");
    for (size_t a = 0; a + 1 < degree + 1; ++a)
        for (size_t b = a + 1; b < degree + 1; ++b)
            if (points[a].prime == points[b].prime)
                throw std::invalid_argument("interpolate_exact: duplicate primes");
    Polynomial result(degree + 1, BigRational(0));
    for (size_t i = 0; i <= degree; ++i) {
        // basis_i(x) = prod_{j != i} (x - x_j) / (x_i - x_j)
        Polynomial basis = {BigRational(1)};
        BigRational denom(1);
        const BigInt xi(points[i].prime);
        for (size_t j = 0; j <= degree; ++j) {
            if (j == i) continue;
            const BigInt xj(points[j].prime);
            Polynomial shifted(basis.size() + 1, BigRational(0));
            for (size_t k = 0; k < basis.size(); ++k) {
                shifted[k + 1] += basis[k];
                shifted[k] -= basis[k] * BigRational(xj);
            }
            basis = std::move(shifted);
            denom *= BigRational(xi - xj);
        }
        const BigRational scale = BigRational(points[i].count) / denom;
        for (size_t k = 0; k < basis.size(); ++k) result[k] += basis[k] * scale;
    }
    return result;
}

/// Classification of a prime-indexed count sequence. Verdicts are empirical
/// at the sampled primes only: agreement with a polynomial on finitely many
/// primes proves nothing beyond them, and the report says how many points
/// were fitted versus held out.
struct FitReport {
    enum class Verdict { polynomial, quasipolynomial, undetermined };

    struct ClassFit {
        uint64_t residue = 0;     // residue of p mod modulus
        bool pinned = false;      // singleton class for a prime dividing the modulus
        Polynomial coefficients;  // pinned classes carry the bare count
        std::vector<SamplePoint> points;
    };

    Verdict verdict = Verdict::undetermined;
    Polynomial coefficients;        // polynomial verdict
    uint64_t modulus = 0;           // quasipolynomial verdict
    std::vector<ClassFit> classes;  // quasipolynomial verdict
    size_t fitted_points = 0;
    size_t held_out_points = 0;
    unsigned max_degree_tried = 0;

    std::string verdict_str() const {
        switch (verdict) {
            case Verdict::polynomial: return "polynomial";
            case Verdict::quasipolynomial: return "quasipolynomial";
            default: return "undetermined";
        }
    }
};

namespace detail {

inline bool matches_all(const Polynomial& poly, const std::vector<SamplePoint>& points) {
    for (const SamplePoint& pt : points)
        if (eval_polynomial(poly, pt.prime) != BigRational(pt.count)) return false;
    return true;
}

/// Fit one residue class: smallest degree whose interpolation through the
/// d+1 smallest primes reproduces every class point exactly, requiring at
/// least one held-out point (|class| >= degree+2).
inline bool fit_class(const std::vector<SamplePoint>& points, unsigned max_degree,
                      Polynomial& out, unsigned& degree_used) {
    for (unsigned d = 0; d + 2 <= points.size() && d <= max_degree; ++d) {
        Polynomial poly = interpolate_exact(points, d);
        if (matches_all(poly, points)) {
            out = std::move(poly);
            degree_used = d;
            return true;
        }
    }
    return false;
}

}  // namespace detail

/// Classifies a count sequence over distinct primes.
///   1. polynomial: some degree d <= max_degree fits the d+1 smallest primes
///      and validates exactly on all remaining points (at least one held out);
///   2. quasipolynomial: for some modulus N in [2, max_modulus], splitting by
///      p mod N gives classes that each fit exactly with a held-out point.
///      Primes dividing N form singleton classes and are pinned to their
///      exact counts (for N = 2 this is the {p = 2} versus {p > 2} split);
///   3. as a last resort, the saturated interpolation through all points
///      (nothing held out) is reported as polynomial; its evidence fields
///      show zero held-out points;
///   4. otherwise undetermined.
inline FitReport classify(std::vector<SamplePoint> points, unsigned max_degree = 8,
                          uint64_t max_modulus = 10) {
    if (points.size() < 4) throw std::invalid_argument("classify: need at least 4 points");
    std::sort(points.begin(), points.end(),
              [](const SamplePoint& a, const SamplePoint& b) { return a.prime < b.prime; });
    for (size_t i = 0; i + 1 < points.size(); ++i)
        if (points[i].prime == points[i + 1].prime)
            throw std::invalid_argument("classify: duplicate primes");
    for (const SamplePoint& pt : points) core::require_prime(pt.prime);

    FitReport report;
    report.max_degree_tried =
        std::min<unsigned>(max_degree, static_cast<unsigned>(points.size()) - 1);

    // Validated polynomial fits.
    for (unsigned d = 0; d + 2 <= points.size() && d <= max_degree; ++d) {
        Polynomial poly = interpolate_exact(points, d);
        if (detail::matches_all(poly, points)) {
            report.verdict = FitReport::Verdict::polynomial;
            report.coefficients = std::move(poly);
            report.fitted_points = d + 1;
            report.held_out_points = points.size() - (d + 1);
            return report;
        }
    }

    // Residue-class splits.
    for (uint64_t modulus = 2; modulus <= max_modulus; ++modulus) {
        std::vector<FitReport::ClassFit> classes;
        bool ok = true;
        size_t fitted = 0, held = 0;
        for (const SamplePoint& pt : points) {
            const uint64_t residue = pt.prime % modulus;
            auto it = std::find_if(classes.begin(), classes.end(),
                                   [&](const auto& c) { return c.residue == residue; });
            if (it == classes.end()) {
                classes.push_back({residue, false, {}, {}});
                it = classes.end() - 1;
            }
            it->points.push_back(pt);
        }
        for (auto& cls : classes) {
            const bool divides = std::gcd(cls.points.front().prime, modulus) > 1;
            if (divides && cls.points.size() == 1) {
                // A prime dividing the modulus can only ever appear alone;
                // record its exact count rather than pretending to fit it.
                cls.pinned = true;
                cls.coefficients = {BigRational(cls.points.front().count)};
                fitted += 1;
                continue;
            }
            unsigned degree = 0;
            if (!detail::fit_class(cls.points, max_degree, cls.coefficients, degree)) {
                ok = false;
                break;
            }
            fitted += degree + 1;
            held += cls.points.size() - (degree + 1);
        }
        if (ok && classes.size() > 1) {
            report.verdict = FitReport::Verdict::quasipolynomial;
            report.modulus = modulus;
            std::sort(classes.begin(), classes.end(),
                      [](const auto& a, const auto& b) { return a.residue < b.residue; });
            report.classes = std::move(classes);
            report.fitted_points = fitted;
            report.held_out_points = held;
            return report;
        }
    }

    // Saturated fit through every point, nothing held out.
    if (points.size() - 1 <= max_degree) {
        Polynomial poly = interpolate_exact(points, static_cast<unsigned>(points.size()) - 1);
        while (poly.size() > 1 && poly.back().is_zero()) poly.pop_back();
        report.verdict = FitReport::Verdict::polynomial;
        report.coefficients = std::move(poly);
        report.fitted_points = points.size();
        report.held_out_points = 0;
        return report;
    }

    report.verdict = FitReport::Verdict::undetermined;
    return report;
}

/// Evaluates a counting target at each prime, then classifies the sequence.
/// A budget error mid-sweep is rethrown with the points gathered so far
/// preserved.
struct ProbeBudgetExceeded : core::BudgetExceeded {
    std::vector<SamplePoint> partial;
    ProbeBudgetExceeded(const core::BudgetExceeded& cause, std::vector<SamplePoint> pts)
        : core::BudgetExceeded(cause), partial(std::move(pts)) {}
};

inline FitReport probe_polynomiality(const std::function<BigInt(uint64_t)>& evaluate,
                                     const std::vector<uint64_t>& primes,
                                     unsigned max_degree = 8, uint64_t max_modulus = 10) {
    std::vector<SamplePoint> points;
    for (uint64_t p : primes) {
        try {
            points.push_back({p, evaluate(p)});
        } catch (const core::BudgetExceeded& err) {
            throw ProbeBudgetExceeded(err, std::move(points));
        }
    }
    return classify(std::move(points), max_degree, max_modulus);
}

}  // namespace subring::fitfind
