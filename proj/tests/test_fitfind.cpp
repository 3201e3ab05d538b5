#include <doctest.h>

#include <algorithm>
#include <random>

#include "subring/census.hpp"
#include "subring/fitfind.hpp"
#include "subring/varieties.hpp"

using namespace subring;
using fitfind::FitReport;
using fitfind::SamplePoint;

namespace {

std::vector<SamplePoint> sample(const std::vector<uint64_t>& primes,
                                const std::function<BigInt(uint64_t)>& f) {
    std::vector<SamplePoint> pts;
    for (uint64_t p : primes) pts.push_back({p, f(p)});
    return pts;
}

const std::vector<uint64_t> six_primes = {2, 3, 5, 7, 11, 13};

}  // namespace

TEST_CASE("exact interpolation through known points") {
    const auto constant = fitfind::interpolate_exact({{2, BigInt(1)}, {3, BigInt(1)}, {5, BigInt(1)}}, 0);
    CHECK(constant == fitfind::Polynomial{BigRational(1)});

    // g_{(3,2)}(p) = p through two points
    const auto identity = fitfind::interpolate_exact({{2, BigInt(2)}, {3, BigInt(3)}}, 1);
    CHECK(identity == fitfind::Polynomial{BigRational(0), BigRational(1)});

    // a_2(p) = p + 1
    const auto succ = fitfind::interpolate_exact({{2, BigInt(3)}, {3, BigInt(4)}}, 1);
    CHECK(succ == fitfind::Polynomial{BigRational(1), BigRational(1)});

    CHECK_THROWS_AS(fitfind::interpolate_exact({{2, BigInt(1)}}, 1), std::invalid_argument);
    CHECK_THROWS_AS(fitfind::interpolate_exact({{2, BigInt(1)}, {2, BigInt(2)}}, 1),
                    std::invalid_argument);
}

TEST_CASE("interpolation then evaluation is the identity on fitted points") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<SamplePoint> pts;
        const auto primes = core::first_primes(6);
        for (uint64_t p : primes)
            pts.push_back({p, BigInt(static_cast<long long>(rng() % 10000)) - BigInt(5000)});
        const auto poly = fitfind::interpolate_exact(pts, 5);
        for (const auto& pt : pts)
            CHECK(fitfind::eval_polynomial(poly, pt.prime) == BigRational(pt.count));
    }
}

TEST_CASE("constant sequences classify as degree-0 polynomials") {
    const auto report =
        fitfind::classify(sample(six_primes, [](uint64_t) { return BigInt(1); }));
    CHECK(report.verdict == FitReport::Verdict::polynomial);
    CHECK(report.coefficients == fitfind::Polynomial{BigRational(1)});
    CHECK(report.held_out_points == 5);
}

TEST_CASE("polynomial verdicts re-evaluate exactly and survive permutation") {
    auto counts = sample(six_primes, [](uint64_t p) {
        return BigInt(3) * BigInt(p) * BigInt(p) - BigInt(p) + BigInt(7);
    });
    const auto report = fitfind::classify(counts);
    REQUIRE(report.verdict == FitReport::Verdict::polynomial);
    CHECK(report.coefficients ==
          fitfind::Polynomial{BigRational(7), BigRational(-1), BigRational(3)});
    for (const auto& pt : counts)
        CHECK(fitfind::eval_polynomial(report.coefficients, pt.prime) == BigRational(pt.count));

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        std::shuffle(counts.begin(), counts.end(), rng);
        const auto again = fitfind::classify(counts);
        REQUIRE(again.verdict == FitReport::Verdict::polynomial);
        CHECK(again.coefficients == report.coefficients);
    }
}

TEST_CASE("the qp-pair sequence classifies as the p=2 / p>2 split") {
    const auto system = varieties::builtin_system("qp-pair");
    const auto report = fitfind::classify(
        sample(six_primes, [&](uint64_t p) { return varieties::count_points(system, p); }));
    REQUIRE(report.verdict == FitReport::Verdict::quasipolynomial);
    CHECK(report.modulus == 2);
    REQUIRE(report.classes.size() == 2);
    const auto& even = report.classes[0];
    const auto& odd = report.classes[1];
    CHECK(even.pinned);
    CHECK(even.points.size() == 1);
    CHECK(even.coefficients == fitfind::Polynomial{BigRational(8)});
    CHECK_FALSE(odd.pinned);
    CHECK(odd.points.size() == 5);
    CHECK(odd.coefficients == fitfind::Polynomial{BigRational(-1), BigRational(3),
                                                  BigRational(-3), BigRational(2)});
}

TEST_CASE("small classes never yield a quasipolynomial verdict") {
    // No residue split of these four points has degree+2 samples per class.
    const std::vector<SamplePoint> pts = {
        {2, BigInt(5)}, {3, BigInt(99)}, {5, BigInt(5)}, {7, BigInt(123)}};
    const auto report = fitfind::classify(pts);
    CHECK(report.verdict != FitReport::Verdict::quasipolynomial);
    for (const auto& cls : report.classes)
        if (!cls.pinned) {
            size_t degree = cls.coefficients.size() - 1;
            CHECK(cls.points.size() >= degree + 2);
        }
}

TEST_CASE("saturated fits are reported with zero held-out points") {
    const auto report = fitfind::classify(
        sample(six_primes, [](uint64_t p) { return BigInt::pow(BigInt(p), 6); }));
    REQUIRE(report.verdict == FitReport::Verdict::polynomial);
    CHECK(report.held_out_points == 0);
    CHECK(report.fitted_points == 6);
    for (uint64_t p : six_primes)
        CHECK(fitfind::eval_polynomial(report.coefficients, p) ==
              BigRational(BigInt::pow(BigInt(p), 6)));
}

TEST_CASE("undetermined when even the saturated degree is out of reach") {
    const auto report = fitfind::classify(
        sample(six_primes, [](uint64_t p) { return BigInt::pow(BigInt(p), 6); }), 3, 10);
    CHECK(report.verdict == FitReport::Verdict::undetermined);
}

TEST_CASE("probe evaluates censuses across primes") {
    // single-pair subset census for (2,2,2), pair (3,3)
    const auto report = fitfind::probe_polynomiality(
        [&](uint64_t p) {
            return census::count_g_alpha(core::Composition({2, 2, 2}), p,
                                         census::PairSubset::of({{3, 3}}));
        },
        six_primes);
    CHECK(report.verdict == FitReport::Verdict::polynomial);

    // g_4(p^3) = 1 identically
    const auto ones = fitfind::probe_polynomiality(
        [&](uint64_t p) { return census::count_g_n(4, 3, p); }, six_primes);
    REQUIRE(ones.verdict == FitReport::Verdict::polynomial);
    CHECK(ones.coefficients == fitfind::Polynomial{BigRational(1)});
}

TEST_CASE("probe preserves partial results when the budget trips") {
    try {
        fitfind::probe_polynomiality(
            [&](uint64_t p) {
                return census::count_g_alpha(core::Composition({4, 4, 1}), p,
                                             census::PairSubset::all(), {},
                                             census::Options{.budget = 1'000'000});
            },
            six_primes);
        FAIL("expected ProbeBudgetExceeded");
    } catch (const fitfind::ProbeBudgetExceeded& err) {
        CHECK(err.partial.size() == 2);  // 2 and 3 fit the budget, 5 does not
        CHECK(err.partial[0].prime == 2);
        CHECK(err.partial[1].prime == 3);
    }
}

TEST_CASE("classify input validation") {
    CHECK_THROWS_AS(fitfind::classify({{2, BigInt(1)}, {3, BigInt(1)}}), std::invalid_argument);
    CHECK_THROWS_AS(fitfind::classify({{2, BigInt(1)}, {2, BigInt(1)}, {3, BigInt(1)}, {5, BigInt(1)}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        fitfind::classify({{4, BigInt(1)}, {3, BigInt(1)}, {5, BigInt(1)}, {7, BigInt(1)}}),
        std::invalid_argument);
}
