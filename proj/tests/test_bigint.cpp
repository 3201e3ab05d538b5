#include <doctest.h>

#include <random>
#include <string>

#include "subring/bigint.hpp"
#include "subring/rational.hpp"

using subring::BigInt;
using subring::BigRational;

namespace {

std::mt19937_64 rng(0x5eed5eedULL);

long long random_i64(long long lo, long long hi) {
    return std::uniform_int_distribution<long long>(lo, hi)(rng);
}

}  // namespace

TEST_CASE("bigint small arithmetic agrees with native int128") {
    for (int trial = 0; trial < 5000; ++trial) {
        const long long a = random_i64(-1'000'000'000'000LL, 1'000'000'000'000LL);
        const long long b = random_i64(-1'000'000'000'000LL, 1'000'000'000'000LL);
        const BigInt A(a), B(b);
        CHECK((A + B).to_i64() == a + b);
        CHECK((A - B).to_i64() == a - b);
        const __int128 prod = static_cast<__int128>(a) * b;
        CHECK((A * B).str() == [&] {
            if (prod == 0) return std::string("0");
            __int128 m = prod < 0 ? -prod : prod;
            std::string digits;
            while (m) {
                digits += static_cast<char>('0' + static_cast<int>(m % 10));
                m /= 10;
            }
            if (prod < 0) digits += '-';
            return std::string(digits.rbegin(), digits.rend());
        }());
        if (b != 0) {
            BigInt q, r;
            BigInt::divmod(A, B, q, r);
            CHECK(q.to_i64() == a / b);
            CHECK(r.to_i64() == a % b);
        }
    }
}

TEST_CASE("bigint divmod identity on wide operands") {
    for (int trial = 0; trial < 2000; ++trial) {
        BigInt a(1), b(1);
        const int alimbs = static_cast<int>(random_i64(1, 6));
        const int blimbs = static_cast<int>(random_i64(1, 4));
        for (int i = 0; i < alimbs; ++i) a = a * BigInt(random_i64(1, 1LL << 62)) + BigInt(random_i64(0, 1000));
        for (int i = 0; i < blimbs; ++i) b = b * BigInt(random_i64(1, 1LL << 62)) + BigInt(random_i64(0, 1000));
        if (random_i64(0, 1)) a = -a;
        if (random_i64(0, 1)) b = -b;
        if (b.is_zero()) continue;
        BigInt q, r;
        BigInt::divmod(a, b, q, r);
        CHECK(q * b + r == a);
        CHECK(r.abs() < b.abs());
        if (!r.is_zero()) CHECK(r.sign() == a.sign());
    }
}

TEST_CASE("bigint decimal round trip and powers") {
    CHECK(BigInt::pow(BigInt(2), 100).str() == "1267650600228229401496703205376");
    CHECK(BigInt::from_string("1267650600228229401496703205376") == BigInt::pow(BigInt(2), 100));
    CHECK(BigInt::from_string("-42").to_i64() == -42);
    CHECK(BigInt(0).str() == "0");
    BigInt factorial(1);
    for (int i = 2; i <= 30; ++i) factorial *= BigInt(i);
    CHECK(factorial.str() == "265252859812191058636308480000000");
    CHECK(factorial.div_exact(BigInt(30)) * BigInt(30) == factorial);
    CHECK_THROWS_AS(BigInt(10).div_exact(BigInt(3)), subring::DivisibilityError);
    CHECK_THROWS_AS(BigInt::from_string("12a"), std::invalid_argument);
}

TEST_CASE("bigint gcd and comparisons") {
    CHECK(BigInt::gcd(BigInt(48), BigInt(-18)) == BigInt(6));
    CHECK(BigInt::gcd(BigInt(0), BigInt(7)) == BigInt(7));
    CHECK(BigInt(-5) < BigInt(3));
    CHECK(BigInt(3) < BigInt(5));
    CHECK(BigInt(-7) < BigInt(-3));
    const BigInt big = BigInt::pow(BigInt(10), 30);
    CHECK(BigInt(999) < big);
    CHECK(big.fits_u64() == false);
}

TEST_CASE("rational arithmetic stays reduced") {
    const BigRational half(BigInt(1), BigInt(2));
    const BigRational third(BigInt(1), BigInt(3));
    CHECK((half + third).str() == "5/6");
    CHECK((half * third).str() == "1/6");
    CHECK((half - half).str() == "0");
    CHECK((half / third).str() == "3/2");
    CHECK(BigRational(BigInt(-4), BigInt(-8)) == half);
    CHECK(BigRational(BigInt(4), BigInt(-8)).str() == "-1/2");
    CHECK_THROWS_AS(BigRational(BigInt(1), BigInt(0)), std::domain_error);
    CHECK_THROWS_AS(half / BigRational(0), std::domain_error);
}
