#include "prq/good_poly.hpp"
#include "prq/rational.hpp"

#include <doctest.h>

#include <numeric>
#include <random>
#include <set>

using namespace prq;

namespace {

// Independent totient sieve (test-side oracle).
std::vector<long> totients_up_to(long n) {
    std::vector<long> phi(static_cast<size_t>(n) + 1);
    std::iota(phi.begin(), phi.end(), 0L);
    for (long i = 2; i <= n; ++i) {
        if (phi[static_cast<size_t>(i)] == i) {  // i prime
            for (long j = i; j <= n; j += i)
                phi[static_cast<size_t>(j)] -= phi[static_cast<size_t>(j)] / i;
        }
    }
    return phi;
}

Rational rand_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> num(-200, 200);
    std::uniform_int_distribution<long> den(1, 200);
    long n = num(rng);
    if (n == 0) n = 7;
    return Rational(n, den(rng));
}

}  // namespace

TEST_CASE("reduce canonical forms") {
    CHECK(Rational(4, 6) == Rational(2, 3));
    CHECK(Rational(4, 6).numerator() == 2);
    CHECK(Rational(4, 6).denominator() == 3);
    CHECK(Rational(0, 5).numerator() == 0);
    CHECK(Rational(0, 5).denominator() == 1);
    CHECK(Rational(3, -9) == Rational(-1, 3));
    CHECK(Rational(3, -9).denominator() == 3);
    CHECK_THROWS_AS(Rational(1, 0), domain_error);
}

TEST_CASE("size function") {
    CHECK(Rational(2, 3).size() == 3);
    CHECK(Rational(-5, 2).size() == 5);
    CHECK(Rational(0).size() == 1);  // 0 = 0/1 convention
    CHECK(Rational(7).size() == 7);
}

TEST_CASE("serialization a/b with unit denominator omitted") {
    CHECK(Rational(2, 3).str() == "2/3");
    CHECK(Rational(5).str() == "5");
    CHECK(Rational(-1, 2).str() == "-1/2");
    CHECK(Rational(0).str() == "0");
    CHECK(Rational::parse("2/3") == Rational(2, 3));
    CHECK(Rational::parse("-7") == Rational(-7));
    CHECK(!Rational::parse("1/0"));
    CHECK(!Rational::parse("x"));
}

TEST_CASE("enumeration small cases") {
    auto one = enumerate_rationals(1, EnumMode::PositiveOnly);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == Rational(1));

    auto s3 = enumerate_rationals(3, EnumMode::PositiveOnly);
    std::set<std::string> got;
    for (const auto& q : s3) got.insert(q.str());
    CHECK(got == std::set<std::string>{"1", "2", "3", "1/2", "1/3", "2/3", "3/2"});
    CHECK(s3.size() == 7);

    auto with_zero = enumerate_rationals(1, EnumMode::WithZero);
    REQUIRE(with_zero.size() == 3);
    CHECK(with_zero[0] == Rational(-1));
    CHECK(with_zero[1] == Rational(0));
    CHECK(with_zero[2] == Rational(1));
}

TEST_CASE("enumeration order is canonical and duplicate-free") {
    auto xs = enumerate_rationals(20, EnumMode::FullNonzero);
    std::set<std::string> seen;
    for (size_t i = 0; i < xs.size(); ++i) {
        CHECK(seen.insert(xs[i].str()).second);
        if (i > 0) CHECK(canonical_less(xs[i - 1], xs[i]));
    }
}

TEST_CASE("enumeration count identity vs totient sieve") {
    const long S = 300;  // the acceptance suite runs the full S <= 1000 identity
    auto phi = totients_up_to(S);
    long phisum = 0;
    auto xs = enumerate_rationals(S, EnumMode::PositiveOnly);
    size_t idx = 0;
    for (long s = 1; s <= S; ++s) {
        phisum += phi[static_cast<size_t>(s)];
        while (idx < xs.size() && xs[idx].size() <= s) ++idx;
        CHECK(static_cast<long>(idx) == 2 * phisum - 1);
    }
}

TEST_CASE("round trip reduce(numerator, denominator)") {
    for (const auto& q : enumerate_rationals(15, EnumMode::WithZero))
        CHECK(reduce(q.numerator(), q.denominator()) == q);
}

TEST_CASE("size is submultiplicative on random pairs") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100000; ++i) {
        Rational p = rand_rational(rng), q = rand_rational(rng);
        CHECK((p * q).size() <= p.size() * q.size());
    }
}

TEST_CASE("good polynomial basics") {
    CHECK_THROWS_AS(GoodPolynomial({Rational(0), Rational(1)}), std::invalid_argument);
    GoodPolynomial p({Rational(1), Rational(1), Rational(1), Rational(1)});
    // P(a; b, c, bc) = a + b + c + bc
    Rational a(5), b(2), c(3);
    std::vector<Rational> args{b, c, b * c};
    CHECK(p.eval(a, args) == Rational(5 + 2 + 3 + 6));
    CHECK(p.eval_leading(a) == a);

    GoodPolynomial lead({Rational(7, 2)});
    CHECK(lead.eval(Rational(4), {}) == Rational(14));
    CHECK(lead.size() == 7);

    GoodPolynomial mixed({Rational(2), Rational(-1, 2)});
    std::vector<Rational> one{Rational(4)};
    CHECK(mixed.eval(Rational(3), one) == Rational(4));  // 6 - 2
    CHECK_THROWS_AS(mixed.eval(Rational(3), {}), std::invalid_argument);
}

TEST_CASE("good polynomial enumeration") {
    auto full0 = enumerate_good_polys(1, 0, CoeffMode::Full);
    REQUIRE(full0.size() == 2);
    CHECK(full0[0].leading() == Rational(-1));
    CHECK(full0[1].leading() == Rational(1));

    auto pos0 = enumerate_good_polys(1, 0, CoeffMode::Positive);
    REQUIRE(pos0.size() == 1);
    CHECK(pos0[0].leading() == Rational(1));

    auto pos1 = enumerate_good_polys(1, 1, CoeffMode::Positive);
    REQUIRE(pos1.size() == 2);
    CHECK(pos1[0].coeff(1) == Rational(0));
    CHECK(pos1[1].coeff(1) == Rational(1));

    for (const auto& p : enumerate_good_polys(2, 2, CoeffMode::Full)) {
        CHECK(!p.leading().is_zero());
        CHECK(p.size() >= 1);
        CHECK(p.size() <= 2);
    }
    // |c0 options| * |coeff options|^2 = 6 * 7^2
    CHECK(enumerate_good_polys(2, 2, CoeffMode::Full).size() == 6 * 49);
}

TEST_CASE("good polynomial evaluation is linear in the coefficients") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> coef(-5, 5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Rational> c1{Rational(coef(rng) * 2 + 1)}, c2{Rational(coef(rng) * 2 + 1)};
        std::vector<Rational> csum{c1[0] + c2[0]};
        for (int i = 0; i < 3; ++i) {
            c1.push_back(Rational(coef(rng)));
            c2.push_back(Rational(coef(rng)));
            csum.push_back(c1.back() + c2.back());
        }
        if (csum[0].is_zero()) continue;
        GoodPolynomial p1(c1), p2(c2), ps(csum);
        Rational x0 = rand_rational(rng);
        std::vector<Rational> args{rand_rational(rng), rand_rational(rng), rand_rational(rng)};
        CHECK(p1.eval(x0, args) + p2.eval(x0, args) == ps.eval(x0, args));
    }
}
