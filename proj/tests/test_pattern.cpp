#include "prq/pattern.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <set>

using namespace prq;

namespace {

std::vector<std::string> strs(const std::vector<Rational>& v) {
    std::vector<std::string> out;
    for (const auto& q : v) out.push_back(q.str());
    return out;
}

// Brute-force term-set oracle: distinct values of subset sums and products at
// a "generic" assignment separate exactly the syntactically distinct terms.
size_t sum_product_term_count_oracle(int n) {
    // 2^(n+1) - 2 - n: sums (2^n - 1) + products (2^n - 1) - shared singletons (n)
    return (1u << (n + 1)) - 2 - static_cast<size_t>(n);
}

}  // namespace

TEST_CASE("sum-product pattern term lists") {
    Pattern p2 = sum_product_pattern(2);
    REQUIRE(p2.terms.size() == 4);
    std::vector<Rational> a{Rational(2), Rational(3)};
    CHECK(strs(instantiate(p2, a)) == std::vector<std::string>{"2", "3", "5", "6"});

    Pattern p1 = sum_product_pattern(1);
    CHECK(p1.terms.size() == 1);  // {x}: singleton sum and product coincide

    Pattern p3 = sum_product_pattern(3);
    CHECK(p3.terms.size() == 11);  // 7 sums + 7 products - 3 shared singletons

    for (int n = 1; n <= 10; ++n) {
        Pattern p = sum_product_pattern(n);
        CHECK(p.terms.size() == sum_product_term_count_oracle(n));
        // dedup really is syntactic: all normalized keys distinct
        std::set<std::string> keys;
        for (const auto& t : p.terms) CHECK(keys.insert(t.key()).second);
    }
}

TEST_CASE("catalog patterns") {
    auto moreira = catalog_pattern("moreira");
    REQUIRE(moreira);
    CHECK(moreira->arity == 2);
    CHECK(moreira->terms.size() == 3);

    auto schur = catalog_pattern("schur");
    REQUIRE(schur);
    CHECK(schur->arity == 2);
    CHECK(schur->terms.size() == 3);
    std::vector<Rational> a{Rational(2), Rational(4)};
    CHECK(strs(instantiate(*schur, a)) == std::vector<std::string>{"2", "4", "6"});

    auto dx = catalog_pattern("dx-d2");
    REQUIRE(dx);
    CHECK(dx->arity == 2);
    CHECK(dx->terms.size() == 2);
    std::vector<Rational> dxa{Rational(3), Rational(5)};  // D = 3, X = 5
    CHECK(strs(instantiate(*dx, dxa)) == std::vector<std::string>{"15", "24"});

    auto bse = catalog_pattern("bowen-sabok-ext");
    REQUIRE(bse);
    CHECK(bse->terms.size() == 5);

    auto c63 = catalog_pattern("conj-6.3");
    REQUIRE(c63);
    std::vector<Rational> xd{Rational(1), Rational(2)};
    CHECK(strs(instantiate(*c63, xd)) == std::vector<std::string>{"1", "3", "3/2"});

    auto c62 = catalog_pattern("conj-6.2");
    REQUIRE(c62);
    CHECK(c62->terms.size() == 4);
    CHECK(strs(instantiate(*c62, xd)) == std::vector<std::string>{"1", "3", "3/2", "7/2"});

    auto tm = catalog_pattern("three-multiples");
    REQUIRE(tm);
    std::vector<Rational> bc{Rational(1), Rational(1)};
    CHECK(strs(instantiate(*tm, bc)) == std::vector<std::string>{"1", "2", "3"});

    auto folk = catalog_pattern("folkman-3");
    REQUIRE(folk);
    CHECK(folk->terms.size() == 7);
    auto pfolk = catalog_pattern("prod-folkman-3");
    REQUIRE(pfolk);
    CHECK(pfolk->terms.size() == 7);

    auto vdw3 = catalog_pattern("vdw-3");
    REQUIRE(vdw3);
    std::vector<Rational> ap{Rational(5), Rational(2)};
    CHECK(strs(instantiate(*vdw3, ap)) == std::vector<std::string>{"5", "7", "9"});

    CHECK(!catalog_pattern("no-such-pattern"));
    CHECK(!catalog_pattern("folkman-0"));
}

TEST_CASE("constraint violations are rejected") {
    Pattern p = sum_product_pattern(2);
    std::vector<Rational> zero{Rational(0), Rational(1)};
    CHECK_THROWS_AS(instantiate(p, zero), std::invalid_argument);
    std::vector<Rational> wrong_len{Rational(1)};
    CHECK_THROWS_AS(instantiate(p, wrong_len), std::invalid_argument);

    Pattern strict = p;
    strict.require_distinct = true;
    std::vector<Rational> same{Rational(2), Rational(2)};
    CHECK_THROWS_AS(instantiate(strict, same), std::invalid_argument);
    CHECK_NOTHROW(instantiate(p, same));

    auto c63 = catalog_pattern("conj-6.3");
    std::vector<Rational> dzero{Rational(1), Rational(0)};
    CHECK_THROWS_AS(instantiate(*c63, dzero), std::invalid_argument);
}

TEST_CASE("monochromaticity checks") {
    Coloring constant = Coloring::constant(3, Domain::PositiveRationals);
    Pattern p2 = sum_product_pattern(2);
    std::vector<Rational> a{Rational(5, 2), Rational(1, 3)};
    MonoResult r = is_monochromatic(constant, p2, a);
    CHECK(r.monochromatic);
    CHECK(r.color == 3);

    // three-multiples at (1, 1) on the 3-adic coloring: 1 red, 2 blue, 3 red
    Coloring padic = Coloring::padic_sec6();
    auto tm = catalog_pattern("three-multiples");
    std::vector<Rational> bc{Rational(1), Rational(1)};
    MonoResult r2 = is_monochromatic(padic, *tm, bc);
    CHECK(!r2.monochromatic);
    CHECK(r2.mismatch_term == 1);  // b*c + c = 2 is the first color break

    Coloring parity = Coloring::mod_residue(2, Coloring::ModComponent::Value, Domain::Naturals);
    auto schur = catalog_pattern("schur");
    std::vector<Rational> even{Rational(2), Rational(4)};
    MonoResult r3 = is_monochromatic(parity, *schur, even);
    CHECK(r3.monochromatic);
    CHECK(r3.color == 0);
}

TEST_CASE("integer-valuedness and monotonicity flags") {
    CHECK(catalog_pattern("schur")->integer_valued());
    CHECK(catalog_pattern("dx-d2")->integer_valued());
    CHECK(catalog_pattern("bowen-sabok-ext")->integer_valued());
    CHECK(!catalog_pattern("conj-6.2")->integer_valued());
    CHECK(!catalog_pattern("conj-6.3")->integer_valued());
    CHECK(catalog_pattern("three-multiples")->monotone_nonneg());
    CHECK(sum_product_pattern(3).monotone_nonneg());
    CHECK(!catalog_pattern("conj-6.3")->monotone_nonneg());
}

TEST_CASE("in-range instantiation enumeration") {
    // schur over [1..4]: (x,y) with x+y <= 4
    std::set<std::vector<long>> sets;
    for_each_inrange_instantiation(*catalog_pattern("schur"), 4, [&](const std::vector<long>& v) {
        sets.insert(v);
    });
    std::set<std::vector<long>> expect{{1, 2},      // x=y=1
                                       {1, 2, 3},   // (1,2) and (2,1)
                                       {1, 3, 4},   // (1,3), (3,1)
                                       {2, 4}};     // x=y=2
    CHECK(sets == expect);
}

TEST_CASE("witness JSON round trip and verification") {
    Coloring parity = Coloring::mod_residue(2, Coloring::ModComponent::Value, Domain::Naturals);
    Witness w;
    w.pattern = "schur";
    w.coloring = parity.descriptor();
    w.assignment = {Rational(2), Rational(4)};
    w.color = 0;
    w.engine = "test";
    w.examined = 10;

    auto j = witness_to_json(w);
    CHECK(j["verified"] == true);
    CHECK(j["assignment"] == nlohmann::json({"2", "4"}));
    Witness back = witness_from_json(j);
    CHECK(back.pattern == w.pattern);
    CHECK(back.assignment == w.assignment);

    CHECK(verify_witness(w).ok);

    Witness tampered = w;
    tampered.assignment[1] = Rational(3);  // 2, 3, 5: parity breaks
    auto bad = verify_witness(tampered);
    CHECK(!bad.ok);
    CHECK(!bad.detail.empty());

    Witness wrong_color = w;
    wrong_color.color = 1;
    CHECK(!verify_witness(wrong_color).ok);
}
