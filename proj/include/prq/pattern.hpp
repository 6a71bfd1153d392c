#pragma once

// Formal patterns: expression trees over variable indices with instantiation
// semantics, the sum-product pattern for any n, the catalog patterns, and
// monochromaticity checking. Reciprocals (1/d in the conj-6.x patterns) use
// the inverted-variable convention: the pattern marks d invertible and a term
// may reference inv(d); instantiation substitutes the exact reciprocal.

#include "prq/coloring.hpp"
#include "prq/rational.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <string>
#include <vector>

namespace prq {

class Term {
public:
    enum class Kind { Sum, Product, Var, InvVar, Const, Pow };

    static Term var(int index);
    static Term inv_var(int index);
    static Term constant(Rational value);
    static Term pow(int index, int exponent);  // exponent >= 1
    static Term sum(std::vector<std::pair<Rational, Term>> children);
    static Term product(std::vector<Term> children);

    Kind kind() const { return kind_; }
    int var_index() const { return var_; }
    int exponent() const { return exp_; }
    const Rational& const_value() const { return const_; }
    const std::vector<std::pair<Rational, Term>>& sum_children() const { return sum_; }
    const std::vector<Term>& product_children() const { return prod_; }

    Rational eval(std::span<const Rational> assignment) const;

    // Canonical form: sums/products flattened and sorted, singletons
    // collapsed, unit coefficients and exponents dropped. Dedup key.
    Term normalized() const;
    std::string key() const;  // canonical string of the normalized term

    std::string str(std::span<const std::string> var_names) const;

    bool integer_valued() const;   // integer coefficients, no reciprocals
    bool monotone_nonneg() const;  // nondecreasing in each variable on positive inputs
    int max_var() const;

private:
    Term() = default;
    Kind kind_ = Kind::Const;
    int var_ = -1;
    int exp_ = 1;
    Rational const_;
    std::vector<std::pair<Rational, Term>> sum_;
    std::vector<Term> prod_;
};

struct Pattern {
    std::string name;
    int arity = 0;
    std::vector<Term> terms;
    std::vector<std::string> var_names;
    bool require_nonzero = true;
    bool require_distinct = false;
    std::vector<bool> invertible;  // per variable; sized arity when any term uses inv()

    std::string term_str(size_t i) const { return terms[i].str(var_names); }
    bool integer_valued() const;
    bool monotone_nonneg() const;
};

// All subset sums and subset products over nonempty S of [n], deduplicated
// (singletons coincide): 2^(n+1) - 2 - n terms. Variables constrained nonzero.
Pattern sum_product_pattern(int n);

// Named patterns: schur, moreira, dx-d2, bowen-sabok-ext, conj-6.2, conj-6.3,
// three-multiples, and the families folkman-<n>, prod-folkman-<n>,
// sum-product-<n>, vdw-<L>.
std::optional<Pattern> catalog_pattern(const std::string& name);
std::vector<std::string> pattern_catalog_names();

// One value per term, in term order. Throws std::invalid_argument when the
// assignment violates the pattern's constraints.
std::vector<Rational> instantiate(const Pattern& p, std::span<const Rational> assignment);

struct MonoResult {
    bool monochromatic = false;
    ColorId color = -1;
    size_t mismatch_term = 0;  // first term whose color differs, when not monochromatic
};

// Common color iff all term values share it; domain errors propagate.
MonoResult is_monochromatic(const Coloring& c, const Pattern& p,
                            std::span<const Rational> assignment);

// Enumerates assignments over [1..N]^arity honoring the pattern's constraint
// flags, and reports instantiations whose term values are all integers in
// [1..N]. Shared by the SAT encoder and the brute-force extremal engine so
// their semantics match exactly. Values are passed sorted and deduplicated.
void for_each_inrange_instantiation(const Pattern& p, long N,
                                    const std::function<void(const std::vector<long>&)>& fn);

struct Witness {
    std::string pattern;
    nlohmann::json coloring;  // descriptor
    std::vector<Rational> assignment;
    ColorId color = -1;
    std::string engine;
    std::uint64_t examined = 0;
    std::uint64_t skipped = 0;
};

nlohmann::json witness_to_json(const Witness& w);
Witness witness_from_json(const nlohmann::json& j);

struct VerifyOutcome {
    bool ok = false;
    std::string detail;
};

// Independent re-verification: rebuild the coloring from its descriptor,
// rebuild the pattern by name, re-instantiate, compare colors.
VerifyOutcome verify_witness(const Witness& w);

}  // namespace prq
