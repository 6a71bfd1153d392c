#pragma once

// Finite witness searchers and extremal-number computations: first-witness
// pattern search over bounded domains, Schur / van der Waerden / polynomial
// vdW numbers with dual brute/SAT engines and re-verified certificates,
// Folkman configurations, Ramsey degree extraction, and bounded
// multidimensional polynomial vdW search on grids.
//
// Every searcher enumerates candidates in canonical order and returns the
// first verified witness; Exhausted is a normal outcome that reports the
// explored space and which cap fired.

#include "prq/coloring.hpp"
#include "prq/pattern.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace prq {

struct SearchBudget {
    // Enumeration domain: one integer range for all variables, per-variable
    // integer ranges, or a rational size bound (enumeration mode follows the
    // coloring domain: positive-only on Q+, full-nonzero on Q*).
    std::optional<std::pair<long, long>> int_range;
    std::optional<std::vector<std::pair<long, long>>> var_int_ranges;
    std::optional<long> size_bound;
    // Assignments whose term values exceed this size are skipped, not failed.
    std::optional<long> value_cap;
    std::uint64_t node_cap = 100'000'000ULL;
    std::optional<double> wall_seconds;

    nlohmann::json to_json() const;
    static SearchBudget from_json(const nlohmann::json& j);
    std::string describe() const;
};

struct Exhausted {
    std::uint64_t examined = 0;
    std::uint64_t skipped = 0;
    std::string stopped_by;  // "domain-exhausted" | "node-cap" | "wall-clock"
    std::string space;
};

using SearchOutcome = std::variant<Witness, Exhausted>;

// First monochromatic assignment in canonical order, verified before return.
SearchOutcome pattern_search(const Coloring& c, const Pattern& p, const SearchBudget& budget);

// Integer-coefficient univariate polynomial with zero constant term,
// coefficients in ascending degree order.
struct IntPoly {
    std::vector<long> coeffs;  // coeffs[0] must be 0

    explicit IntPoly(std::vector<long> c) : coeffs(std::move(c)) {
        if (coeffs.empty() || coeffs[0] != 0)
            throw std::invalid_argument("polynomial must have zero constant term");
    }
    mpz_class eval(const mpz_class& n) const {
        mpz_class acc = 0;
        for (size_t i = coeffs.size(); i-- > 0;) acc = acc * n + coeffs[i];
        return acc;
    }
    bool is_constant_zero() const {
        return std::all_of(coeffs.begin(), coeffs.end(), [](long c) { return c == 0; });
    }
    std::string str(const std::string& var = "d") const;
    static std::optional<IntPoly> parse(const std::string& s);  // e.g. "d^2", "d^3+2d"
};

enum class Engine { Brute, Sat, Both };

const char* engine_name(Engine e);
std::optional<Engine> engine_from_name(const std::string& s);

struct ExtremalBudget {
    long max_n = 200;                       // largest [1..N] attempted
    std::uint64_t node_cap = 4'000'000'000ULL;  // brute-force DFS nodes
    double solver_timeout_s = 120;
};

// Dual certificates: a concrete avoiding coloring of [1..value] plus an
// exhaustion token for [1..value+1]; both re-verified before return.
struct ExtremalResult {
    long value = 0;
    std::string pattern;
    int colors = 0;
    std::string engine;
    nlohmann::json avoiding;    // table coloring descriptor on [1..value]
    nlohmann::json exhaustion;  // {"N": value+1, "engine": ..., ...}
};

struct ExtremalPartial {
    long last_avoidable = -1;  // largest N shown avoidable before the budget fired
    std::string reason;
};

using ExtremalOutcome = std::variant<ExtremalResult, ExtremalPartial>;

// Largest N such that some k-coloring of [1..N] avoids a monochromatic
// {x, y, x+y} (x = y allowed; strict mode requires distinct variables).
ExtremalOutcome schur_number(int k, Engine engine, const ExtremalBudget& budget,
                             const std::string& solver_cmd = "", bool strict = false);

// Least N forcing a monochromatic L-term AP with difference >= 1.
ExtremalOutcome vdw_number(int k, int L, Engine engine, const ExtremalBudget& budget,
                           const std::string& solver_cmd = "");

// Least N forcing monochromatic {x, x + p(d)} with d >= 1.
ExtremalOutcome pvdw_min_n(int k, const IntPoly& p, Engine engine, const ExtremalBudget& budget,
                           const std::string& solver_cmd = "");

// Building block shared with the tests: does some k-coloring of [1..N] avoid
// a monochromatic instance of p? Fills *out with the first one found (DFS
// order with color-symmetry canonicalization) when non-null.
bool avoiding_coloring_exists(const Pattern& p, int k, long N, std::uint64_t node_cap,
                              std::vector<ColorId>* out, std::uint64_t* nodes_used = nullptr);

// Pattern behind an extremal certificate: catalog names plus the synthetic
// "pvdw-<poly>" family ({x, x + p(d)}).
std::optional<Pattern> extremal_pattern_from_name(const std::string& name);

// All 2^n - 1 subset sums of (x_1, ..., x_n) share one color; DFS with
// monochromaticity pruning, canonical first witness. Repeats allowed unless
// distinct is set.
SearchOutcome folkman_search(const Coloring& c, int n, const SearchBudget& budget,
                             bool distinct = false);

// Indices (ascending, first in lexicographic order) of `target` elements of
// xs such that the color of any product of k <= N distinct selected elements
// depends only on k.
std::variant<std::vector<int>, Exhausted> ramsey_degree_extract(const Coloring& c,
                                                                const std::vector<Rational>& xs,
                                                                int N, int target);

// Coloring of Q^ell used by the grid searches; nullopt marks out-of-domain.
struct GridColoring {
    int ell = 1;
    std::function<std::optional<ColorId>(const std::vector<Rational>&)> eval;
};

GridColoring grid_from_scalar(const Coloring& c);
// q -> c(offset + sum_i q_i * weights[i])
GridColoring grid_affine(const Coloring& c, const Rational& offset,
                         std::vector<Rational> weights);

struct MpvdwInstance {
    int ell = 1;
    std::vector<IntPoly> polys;                // p_i(0) = 0, one per direction
    std::vector<std::vector<Rational>> vectors;  // v_i in Q^ell
    long M = 1;          // coefficient size bound for the c_i
    bool nonneg = false; // restrict c_i to nonnegative (Q+ setting)
    long n_max = 50;     // n ranges over 1..n_max (negative n off by default)
    bool allow_negative_n = false;
    long u_radius = 5;   // u over the integer box [-u_radius..u_radius]^ell

    void validate() const;
    // Coefficient tuples (c_1..c_k) with s(c_i) <= M, canonical order.
    std::vector<Rational> coefficient_range() const;
};

struct MpvdwWitness {
    std::vector<long> u;
    long n = 0;
    ColorId color = 0;
    // The verified configuration: every u + sum_i c_i p_i(n) v_i.
    std::vector<std::vector<Rational>> points;
};

std::variant<MpvdwWitness, Exhausted> mpvdw_search(const GridColoring& grid,
                                                   const MpvdwInstance& inst,
                                                   std::uint64_t node_cap = 100'000'000ULL);

// Integer box enumeration order used for u-grids: per coordinate
// 0, 1, -1, 2, -2, ..., lexicographic across coordinates (origin first).
std::vector<long> box_coordinate_order(long radius);

}  // namespace prq
