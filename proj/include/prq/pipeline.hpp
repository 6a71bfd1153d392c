#pragma once

// Constructive proof execution as verified step sequences: the n = 3 lemma's
// condition checker, direct witness search, and full trace (product coloring,
// vdW pair step, two multidimensional polynomial vdW applications in Z^4 with
// the rescalings and shifts between them); the general-n condition checker;
// the {DX, DX+D^2} construction; and the final sum-product assembly step.
//
// Every trace step records its parameters and re-verifies its claim both at
// the auxiliary (product-coloring) level and under the base coloring; a
// failing verification aborts the trace with the step named.

#include "prq/coloring.hpp"
#include "prq/good_poly.hpp"
#include "prq/pattern.hpp"
#include "prq/search.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace prq {

struct CondFailure {
    int condition = 0;  // 1, 2 or 3 (prop31); encoded (i, T) index for prop_main
    std::string poly;   // the witnessing good polynomial
    std::string detail;
};

struct CondCheckResult {
    bool pass = false;
    std::optional<CondFailure> failure;
    std::uint64_t checked = 0;
};

// Conditions of the n = 3 lemma at size bound M, for every good P with
// s(P) <= M (nonnegative coefficients when the domain is Q+):
//   (1) color(P(a; b, c, bc)) = color(P(a))
//   (2) color(P(ac; b))       = color(P(ac))
//   (3) color(P(b; c))        = color(P(b))
// Strengthened mode checks the stronger shifted list instead:
//   (1') P(a; b/c, b, c, bc)   (2') P(ac; b, bc, c^2, bc^2)   (3) unchanged.
CondCheckResult prop31_conditions_check(const Coloring& c, const Rational& a, const Rational& b,
                                        const Rational& c_val, long M, bool strengthened);

// General-n checker: for each i in [n], T subseteq [i-1], and good P with
// s(P) <= M over the admissible S-family (nonempty S subseteq [i-1] with
// min(S) > max(T), canonical bitmask order):
//   color(P(x_i prod_T x_j; [prod_S x_j]_S)) = color(P(x_i prod_T x_j)).
// xs is (x_1, ..., x_n).
CondCheckResult prop_main_conditions_check(const Coloring& c, const std::vector<Rational>& xs,
                                           long M);

struct Prop31Witness {
    Rational a, b, c;
    long M = 1;
    bool strengthened = false;
    nlohmann::json coloring;
    std::uint64_t examined = 0;
    nlohmann::json to_json() const;
};

// Canonical-order search for a triple passing the conditions check.
std::variant<Prop31Witness, Exhausted> prop31_search(const Coloring& c, long M,
                                                     const SearchBudget& budget,
                                                     bool strengthened = false);

struct TraceStep {
    std::string action;
    nlohmann::json params;
    nlohmann::json outputs;
    bool verified = false;
    std::string note;
};

struct Prop31Chain {
    long M0 = 1;   // product-coloring bound for the pair step
    long Mp = 1;   // product-coloring bound for both grid steps (the M' knob)
    long M1 = 1;   // condition (3) bound claimed after the pair step
    long M2 = 1;   // coefficient bound in the first grid application
    long M3 = 1;   // final bound M; the completed trace is checked at this M
};

struct Prop31TraceBudget {
    long pair_size_bound = 12;   // (b, c) search domain
    long u_radius = 2;
    long n_max = 8;
    std::uint64_t node_cap = 50'000'000ULL;
};

struct Prop31Trace {
    std::vector<TraceStep> steps;
    bool completed = false;
    std::string blocked_at;  // step action when not completed
    std::optional<std::array<Rational, 3>> result;  // (a, b, c)
    Prop31Chain chain;
    nlohmann::json coloring;
    nlohmann::json to_json() const;
};

// Executes the constructive move sequence for the n = 3 lemma and re-checks
// every intermediate claim; a completed trace always ends with
// prop31_conditions_check(strengthened, M3) passing on its (a, b, c).
Prop31Trace prop31_trace(const Coloring& c, const Prop31Chain& chain,
                         const Prop31TraceBudget& budget);

struct DxWitness {
    Rational D, X;
    Rational x, d;  // the N!-divisible seeds
    long k = 0, c = 0;
    int factorial_n = 0;
    ColorId color = 0;
    nlohmann::json coloring;
    std::vector<TraceStep> steps;
    nlohmann::json to_json() const;
};

struct DxBudget {
    long max_d_mult = 4;   // d over multiples of N!
    long max_x_mult = 4;   // x over multiples of N!
    long max_k = 200;
    long max_c = 0;        // 0: defaults to N (keeps X integral)
    std::uint64_t node_cap = 10'000'000ULL;
};

// §-style constructive witness for {DX, DX+D^2} on a coloring f of N:
// pick x, d divisible by N!, search g(k) = g(k + c^2) for g = f(dx + * d^2),
// set X = x/c + k d/c and D = c d, and verify f(DX) = f(DX + D^2).
std::variant<DxWitness, Exhausted> dx_witness_constructive(const Coloring& f, int factorial_n,
                                                           const DxBudget& budget);

struct Step4Failure {
    std::string detail;
    size_t violated_term = 0;
};

// X_i = x_{n-i} * prod_{j in S_i} x_j, then sum_product_pattern(r) checked at
// (X_1..X_r). Preconditions: |S_i| = degrees[i] - 1, S_i blockwise increasing,
// max(S_r) < n/2. Index sets are 1-based into xs.
std::variant<Witness, Step4Failure> assemble_step4(const Coloring& c,
                                                   const std::vector<Rational>& xs,
                                                   const std::vector<long>& degrees,
                                                   const std::vector<std::vector<int>>& sets);

}  // namespace prq
