#pragma once

// CNF encodings of pattern-avoidance colorings, DIMACS export, the external
// SAT-solver client, and decoded-model verification. The solver is an
// external executable (configured command) that reads a DIMACS file argument
// and prints SAT-competition style output ("s SATISFIABLE" / "v ..." lines);
// no solver is implemented here.
//
// Variable numbering is fixed: number n with color c (1-based) gets variable
// (n-1)*k + c, so DIMACS output is byte-identical across runs.

#include "prq/coloring.hpp"
#include "prq/pattern.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace prq {

struct CnfInstance {
    int num_vars = 0;
    std::vector<std::vector<int>> clauses;
    long N = 0;
    int k = 0;
    std::string pattern_name;

    // color is 0-based here; the DIMACS id is (n-1)*k + color + 1.
    int var(long n, ColorId color) const {
        return static_cast<int>((n - 1) * k + color + 1);
    }
};

// Satisfiable iff some k-coloring of [1..N] has no monochromatic in-range
// instance of p. Exactly-one clauses per number, one avoidance clause per
// (instantiation, color). Instantiations whose term values leave [1..N] are
// skipped. Throws std::invalid_argument for patterns that are not
// integer-valued on integer assignments.
CnfInstance encode_avoidance(long N, int k, const Pattern& p, bool break_symmetry = false);

std::string write_dimacs(const CnfInstance& inst);
void write_dimacs_file(const CnfInstance& inst, const std::string& path);

// Parse-back of DIMACS text (round-trip checks, reading stored instances).
CnfInstance parse_dimacs(const std::string& text);

struct SolveResult {
    enum class Kind { Sat, Unsat, Unknown } kind = Kind::Unknown;
    // model[v] for v in [1..num_vars]: +1 true, -1 false, 0 unassigned.
    std::vector<int> model;
    std::string diagnostics;
};

class protocol_error : public std::runtime_error {
public:
    explicit protocol_error(const std::string& what) : std::runtime_error(what) {}
};

// Runs `solver_cmd <dimacs-file>` and parses its output. Timeouts and killed
// solvers yield Unknown with diagnostics; malformed output that claims a
// result is a protocol_error, never a silent failure.
SolveResult solve_external(const CnfInstance& inst, const std::string& solver_cmd,
                           double timeout_s = 60.0);

// Model checked against every clause first; a violated clause or a number
// with zero/two colors refuses the decode. Result is a table coloring on
// [1..N] consistent with the model.
Coloring decode_coloring(const CnfInstance& inst, const std::vector<int>& model);

// Default solver command: PRQ_SAT_SOLVER env var, else empty (unconfigured).
std::string default_solver_command();

// Process runner shared with the tests: returns exit info and captured stdout.
struct ProcessResult {
    int exit_code = -1;
    bool timed_out = false;
    bool signaled = false;
    std::string output;
};
ProcessResult run_process(const std::string& command, double timeout_s);

}  // namespace prq
