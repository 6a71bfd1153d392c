#include "prq/search.hpp"

#include "prq/sat.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <sstream>

namespace prq {

using nlohmann::json;

json SearchBudget::to_json() const {
    json j = json::object();
    if (int_range) j["int_range"] = {int_range->first, int_range->second};
    if (var_int_ranges) {
        json r = json::array();
        for (auto [lo, hi] : *var_int_ranges) r.push_back({lo, hi});
        j["var_int_ranges"] = r;
    }
    if (size_bound) j["size_bound"] = *size_bound;
    if (value_cap) j["value_cap"] = *value_cap;
    j["node_cap"] = node_cap;
    if (wall_seconds) j["wall_seconds"] = *wall_seconds;
    return j;
}

SearchBudget SearchBudget::from_json(const json& j) {
    SearchBudget b;
    if (j.contains("int_range"))
        b.int_range = {j["int_range"][0].get<long>(), j["int_range"][1].get<long>()};
    if (j.contains("var_int_ranges")) {
        std::vector<std::pair<long, long>> rs;
        for (const auto& r : j["var_int_ranges"]) rs.emplace_back(r[0].get<long>(), r[1].get<long>());
        b.var_int_ranges = std::move(rs);
    }
    if (j.contains("size_bound")) b.size_bound = j["size_bound"].get<long>();
    if (j.contains("value_cap")) b.value_cap = j["value_cap"].get<long>();
    if (j.contains("node_cap")) b.node_cap = j["node_cap"].get<std::uint64_t>();
    if (j.contains("wall_seconds")) b.wall_seconds = j["wall_seconds"].get<double>();
    return b;
}

std::string SearchBudget::describe() const {
    std::ostringstream os;
    if (int_range) os << "integers [" << int_range->first << ".." << int_range->second << "]";
    if (var_int_ranges) {
        os << "per-variable integer ranges";
        for (auto [lo, hi] : *var_int_ranges) os << " [" << lo << ".." << hi << "]";
    }
    if (size_bound) os << "rationals of size <= " << *size_bound;
    if (value_cap) os << ", term values capped at " << *value_cap;
    os << ", node cap " << node_cap;
    return os.str();
}

namespace {

struct Clock {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

// Shared state for the assignment enumerations below.
struct SearchState {
    std::uint64_t examined = 0;
    std::uint64_t skipped = 0;
    std::string stopped_by = "domain-exhausted";
    Clock clock;
    const SearchBudget* budget = nullptr;

    bool out_of_budget() {
        if (examined >= budget->node_cap) {
            stopped_by = "node-cap";
            return true;
        }
        if (budget->wall_seconds && (examined & 0x3ff) == 0 &&
            clock.elapsed() > *budget->wall_seconds) {
            stopped_by = "wall-clock";
            return true;
        }
        return false;
    }
};

enum class StepOutcome { Found, Continue, CapExceeded, Stop };

}  // namespace

SearchOutcome pattern_search(const Coloring& c, const Pattern& p, const SearchBudget& budget) {
    SearchState st;
    st.budget = &budget;
    std::vector<Rational> assign(static_cast<size_t>(p.arity), Rational(0));
    std::optional<std::vector<Rational>> found;

    // Skip rule: any term value with size above the cap. Monotone patterns on
    // ascending integer domains additionally allow breaking the loop level.
    const bool monotone = p.monotone_nonneg();

    auto check_assignment = [&](bool* cap_exceeded) -> bool {
        ++st.examined;
        if (p.require_distinct) {
            for (size_t i = 0; i < assign.size(); ++i)
                for (size_t j = i + 1; j < assign.size(); ++j)
                    if (assign[i] == assign[j]) return false;
        }
        std::vector<Rational> values;
        values.reserve(p.terms.size());
        for (const auto& t : p.terms) values.push_back(t.eval(assign));
        if (budget.value_cap) {
            for (const auto& v : values) {
                if (!v.size_at_most(*budget.value_cap)) {
                    ++st.skipped;
                    if (cap_exceeded) *cap_exceeded = true;
                    return false;
                }
            }
        }
        ColorId common = -1;
        for (const auto& v : values) {
            auto col = c.try_color(v);
            if (!col) {
                ++st.skipped;
                return false;
            }
            if (common == -1) common = *col;
            else if (*col != common) return false;
        }
        found = std::vector<Rational>(assign.begin(), assign.end());
        return true;
    };

    StepOutcome outcome = StepOutcome::Continue;

    if (budget.int_range || budget.var_int_ranges) {
        std::vector<std::pair<long, long>> ranges;
        if (budget.var_int_ranges) {
            ranges = *budget.var_int_ranges;
            if (static_cast<int>(ranges.size()) != p.arity)
                throw std::invalid_argument("per-variable ranges must match pattern arity");
        } else {
            ranges.assign(static_cast<size_t>(p.arity), *budget.int_range);
        }
        bool positive_domain = true;
        for (auto [lo, hi] : ranges) positive_domain = positive_domain && lo >= 1;
        const bool can_break = monotone && positive_domain;

        std::function<StepOutcome(int)> rec = [&](int depth) -> StepOutcome {
            if (depth == p.arity) {
                if (st.out_of_budget()) return StepOutcome::Stop;
                bool cap = false;
                if (check_assignment(&cap)) return StepOutcome::Found;
                return cap ? StepOutcome::CapExceeded : StepOutcome::Continue;
            }
            auto [lo, hi] = ranges[static_cast<size_t>(depth)];
            for (long v = lo; v <= hi; ++v) {
                assign[static_cast<size_t>(depth)] = Rational(v);
                StepOutcome r = rec(depth + 1);
                if (r == StepOutcome::Found || r == StepOutcome::Stop) return r;
                if (r == StepOutcome::CapExceeded && can_break)
                    return v == lo ? StepOutcome::CapExceeded : StepOutcome::Continue;
            }
            return StepOutcome::Continue;
        };
        outcome = rec(0);
    } else if (budget.size_bound) {
        EnumMode mode = c.domain() == Domain::NonzeroRationals ? EnumMode::FullNonzero
                                                               : EnumMode::PositiveOnly;
        std::vector<Rational> dom = enumerate_rationals(*budget.size_bound, mode);
        std::function<StepOutcome(int)> rec = [&](int depth) -> StepOutcome {
            if (depth == p.arity) {
                if (st.out_of_budget()) return StepOutcome::Stop;
                if (check_assignment(nullptr)) return StepOutcome::Found;
                return StepOutcome::Continue;
            }
            for (const auto& q : dom) {
                assign[static_cast<size_t>(depth)] = q;
                StepOutcome r = rec(depth + 1);
                if (r == StepOutcome::Found || r == StepOutcome::Stop) return r;
            }
            return StepOutcome::Continue;
        };
        outcome = rec(0);
    } else {
        throw std::invalid_argument("search budget must specify an enumeration domain");
    }

    if (outcome == StepOutcome::Found && found) {
        Witness w;
        w.pattern = p.name;
        w.coloring = c.descriptor();
        w.assignment = *found;
        w.engine = "pattern-search";
        w.examined = st.examined;
        w.skipped = st.skipped;
        // Verify before returning: re-instantiate and re-color independently.
        MonoResult mr = is_monochromatic(c, p, w.assignment);
        if (!mr.monochromatic)
            throw std::logic_error("search produced a witness that fails re-verification");
        w.color = mr.color;
        return w;
    }
    Exhausted ex;
    ex.examined = st.examined;
    ex.skipped = st.skipped;
    ex.stopped_by = outcome == StepOutcome::Stop ? st.stopped_by : "domain-exhausted";
    ex.space = budget.describe();
    return ex;
}

std::string IntPoly::str(const std::string& var) const {
    std::ostringstream os;
    bool first = true;
    for (size_t i = coeffs.size(); i-- > 1;) {
        if (coeffs[i] == 0) continue;
        if (!first && coeffs[i] > 0) os << "+";
        if (coeffs[i] == -1) os << "-";
        else if (coeffs[i] != 1) os << coeffs[i];
        os << var;
        if (i > 1) os << "^" << i;
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

std::optional<IntPoly> IntPoly::parse(const std::string& s) {
    // Terms like "d^2", "2d", "-d^3", joined by + or -.
    std::vector<long> coeffs{0};
    size_t i = 0;
    int sign = 1;
    auto fail = [] { return std::optional<IntPoly>{}; };
    while (i < s.size()) {
        if (s[i] == '+') { sign = 1; ++i; continue; }
        if (s[i] == '-') { sign = -1; ++i; continue; }
        if (isspace(static_cast<unsigned char>(s[i]))) { ++i; continue; }
        long coef = 1;
        bool saw_digit = false;
        long num = 0;
        while (i < s.size() && isdigit(static_cast<unsigned char>(s[i]))) {
            num = num * 10 + (s[i] - '0');
            saw_digit = true;
            ++i;
        }
        if (saw_digit) coef = num;
        int exp = 0;
        if (i < s.size() && (s[i] == 'd' || s[i] == 'n' || s[i] == 'x')) {
            ++i;
            exp = 1;
            if (i < s.size() && s[i] == '^') {
                ++i;
                long e = 0;
                bool saw = false;
                while (i < s.size() && isdigit(static_cast<unsigned char>(s[i]))) {
                    e = e * 10 + (s[i] - '0');
                    saw = true;
                    ++i;
                }
                if (!saw || e < 1 || e > 16) return fail();
                exp = static_cast<int>(e);
            }
        } else if (!saw_digit) {
            return fail();
        }
        if (exp == 0) return fail();  // constant terms would break p(0) = 0
        if (static_cast<size_t>(exp) >= coeffs.size()) coeffs.resize(static_cast<size_t>(exp) + 1, 0);
        coeffs[static_cast<size_t>(exp)] += sign * coef;
        sign = 1;
    }
    if (coeffs.size() < 2) return fail();
    return IntPoly(coeffs);
}

const char* engine_name(Engine e) {
    switch (e) {
        case Engine::Brute: return "brute";
        case Engine::Sat: return "sat";
        case Engine::Both: return "both";
    }
    return "?";
}

std::optional<Engine> engine_from_name(const std::string& s) {
    if (s == "brute") return Engine::Brute;
    if (s == "sat") return Engine::Sat;
    if (s == "both") return Engine::Both;
    return std::nullopt;
}

bool avoiding_coloring_exists(const Pattern& p, int k, long N, std::uint64_t node_cap,
                              std::vector<ColorId>* out, std::uint64_t* nodes_used) {
    // Constraints: distinct in-range instantiations, grouped by max value so
    // each is checked exactly once, as soon as it is fully colored.
    std::set<std::vector<long>> sets;
    for_each_inrange_instantiation(p, N, [&](const std::vector<long>& values) {
        sets.insert(values);
    });
    std::vector<std::vector<std::vector<long>>> by_max(static_cast<size_t>(N) + 1);
    bool impossible = false;
    for (const auto& s : sets) {
        if (s.size() == 1) {
            impossible = true;  // a singleton instance is monochromatic under any coloring
            continue;
        }
        by_max[static_cast<size_t>(s.back())].push_back(s);
    }
    if (impossible) {
        if (nodes_used) *nodes_used = 0;
        return false;
    }

    std::vector<ColorId> colors(static_cast<size_t>(N) + 1, -1);
    std::uint64_t nodes = 0;
    // DFS with color-class canonicalization: a fresh color may only follow
    // all smaller ones (safe for existence, prunes the k! symmetry).
    std::function<bool(long, int)> rec = [&](long n, int used) -> bool {
        if (n > N) return true;
        int limit = std::min(k, used + 1);
        for (int c = 0; c < limit; ++c) {
            if (++nodes > node_cap) throw std::runtime_error("node cap exceeded");
            colors[static_cast<size_t>(n)] = c;
            bool ok = true;
            for (const auto& s : by_max[static_cast<size_t>(n)]) {
                bool mono = true;
                for (long v : s)
                    if (colors[static_cast<size_t>(v)] != c) { mono = false; break; }
                if (mono) { ok = false; break; }
            }
            if (ok && rec(n + 1, std::max(used, c + 1))) return true;
        }
        colors[static_cast<size_t>(n)] = -1;
        return false;
    };
    bool exists = rec(1, 0);
    if (nodes_used) *nodes_used = nodes;
    if (exists && out) out->assign(colors.begin() + 1, colors.end());
    return exists;
}

namespace {

json coloring_table_json(const std::vector<ColorId>& colors, int k) {
    std::map<std::string, ColorId> entries;
    for (size_t i = 0; i < colors.size(); ++i) entries[std::to_string(i + 1)] = colors[i];
    return Coloring::table(std::move(entries), 0, Domain::Naturals, k).descriptor();
}

// Re-verify an avoiding certificate: zero monochromatic in-range instances.
void verify_avoiding(const json& coloring_desc, const Pattern& p, long N) {
    Coloring c = Coloring::from_descriptor(coloring_desc);
    bool violated = false;
    std::vector<long> bad;
    for_each_inrange_instantiation(p, N, [&](const std::vector<long>& values) {
        if (violated || values.size() < 2) return;
        ColorId c0 = c.color(Rational(values[0]));
        bool mono = true;
        for (long v : values)
            if (c.color(Rational(v)) != c0) { mono = false; break; }
        if (mono) { violated = true; bad = values; }
    });
    if (violated) {
        std::ostringstream os;
        os << "certificate coloring has a monochromatic instance {";
        for (long v : bad) os << v << " ";
        os << "} of " << p.name;
        throw std::logic_error(os.str());
    }
}

struct EngineRun {
    long last_avoidable = 0;       // largest N with an avoiding coloring found
    long first_forced = -1;        // smallest N with none (-1 if budget fired first)
    std::vector<ColorId> avoiding; // certificate for last_avoidable
    json exhaustion;
    std::string reason;
};

EngineRun run_brute(const Pattern& p, int k, const ExtremalBudget& budget) {
    EngineRun run;
    for (long N = 1; N <= budget.max_n; ++N) {
        std::vector<ColorId> cert;
        std::uint64_t nodes = 0;
        bool ok;
        try {
            ok = avoiding_coloring_exists(p, k, N, budget.node_cap, &cert, &nodes);
        } catch (const std::runtime_error&) {
            run.reason = "brute-force node cap at N=" + std::to_string(N);
            return run;
        }
        if (!ok) {
            run.first_forced = N;
            run.exhaustion = json{{"N", N},
                                  {"engine", "brute"},
                                  {"evidence", "exhaustive-backtracking"},
                                  {"nodes", nodes}};
            return run;
        }
        run.last_avoidable = N;
        run.avoiding = std::move(cert);
    }
    run.reason = "max_n reached with avoiding colorings still found";
    return run;
}

EngineRun run_sat(const Pattern& p, int k, const ExtremalBudget& budget,
                  const std::string& solver_cmd) {
    EngineRun run;
    for (long N = 1; N <= budget.max_n; ++N) {
        CnfInstance inst = encode_avoidance(N, k, p);
        SolveResult res = solve_external(inst, solver_cmd, budget.solver_timeout_s);
        if (res.kind == SolveResult::Kind::Unknown) {
            run.reason = "solver unknown at N=" + std::to_string(N) + ": " + res.diagnostics;
            return run;
        }
        if (res.kind == SolveResult::Kind::Unsat) {
            run.first_forced = N;
            run.exhaustion = json{{"N", N}, {"engine", "sat"}, {"evidence", "unsat"}};
            return run;
        }
        Coloring decoded = decode_coloring(inst, res.model);
        run.last_avoidable = N;
        run.avoiding.clear();
        for (long n = 1; n <= N; ++n) run.avoiding.push_back(decoded.color(Rational(n)));
    }
    run.reason = "max_n reached with satisfiable instances";
    return run;
}

ExtremalOutcome extremal_number(const Pattern& p, int k, Engine engine,
                                const ExtremalBudget& budget, const std::string& solver_cmd,
                                bool report_least_forcing) {
    std::optional<EngineRun> brute, sat;
    if (engine == Engine::Brute || engine == Engine::Both) brute = run_brute(p, k, budget);
    if (engine == Engine::Sat || engine == Engine::Both)
        sat = run_sat(p, k, budget, solver_cmd.empty() ? default_solver_command() : solver_cmd);

    auto incomplete = [](const std::optional<EngineRun>& r) {
        return r && r->first_forced < 0;
    };
    if (incomplete(brute) || incomplete(sat)) {
        ExtremalPartial part;
        const EngineRun& r = incomplete(brute) ? *brute : *sat;
        part.last_avoidable = r.last_avoidable;
        part.reason = r.reason;
        return part;
    }
    if (brute && sat && brute->first_forced != sat->first_forced)
        throw std::logic_error("engine disagreement: brute says " +
                               std::to_string(brute->first_forced) + ", sat says " +
                               std::to_string(sat->first_forced));

    const EngineRun& r = brute ? *brute : *sat;
    ExtremalResult res;
    res.pattern = p.name;
    res.colors = k;
    res.engine = engine_name(engine);
    res.value = report_least_forcing ? r.first_forced : r.first_forced - 1;
    long avoid_n = r.first_forced - 1;
    if (avoid_n > 0) {
        if (static_cast<long>(r.avoiding.size()) != avoid_n)
            throw std::logic_error("certificate length mismatch");
        res.avoiding = coloring_table_json(r.avoiding, k);
        verify_avoiding(res.avoiding, p, avoid_n);
    } else {
        res.avoiding = json();  // [1..0] is empty: nothing to certify
    }
    res.exhaustion = r.exhaustion;
    if (brute && sat) res.exhaustion["agreed_with"] = "brute+sat";
    return res;
}

}  // namespace

ExtremalOutcome schur_number(int k, Engine engine, const ExtremalBudget& budget,
                             const std::string& solver_cmd, bool strict) {
    if (k < 1) throw std::invalid_argument("schur_number needs k >= 1");
    Pattern p = *catalog_pattern("schur");
    p.require_distinct = strict;
    return extremal_number(p, k, engine, budget, solver_cmd, /*report_least_forcing=*/false);
}

ExtremalOutcome vdw_number(int k, int L, Engine engine, const ExtremalBudget& budget,
                           const std::string& solver_cmd) {
    if (k < 2 || L < 2) throw std::invalid_argument("vdw_number needs k, L >= 2");
    auto p = catalog_pattern("vdw-" + std::to_string(L));
    if (!p) throw std::invalid_argument("bad progression length");
    return extremal_number(*p, k, engine, budget, solver_cmd, /*report_least_forcing=*/true);
}

namespace {

// {x, x + p(d)} with variables (x, d).
Pattern pvdw_pattern(const IntPoly& poly) {
    Pattern p;
    p.name = "pvdw-" + poly.str();
    p.arity = 2;
    p.var_names = {"x", "d"};
    std::vector<std::pair<Rational, Term>> shifted{{Rational(1), Term::var(0)}};
    for (size_t i = 1; i < poly.coeffs.size(); ++i)
        if (poly.coeffs[i] != 0)
            shifted.emplace_back(Rational(poly.coeffs[i]), Term::pow(1, static_cast<int>(i)));
    p.terms = {Term::var(0), Term::sum(std::move(shifted))};
    return p;
}

}  // namespace

std::optional<Pattern> extremal_pattern_from_name(const std::string& name) {
    if (name.rfind("pvdw-", 0) == 0) {
        auto poly = IntPoly::parse(name.substr(5));
        if (!poly) return std::nullopt;
        return pvdw_pattern(*poly);
    }
    return catalog_pattern(name);
}

ExtremalOutcome pvdw_min_n(int k, const IntPoly& poly, Engine engine,
                           const ExtremalBudget& budget, const std::string& solver_cmd) {
    if (k < 1) throw std::invalid_argument("pvdw_min_n needs k >= 1");
    if (poly.is_constant_zero()) throw std::invalid_argument("polynomial must be nonconstant");
    return extremal_number(pvdw_pattern(poly), k, engine, budget, solver_cmd,
                           /*report_least_forcing=*/true);
}

SearchOutcome folkman_search(const Coloring& c, int n, const SearchBudget& budget, bool distinct) {
    if (n < 1) throw std::invalid_argument("folkman_search needs n >= 1");
    SearchState st;
    st.budget = &budget;

    std::vector<Rational> domain;
    long int_lo = 0, int_hi = -1;
    const bool int_domain = budget.int_range.has_value();
    if (int_domain) {
        int_lo = budget.int_range->first;
        int_hi = budget.int_range->second;
    } else if (budget.size_bound) {
        domain = enumerate_rationals(*budget.size_bound,
                                     c.domain() == Domain::NonzeroRationals
                                         ? EnumMode::FullNonzero
                                         : EnumMode::PositiveOnly);
    } else {
        throw std::invalid_argument("folkman budget needs a domain");
    }

    std::vector<Rational> xs(static_cast<size_t>(n));
    std::vector<Rational> sums;  // subset sums of the prefix, by submask order
    sums.reserve(1u << n);
    ColorId common = -1;
    std::optional<std::vector<Rational>> found;
    bool stopped = false;

    // Extending prefix by x adds sums {x} and {s + x}; all must keep the color.
    std::function<bool(int)> rec = [&](int depth) -> bool {
        if (depth == n) {
            found = xs;
            return true;
        }
        auto try_value = [&](const Rational& x) -> bool {
            if (st.out_of_budget()) { stopped = true; return true; }
            ++st.examined;
            if (distinct)
                for (int i = 0; i < depth; ++i)
                    if (xs[static_cast<size_t>(i)] == x) return false;
            size_t base = sums.size();
            auto cx = c.try_color(x);
            if (!cx || (common != -1 && *cx != common)) return false;
            ColorId prev_common = common;
            if (common == -1) common = *cx;
            bool ok = true;
            sums.push_back(x);
            for (size_t i = 0; ok && i < base; ++i) {
                Rational s = sums[i] + x;
                auto cs = c.try_color(s);
                if (!cs || *cs != common) ok = false;
                else sums.push_back(s);
            }
            if (ok) {
                xs[static_cast<size_t>(depth)] = x;
                if (rec(depth + 1)) return true;
            }
            sums.resize(base);
            common = prev_common;
            return false;
        };
        if (int_domain) {
            for (long v = int_lo; v <= int_hi; ++v)
                if (try_value(Rational(v))) return true;
        } else {
            for (const auto& q : domain)
                if (try_value(q)) return true;
        }
        return false;
    };
    bool ok = rec(0);

    if (ok && !stopped && found) {
        Witness w;
        w.pattern = "folkman-" + std::to_string(n);
        w.coloring = c.descriptor();
        w.assignment = *found;
        w.engine = distinct ? "folkman-dfs/distinct" : "folkman-dfs";
        w.examined = st.examined;
        w.skipped = st.skipped;
        auto p = catalog_pattern(w.pattern);
        MonoResult mr = is_monochromatic(c, *p, w.assignment);
        if (!mr.monochromatic)
            throw std::logic_error("folkman witness failed re-verification");
        w.color = mr.color;
        return w;
    }
    Exhausted ex;
    ex.examined = st.examined;
    ex.skipped = st.skipped;
    ex.stopped_by = stopped ? st.stopped_by : "domain-exhausted";
    ex.space = budget.describe();
    return ex;
}

std::variant<std::vector<int>, Exhausted> ramsey_degree_extract(const Coloring& c,
                                                                const std::vector<Rational>& xs,
                                                                int N, int target) {
    if (target < 1 || N < 1) throw std::invalid_argument("ramsey_degree_extract needs N, target >= 1");
    const int m = static_cast<int>(xs.size());
    Exhausted ex;
    ex.space = "subsets of " + std::to_string(m) + " elements, target " + std::to_string(target);
    if (target > m) return ex;

    std::vector<int> chosen;
    std::vector<ColorId> degree_color(static_cast<size_t>(N) + 1, -1);

    // All products of k distinct chosen elements that include the newest one
    // must match the established color for degree k (or establish it).
    std::function<bool(int)> consistent_with = [&](int new_idx) -> bool {
        int sz = static_cast<int>(chosen.size());
        std::vector<ColorId> saved = degree_color;
        std::vector<int> idxs;
        bool ok = true;
        std::function<void(int, int, Rational)> walk = [&](int start, int k, Rational prod) {
            if (!ok) return;
            // extend subset of previously chosen elements by product with xs[new_idx]
            Rational full = prod * xs[static_cast<size_t>(new_idx)];
            int deg = k + 1;
            if (deg <= N) {
                auto col = c.try_color(full);
                if (!col) { ok = false; return; }
                if (degree_color[static_cast<size_t>(deg)] == -1)
                    degree_color[static_cast<size_t>(deg)] = *col;
                else if (degree_color[static_cast<size_t>(deg)] != *col) { ok = false; return; }
            }
            if (k + 1 >= N) return;
            for (int i = start; i < sz; ++i)
                walk(i + 1, k + 1, prod * xs[static_cast<size_t>(chosen[static_cast<size_t>(i)])]);
        };
        walk(0, 0, Rational(1));
        if (!ok) degree_color = saved;
        return ok;
    };

    std::function<bool(int)> rec = [&](int start) -> bool {
        if (static_cast<int>(chosen.size()) == target) return true;
        for (int i = start; i < m; ++i) {
            std::vector<ColorId> saved = degree_color;
            if (consistent_with(i)) {
                chosen.push_back(i);
                ++ex.examined;
                if (rec(i + 1)) return true;
                chosen.pop_back();
            }
            degree_color = saved;
        }
        return false;
    };
    if (rec(0)) return chosen;
    return ex;
}

GridColoring grid_from_scalar(const Coloring& c) {
    GridColoring g;
    g.ell = 1;
    g.eval = [c](const std::vector<Rational>& q) { return c.try_color(q[0]); };
    return g;
}

GridColoring grid_affine(const Coloring& c, const Rational& offset,
                         std::vector<Rational> weights) {
    GridColoring g;
    g.ell = static_cast<int>(weights.size());
    g.eval = [c, offset, w = std::move(weights)](const std::vector<Rational>& q) {
        Rational acc = offset;
        for (size_t i = 0; i < w.size(); ++i) acc += q[i] * w[i];
        return c.try_color(acc);
    };
    return g;
}

void MpvdwInstance::validate() const {
    if (ell < 1) throw std::invalid_argument("dimension must be >= 1");
    if (polys.empty() || polys.size() != vectors.size())
        throw std::invalid_argument("need matching polynomials and vectors");
    for (const auto& p : polys)
        if (p.coeffs[0] != 0) throw std::invalid_argument("p_i(0) must be 0");
    for (const auto& v : vectors)
        if (static_cast<int>(v.size()) != ell)
            throw std::invalid_argument("vector dimension mismatch");
    if (M < 1 || n_max < 1 || u_radius < 0) throw std::invalid_argument("bad bounds");
}

std::vector<Rational> MpvdwInstance::coefficient_range() const {
    std::vector<Rational> coeffs;
    coeffs.push_back(Rational(0));
    for (const auto& q :
         enumerate_rationals(M, nonneg ? EnumMode::PositiveOnly : EnumMode::FullNonzero))
        coeffs.push_back(q);
    return coeffs;
}

std::vector<long> box_coordinate_order(long radius) {
    std::vector<long> order{0};
    for (long v = 1; v <= radius; ++v) {
        order.push_back(v);
        order.push_back(-v);
    }
    return order;
}

std::variant<MpvdwWitness, Exhausted> mpvdw_search(const GridColoring& grid,
                                                   const MpvdwInstance& inst,
                                                   std::uint64_t node_cap) {
    inst.validate();
    if (grid.ell != inst.ell) throw std::invalid_argument("grid/instance dimension mismatch");
    const size_t k = inst.polys.size();
    const std::vector<Rational> coeffs = inst.coefficient_range();
    const std::vector<long> coord_order = box_coordinate_order(inst.u_radius);

    std::vector<long> n_values;
    for (long n = 1; n <= inst.n_max; ++n) {
        n_values.push_back(n);
        if (inst.allow_negative_n) n_values.push_back(-n);
    }

    Exhausted ex;
    ex.space = "u in [-" + std::to_string(inst.u_radius) + ".." + std::to_string(inst.u_radius) +
               "]^" + std::to_string(inst.ell) + ", n in 1.." + std::to_string(inst.n_max) +
               ", coefficient size <= " + std::to_string(inst.M);

    std::vector<size_t> u_odo(static_cast<size_t>(inst.ell), 0);
    std::vector<long> u(static_cast<size_t>(inst.ell), 0);
    std::vector<Rational> point(static_cast<size_t>(inst.ell));
    std::vector<size_t> c_odo(k, 0);

    while (true) {
        for (int i = 0; i < inst.ell; ++i)
            u[static_cast<size_t>(i)] = coord_order[u_odo[static_cast<size_t>(i)]];

        for (long n : n_values) {
            if (++ex.examined > node_cap) {
                ex.stopped_by = "node-cap";
                return ex;
            }
            // Precompute p_i(n) once per (u, n).
            std::vector<Rational> pn;
            pn.reserve(k);
            for (const auto& p : inst.polys) pn.emplace_back(p.eval(n));

            std::fill(c_odo.begin(), c_odo.end(), 0);
            ColorId common = -1;
            bool ok = true;
            std::vector<std::vector<Rational>> points;
            while (true) {
                for (int i = 0; i < inst.ell; ++i)
                    point[static_cast<size_t>(i)] = Rational(u[static_cast<size_t>(i)]);
                for (size_t i = 0; i < k; ++i) {
                    const Rational& ci = coeffs[c_odo[i]];
                    if (ci.is_zero()) continue;
                    Rational f = ci * pn[i];
                    for (int d = 0; d < inst.ell; ++d)
                        point[static_cast<size_t>(d)] += f * inst.vectors[i][static_cast<size_t>(d)];
                }
                auto col = grid.eval(point);
                if (!col || (common != -1 && *col != common)) {
                    ok = false;
                    break;
                }
                if (common == -1) common = *col;
                points.push_back(point);
                size_t pos = k;
                while (pos-- > 0) {
                    if (++c_odo[pos] < coeffs.size()) break;
                    c_odo[pos] = 0;
                    if (pos == 0) { pos = SIZE_MAX; break; }
                }
                if (pos == SIZE_MAX) break;
            }
            if (ok) {
                MpvdwWitness w;
                w.u = u;
                w.n = n;
                w.color = common;
                w.points = std::move(points);
                return w;
            }
        }

        int pos = inst.ell - 1;
        while (pos >= 0) {
            if (++u_odo[static_cast<size_t>(pos)] < coord_order.size()) break;
            u_odo[static_cast<size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    ex.stopped_by = "domain-exhausted";
    return ex;
}

}  // namespace prq
