#include "prq/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <sstream>

namespace prq {

using nlohmann::json;

namespace {

struct CondSpec {
    int id = 0;
    std::string label;
    Rational x0;
    std::vector<Rational> args;
};

std::vector<CondSpec> prop31_condition_specs(const Rational& a, const Rational& b,
                                             const Rational& c, bool strengthened) {
    Rational bc = b * c;
    if (!strengthened) {
        return {{1, "P(a; b, c, bc) vs P(a)", a, {b, c, bc}},
                {2, "P(ac; b) vs P(ac)", a * c, {b}},
                {3, "P(b; c) vs P(b)", b, {c}}};
    }
    Rational c2 = c * c;
    return {{1, "P(a; b/c, b, c, bc) vs P(a)", a, {b / c, b, c, bc}},
            {2, "P(ac; b, bc, c^2, bc^2) vs P(ac)", a * c, {b, bc, c2, b * c2}},
            {3, "P(b; c) vs P(b)", b, {c}}};
}

CondCheckResult check_specs(const Coloring& col, const std::vector<CondSpec>& specs, long M) {
    CondCheckResult res;
    CoeffMode mode =
        col.domain() == Domain::PositiveRationals ? CoeffMode::Positive : CoeffMode::Full;
    for (const auto& spec : specs) {
        std::optional<CondFailure> failure;
        for_each_good_poly(M, static_cast<int>(spec.args.size()), mode,
                           [&](const GoodPolynomial& P) {
                               ++res.checked;
                               ColorId full = col.color(P.eval(spec.x0, spec.args));
                               ColorId lead = col.color(P.eval_leading(spec.x0));
                               if (full != lead) {
                                   failure = CondFailure{spec.id, P.str(), spec.label};
                                   return false;
                               }
                               return true;
                           });
        if (failure) {
            res.pass = false;
            res.failure = std::move(failure);
            return res;
        }
    }
    res.pass = true;
    return res;
}

}  // namespace

CondCheckResult prop31_conditions_check(const Coloring& c, const Rational& a, const Rational& b,
                                        const Rational& c_val, long M, bool strengthened) {
    if (a.is_zero() || b.is_zero() || c_val.is_zero())
        throw std::invalid_argument("prop31 conditions need a, b, c != 0");
    return check_specs(c, prop31_condition_specs(a, b, c_val, strengthened), M);
}

CondCheckResult prop_main_conditions_check(const Coloring& c, const std::vector<Rational>& xs,
                                           long M) {
    const int n = static_cast<int>(xs.size());
    for (const auto& x : xs)
        if (x.is_zero()) throw std::invalid_argument("all x_j must be nonzero");

    std::vector<CondSpec> specs;
    for (int i = 1; i <= n; ++i) {
        const unsigned prev = 1u << (i - 1);  // subsets of [1..i-1] as bitmasks
        for (unsigned tmask = 0; tmask < prev; ++tmask) {
            int max_t = 0;
            for (int j = 1; j < i; ++j)
                if (tmask & (1u << (j - 1))) max_t = j;
            // Admissible S: nonempty subsets of [1..i-1] with min(S) > max(T),
            // canonical bitmask order.
            std::vector<unsigned> family;
            for (unsigned smask = 1; smask < prev; ++smask) {
                int min_s = 0;
                for (int j = 1; j < i; ++j)
                    if (smask & (1u << (j - 1))) { min_s = j; break; }
                if (min_s > max_t) family.push_back(smask);
            }
            if (family.empty()) continue;
            CondSpec spec;
            spec.id = i * 1000 + static_cast<int>(tmask);
            Rational x0 = xs[static_cast<size_t>(i - 1)];
            std::ostringstream label;
            label << "i=" << i << ", T={";
            for (int j = 1; j < i; ++j)
                if (tmask & (1u << (j - 1))) label << j << " ";
            label << "}";
            for (int j = 1; j < i; ++j)
                if (tmask & (1u << (j - 1))) x0 *= xs[static_cast<size_t>(j - 1)];
            spec.x0 = x0;
            for (unsigned smask : family) {
                Rational prod(1);
                for (int j = 1; j < i; ++j)
                    if (smask & (1u << (j - 1))) prod *= xs[static_cast<size_t>(j - 1)];
                spec.args.push_back(prod);
            }
            spec.label = label.str();
            specs.push_back(std::move(spec));
        }
    }
    return check_specs(c, specs, M);
}

json Prop31Witness::to_json() const {
    return json{{"kind", "prop31-witness"},
                {"a", a.str()},
                {"b", b.str()},
                {"c", c.str()},
                {"M", M},
                {"strengthened", strengthened},
                {"coloring", coloring},
                {"budget", {{"examined", examined}}},
                {"verified", true}};
}

std::variant<Prop31Witness, Exhausted> prop31_search(const Coloring& c, long M,
                                                     const SearchBudget& budget,
                                                     bool strengthened) {
    if (!budget.size_bound) throw std::invalid_argument("prop31_search needs a size bound");
    EnumMode mode = c.domain() == Domain::NonzeroRationals ? EnumMode::FullNonzero
                                                           : EnumMode::PositiveOnly;
    std::vector<Rational> dom = enumerate_rationals(*budget.size_bound, mode);
    Exhausted ex;
    ex.space = "triples over " + budget.describe();
    for (const auto& a : dom) {
        for (const auto& b : dom) {
            for (const auto& cv : dom) {
                if (ex.examined + ex.skipped >= budget.node_cap) {
                    ex.stopped_by = "node-cap";
                    return ex;
                }
                ++ex.examined;
                try {
                    CondCheckResult r = prop31_conditions_check(c, a, b, cv, M, strengthened);
                    if (r.pass) {
                        Prop31Witness w;
                        w.a = a;
                        w.b = b;
                        w.c = cv;
                        w.M = M;
                        w.strengthened = strengthened;
                        w.coloring = c.descriptor();
                        w.examined = ex.examined;
                        return w;
                    }
                } catch (const domain_error&) {
                    ++ex.skipped;
                }
            }
        }
    }
    ex.stopped_by = "domain-exhausted";
    return ex;
}

namespace {

json rvec(const std::vector<Rational>& v) {
    json a = json::array();
    for (const auto& q : v) a.push_back(q.str());
    return a;
}

json lvec(const std::vector<long>& v) { return json(v); }

// lambda values for the pair step / coefficient tuples: nonnegative on Q+.
std::vector<Rational> lambda_range(long M, Domain d) {
    std::vector<Rational> out{Rational(0)};
    for (const auto& q : enumerate_rationals(M, d == Domain::PositiveRationals
                                                    ? EnumMode::PositiveOnly
                                                    : EnumMode::FullNonzero))
        out.push_back(q);
    return out;
}

std::vector<Rational> nonzero_range(long M, Domain d) {
    return enumerate_rationals(M, d == Domain::PositiveRationals ? EnumMode::PositiveOnly
                                                                 : EnumMode::FullNonzero);
}

// All tuples (l1..l4) over the range, odometer order.
bool for_each_tuple4(const std::vector<Rational>& range,
                     const std::function<bool(const std::array<Rational, 4>&)>& fn) {
    std::array<size_t, 4> odo{0, 0, 0, 0};
    std::array<Rational, 4> t;
    while (true) {
        for (int i = 0; i < 4; ++i) t[static_cast<size_t>(i)] = range[odo[static_cast<size_t>(i)]];
        if (!fn(t)) return false;
        int pos = 3;
        while (pos >= 0) {
            if (++odo[static_cast<size_t>(pos)] < range.size()) break;
            odo[static_cast<size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) return true;
    }
}

}  // namespace

json Prop31Trace::to_json() const {
    json steps_json = json::array();
    for (const auto& s : steps) {
        steps_json.push_back(json{{"action", s.action},
                                  {"params", s.params},
                                  {"outputs", s.outputs},
                                  {"verified", s.verified},
                                  {"note", s.note}});
    }
    json j{{"kind", "trace"},
           {"trace_type", "prop31"},
           {"coloring", coloring},
           {"chain", {{"M0", chain.M0}, {"Mp", chain.Mp}, {"M1", chain.M1},
                      {"M2", chain.M2}, {"M3", chain.M3}}},
           {"steps", steps_json},
           {"completed", completed}};
    if (!completed) j["blocked_at"] = blocked_at;
    if (result)
        j["result"] = {{"a", (*result)[0].str()}, {"b", (*result)[1].str()},
                       {"c", (*result)[2].str()}, {"M", chain.M3}};
    return j;
}

Prop31Trace prop31_trace(const Coloring& chi1, const Prop31Chain& chain,
                         const Prop31TraceBudget& budget) {
    Prop31Trace trace;
    trace.chain = chain;
    trace.coloring = chi1.descriptor();
    const Domain dom = chi1.domain();
    if (dom == Domain::Naturals)
        throw std::invalid_argument("prop31 trace needs a rational-domain coloring");

    auto abort_at = [&](TraceStep step, const std::string& why) {
        step.verified = false;
        step.note = why;
        trace.blocked_at = step.action;
        trace.steps.push_back(std::move(step));
        return trace;
    };

    // Step 1: auxiliary product coloring chi2 with parameter M0.
    Coloring chi2 = Coloring::product(chi1, chain.M0);
    {
        TraceStep s;
        s.action = "product-coloring-chi2";
        s.params = json{{"M0", chain.M0}};
        s.outputs = json{{"descriptor", chi2.descriptor()}};
        s.verified = true;
        s.note = "chi2(x) = tuple of chi1(Kx) over all K with s(K) <= M0";
        trace.steps.push_back(std::move(s));
    }

    // Step 2: pair step. Find b, c with chi2(b + lambda*c) = chi2(b) for every
    // lambda with s(lambda) <= M0; this yields condition (3) at M1.
    Rational b, c;
    {
        TraceStep s;
        s.action = "vdw-pair-search";
        const std::vector<Rational> lambdas = lambda_range(chain.M0, dom);
        s.params = json{{"lambda_bound", chain.M0},
                        {"pair_size_bound", budget.pair_size_bound},
                        {"claim", "chi2(b + lambda*c) = chi2(b) for all s(lambda) <= M0"}};
        std::vector<Rational> pair_dom = enumerate_rationals(
            budget.pair_size_bound,
            dom == Domain::PositiveRationals ? EnumMode::PositiveOnly : EnumMode::FullNonzero);
        bool found = false;
        std::uint64_t examined = 0;
        for (const auto& bq : pair_dom) {
            for (const auto& cq : pair_dom) {
                if (++examined > budget.node_cap) break;
                auto base = chi2.try_color(bq);
                if (!base) continue;
                bool ok = true;
                for (const auto& l : lambdas) {
                    auto col = chi2.try_color(bq + l * cq);
                    if (!col || *col != *base) { ok = false; break; }
                }
                if (ok) { b = bq; c = cq; found = true; break; }
            }
            if (found) break;
        }
        s.outputs = json{{"examined", examined}};
        if (!found) return abort_at(std::move(s), "no (b, c) in budget satisfies the pair claim");
        s.outputs["b"] = b.str();
        s.outputs["c"] = c.str();
        // Derived claim: condition (3) at M1 under chi1.
        CondCheckResult c3 = check_specs(chi1, {{3, "P(b; c) vs P(b)", b, {c}}}, chain.M1);
        if (!c3.pass)
            return abort_at(std::move(s),
                            "condition (3) fails at M1 (chain too aggressive: needs M1 <= sqrt(M0)); "
                            "failing P = " + c3.failure->poly);
        s.verified = true;
        s.note = "condition (3) holds at M1 = " + std::to_string(chain.M1);
        trace.steps.push_back(std::move(s));
    }

    // Step 3: first grid application, polynomials (n, n^2, n, n^3) against the
    // direction weights w = (b/c, b, c, bc) under the product coloring at M'.
    Coloring aux1 = Coloring::product(chi1, chain.Mp);
    Rational a;
    long k1 = 0;
    std::vector<long> u1;
    {
        TraceStep s;
        s.action = "grid-step-1";
        MpvdwInstance inst;
        inst.ell = 4;
        inst.polys = {IntPoly({0, 1}), IntPoly({0, 0, 1}), IntPoly({0, 1}), IntPoly({0, 0, 0, 1})};
        inst.vectors = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
        inst.M = chain.M2;
        inst.nonneg = dom == Domain::PositiveRationals;
        inst.n_max = budget.n_max;
        inst.u_radius = budget.u_radius;
        std::vector<Rational> w{b / c, b, c, b * c};
        s.params = json{{"polys", {"n", "n^2", "n", "n^3"}},
                        {"weights", rvec(w)},
                        {"M2", chain.M2},
                        {"Mp", chain.Mp},
                        {"claim", "aux(u.w + l1*k*(b/c) + l2*k^2*b + l3*k*c + l4*k^3*bc) "
                                  "constant over s(l_i) <= M2"}};
        auto out = mpvdw_search(grid_affine(aux1, Rational(0), w), inst, budget.node_cap);
        if (std::holds_alternative<Exhausted>(out)) {
            const auto& ex = std::get<Exhausted>(out);
            s.outputs = json{{"examined", ex.examined}, {"stopped_by", ex.stopped_by}};
            return abort_at(std::move(s), "grid search exhausted: " + ex.space);
        }
        const auto& wit = std::get<MpvdwWitness>(out);
        u1 = wit.u;
        k1 = wit.n;
        a = Rational(u1[0]) * w[0] + Rational(u1[1]) * w[1] + Rational(u1[2]) * w[2] +
            Rational(u1[3]) * w[3];
        s.outputs = json{{"u", lvec(u1)}, {"k", k1}, {"a", a.str()},
                         {"set_size", wit.points.size()}};
        s.verified = true;
        s.note = "a := u . (b/c, b, c, bc)";
        trace.steps.push_back(std::move(s));
    }

    // Step 4: rescale (b, c) -> (k^2 b, k c); the verified configuration
    // becomes {a + l . w} for the new w, and condition (3) drops to M2.
    {
        TraceStep s;
        s.action = "rescale-1";
        s.params = json{{"k", k1}, {"rule", "(b, c) -> (k^2 b, k c)"}};
        Rational kq(k1);
        b = kq * kq * b;
        c = kq * c;
        std::vector<Rational> w{b / c, b, c, b * c};
        s.outputs = json{{"b", b.str()}, {"c", c.str()}, {"a", a.str()}};

        // (i) transported configuration monochromatic under aux1, anchored at a.
        auto abase = aux1.try_color(a);
        if (!abase) return abort_at(std::move(s), "a left the coloring domain");
        const std::vector<Rational> ls = lambda_range(chain.M2, dom);
        bool mono = for_each_tuple4(ls, [&](const std::array<Rational, 4>& l) {
            Rational v = a + l[0] * w[0] + l[1] * w[1] + l[2] * w[2] + l[3] * w[3];
            auto col = aux1.try_color(v);
            return col && *col == *abase;
        });
        if (!mono)
            return abort_at(std::move(s), "rescaled configuration not monochromatic under aux");

        // (ii) under chi1: color(K(a + l.w)) = color(Ka) for s(K) <= min(M2, Mp).
        const std::vector<Rational> ks = nonzero_range(std::min(chain.M2, chain.Mp), dom);
        bool chi1_ok = true;
        std::string fail_detail;
        for (const auto& K : ks) {
            auto ka = chi1.try_color(K * a);
            if (!ka) { chi1_ok = false; break; }
            chi1_ok = for_each_tuple4(ls, [&](const std::array<Rational, 4>& l) {
                Rational v = K * (a + l[0] * w[0] + l[1] * w[1] + l[2] * w[2] + l[3] * w[3]);
                auto col = chi1.try_color(v);
                if (!col || *col != *ka) {
                    fail_detail = "K=" + K.str();
                    return false;
                }
                return true;
            });
            if (!chi1_ok) break;
        }
        if (!chi1_ok)
            return abort_at(std::move(s), "base-coloring consequence failed " + fail_detail);

        // (iii) condition (3) survives at M2.
        CondCheckResult c3 = check_specs(chi1, {{3, "P(b; c) vs P(b)", b, {c}}}, chain.M2);
        if (!c3.pass)
            return abort_at(std::move(s),
                            "condition (3) lost at M2 after rescale (k too large for the chain); "
                            "failing P = " + c3.failure->poly);
        s.verified = true;
        s.note = "configuration {a + l.w} monochromatic; condition (3) holds at M2";
        trace.steps.push_back(std::move(s));
    }

    // Step 5: second grid application with (n^2, n^3, n^2, n^4) on the scaled
    // form c*(a + q.w) = ca + q.(b, bc, c^2, bc^2).
    long k2 = 0;
    std::vector<long> u2;
    {
        TraceStep s;
        s.action = "grid-step-2";
        MpvdwInstance inst;
        inst.ell = 4;
        inst.polys = {IntPoly({0, 0, 1}), IntPoly({0, 0, 0, 1}), IntPoly({0, 0, 1}),
                      IntPoly({0, 0, 0, 0, 1})};
        inst.vectors = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
        inst.M = chain.M3;
        inst.nonneg = dom == Domain::PositiveRationals;
        inst.n_max = budget.n_max;
        inst.u_radius = budget.u_radius;
        std::vector<Rational> scaled_w{b, b * c, c * c, b * c * c};
        s.params = json{{"polys", {"n^2", "n^3", "n^2", "n^4"}},
                        {"offset", (c * a).str()},
                        {"weights", rvec(scaled_w)},
                        {"M3", chain.M3},
                        {"claim", "aux(c*(a + u.w + l1*k^2*(b/c) + l2*k^3*b + l3*k^2*c + "
                                  "l4*k^4*bc)) constant over s(l_i) <= M3"}};
        auto out =
            mpvdw_search(grid_affine(aux1, c * a, scaled_w), inst, budget.node_cap);
        if (std::holds_alternative<Exhausted>(out)) {
            const auto& ex = std::get<Exhausted>(out);
            s.outputs = json{{"examined", ex.examined}, {"stopped_by", ex.stopped_by}};
            return abort_at(std::move(s), "grid search exhausted: " + ex.space);
        }
        const auto& wit = std::get<MpvdwWitness>(out);
        u2 = wit.u;
        k2 = wit.n;
        s.outputs = json{{"u", lvec(u2)}, {"k", k2}, {"set_size", wit.points.size()}};
        s.verified = true;
        trace.steps.push_back(std::move(s));
    }

    // Step 6: shift a by u2 . (b/c, b, c, bc).
    {
        TraceStep s;
        s.action = "shift-a";
        std::vector<Rational> w{b / c, b, c, b * c};
        Rational shift = Rational(u2[0]) * w[0] + Rational(u2[1]) * w[1] + Rational(u2[2]) * w[2] +
                         Rational(u2[3]) * w[3];
        a += shift;
        s.params = json{{"u", lvec(u2)}, {"rule", "a -> a + u . (b/c, b, c, bc)"}};
        s.outputs = json{{"a", a.str()}};
        if (a.is_zero() || !domain_contains(dom, a))
            return abort_at(std::move(s), "shifted a left the domain");
        // Claim after the shift: aux(c*(a + l1 k^2 b/c + l2 k^3 b + l3 k^2 c +
        // l4 k^4 bc)) = aux(c*a) for all s(l_i) <= M3.
        Rational kq(k2), k2q = kq * kq, k3q = kq * kq * kq, k4q = kq * kq * kq * kq;
        std::vector<Rational> scaled{k2q * w[0], k3q * w[1], k2q * w[2], k4q * w[3]};
        auto base = aux1.try_color(c * a);
        if (!base) return abort_at(std::move(s), "c*a left the coloring domain");
        const std::vector<Rational> ls = lambda_range(chain.M3, dom);
        bool mono = for_each_tuple4(ls, [&](const std::array<Rational, 4>& l) {
            Rational v = c * (a + l[0] * scaled[0] + l[1] * scaled[1] + l[2] * scaled[2] +
                              l[3] * scaled[3]);
            auto col = aux1.try_color(v);
            return col && *col == *base;
        });
        if (!mono) return abort_at(std::move(s), "shifted configuration not monochromatic");
        s.verified = true;
        trace.steps.push_back(std::move(s));
    }

    // Step 7: final rescale (a, b, c) -> (a/k, k^2 b, k c); conditions (1) and
    // (3) survive because k is small against the chain.
    {
        TraceStep s;
        s.action = "rescale-2";
        s.params = json{{"k", k2}, {"rule", "(a, b, c) -> (a/k, k^2 b, k c)"}};
        Rational kq(k2);
        a = a / kq;
        b = kq * kq * b;
        c = kq * c;
        s.outputs = json{{"a", a.str()}, {"b", b.str()}, {"c", c.str()}};
        std::vector<Rational> w{b / c, b, c, b * c};
        auto base = aux1.try_color(c * a);
        if (!base) return abort_at(std::move(s), "c*a left the coloring domain");
        const std::vector<Rational> ls = lambda_range(chain.M3, dom);
        bool mono = for_each_tuple4(ls, [&](const std::array<Rational, 4>& l) {
            Rational v = c * (a + l[0] * w[0] + l[1] * w[1] + l[2] * w[2] + l[3] * w[3]);
            auto col = aux1.try_color(v);
            return col && *col == *base;
        });
        if (!mono)
            return abort_at(std::move(s), "final configuration not monochromatic under aux");
        s.verified = true;
        s.note = "c*(a + l.w) all one aux color; anchor c*a included (l = 0)";
        trace.steps.push_back(std::move(s));
    }

    // Step 8: the completed trace must pass the strengthened check at M3.
    {
        TraceStep s;
        s.action = "final-conditions-check";
        s.params = json{{"M", chain.M3}, {"strengthened", true}};
        CondCheckResult final_check;
        try {
            final_check = prop31_conditions_check(chi1, a, b, c, chain.M3, true);
        } catch (const domain_error& e) {
            return abort_at(std::move(s), std::string("domain error in final check: ") + e.what());
        }
        s.outputs = json{{"checked", final_check.checked}};
        if (!final_check.pass)
            return abort_at(std::move(s), "strengthened conditions fail: condition " +
                                              std::to_string(final_check.failure->condition) +
                                              ", P = " + final_check.failure->poly);
        s.verified = true;
        trace.steps.push_back(std::move(s));
    }

    trace.completed = true;
    trace.result = std::array<Rational, 3>{a, b, c};
    return trace;
}

json DxWitness::to_json() const {
    json steps_json = json::array();
    for (const auto& s : steps)
        steps_json.push_back(json{{"action", s.action},
                                  {"params", s.params},
                                  {"outputs", s.outputs},
                                  {"verified", s.verified},
                                  {"note", s.note}});
    return json{{"kind", "trace"},
                {"trace_type", "dx"},
                {"coloring", coloring},
                {"factorial_n", factorial_n},
                {"steps", steps_json},
                {"completed", true},
                {"result", {{"D", D.str()}, {"X", X.str()}, {"x", x.str()}, {"d", d.str()},
                            {"k", k}, {"c", c}, {"color", color}}}};
}

std::variant<DxWitness, Exhausted> dx_witness_constructive(const Coloring& f, int factorial_n,
                                                           const DxBudget& budget) {
    if (f.domain() != Domain::Naturals)
        throw std::invalid_argument("dx construction needs a coloring of N");
    if (factorial_n < 1 || factorial_n > 16)
        throw std::invalid_argument("factorial parameter out of range");
    mpz_class nfact = 1;
    for (int i = 2; i <= factorial_n; ++i) nfact *= i;
    const long max_c = budget.max_c > 0 ? budget.max_c : factorial_n;

    Exhausted ex;
    ex.space = "d, x over multiples of " + std::to_string(factorial_n) + "! up to " +
               std::to_string(budget.max_d_mult) + "x/" + std::to_string(budget.max_x_mult) +
               "x, k <= " + std::to_string(budget.max_k) + ", c <= " + std::to_string(max_c);

    for (long dm = 1; dm <= budget.max_d_mult; ++dm) {
        Rational d(mpz_class(dm * nfact));
        for (long xm = 1; xm <= budget.max_x_mult; ++xm) {
            Rational x(mpz_class(xm * nfact));
            Coloring g = compose_affine(f, d, x);
            for (long k = 1; k <= budget.max_k; ++k) {
                auto gk = g.try_color(Rational(k));
                if (!gk) continue;
                for (long c = 1; c <= max_c; ++c) {
                    if (++ex.examined > budget.node_cap) {
                        ex.stopped_by = "node-cap";
                        return ex;
                    }
                    auto gkc = g.try_color(Rational(k + c * c));
                    if (!gkc || *gkc != *gk) continue;
                    // X = x/c + k d/c, D = c d; DX = dx + k d^2.
                    Rational cq(c);
                    Rational X = x / cq + Rational(k) * d / cq;
                    if (!X.is_integer()) { ++ex.skipped; continue; }
                    Rational D = cq * d;
                    Rational DX = D * X;
                    Rational DX2 = DX + D * D;
                    auto c1 = f.try_color(DX), c2 = f.try_color(DX2);
                    if (!c1 || !c2 || *c1 != *c2)
                        throw std::logic_error("dx construction produced an unverified pair");
                    DxWitness w;
                    w.D = D;
                    w.X = X;
                    w.x = x;
                    w.d = d;
                    w.k = k;
                    w.c = c;
                    w.factorial_n = factorial_n;
                    w.color = *c1;
                    w.coloring = f.descriptor();
                    TraceStep s1;
                    s1.action = "choose-seeds";
                    s1.params = json{{"factorial", factorial_n}};
                    s1.outputs = json{{"x", x.str()}, {"d", d.str()}};
                    s1.verified = true;
                    s1.note = "x, d divisible by " + std::to_string(factorial_n) + "!";
                    TraceStep s2;
                    s2.action = "affine-coloring";
                    s2.params = json{{"rule", "g(C) = f(d*x + C*d^2)"}};
                    s2.outputs = json{{"descriptor", g.descriptor()}};
                    s2.verified = true;
                    TraceStep s3;
                    s3.action = "square-shift-search";
                    s3.params = json{{"polynomial", "n^2"}};
                    s3.outputs = json{{"k", k}, {"c", c}};
                    s3.verified = true;
                    s3.note = "g(k) = g(k + c^2)";
                    TraceStep s4;
                    s4.action = "assemble";
                    s4.params = json{{"rule", "X = x/c + k*d/c, D = c*d"}};
                    s4.outputs = json{{"D", D.str()}, {"X", X.str()},
                                      {"DX", DX.str()}, {"DX+D^2", DX2.str()}, {"color", *c1}};
                    s4.verified = true;
                    s4.note = "f(DX) = f(DX + D^2) re-checked directly";
                    w.steps = {s1, s2, s3, s4};
                    return w;
                }
            }
        }
    }
    ex.stopped_by = "domain-exhausted";
    return ex;
}

std::variant<Witness, Step4Failure> assemble_step4(const Coloring& c,
                                                   const std::vector<Rational>& xs,
                                                   const std::vector<long>& degrees,
                                                   const std::vector<std::vector<int>>& sets) {
    const int n = static_cast<int>(xs.size());
    const int r = static_cast<int>(degrees.size());
    if (static_cast<int>(sets.size()) != r)
        throw std::invalid_argument("need one index set per degree");
    if (r < 1 || 2 * r > n) throw std::invalid_argument("need r >= 1 and 2r <= n");
    for (int i = 0; i < r; ++i) {
        if (degrees[static_cast<size_t>(i)] < 1)
            throw std::invalid_argument("degrees must be >= 1");
        if (static_cast<long>(sets[static_cast<size_t>(i)].size()) !=
            degrees[static_cast<size_t>(i)] - 1)
            throw std::invalid_argument("|S_i| must equal degree_i - 1");
        for (int j : sets[static_cast<size_t>(i)]) {
            if (j < 1 || j > n) throw std::invalid_argument("index set out of range");
            if (2 * j >= n) throw std::invalid_argument("index sets must stay below n/2");
        }
        for (size_t t = 1; t < sets[static_cast<size_t>(i)].size(); ++t)
            if (sets[static_cast<size_t>(i)][t] <= sets[static_cast<size_t>(i)][t - 1])
                throw std::invalid_argument("index sets must be strictly increasing");
    }
    for (int i = 0; i + 1 < r; ++i) {
        const auto& cur = sets[static_cast<size_t>(i)];
        const auto& next = sets[static_cast<size_t>(i + 1)];
        if (!cur.empty() && !next.empty() && cur.back() >= next.front())
            throw std::invalid_argument("S_{i+1} must lie entirely above S_i");
    }

    std::vector<Rational> X;
    for (int i = 1; i <= r; ++i) {
        Rational xi = xs[static_cast<size_t>(n - i - 1)];  // x_{n-i}, xs is 1-based as a list
        for (int j : sets[static_cast<size_t>(i - 1)]) xi *= xs[static_cast<size_t>(j - 1)];
        X.push_back(xi);
    }

    Pattern p = sum_product_pattern(r);
    MonoResult mr = is_monochromatic(c, p, X);
    if (!mr.monochromatic) {
        Step4Failure fail;
        fail.violated_term = mr.mismatch_term;
        fail.detail = "term " + p.term_str(mr.mismatch_term) + " breaks the color";
        return fail;
    }
    Witness w;
    w.pattern = p.name;
    w.coloring = c.descriptor();
    w.assignment = X;
    w.color = mr.color;
    w.engine = "step4-assembly";
    w.examined = 1;
    return w;
}

}  // namespace prq
