#include "prq/pattern.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace prq {

using nlohmann::json;

Term Term::var(int index) {
    Term t;
    t.kind_ = Kind::Var;
    t.var_ = index;
    return t;
}

Term Term::inv_var(int index) {
    Term t;
    t.kind_ = Kind::InvVar;
    t.var_ = index;
    return t;
}

Term Term::constant(Rational value) {
    Term t;
    t.kind_ = Kind::Const;
    t.const_ = std::move(value);
    return t;
}

Term Term::pow(int index, int exponent) {
    if (exponent < 1) throw std::invalid_argument("power exponent must be >= 1");
    Term t;
    t.kind_ = Kind::Pow;
    t.var_ = index;
    t.exp_ = exponent;
    return t;
}

Term Term::sum(std::vector<std::pair<Rational, Term>> children) {
    Term t;
    t.kind_ = Kind::Sum;
    t.sum_ = std::move(children);
    return t;
}

Term Term::product(std::vector<Term> children) {
    Term t;
    t.kind_ = Kind::Product;
    t.prod_ = std::move(children);
    return t;
}

Rational Term::eval(std::span<const Rational> a) const {
    switch (kind_) {
        case Kind::Var: return a[static_cast<size_t>(var_)];
        case Kind::InvVar: return a[static_cast<size_t>(var_)].reciprocal();
        case Kind::Const: return const_;
        case Kind::Pow: {
            Rational r(1);
            for (int i = 0; i < exp_; ++i) r *= a[static_cast<size_t>(var_)];
            return r;
        }
        case Kind::Sum: {
            Rational acc(0);
            for (const auto& [c, child] : sum_) acc += c * child.eval(a);
            return acc;
        }
        case Kind::Product: {
            Rational acc(1);
            for (const auto& child : prod_) acc *= child.eval(a);
            return acc;
        }
    }
    throw std::logic_error("unreachable term kind");
}

int Term::max_var() const {
    int m = var_;
    for (const auto& [c, child] : sum_) m = std::max(m, child.max_var());
    for (const auto& child : prod_) m = std::max(m, child.max_var());
    return m;
}

bool Term::integer_valued() const {
    switch (kind_) {
        case Kind::Var:
        case Kind::Pow: return true;
        case Kind::InvVar: return false;
        case Kind::Const: return const_.is_integer();
        case Kind::Sum:
            return std::all_of(sum_.begin(), sum_.end(), [](const auto& p) {
                return p.first.is_integer() && p.second.integer_valued();
            });
        case Kind::Product:
            return std::all_of(prod_.begin(), prod_.end(),
                               [](const Term& t) { return t.integer_valued(); });
    }
    return false;
}

bool Term::monotone_nonneg() const {
    switch (kind_) {
        case Kind::Var:
        case Kind::Pow: return true;
        case Kind::InvVar: return false;
        case Kind::Const: return !const_.is_negative();
        case Kind::Sum:
            return std::all_of(sum_.begin(), sum_.end(), [](const auto& p) {
                return !p.first.is_negative() && p.second.monotone_nonneg();
            });
        case Kind::Product:
            return std::all_of(prod_.begin(), prod_.end(),
                               [](const Term& t) { return t.monotone_nonneg(); });
    }
    return false;
}

namespace {

std::string canon_key(const Term& t);

// Flattened sum form: map canonical-product-key -> (coefficient, term).
void accumulate_sum(const Term& t, const Rational& coeff,
                    std::map<std::string, std::pair<Rational, Term>>& acc);

Term normalize(const Term& t) {
    switch (t.kind()) {
        case Term::Kind::Var:
        case Term::Kind::InvVar:
        case Term::Kind::Const: return t;
        case Term::Kind::Pow:
            return t.exponent() == 1 ? Term::var(t.var_index()) : t;
        case Term::Kind::Product: {
            std::vector<Term> kids;
            Rational cfactor(1);
            for (const auto& child : t.product_children()) {
                Term n = normalize(child);
                if (n.kind() == Term::Kind::Const) {
                    cfactor *= n.const_value();
                } else if (n.kind() == Term::Kind::Product) {
                    for (const auto& g : n.product_children()) kids.push_back(g);
                } else {
                    kids.push_back(n);
                }
            }
            // Collapse repeated variables into powers.
            std::map<int, int> var_pow;
            std::vector<Term> rest;
            for (const auto& k : kids) {
                if (k.kind() == Term::Kind::Var) var_pow[k.var_index()] += 1;
                else if (k.kind() == Term::Kind::Pow) var_pow[k.var_index()] += k.exponent();
                else rest.push_back(k);
            }
            kids.clear();
            for (const auto& [v, e] : var_pow) kids.push_back(e == 1 ? Term::var(v) : Term::pow(v, e));
            for (auto& r : rest) kids.push_back(std::move(r));
            std::sort(kids.begin(), kids.end(),
                      [](const Term& a, const Term& b) { return canon_key(a) < canon_key(b); });
            Term core = kids.empty()   ? Term::constant(Rational(1))
                        : kids.size() == 1 ? kids[0]
                                           : Term::product(std::move(kids));
            if (cfactor == Rational(1)) return core;
            if (cfactor.is_zero()) return Term::constant(Rational(0));
            return Term::sum({{cfactor, core}});
        }
        case Term::Kind::Sum: {
            std::map<std::string, std::pair<Rational, Term>> acc;
            accumulate_sum(t, Rational(1), acc);
            std::vector<std::pair<Rational, Term>> kids;
            for (auto& [key, cv] : acc)
                if (!cv.first.is_zero()) kids.emplace_back(cv.first, cv.second);
            if (kids.empty()) return Term::constant(Rational(0));
            if (kids.size() == 1 && kids[0].first == Rational(1)) return kids[0].second;
            return Term::sum(std::move(kids));
        }
    }
    throw std::logic_error("unreachable");
}

void accumulate_sum(const Term& t, const Rational& coeff,
                    std::map<std::string, std::pair<Rational, Term>>& acc) {
    Term n = t.kind() == Term::Kind::Sum ? t : normalize(t);
    if (n.kind() == Term::Kind::Sum) {
        for (const auto& [c, child] : n.sum_children()) {
            if (t.kind() == Term::Kind::Sum) {
                accumulate_sum(child, coeff * c, acc);
            } else {
                // Already-normalized sum (constant-folded product): fold directly.
                std::string k = canon_key(child);
                auto it = acc.find(k);
                if (it == acc.end()) acc.emplace(k, std::make_pair(coeff * c, child));
                else it->second.first += coeff * c;
            }
        }
        return;
    }
    if (n.kind() == Term::Kind::Const) {
        std::string k = "1";
        Rational add = coeff * n.const_value();
        auto it = acc.find(k);
        if (it == acc.end()) acc.emplace(k, std::make_pair(add, Term::constant(Rational(1))));
        else it->second.first += add;
        return;
    }
    std::string k = canon_key(n);
    auto it = acc.find(k);
    if (it == acc.end()) acc.emplace(k, std::make_pair(coeff, n));
    else it->second.first += coeff;
}

std::string canon_key(const Term& t) {
    std::ostringstream os;
    switch (t.kind()) {
        case Term::Kind::Var: os << "x" << t.var_index(); break;
        case Term::Kind::InvVar: os << "inv(x" << t.var_index() << ")"; break;
        case Term::Kind::Const: os << t.const_value().str(); break;
        case Term::Kind::Pow: os << "x" << t.var_index() << "^" << t.exponent(); break;
        case Term::Kind::Product: {
            os << "(*";
            for (const auto& c : t.product_children()) os << " " << canon_key(c);
            os << ")";
            break;
        }
        case Term::Kind::Sum: {
            os << "(+";
            for (const auto& [c, child] : t.sum_children())
                os << " " << c.str() << "*" << canon_key(child);
            os << ")";
            break;
        }
    }
    return os.str();
}

}  // namespace

Term Term::normalized() const { return normalize(*this); }
std::string Term::key() const { return canon_key(normalize(*this)); }

std::string Term::str(std::span<const std::string> names) const {
    auto name = [&](int v) {
        return v >= 0 && static_cast<size_t>(v) < names.size() ? names[static_cast<size_t>(v)]
                                                               : "x" + std::to_string(v);
    };
    std::ostringstream os;
    switch (kind_) {
        case Kind::Var: os << name(var_); break;
        case Kind::InvVar: os << "1/" << name(var_); break;
        case Kind::Const: os << const_.str(); break;
        case Kind::Pow: os << name(var_) << "^" << exp_; break;
        case Kind::Product: {
            for (size_t i = 0; i < prod_.size(); ++i) {
                if (i) os << "*";
                bool paren = prod_[i].kind_ == Kind::Sum;
                if (paren) os << "(";
                os << prod_[i].str(names);
                if (paren) os << ")";
            }
            break;
        }
        case Kind::Sum: {
            for (size_t i = 0; i < sum_.size(); ++i) {
                const auto& [c, child] = sum_[i];
                if (i) os << " + ";
                if (c != Rational(1)) os << c.str() << "*";
                bool paren = child.kind_ == Kind::Sum;
                if (paren) os << "(";
                os << child.str(names);
                if (paren) os << ")";
            }
            break;
        }
    }
    return os.str();
}

bool Pattern::integer_valued() const {
    return std::all_of(terms.begin(), terms.end(), [](const Term& t) { return t.integer_valued(); });
}

bool Pattern::monotone_nonneg() const {
    return std::all_of(terms.begin(), terms.end(),
                       [](const Term& t) { return t.monotone_nonneg(); });
}

namespace {

std::vector<std::string> default_names(int n) {
    static const char* few[] = {"x", "y", "z", "w"};
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i)
        names.push_back(n <= 4 ? few[i] : "x" + std::to_string(i + 1));
    return names;
}

Term subset_sum(unsigned mask) {
    std::vector<std::pair<Rational, Term>> kids;
    for (int i = 0; mask >> i; ++i)
        if (mask & (1u << i)) kids.emplace_back(Rational(1), Term::var(i));
    return Term::sum(std::move(kids));
}

Term subset_product(unsigned mask) {
    std::vector<Term> kids;
    for (int i = 0; mask >> i; ++i)
        if (mask & (1u << i)) kids.push_back(Term::var(i));
    return Term::product(std::move(kids));
}

void push_dedup(Pattern& p, Term t, std::set<std::string>& seen) {
    std::string k = t.key();
    if (seen.insert(k).second) p.terms.push_back(std::move(t));
}

}  // namespace

Pattern sum_product_pattern(int n) {
    if (n < 1) throw std::invalid_argument("sum-product pattern needs n >= 1");
    Pattern p;
    p.name = "sum-product-" + std::to_string(n);
    p.arity = n;
    p.var_names = default_names(n);
    p.require_nonzero = true;
    std::set<std::string> seen;
    for (unsigned mask = 1; mask < (1u << n); ++mask) push_dedup(p, subset_sum(mask), seen);
    for (unsigned mask = 1; mask < (1u << n); ++mask) push_dedup(p, subset_product(mask), seen);
    return p;
}

namespace {

Pattern make_named(const std::string& name, int arity, std::vector<Term> terms,
                   std::vector<std::string> names) {
    Pattern p;
    p.name = name;
    p.arity = arity;
    p.var_names = std::move(names);
    std::set<std::string> seen;
    for (auto& t : terms) push_dedup(p, std::move(t), seen);
    return p;
}

Term lin(std::initializer_list<std::pair<Rational, Term>> kids) {
    return Term::sum(std::vector<std::pair<Rational, Term>>(kids));
}

std::optional<int> parse_suffix_int(const std::string& name, const std::string& prefix) {
    if (name.rfind(prefix, 0) != 0) return std::nullopt;
    std::string rest = name.substr(prefix.size());
    if (rest.empty() || rest.find_first_not_of("0123456789") != std::string::npos)
        return std::nullopt;
    int v = std::stoi(rest);
    return v >= 1 ? std::optional<int>(v) : std::nullopt;
}

}  // namespace

std::vector<std::string> pattern_catalog_names() {
    return {"schur",        "moreira",        "dx-d2",          "bowen-sabok-ext",
            "conj-6.2",     "conj-6.3",       "three-multiples", "folkman-<n>",
            "prod-folkman-<n>", "sum-product-<n>", "vdw-<L>"};
}

std::optional<Pattern> catalog_pattern(const std::string& name) {
    const Term X = Term::var(0), Y = Term::var(1);
    if (name == "schur")
        return make_named(name, 2, {X, Y, lin({{1, X}, {1, Y}})}, {"x", "y"});
    if (name == "moreira")
        return make_named(name, 2, {X, lin({{1, X}, {1, Y}}), Term::product({X, Y})}, {"x", "y"});
    if (name == "dx-d2") {
        // {DX, DX + D^2} with variables (D, X).
        Term DX = Term::product({X, Y});
        Term DXD2 = lin({{1, DX}, {1, Term::pow(0, 2)}});
        return make_named(name, 2, {DX, DXD2}, {"D", "X"});
    }
    if (name == "bowen-sabok-ext") {
        // {x, x+y, x+y^2, y, xy}
        return make_named(name, 2,
                          {X, lin({{1, X}, {1, Y}}), lin({{1, X}, {1, Term::pow(1, 2)}}), Y,
                           Term::product({X, Y})},
                          {"x", "y"});
    }
    if (name == "conj-6.2" || name == "conj-6.3") {
        Term invd = Term::inv_var(1);
        std::vector<Term> terms = {X, lin({{1, X}, {1, Y}}), lin({{1, X}, {1, invd}})};
        if (name == "conj-6.2") terms.push_back(lin({{1, X}, {1, Y}, {1, invd}}));
        Pattern p = make_named(name, 2, std::move(terms), {"x", "d"});
        p.invertible.assign(2, false);
        p.invertible[1] = true;
        return p;
    }
    if (name == "three-multiples") {
        // {b*c, b*c + c, b*c + 2c}: three consecutive multiples of c.
        Term BC = Term::product({X, Y});
        return make_named(name, 2,
                          {BC, lin({{1, BC}, {1, Y}}), lin({{1, BC}, {2, Y}})}, {"b", "c"});
    }
    if (auto n = parse_suffix_int(name, "folkman-")) {
        Pattern p;
        p.name = name;
        p.arity = *n;
        p.var_names = default_names(*n);
        std::set<std::string> seen;
        for (unsigned mask = 1; mask < (1u << *n); ++mask) push_dedup(p, subset_sum(mask), seen);
        return p;
    }
    if (auto n = parse_suffix_int(name, "prod-folkman-")) {
        Pattern p;
        p.name = name;
        p.arity = *n;
        p.var_names = default_names(*n);
        std::set<std::string> seen;
        for (unsigned mask = 1; mask < (1u << *n); ++mask) push_dedup(p, subset_product(mask), seen);
        return p;
    }
    if (auto n = parse_suffix_int(name, "sum-product-")) return sum_product_pattern(*n);
    if (auto L = parse_suffix_int(name, "vdw-")) {
        if (*L < 2) return std::nullopt;
        std::vector<Term> terms;
        for (int i = 0; i < *L; ++i)
            terms.push_back(i == 0 ? X : lin({{1, X}, {Rational(i), Y}}));
        return make_named(name, 2, std::move(terms), {"x", "d"});
    }
    return std::nullopt;
}

std::vector<Rational> instantiate(const Pattern& p, std::span<const Rational> a) {
    if (static_cast<int>(a.size()) != p.arity)
        throw std::invalid_argument("assignment length does not match pattern arity");
    if (p.require_nonzero)
        for (const auto& v : a)
            if (v.is_zero()) throw std::invalid_argument("assignment violates nonzero constraint");
    for (size_t i = 0; i < p.invertible.size(); ++i)
        if (p.invertible[i] && a[i].is_zero())
            throw std::invalid_argument("invertible variable assigned zero");
    if (p.require_distinct)
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = i + 1; j < a.size(); ++j)
                if (a[i] == a[j])
                    throw std::invalid_argument("assignment violates distinctness constraint");
    std::vector<Rational> out;
    out.reserve(p.terms.size());
    for (const auto& t : p.terms) out.push_back(t.eval(a));
    return out;
}

MonoResult is_monochromatic(const Coloring& c, const Pattern& p,
                            std::span<const Rational> assignment) {
    std::vector<Rational> values = instantiate(p, assignment);
    MonoResult r;
    r.color = c.color(values[0]);
    for (size_t i = 1; i < values.size(); ++i) {
        if (c.color(values[i]) != r.color) {
            r.monochromatic = false;
            r.mismatch_term = i;
            return r;
        }
    }
    r.monochromatic = true;
    return r;
}

void for_each_inrange_instantiation(const Pattern& p, long N,
                                    const std::function<void(const std::vector<long>&)>& fn) {
    if (N < 1) return;
    std::vector<Rational> assign(static_cast<size_t>(p.arity), Rational(1));
    std::vector<long> raw(static_cast<size_t>(p.arity), 1);
    std::vector<long> values;

    auto emit = [&]() {
        if (p.require_distinct) {
            for (size_t i = 0; i < raw.size(); ++i)
                for (size_t j = i + 1; j < raw.size(); ++j)
                    if (raw[i] == raw[j]) return;
        }
        values.clear();
        for (const auto& t : p.terms) {
            Rational v = t.eval(assign);
            if (!v.is_integer()) return;
            const mpz_class& z = v.numerator();
            if (z < 1 || z > N) return;
            values.push_back(z.get_si());
        }
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        fn(values);
    };

    // Odometer over [1..N]^arity, last variable fastest.
    while (true) {
        emit();
        int pos = p.arity - 1;
        while (pos >= 0) {
            if (++raw[static_cast<size_t>(pos)] <= N) {
                assign[static_cast<size_t>(pos)] = Rational(raw[static_cast<size_t>(pos)]);
                break;
            }
            raw[static_cast<size_t>(pos)] = 1;
            assign[static_cast<size_t>(pos)] = Rational(1);
            --pos;
        }
        if (pos < 0) break;
    }
}

json witness_to_json(const Witness& w) {
    json assignment = json::array();
    for (const auto& q : w.assignment) assignment.push_back(q.str());
    return json{{"kind", "witness"},
                {"pattern", w.pattern},
                {"coloring", w.coloring},
                {"assignment", assignment},
                {"color", w.color},
                {"engine", w.engine},
                {"budget", {{"examined", w.examined}, {"skipped", w.skipped}}},
                {"verified", true}};
}

Witness witness_from_json(const json& j) {
    Witness w;
    w.pattern = j.at("pattern").get<std::string>();
    w.coloring = j.at("coloring");
    for (const auto& s : j.at("assignment")) {
        auto q = Rational::parse(s.get<std::string>());
        if (!q) throw std::invalid_argument("bad rational in witness assignment");
        w.assignment.push_back(*q);
    }
    w.color = j.at("color").get<ColorId>();
    w.engine = j.value("engine", "");
    if (j.contains("budget")) {
        w.examined = j["budget"].value("examined", 0ULL);
        w.skipped = j["budget"].value("skipped", 0ULL);
    }
    return w;
}

VerifyOutcome verify_witness(const Witness& w) {
    auto p = catalog_pattern(w.pattern);
    if (!p) return {false, "unknown pattern " + w.pattern};
    Coloring c = Coloring::from_descriptor(w.coloring);
    try {
        std::vector<Rational> values = instantiate(*p, w.assignment);
        for (size_t i = 0; i < values.size(); ++i) {
            ColorId got = c.color(values[i]);
            if (got != w.color)
                return {false, "term " + p->term_str(i) + " = " + values[i].str() + " has color " +
                                   std::to_string(got) + ", recorded " + std::to_string(w.color)};
        }
    } catch (const std::exception& e) {
        return {false, e.what()};
    }
    return {true, ""};
}

}  // namespace prq
