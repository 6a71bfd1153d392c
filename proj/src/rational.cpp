#include "prq/rational.hpp"

#include <algorithm>
#include <numeric>

namespace prq {

std::optional<Rational> Rational::parse(const std::string& s) {
    if (s.empty()) return std::nullopt;
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            mpz_class n(s);
            return Rational(n);
        }
        std::string ns = s.substr(0, slash), ds = s.substr(slash + 1);
        if (ns.empty() || ds.empty()) return std::nullopt;
        mpz_class n(ns), d(ds);
        if (d == 0) return std::nullopt;
        return Rational(n, d);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

bool canonical_less(const Rational& a, const Rational& b) {
    mpz_class sa = a.size(), sb = b.size();
    if (sa != sb) return sa < sb;
    if (a.numerator() != b.numerator()) return a.numerator() < b.numerator();
    return a.denominator() < b.denominator();
}

namespace {

// All (num, den) with max(|num|, den) == s, gcd(|num|, den) == 1, den >= 1,
// filtered by mode, sorted by (num, den).
void size_block(long s, EnumMode mode, std::vector<std::pair<long, long>>& out) {
    out.clear();
    auto keep = [&](long num) {
        switch (mode) {
            case EnumMode::PositiveOnly: return num > 0;
            case EnumMode::FullNonzero: return num != 0;
            case EnumMode::WithZero: return true;
        }
        return false;
    };
    if (s == 1) {
        for (long num : {-1L, 0L, 1L})
            if (keep(num)) out.emplace_back(num, 1);
        std::sort(out.begin(), out.end());
        return;
    }
    for (long den = 1; den <= s; ++den) {
        if (std::gcd(s, den) != 1) continue;
        if (keep(s)) out.emplace_back(s, den);
        if (keep(-s)) out.emplace_back(-s, den);
    }
    for (long num = 1; num < s; ++num) {
        if (std::gcd(num, s) != 1) continue;
        if (keep(num)) out.emplace_back(num, s);
        if (keep(-num)) out.emplace_back(-num, s);
    }
    std::sort(out.begin(), out.end());
}

}  // namespace

void for_each_rational(long S, EnumMode mode, const std::function<bool(const Rational&)>& fn) {
    std::vector<std::pair<long, long>> block;
    for (long s = 1; s <= S; ++s) {
        size_block(s, mode, block);
        for (auto [num, den] : block)
            if (!fn(Rational(num, den))) return;
    }
}

std::vector<Rational> enumerate_rationals(long S, EnumMode mode) {
    std::vector<Rational> out;
    for_each_rational(S, mode, [&](const Rational& q) {
        out.push_back(q);
        return true;
    });
    return out;
}

}  // namespace prq
