#pragma once

// Exact rational arithmetic on top of GMP, plus the size function
// s(a/b) = max(|a|, b) and canonical bounded-size enumeration.
//
// Invariants: gcd(|num|, den) = 1, den >= 1, zero is 0/1 (so s(0) = 1).
// Canonical enumeration order is ascending (size, numerator, denominator);
// "first witness found" everywhere in this project means first in that order.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace prq {

class domain_error : public std::runtime_error {
public:
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

class Rational {
public:
    Rational() : q_(0) {}
    Rational(long n) : q_(n) {}  // NOLINT: implicit integer promotion is intended
    Rational(const mpz_class& n) : q_(n) {}
    Rational(long n, long d) { init(mpz_class(n), mpz_class(d)); }
    Rational(const mpz_class& n, const mpz_class& d) { init(n, d); }

    const mpz_class& numerator() const { return q_.get_num(); }
    const mpz_class& denominator() const { return q_.get_den(); }

    bool is_zero() const { return sgn(q_) == 0; }
    bool is_positive() const { return sgn(q_) > 0; }
    bool is_negative() const { return sgn(q_) < 0; }
    bool is_integer() const { return q_.get_den() == 1; }

    // s(a/b) = max(|a|, b); s(0) = 1 via the 0/1 form.
    mpz_class size() const {
        mpz_class na = abs(q_.get_num());
        if (na == 0) return 1;
        return na >= q_.get_den() ? na : mpz_class(q_.get_den());
    }
    bool size_at_most(long bound) const { return size() <= bound; }

    Rational reciprocal() const {
        if (is_zero()) throw domain_error("reciprocal of zero");
        return Rational(mpq_class(1) / q_);
    }

    Rational operator-() const { return Rational(mpq_class(-q_)); }
    Rational operator+(const Rational& o) const { return Rational(mpq_class(q_ + o.q_)); }
    Rational operator-(const Rational& o) const { return Rational(mpq_class(q_ - o.q_)); }
    Rational operator*(const Rational& o) const { return Rational(mpq_class(q_ * o.q_)); }
    Rational operator/(const Rational& o) const {
        if (o.is_zero()) throw domain_error("division by zero");
        return Rational(mpq_class(q_ / o.q_));
    }
    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }

    bool operator==(const Rational& o) const { return q_ == o.q_; }
    bool operator!=(const Rational& o) const { return q_ != o.q_; }
    bool operator<(const Rational& o) const { return q_ < o.q_; }
    bool operator<=(const Rational& o) const { return q_ <= o.q_; }
    bool operator>(const Rational& o) const { return q_ > o.q_; }
    bool operator>=(const Rational& o) const { return q_ >= o.q_; }

    // Serialized form used in all JSON output: "a/b", "/b" omitted when b = 1.
    std::string str() const { return q_.get_str(); }

    static std::optional<Rational> parse(const std::string& s);

private:
    explicit Rational(const mpq_class& q) : q_(q) {}
    void init(const mpz_class& n, const mpz_class& d) {
        if (d == 0) throw domain_error("zero denominator");
        q_ = mpq_class(n, d);
        q_.canonicalize();
    }
    mpq_class q_;
};

// The reduce operation: a/b in canonical reduced form, positive denominator.
inline Rational reduce(const mpz_class& a, const mpz_class& b) { return Rational(a, b); }
inline Rational reduce(long a, long b) { return Rational(a, b); }

inline mpz_class size(const Rational& q) { return q.size(); }

inline Rational abs(const Rational& q) { return q.is_negative() ? -q : q; }

// Canonical order: ascending (size, numerator, denominator).
bool canonical_less(const Rational& a, const Rational& b);

enum class EnumMode { PositiveOnly, FullNonzero, WithZero };

// All rationals with size <= S in the mode's domain, each exactly once,
// in canonical order. |positive-only| = 2*sum_{k<=S} phi(k) - 1.
std::vector<Rational> enumerate_rationals(long S, EnumMode mode);

// Streaming variant; fn returning false stops early.
void for_each_rational(long S, EnumMode mode, const std::function<bool(const Rational&)>& fn);

}  // namespace prq
