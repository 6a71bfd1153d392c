#pragma once

// Good polynomials: rational linear combinations c0*x0 + c1*x1 + ... + cn*xn
// with c0 != 0. P(x0) denotes P(x0, 0, ..., 0) = c0*x0. The size of P is the
// maximum coefficient size. CoeffMode::Positive restricts to nonnegative
// coefficients (positive c0), the variant used over Q+.

#include "prq/rational.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace prq {

class GoodPolynomial {
public:
    explicit GoodPolynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) throw std::invalid_argument("good polynomial needs a leading coefficient");
        if (coeffs_[0].is_zero()) throw std::invalid_argument("leading coefficient must be nonzero");
    }

    int arity() const { return static_cast<int>(coeffs_.size()) - 1; }
    const Rational& leading() const { return coeffs_[0]; }
    const Rational& coeff(int i) const { return coeffs_.at(static_cast<size_t>(i)); }
    const std::vector<Rational>& coeffs() const { return coeffs_; }

    mpz_class size() const {
        mpz_class m = 1;
        for (const auto& c : coeffs_) {
            mpz_class s = c.size();
            if (s > m) m = s;
        }
        return m;
    }

    // c0*x0 + sum_i c_i * args[i-1]; args must supply every non-leading slot.
    Rational eval(const Rational& x0, std::span<const Rational> args) const {
        if (static_cast<int>(args.size()) != arity())
            throw std::invalid_argument("good polynomial arity mismatch");
        Rational acc = coeffs_[0] * x0;
        for (size_t i = 1; i < coeffs_.size(); ++i) {
            if (coeffs_[i].is_zero()) continue;
            acc += coeffs_[i] * args[i - 1];
        }
        return acc;
    }

    // P(x0) = c0*x0.
    Rational eval_leading(const Rational& x0) const { return coeffs_[0] * x0; }

    std::string str() const;

private:
    std::vector<Rational> coeffs_;
};

enum class CoeffMode { Full, Positive };

// Every good polynomial of the given arity with size <= M, each once.
// c0 ranges over nonzero (Full) or positive (Positive) rationals of size <= M;
// the other coefficients additionally include 0. Order: lexicographic in the
// coefficient vector under the canonical rational order, c0 outermost.
// fn returning false stops the enumeration.
void for_each_good_poly(long M, int arity, CoeffMode mode,
                        const std::function<bool(const GoodPolynomial&)>& fn);

std::vector<GoodPolynomial> enumerate_good_polys(long M, int arity, CoeffMode mode);

}  // namespace prq
