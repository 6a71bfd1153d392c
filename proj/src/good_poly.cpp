#include "prq/good_poly.hpp"

#include <sstream>

namespace prq {

std::string GoodPolynomial::str() const {
    std::ostringstream os;
    os << "(" << coeffs_[0].str();
    if (arity() > 0) {
        os << ";";
        for (int i = 1; i <= arity(); ++i) os << " " << coeffs_[static_cast<size_t>(i)].str();
    }
    os << ")";
    return os.str();
}

void for_each_good_poly(long M, int arity, CoeffMode mode,
                        const std::function<bool(const GoodPolynomial&)>& fn) {
    if (M < 1) throw std::invalid_argument("size bound must be >= 1");
    if (arity < 0) throw std::invalid_argument("arity must be >= 0");
    const auto leading = enumerate_rationals(
        M, mode == CoeffMode::Positive ? EnumMode::PositiveOnly : EnumMode::FullNonzero);
    std::vector<Rational> rest;
    if (mode == CoeffMode::Positive) {
        rest.push_back(Rational(0));  // 0 sorts first within size 1
        for (const auto& q : leading) rest.push_back(q);
    } else {
        rest = enumerate_rationals(M, EnumMode::WithZero);
    }

    std::vector<Rational> coeffs(static_cast<size_t>(arity) + 1);
    std::vector<size_t> odo(static_cast<size_t>(arity), 0);
    for (const auto& c0 : leading) {
        coeffs[0] = c0;
        std::fill(odo.begin(), odo.end(), 0);
        while (true) {
            for (int i = 0; i < arity; ++i)
                coeffs[static_cast<size_t>(i) + 1] = rest[odo[static_cast<size_t>(i)]];
            if (!fn(GoodPolynomial(coeffs))) return;
            int pos = arity - 1;
            while (pos >= 0) {
                if (++odo[static_cast<size_t>(pos)] < rest.size()) break;
                odo[static_cast<size_t>(pos)] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
    }
}

std::vector<GoodPolynomial> enumerate_good_polys(long M, int arity, CoeffMode mode) {
    std::vector<GoodPolynomial> out;
    for_each_good_poly(M, arity, mode, [&](const GoodPolynomial& p) {
        out.push_back(p);
        return true;
    });
    return out;
}

}  // namespace prq
