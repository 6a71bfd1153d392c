#include "prq/coloring.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <mutex>

namespace prq {

using nlohmann::json;

const char* domain_name(Domain d) {
    switch (d) {
        case Domain::Naturals: return "N";
        case Domain::PositiveRationals: return "Q+";
        case Domain::NonzeroRationals: return "Q*";
    }
    return "?";
}

std::optional<Domain> domain_from_name(const std::string& s) {
    if (s == "N") return Domain::Naturals;
    if (s == "Q+") return Domain::PositiveRationals;
    if (s == "Q*") return Domain::NonzeroRationals;
    return std::nullopt;
}

bool domain_contains(Domain d, const Rational& q) {
    switch (d) {
        case Domain::Naturals: return q.is_integer() && q.is_positive();
        case Domain::PositiveRationals: return q.is_positive();
        case Domain::NonzeroRationals: return !q.is_zero();
    }
    return false;
}

class Coloring::Impl {
public:
    Impl(Domain d, long palette) : domain_(d), palette_(palette) {}
    virtual ~Impl() = default;
    virtual ColorId eval(const Rational& q) const = 0;
    virtual json descriptor() const = 0;
    Domain domain() const { return domain_; }
    long palette() const { return palette_; }

protected:
    Domain domain_;
    long palette_;
};

ColorId Coloring::color(const Rational& q) const {
    if (!domain_contains(impl_->domain(), q))
        throw domain_error(q.str() + " outside coloring domain " + domain_name(impl_->domain()));
    return impl_->eval(q);
}

std::optional<ColorId> Coloring::try_color(const Rational& q) const {
    if (!domain_contains(impl_->domain(), q)) return std::nullopt;
    return impl_->eval(q);
}

long Coloring::palette_size() const { return impl_->palette(); }
Domain Coloring::domain() const { return impl_->domain(); }
json Coloring::descriptor() const { return impl_->descriptor(); }

bool Coloring::same_descriptor(const Coloring& other) const {
    return descriptor() == other.descriptor();
}

std::uint64_t stable_rational_hash(std::uint64_t seed, const Rational& q) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](unsigned char byte) {
        h ^= byte;
        h *= 1099511628211ULL;
    };
    for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>((seed >> (8 * i)) & 0xff));
    for (char c : q.str()) mix(static_cast<unsigned char>(c));
    return h;
}

namespace {

class TableImpl : public Coloring::Impl {
public:
    TableImpl(std::map<std::string, ColorId> raw, ColorId fallback, Domain d, long palette_floor)
        : Impl(d, 0), fallback_(fallback) {
        long maxc = std::max<long>(fallback, palette_floor - 1);
        for (const auto& [key, col] : raw) {
            auto q = Rational::parse(key);
            if (!q) throw std::invalid_argument("bad rational key in table coloring: " + key);
            if (!domain_contains(d, *q))
                throw std::invalid_argument("table entry " + key + " outside domain");
            if (col < 0) throw std::invalid_argument("negative color id");
            entries_.emplace(q->str(), col);
            if (col > maxc) maxc = col;
        }
        palette_ = maxc + 1;
    }

    ColorId eval(const Rational& q) const override {
        auto it = entries_.find(q.str());
        return it == entries_.end() ? fallback_ : it->second;
    }

    json descriptor() const override {
        json e = json::object();
        for (const auto& [k, v] : entries_) e[k] = v;
        return json{{"kind", "table"},
                    {"domain", domain_name(domain_)},
                    {"palette", palette_},
                    {"default", fallback_},
                    {"entries", e}};
    }

private:
    std::map<std::string, ColorId> entries_;
    ColorId fallback_;
};

class ModResidueImpl : public Coloring::Impl {
public:
    ModResidueImpl(long m, Coloring::ModComponent comp, Domain d) : Impl(d, m), m_(m), comp_(comp) {
        if (m < 1) throw std::invalid_argument("modulus must be >= 1");
        if (comp == Coloring::ModComponent::Value && d != Domain::Naturals)
            throw std::invalid_argument("value-mod coloring needs domain N");
    }

    ColorId eval(const Rational& q) const override {
        mpz_class x;
        switch (comp_) {
            case Coloring::ModComponent::Value: x = q.numerator(); break;
            case Coloring::ModComponent::Numerator: x = q.numerator(); break;
            case Coloring::ModComponent::Denominator: x = q.denominator(); break;
        }
        mpz_class r = x % m_;
        if (r < 0) r += m_;
        return static_cast<ColorId>(r.get_si());
    }

    json descriptor() const override {
        const char* c = comp_ == Coloring::ModComponent::Value ? "value"
                        : comp_ == Coloring::ModComponent::Numerator ? "numerator"
                                                                     : "denominator";
        return json{{"kind", "mod-residue"},
                    {"domain", domain_name(domain_)},
                    {"modulus", m_},
                    {"component", c}};
    }

private:
    long m_;
    Coloring::ModComponent comp_;
};

// Strip all factors of 3 from z; returns the 3-free part.
mpz_class three_free_part(mpz_class z) {
    while (z != 0 && mpz_divisible_ui_p(z.get_mpz_t(), 3))
        mpz_divexact_ui(z.get_mpz_t(), z.get_mpz_t(), 3);
    return z;
}

class PadicSec6Impl : public Coloring::Impl {
public:
    explicit PadicSec6Impl(Domain d) : Impl(d, 2) {}

    ColorId eval(const Rational& q) const override {
        mpz_class a = three_free_part(q.numerator());
        mpz_class b = three_free_part(q.denominator());
        // unit class = a'*(b')^{-1} mod 3; inverses mod 3 are identity, so a'*b'.
        mpz_class u = (a * b) % 3;
        if (u < 0) u += 3;
        return u == 1 ? 0 : 1;  // 1 mod 3 -> red (0), 2 mod 3 -> blue (1)
    }

    json descriptor() const override {
        return json{{"kind", "padic-sec6"}, {"domain", domain_name(domain_)}};
    }
};

class SeededRandomImpl : public Coloring::Impl {
public:
    SeededRandomImpl(long palette, std::uint64_t seed, Domain d) : Impl(d, palette), seed_(seed) {
        if (palette < 1) throw std::invalid_argument("palette must be >= 1");
    }

    ColorId eval(const Rational& q) const override {
        return static_cast<ColorId>(stable_rational_hash(seed_, q) % static_cast<std::uint64_t>(palette_));
    }

    json descriptor() const override {
        return json{{"kind", "seeded-random"},
                    {"domain", domain_name(domain_)},
                    {"palette", palette_},
                    {"seed", seed_}};
    }

private:
    std::uint64_t seed_;
};

class ProductImpl : public Coloring::Impl {
public:
    ProductImpl(Coloring base, long M0) : Impl(base.domain(), 0), base_(std::move(base)), m0_(M0) {
        if (M0 < 1) throw std::invalid_argument("product coloring needs M0 >= 1");
        if (base_.domain() == Domain::Naturals)
            throw std::invalid_argument("product coloring needs a rational domain");
        ks_ = enumerate_rationals(M0, base_.domain() == Domain::PositiveRationals
                                          ? EnumMode::PositiveOnly
                                          : EnumMode::FullNonzero);
        // Reachable palette is interned; this is the r^(#K) upper bound, saturated.
        long double bound = 1;
        for (size_t i = 0; i < ks_.size(); ++i) {
            bound *= static_cast<long double>(base_.palette_size());
            if (bound > 1e18L) { bound = 1e18L; break; }
        }
        palette_ = static_cast<long>(bound);
    }

    ColorId eval(const Rational& q) const override {
        std::vector<ColorId> tuple;
        tuple.reserve(ks_.size());
        for (const auto& k : ks_) tuple.push_back(base_.color(k * q));
        std::lock_guard<std::mutex> lock(mu_);
        auto [it, inserted] = interned_.emplace(std::move(tuple), static_cast<ColorId>(interned_.size()));
        return it->second;
    }

    json descriptor() const override {
        return json{{"kind", "product"}, {"M0", m0_}, {"base", base_.descriptor()}};
    }

    const std::vector<Rational>& factors() const { return ks_; }

private:
    Coloring base_;
    long m0_;
    std::vector<Rational> ks_;
    mutable std::mutex mu_;
    mutable std::map<std::vector<ColorId>, ColorId> interned_;
};

class ComposedImpl : public Coloring::Impl {
public:
    ComposedImpl(Coloring base, Rational scale, Rational offset, Domain d)
        : Impl(d, base.palette_size()), base_(std::move(base)), scale_(std::move(scale)),
          offset_(std::move(offset)) {
        if (scale_.is_zero()) throw std::invalid_argument("composed coloring needs nonzero scale");
    }

    ColorId eval(const Rational& q) const override {
        Rational image = offset_ + scale_ * q;
        auto c = base_.try_color(image);
        if (!c)
            throw domain_error("composed image " + image.str() + " outside base domain");
        return *c;
    }

    json descriptor() const override {
        return json{{"kind", "composed"},
                    {"domain", domain_name(domain_)},
                    {"scale", scale_.str()},
                    {"offset", offset_.str()},
                    {"base", base_.descriptor()}};
    }

private:
    Coloring base_;
    Rational scale_, offset_;
};

}  // namespace

Coloring Coloring::constant(ColorId color, Domain d) {
    return table({}, color, d);
}

Coloring Coloring::table(std::map<std::string, ColorId> entries, ColorId fallback, Domain d,
                         long palette_floor) {
    return Coloring(std::make_shared<TableImpl>(std::move(entries), fallback, d, palette_floor));
}

Coloring Coloring::mod_residue(long modulus, ModComponent comp, Domain d) {
    return Coloring(std::make_shared<ModResidueImpl>(modulus, comp, d));
}

Coloring Coloring::padic_sec6(Domain d) {
    return Coloring(std::make_shared<PadicSec6Impl>(d));
}

Coloring Coloring::seeded_random(long palette, std::uint64_t seed, Domain d) {
    return Coloring(std::make_shared<SeededRandomImpl>(palette, seed, d));
}

Coloring Coloring::product(const Coloring& base, long M0) {
    return Coloring(std::make_shared<ProductImpl>(base, M0));
}

Coloring Coloring::composed(const Coloring& base, const Rational& scale, const Rational& offset,
                            Domain d) {
    return Coloring(std::make_shared<ComposedImpl>(base, scale, offset, d));
}

Coloring compose_affine(const Coloring& base, const Rational& d, const Rational& x) {
    if (d.is_zero()) throw std::invalid_argument("compose_affine needs d != 0");
    return Coloring::composed(base, d * d, d * x, Domain::Naturals);
}

Coloring Coloring::from_descriptor(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    auto dom = [&](const char* fallback = nullptr) {
        std::string name = j.contains("domain") ? j.at("domain").get<std::string>()
                                                : std::string(fallback ? fallback : "N");
        auto d = domain_from_name(name);
        if (!d) throw std::invalid_argument("unknown domain " + name);
        return *d;
    };
    if (kind == "table") {
        std::map<std::string, ColorId> entries;
        for (const auto& [k, v] : j.at("entries").items()) entries[k] = v.get<ColorId>();
        return table(std::move(entries), j.at("default").get<ColorId>(), dom(),
                     j.value("palette", 0L));
    }
    if (kind == "mod-residue") {
        std::string comp = j.value("component", "value");
        ModComponent c = comp == "numerator" ? ModComponent::Numerator
                         : comp == "denominator" ? ModComponent::Denominator
                                                 : ModComponent::Value;
        return mod_residue(j.at("modulus").get<long>(), c, dom());
    }
    if (kind == "padic-sec6") return padic_sec6(dom());
    if (kind == "seeded-random")
        return seeded_random(j.at("palette").get<long>(), j.at("seed").get<std::uint64_t>(), dom());
    if (kind == "product")
        return product(from_descriptor(j.at("base")), j.at("M0").get<long>());
    if (kind == "composed") {
        auto scale = Rational::parse(j.at("scale").get<std::string>());
        auto offset = Rational::parse(j.at("offset").get<std::string>());
        if (!scale || !offset) throw std::invalid_argument("bad composed scale/offset");
        return composed(from_descriptor(j.at("base")), *scale, *offset, dom());
    }
    throw std::invalid_argument("unknown coloring kind " + kind);
}

std::vector<std::string> coloring_catalog_names() {
    return {"constant",  "parity",     "mod3",    "padic-sec6", "padic-sec6-q",
            "nummod2",   "nummod3",    "rand2",   "rand3",      "rand2-n"};
}

std::optional<Coloring> catalog_coloring(const std::string& name) {
    if (name == "constant") return Coloring::constant(0, Domain::PositiveRationals);
    if (name == "parity") return Coloring::mod_residue(2, Coloring::ModComponent::Value, Domain::Naturals);
    if (name == "mod3") return Coloring::mod_residue(3, Coloring::ModComponent::Value, Domain::Naturals);
    if (name == "padic-sec6") return Coloring::padic_sec6(Domain::Naturals);
    if (name == "padic-sec6-q") return Coloring::padic_sec6(Domain::PositiveRationals);
    if (name == "nummod2")
        return Coloring::mod_residue(2, Coloring::ModComponent::Numerator, Domain::PositiveRationals);
    if (name == "nummod3")
        return Coloring::mod_residue(3, Coloring::ModComponent::Numerator, Domain::PositiveRationals);
    if (name == "rand2") return Coloring::seeded_random(2, 1, Domain::PositiveRationals);
    if (name == "rand3") return Coloring::seeded_random(3, 1, Domain::PositiveRationals);
    if (name == "rand2-n") return Coloring::seeded_random(2, 1, Domain::Naturals);
    return std::nullopt;
}

}  // namespace prq
