#pragma once

// Finitely described colorings of N, Q+ and Q\{0}. Every coloring is a pure
// function from its domain to [0, palette_size); descriptors round-trip
// through JSON so a coloring is reconstructible from its serialized form.
//
// Product colorings intern color tuples lazily: the reachable palette is tiny
// compared to r^(#K), so dense ids are assigned on first sight. Interned ids
// are stable within an instance for a fixed query order; tuple equality (and
// hence monochromaticity) does not depend on interning order.

#include "prq/rational.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace prq {

using ColorId = int;

enum class Domain { Naturals, PositiveRationals, NonzeroRationals };

const char* domain_name(Domain d);
std::optional<Domain> domain_from_name(const std::string& s);
bool domain_contains(Domain d, const Rational& q);

class Coloring {
public:
    class Impl;

    ColorId color(const Rational& q) const;                 // throws domain_error outside the domain
    std::optional<ColorId> try_color(const Rational& q) const;
    long palette_size() const;
    Domain domain() const;
    nlohmann::json descriptor() const;

    static Coloring from_descriptor(const nlohmann::json& j);

    // Constructions.
    static Coloring constant(ColorId color, Domain d);
    // palette_floor raises the reported palette above the colors actually used
    // (a decoded k-coloring keeps palette k even when a class is empty).
    static Coloring table(std::map<std::string, ColorId> entries, ColorId fallback, Domain d,
                          long palette_floor = 0);
    enum class ModComponent { Value, Numerator, Denominator };
    static Coloring mod_residue(long modulus, ModComponent comp, Domain d);
    // n = 3^x * y with 3 not dividing y, colored by y mod 3 (1 -> 0, 2 -> 1).
    // On rational domains y is the 3-adic unit part a'/b' and the class is
    // a'*b' mod 3 (the natural extension; restriction to N is the same rule).
    static Coloring padic_sec6(Domain d = Domain::Naturals);
    static Coloring seeded_random(long palette, std::uint64_t seed, Domain d);
    // chi2(x) = tuple of base(K*x) over all K != 0 with s(K) <= M0 (K > 0 when
    // the base domain is Q+), interned to dense ids.
    static Coloring product(const Coloring& base, long M0);
    // g(C) = base(offset + scale * C); compose_affine below builds the variant
    // the DX step needs, scaling by k is the offset-0 case.
    static Coloring composed(const Coloring& base, const Rational& scale, const Rational& offset,
                             Domain d);

    // Equality of descriptors (structural identity of the description).
    bool same_descriptor(const Coloring& other) const;

private:
    explicit Coloring(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

// g(C) = base(d*x + C*d^2), the coloring of the integers used by the DX step.
Coloring compose_affine(const Coloring& base, const Rational& d, const Rational& x);

// Stable hash used by seeded-random colorings: FNV-1a 64 over the 8 seed
// bytes (little-endian) followed by the canonical "a/b" string.
std::uint64_t stable_rational_hash(std::uint64_t seed, const Rational& q);

// Named colorings exposed on the CLI and used by the test suites.
std::vector<std::string> coloring_catalog_names();
std::optional<Coloring> catalog_coloring(const std::string& name);

}  // namespace prq
