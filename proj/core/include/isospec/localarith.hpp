#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "isospec/error.hpp"

namespace isospec {

using Integer = mpz_class;
using Rat = mpq_class;

/// A place of Q: a rational prime, or the archimedean place.
class Place {
public:
    constexpr Place() = default;
    static constexpr Place infinity() { return Place(); }
    static Place prime(std::int64_t p);

    constexpr bool is_infinite() const { return p_ == 0; }
    constexpr std::int64_t p() const { return p_; }
    std::string to_string() const;

    friend constexpr bool operator==(Place, Place) = default;
    friend constexpr auto operator<=>(Place a, Place b) {
        // infinity sorts first
        return a.p_ <=> b.p_;
    }

private:
    constexpr explicit Place(std::int64_t p) : p_(p) {}
    std::int64_t p_ = 0;
};

// ---------------------------------------------------------------------------
// Elementary integer helpers.

bool is_prime(std::int64_t n);
/// Prime factorisation by trial division, ascending primes.
std::vector<std::pair<std::int64_t, int>> factorize(const Integer& n);
std::vector<std::int64_t> prime_divisors(const Integer& n);
/// Squarefree part of a nonzero integer, sign preserved.
Integer squarefree_part(const Integer& n);

std::int64_t ipow(std::int64_t base, int exp);
std::int64_t mod(std::int64_t a, std::int64_t m);
std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t m);
std::int64_t powmod(std::int64_t a, std::int64_t e, std::int64_t m);
/// Inverse of a modulo m; throws ArithmeticError when gcd(a, m) != 1.
std::int64_t invmod(std::int64_t a, std::int64_t m);
/// Legendre symbol (a|p) for odd prime p, in {-1, 0, 1}.
int legendre(const Integer& a, std::int64_t p);
/// Least positive quadratic nonresidue modulo an odd prime.
std::int64_t least_nonresidue(std::int64_t p);
/// Square root of a unit square w modulo p^k (p odd, or p = 2 with w = 1 mod 8).
std::int64_t sqrt_mod_prime_power(std::int64_t w, std::int64_t p, int k);
/// Image of a p-integral rational in Z/p^k.  Throws when p divides the denominator.
std::int64_t rat_mod(const Rat& x, std::int64_t p, int k);
/// Largest k with p^k <= 2^62.
int max_precision(std::int64_t p);

// ---------------------------------------------------------------------------

/// v_p(x).  Throws ArithmeticError("valuation of zero") for x = 0.
int valuation(const Rat& x, std::int64_t p);
int valuation(const Integer& x, std::int64_t p);

/// Element of Q_v^x / (Q_v^x)^2 stored by its canonical representative:
///   odd p:  {1, u, p, u p} with u the least positive nonresidue mod p
///   p = 2:  {1, -1, 5, -5, 2, -2, 10, -10}
///   oo:     {1, -1}
struct SquareClass {
    Place place;
    std::int64_t rep = 1;

    bool is_trivial() const { return rep == 1; }
    /// Coordinates in the F2-vector space Q_v^x / squares.
    ///   odd p: bit0 = unit nonsquare, bit1 = odd valuation
    ///   p = 2: bit0 = odd valuation, bit1 = -1 component, bit2 = 5 component
    ///   oo:    bit0 = negative
    std::uint32_t bits() const;
    static SquareClass from_bits(Place place, std::uint32_t bits);

    friend bool operator==(const SquareClass&, const SquareClass&) = default;
};

/// Dimension of Q_v^x / squares over F2 (2, 3 or 1).
int square_class_rank(Place place);
SquareClass square_class(const Rat& x, Place place);
std::vector<SquareClass> square_class_group(Place place);
SquareClass operator*(const SquareClass& a, const SquareClass& b);

/// Hilbert symbol (a, b)_v computed from the closed-form unit/valuation formulas.
int hilbert_symbol(const Rat& a, const Rat& b, Place place);

/// Places that can carry a nontrivial symbol for (a, b): oo and primes dividing 2ab.
std::vector<Place> candidate_places(const Rat& a, const Rat& b);

}  // namespace isospec
