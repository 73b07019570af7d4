#include "isospec/localarith.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

namespace isospec {

Place Place::prime(std::int64_t p) {
    if (p < 2) throw ArithmeticError("not a prime: " + std::to_string(p));
    return Place(p);
}

std::string Place::to_string() const { return is_infinite() ? "inf" : std::to_string(p_); }

bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::vector<std::pair<std::int64_t, int>> factorize(const Integer& n) {
    std::vector<std::pair<std::int64_t, int>> out;
    Integer m = abs(n);
    if (m == 0) throw ArithmeticError("factorisation of zero");
    for (std::int64_t d = 2; Integer(d) * d <= m; d += (d == 2 ? 1 : 2)) {
        int e = 0;
        while (mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(d))) {
            m /= d;
            ++e;
        }
        if (e > 0) out.emplace_back(d, e);
    }
    if (m > 1) {
        if (!m.fits_slong_p()) throw UnsupportedError("prime factor too large for desk-scale arithmetic");
        out.emplace_back(m.get_si(), 1);
    }
    return out;
}

std::vector<std::int64_t> prime_divisors(const Integer& n) {
    std::vector<std::int64_t> out;
    for (auto [p, e] : factorize(n)) out.push_back(p);
    return out;
}

Integer squarefree_part(const Integer& n) {
    Integer out = sgn(n) < 0 ? -1 : 1;
    for (auto [p, e] : factorize(n))
        if (e % 2 == 1) out *= p;
    return out;
}

std::int64_t ipow(std::int64_t base, int exp) {
    std::int64_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

std::int64_t mod(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t m) {
    auto r = static_cast<std::int64_t>((static_cast<__int128>(a) * b) % m);
    return r < 0 ? r + m : r;
}

std::int64_t powmod(std::int64_t a, std::int64_t e, std::int64_t m) {
    std::int64_t r = 1 % m;
    a = mod(a, m);
    while (e > 0) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

std::int64_t invmod(std::int64_t a, std::int64_t m) {
    std::int64_t g = m, x = 0, r = mod(a, m), y = 1;
    while (r != 0) {
        std::int64_t q = g / r;
        std::int64_t t = g - q * r;
        g = r;
        r = t;
        t = x - q * y;
        x = y;
        y = t;
    }
    if (g != 1) throw ArithmeticError("not invertible modulo " + std::to_string(m));
    return mod(x, m);
}

int legendre(const Integer& a, std::int64_t p) {
    Integer pp(static_cast<long>(p));
    return mpz_legendre(Integer(a % pp).get_mpz_t(), pp.get_mpz_t());
}

std::int64_t least_nonresidue(std::int64_t p) {
    for (std::int64_t u = 2; u < p; ++u)
        if (legendre(Integer(static_cast<long>(u)), p) == -1) return u;
    throw ArithmeticError("no nonresidue modulo " + std::to_string(p));
}

namespace {

std::int64_t tonelli(std::int64_t w, std::int64_t p) {
    w = mod(w, p);
    if (w == 0) return 0;
    if (p % 4 == 3) return powmod(w, (p + 1) / 4, p);
    std::int64_t q = p - 1;
    int s = 0;
    while (q % 2 == 0) {
        q /= 2;
        ++s;
    }
    std::int64_t z = least_nonresidue(p);
    std::int64_t m = s, c = powmod(z, q, p), t = powmod(w, q, p), r = powmod(w, (q + 1) / 2, p);
    while (t != 1) {
        std::int64_t i = 0, tt = t;
        while (tt != 1) {
            tt = mulmod(tt, tt, p);
            ++i;
        }
        std::int64_t b = c;
        for (std::int64_t j = 0; j < m - i - 1; ++j) b = mulmod(b, b, p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    return r;
}

}  // namespace

std::int64_t sqrt_mod_prime_power(std::int64_t w, std::int64_t p, int k) {
    const std::int64_t pk = ipow(p, k);
    w = mod(w, pk);
    if (p == 2) {
        if (k <= 3) {
            for (std::int64_t x = 1; x < pk; x += 2)
                if (mulmod(x, x, pk) == w) return x;
            throw ArithmeticError("not a 2-adic square");
        }
        if (w % 8 != 1) throw ArithmeticError("not a 2-adic square");
        // x^2 = w mod 2^j  =>  x or x + 2^(j-1) works mod 2^(j+1)
        std::int64_t x = 1;
        for (int j = 3; j < k; ++j) {
            std::int64_t m = ipow(2, j + 1);
            if (mulmod(x, x, m) != mod(w, m)) x += ipow(2, j - 1);
        }
        return mod(x, pk);
    }
    if (legendre(Integer(static_cast<long>(w % p)), p) != 1) throw ArithmeticError("not a square unit modulo p");
    std::int64_t x = tonelli(w, p);
    x = std::min(x, p - x);  // canonical: the smaller root mod p
    std::int64_t m = p;
    for (int j = 1; j < k; ++j) {
        m *= p;
        // Newton step: x <- x - (x^2 - w) / (2x)
        std::int64_t f = mod(mulmod(x, x, m) - mod(w, m), m);
        x = mod(x - mulmod(f, invmod(mod(2 * x, m), m), m), m);
    }
    return x;
}

std::int64_t rat_mod(const Rat& x, std::int64_t p, int k) {
    const std::int64_t pk = ipow(p, k);
    Integer m(static_cast<long>(pk));
    Integer num = x.get_num() % m;
    Integer den = x.get_den() % m;
    if (mpz_divisible_ui_p(x.get_den().get_mpz_t(), static_cast<unsigned long>(p)))
        throw ArithmeticError("rational is not " + std::to_string(p) + "-integral");
    std::int64_t n = mod(num.get_si(), pk);
    std::int64_t d = mod(den.get_si(), pk);
    return mulmod(n, invmod(d, pk), pk);
}

int max_precision(std::int64_t p) {
    int k = 0;
    __int128 v = 1;
    while (v * p <= (static_cast<__int128>(1) << 62)) {
        v *= p;
        ++k;
    }
    return k;
}

int valuation(const Integer& x, std::int64_t p) {
    if (x == 0) throw ArithmeticError("valuation of zero");
    Integer m = abs(x);
    int v = 0;
    while (mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(p))) {
        m /= p;
        ++v;
    }
    return v;
}

int valuation(const Rat& x, std::int64_t p) {
    if (x == 0) throw ArithmeticError("valuation of zero");
    return valuation(Integer(x.get_num()), p) - valuation(Integer(x.get_den()), p);
}

// ---------------------------------------------------------------------------

int square_class_rank(Place place) {
    if (place.is_infinite()) return 1;
    return place.p() == 2 ? 3 : 2;
}

namespace {

// Unit part u of x = p^v u, as an integer num*den (same class since den^2 is a square).
Integer unit_part_product(const Rat& x, std::int64_t p, int v) {
    Integer num = x.get_num(), den = x.get_den();
    if (v > 0)
        for (int i = 0; i < v; ++i) num /= p;
    else
        for (int i = 0; i < -v; ++i) den /= p;
    return num * den;
}

}  // namespace

SquareClass square_class(const Rat& x, Place place) {
    if (x == 0) throw ArithmeticError("square class of zero");
    if (place.is_infinite()) return {place, sgn(x) < 0 ? -1 : 1};
    const std::int64_t p = place.p();
    const int v = valuation(x, p);
    const Integer u = unit_part_product(x, p, v);
    std::uint32_t bits = 0;
    if (p == 2) {
        const long r = mpz_fdiv_ui(u.get_mpz_t(), 8);
        if (v % 2 != 0) bits |= 1u;
        if (r == 3 || r == 7) bits |= 2u;  // -1 component
        if (r == 3 || r == 5) bits |= 4u;  // 5 component
    } else {
        if (legendre(u, p) == -1) bits |= 1u;
        if (v % 2 != 0) bits |= 2u;
    }
    return SquareClass::from_bits(place, bits);
}

std::uint32_t SquareClass::bits() const {
    if (place.is_infinite()) return rep < 0 ? 1u : 0u;
    const std::int64_t p = place.p();
    std::uint32_t b = 0;
    std::int64_t r = rep;
    if (p == 2) {
        if (r % 2 == 0) {
            b |= 1u;
            r /= 2;
        }
        if (r < 0) b |= 2u;
        if (r == 5 || r == -5) b |= 4u;
    } else {
        if (r % p == 0) {
            b |= 2u;
            r /= p;
        }
        if (r != 1) b |= 1u;
    }
    return b;
}

SquareClass SquareClass::from_bits(Place place, std::uint32_t bits) {
    if (place.is_infinite()) return {place, (bits & 1u) ? -1 : 1};
    const std::int64_t p = place.p();
    std::int64_t rep = 1;
    if (p == 2) {
        if (bits & 4u) rep *= 5;
        if (bits & 2u) rep = -rep;
        if (bits & 1u) rep *= 2;
    } else {
        if (bits & 1u) rep *= least_nonresidue(p);
        if (bits & 2u) rep *= p;
    }
    return {place, rep};
}

std::vector<SquareClass> square_class_group(Place place) {
    std::vector<SquareClass> out;
    const int r = square_class_rank(place);
    for (std::uint32_t b = 0; b < (1u << r); ++b) out.push_back(SquareClass::from_bits(place, b));
    return out;
}

SquareClass operator*(const SquareClass& a, const SquareClass& b) {
    if (a.place != b.place) throw ArithmeticError("square classes at different places");
    return SquareClass::from_bits(a.place, a.bits() ^ b.bits());
}

int hilbert_symbol(const Rat& a, const Rat& b, Place place) {
    if (a == 0 || b == 0) throw ArithmeticError("Hilbert symbol of zero");
    if (place.is_infinite()) return (sgn(a) < 0 && sgn(b) < 0) ? -1 : 1;
    const std::int64_t p = place.p();
    const int alpha = valuation(a, p), beta = valuation(b, p);
    const Integer u = unit_part_product(a, p, alpha);
    const Integer w = unit_part_product(b, p, beta);
    if (p == 2) {
        const long u8 = mpz_fdiv_ui(u.get_mpz_t(), 8), w8 = mpz_fdiv_ui(w.get_mpz_t(), 8);
        const auto eps = [](long r) { return ((r - 1) / 2) % 2; };
        const auto omega = [](long r) { return ((r * r - 1) / 8) % 2; };
        const long e = eps(u8) * eps(w8) + alpha * omega(w8) + beta * omega(u8);
        return (e % 2 == 0) ? 1 : -1;
    }
    int sign = 1;
    if ((static_cast<long>(alpha) * beta) % 2 != 0 && ((p - 1) / 2) % 2 != 0) sign = -sign;
    if (beta % 2 != 0) sign *= legendre(u, p);
    if (alpha % 2 != 0) sign *= legendre(w, p);
    return sign;
}

std::vector<Place> candidate_places(const Rat& a, const Rat& b) {
    Integer n = 2 * a.get_num() * a.get_den() * b.get_num() * b.get_den();
    std::vector<Place> out{Place::infinity()};
    for (auto p : prime_divisors(n)) out.push_back(Place::prime(p));
    return out;
}

}  // namespace isospec
