#include "isospec/orders.hpp"

#include <algorithm>
#include <sstream>

namespace isospec {

namespace {

std::string algebraic(const QuatElement& x) {
    static const char* names[4] = {"1", "i", "j", "ij"};
    Integer d = 1;
    for (const auto& c : x.x) d = lcm(d, Integer(c.get_den()));
    std::ostringstream os;
    int terms = 0;
    for (std::size_t k = 0; k < 4; ++k) {
        Integer n = x.x[k].get_num() * (d / x.x[k].get_den());
        if (n == 0) continue;
        if (sgn(n) < 0) os << "-";
        else if (terms > 0) os << "+";
        Integer an = abs(n);
        if (k == 0) os << an.get_str();
        else {
            if (an != 1) os << an.get_str();
            os << names[k];
        }
        ++terms;
    }
    if (terms == 0) return "0";
    if (d == 1) return os.str();
    if (terms == 1) return os.str() + "/" + d.get_str();
    return "(" + os.str() + ")/" + d.get_str();
}

bool is_integral_rat(const Rat& r) { return r.get_den() == 1; }

Integer det4(std::array<std::array<Integer, 4>, 4> m) {
    // Bareiss fraction-free elimination
    Integer sign = 1, prev = 1;
    for (std::size_t k = 0; k < 3; ++k) {
        if (m[k][k] == 0) {
            std::size_t r = k + 1;
            while (r < 4 && m[r][k] == 0) ++r;
            if (r == 4) return 0;
            std::swap(m[k], m[r]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < 4; ++i)
            for (std::size_t j = k + 1; j < 4; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        prev = m[k][k];
    }
    return sign * m[3][3];
}

// Ring generated by a full-rank lattice; nullopt as soon as a non-integral element shows up.
std::optional<std::array<QuatElement, 4>> ring_closure(const QuaternionAlgebra& D, std::vector<QuatElement> gens) {
    auto basis = hermite_basis(gens);
    for (int round = 0; round < 64; ++round) {
        for (const auto& e : basis)
            if (!is_integral_rat(D.trd(e)) || !is_integral_rat(D.nrd(e))) return std::nullopt;
        std::vector<QuatElement> next(basis.begin(), basis.end());
        next.push_back(QuatElement::scalar(1));
        for (const auto& x : basis)
            for (const auto& y : basis) {
                auto z = D.mul(x, y);
                if (!is_integral_rat(D.trd(z)) || !is_integral_rat(D.nrd(z))) return std::nullopt;
                next.push_back(z);
            }
        auto nb = hermite_basis(next);
        if (nb == basis) return basis;
        basis = nb;
    }
    return std::nullopt;
}

}  // namespace

std::array<QuatElement, 4> hermite_basis(std::span<const QuatElement> gens) {
    Integer d = 1;
    for (const auto& g : gens)
        for (const auto& c : g.x) d = lcm(d, Integer(c.get_den()));
    std::vector<std::array<Integer, 4>> rows;
    for (const auto& g : gens) {
        std::array<Integer, 4> r;
        for (std::size_t k = 0; k < 4; ++k) r[k] = g.x[k].get_num() * (d / g.x[k].get_den());
        rows.push_back(r);
    }
    std::array<std::array<Integer, 4>, 4> h;
    for (int col = 3; col >= 0; --col) {
        const auto c = static_cast<std::size_t>(col);
        // gcd-combine column c into a single row
        for (;;) {
            std::size_t best = rows.size();
            for (std::size_t r = 0; r < rows.size(); ++r)
                if (rows[r][c] != 0 && (best == rows.size() || abs(rows[r][c]) < abs(rows[best][c]))) best = r;
            if (best == rows.size()) throw ArithmeticError("lattice is not of full rank");
            bool done = true;
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (r == best || rows[r][c] == 0) continue;
                Integer q;
                mpz_fdiv_q(q.get_mpz_t(), rows[r][c].get_mpz_t(), rows[best][c].get_mpz_t());
                for (std::size_t k = 0; k < 4; ++k) rows[r][k] -= q * rows[best][k];
                if (rows[r][c] != 0) done = false;
            }
            if (done) {
                auto piv = rows[best];
                if (sgn(piv[c]) < 0)
                    for (auto& v : piv) v = -v;
                h[c] = piv;
                rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(best));
                break;
            }
        }
    }
    for (std::size_t t = 1; t < 4; ++t)
        for (std::size_t c = t; c-- > 0;) {
            Integer q;
            mpz_fdiv_q(q.get_mpz_t(), h[t][c].get_mpz_t(), h[c][c].get_mpz_t());
            for (std::size_t k = 0; k <= c; ++k) h[t][k] -= q * h[c][k];
        }
    std::array<QuatElement, 4> out;
    for (std::size_t t = 0; t < 4; ++t)
        for (std::size_t k = 0; k < 4; ++k) {
            out[t].x[k] = Rat(h[t][k], d);
            out[t].x[k].canonicalize();
        }
    return out;
}

Order::Order(QuaternionAlgebra algebra, std::array<QuatElement, 4> basis)
    : algebra_(std::move(algebra)), basis_(std::move(basis)) {
    for (std::size_t s = 0; s < 4; ++s)
        for (std::size_t t = 0; t < 4; ++t) {
            Rat g = algebra_.trd(algebra_.mul(basis_[s], algebra_.conj(basis_[t])));
            gram_[s][t] = g.get_num();
        }
    Integer det = abs(det4(gram_));
    mpz_sqrt(disc_.get_mpz_t(), det.get_mpz_t());
    if (disc_ * disc_ != det) throw ArithmeticError("gram determinant is not a square: " + det.get_str());
}

std::array<Rat, 4> Order::coordinates(const QuatElement& x) const { return coordinates_in_basis(basis_, x); }

QuatElement Order::element(std::span<const std::int64_t, 4> coords) const {
    QuatElement r;
    for (std::size_t t = 0; t < 4; ++t)
        if (coords[t] != 0) r = r + Rat(Integer(static_cast<long>(coords[t]))) * basis_[t];
    return r;
}

bool Order::contains(const QuatElement& x) const {
    const auto c = coordinates(x);
    return std::all_of(c.begin(), c.end(), is_integral_rat);
}

std::array<std::array<std::int64_t, 4>, 4> Order::norm_form() const {
    std::array<std::array<std::int64_t, 4>, 4> q{};
    auto to64 = [](const Integer& z) {
        if (!z.fits_slong_p()) throw UnsupportedError("norm form coefficient exceeds 64 bits");
        return static_cast<std::int64_t>(z.get_si());
    };
    for (std::size_t s = 0; s < 4; ++s) {
        q[s][s] = to64(algebra_.nrd(basis_[s]).get_num());
        for (std::size_t t = s + 1; t < 4; ++t) q[s][t] = to64(gram_[s][t]);
    }
    return q;
}

Order verify_order(const QuaternionAlgebra& D, std::span<const QuatElement> basis) {
    if (basis.size() != 4) throw ArithmeticError("an order basis needs exactly 4 elements");
    for (const auto& e : basis) {
        const Rat t = D.trd(e), n = D.nrd(e);
        if (!is_integral_rat(t)) throw ArithmeticError("not integral: trd(" + algebraic(e) + ") = " + t.get_str());
        if (!is_integral_rat(n)) throw ArithmeticError("not integral: nrd(" + algebraic(e) + ") = " + n.get_str());
    }
    const auto hb = hermite_basis(basis);
    const auto one = coordinates_in_basis(hb, QuatElement::scalar(1));
    if (!std::all_of(one.begin(), one.end(), is_integral_rat)) throw ArithmeticError("1 is not in the lattice");
    for (const auto& x : hb)
        for (const auto& y : hb) {
            const auto z = D.mul(x, y);
            const auto c = coordinates_in_basis(hb, z);
            if (!std::all_of(c.begin(), c.end(), is_integral_rat))
                throw ArithmeticError("not closed: " + algebraic(x) + " * " + algebraic(y) + " = " + algebraic(z) +
                                      " is not in the lattice");
        }
    return Order(D, hb);
}

Order standard_order(const QuaternionAlgebra& D) {
    const std::array<QuatElement, 4> b{QuatElement::basis(0), QuatElement::basis(1), QuatElement::basis(2),
                                       QuatElement::basis(3)};
    return verify_order(D, b);
}

Integer lattice_index(const Order& big, const Order& small) {
    std::array<std::array<Integer, 4>, 4> m;
    for (std::size_t t = 0; t < 4; ++t) {
        const auto c = big.coordinates(small.basis()[t]);
        for (std::size_t k = 0; k < 4; ++k) {
            if (!is_integral_rat(c[k])) throw ArithmeticError("lattice_index: lattice is not contained in the order");
            m[t][k] = c[k].get_num();
        }
    }
    return abs(det4(m));
}

Order maximalize(const Order& order) {
    const QuaternionAlgebra& D = order.algebra();
    const Integer target = D.ramification().reduced_discriminant;
    Order current = order;
    while (current.reduced_discriminant() != target) {
        std::int64_t p = 0;
        for (auto q : prime_divisors(current.reduced_discriminant()))
            if (valuation(current.reduced_discriminant(), q) > (mpz_divisible_ui_p(target.get_mpz_t(), static_cast<unsigned long>(q)) ? 1 : 0)) {
                p = q;
                break;
            }
        if (p == 0) throw ArithmeticError("discriminant " + current.reduced_discriminant().get_str() + " is not reducible");
        if (p > kMaxMaximalizePrime)
            throw UnsupportedError("maximalize: prime " + std::to_string(p) + " exceeds the supported bound " +
                                   std::to_string(kMaxMaximalizePrime));
        const auto basis = current.basis();
        std::optional<Order> next;
        // v in (Z/p)^4 up to scalars: first nonzero coordinate equal to 1, lexicographic
        std::array<std::int64_t, 4> v{};
        for (std::int64_t idx = 1; idx < ipow(p, 4) && !next; ++idx) {
            std::int64_t r = idx;
            for (std::size_t k = 4; k-- > 0;) {
                v[k] = r % p;
                r /= p;
            }
            std::size_t lead = 0;
            while (v[lead] == 0) ++lead;
            if (v[lead] != 1) continue;
            QuatElement x;
            for (std::size_t t = 0; t < 4; ++t)
                if (v[t] != 0) x = x + Rat(Integer(static_cast<long>(v[t])), Integer(static_cast<long>(p))) * basis[t];
            if (!is_integral_rat(D.trd(x)) || !is_integral_rat(D.nrd(x))) continue;
            std::vector<QuatElement> gens(basis.begin(), basis.end());
            gens.push_back(x);
            auto closed = ring_closure(D, gens);
            if (!closed) continue;
            try {
                next = verify_order(D, *closed);
            } catch (const ArithmeticError&) {
                continue;
            }
        }
        if (!next) throw ArithmeticError("maximalize: no enlargement found at " + std::to_string(p));
        current = *next;
    }
    return current;
}

}  // namespace isospec
