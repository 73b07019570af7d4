#include <doctest.h>

#include <random>

#include "isospec/orders.hpp"

using namespace isospec;

namespace {

QuatElement q(const Rat& x0, const Rat& x1, const Rat& x2, const Rat& x3) { return {{x0, x1, x2, x3}}; }

// Integer determinant by cofactor expansion; independent of the library's elimination.
Integer det_cofactor(const std::vector<std::vector<Integer>>& m) {
    const std::size_t n = m.size();
    if (n == 1) return m[0][0];
    Integer out = 0;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::vector<Integer>> minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<Integer> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != c) row.push_back(m[r][k]);
            minor.push_back(row);
        }
        const Integer term = m[0][c] * det_cofactor(minor);
        out += (c % 2 == 0) ? term : Integer(-term);
    }
    return out;
}

Integer gram_det(const Order& o) {
    std::vector<std::vector<Integer>> g(4, std::vector<Integer>(4));
    for (std::size_t s = 0; s < 4; ++s)
        for (std::size_t t = 0; t < 4; ++t) {
            const auto& D = o.algebra();
            g[s][t] = D.trd(D.mul(o.basis()[s], D.conj(o.basis()[t]))).get_num();
        }
    return abs(det_cofactor(g));
}

}  // namespace

TEST_CASE("verify_order examples") {
    const QuaternionAlgebra D(Rat(-1), Rat(3));
    const auto O = standard_order(D);
    CHECK(O.reduced_discriminant() == 12);
    CHECK(gram_det(O) == 144);

    const std::array<QuatElement, 4> half_i{q(1, 0, 0, 0), q(0, Rat(1, 2), 0, 0), q(0, 0, 1, 0), q(0, 0, 0, 1)};
    CHECK_THROWS_WITH_AS(verify_order(D, half_i), "not integral: nrd(i/2) = 1/4", ArithmeticError);

    const std::array<QuatElement, 4> hurwitz_like{q(1, 0, 0, 0), q(0, 1, 0, 0), q(0, 0, 1, 0),
                                                  q(Rat(1, 2), Rat(1, 2), Rat(1, 2), Rat(1, 2))};
    const auto O6 = verify_order(D, hurwitz_like);
    CHECK(O6.reduced_discriminant() == 6);
    CHECK(gram_det(O6) == 36);
    // i * w = w - 1 - j lies in the lattice
    CHECK(O6.contains(D.mul(hurwitz_like[1], hurwitz_like[3])));
    CHECK(D.mul(hurwitz_like[1], hurwitz_like[3]) == hurwitz_like[3] - q(1, 0, 0, 0) - q(0, 0, 1, 0));
}

TEST_CASE("verify_order failure modes") {
    const QuaternionAlgebra D(Rat(-1), Rat(3));
    const std::array<QuatElement, 4> no_one{q(2, 0, 0, 0), q(0, 1, 0, 0), q(0, 0, 1, 0), q(0, 0, 0, 1)};
    CHECK_THROWS_WITH_AS(verify_order(D, no_one), "1 is not in the lattice", ArithmeticError);
    const std::array<QuatElement, 4> open{q(1, 0, 0, 0), q(0, 2, 0, 0), q(0, 0, 1, 0), q(0, 0, 0, 1)};
    CHECK_THROWS_WITH_AS(verify_order(D, open), doctest::Contains("not closed"), ArithmeticError);
    const std::array<QuatElement, 4> degenerate{q(1, 0, 0, 0), q(0, 1, 0, 0), q(0, 2, 0, 0), q(0, 0, 0, 1)};
    CHECK_THROWS_AS(verify_order(D, degenerate), ArithmeticError);
}

TEST_CASE("Hermite form is canonical") {
    const QuaternionAlgebra D(Rat(-1), Rat(3));
    const std::array<QuatElement, 4> a{q(1, 0, 0, 0), q(0, 1, 0, 0), q(0, 0, 1, 0),
                                       q(Rat(1, 2), Rat(1, 2), Rat(1, 2), Rat(1, 2))};
    const std::array<QuatElement, 4> b{q(Rat(1, 2), Rat(1, 2), Rat(1, 2), Rat(1, 2)), q(1, 1, 0, 0), q(0, 0, 1, 0),
                                       q(-1, 0, 0, 0)};
    CHECK(verify_order(D, a) == verify_order(D, b));
    CHECK(verify_order(D, a).basis()[0] == q(1, 0, 0, 0));
}

TEST_CASE("maximalize examples") {
    const QuaternionAlgebra D(Rat(-1), Rat(3));
    const auto O = standard_order(D);
    const auto M = maximalize(O);
    CHECK(M.reduced_discriminant() == 6);
    CHECK(lattice_index(M, O) == 2);
    for (const auto& e : O.basis()) CHECK(M.contains(e));
    CHECK(maximalize(M) == M);

    const auto S = maximalize(standard_order(QuaternionAlgebra(Rat(1), Rat(1))));
    CHECK(S.reduced_discriminant() == 1);
}

TEST_CASE("maximalize over small algebras") {
    int tested = 0;
    for (long a = -30; a <= 30; a += 7)
        for (long b = -29; b <= 30; b += 11) {
            if (a == 0 || b == 0) continue;
            const QuaternionAlgebra D{Rat(a), Rat(b)};
            const auto O = standard_order(D);
            bool big_prime = false;
            for (auto p : prime_divisors(O.reduced_discriminant()))
                if (p > kMaxMaximalizePrime) big_prime = true;
            if (big_prime) {
                CHECK_THROWS_AS(maximalize(O), UnsupportedError);
                continue;
            }
            CAPTURE(a);
            CAPTURE(b);
            const auto M = maximalize(O);
            CHECK(M.reduced_discriminant() == D.ramification().reduced_discriminant);
            CHECK(gram_det(M) == M.reduced_discriminant() * M.reduced_discriminant());
            const Integer idx = lattice_index(M, O);
            CHECK(idx * M.reduced_discriminant() == O.reduced_discriminant());
            CHECK(maximalize(M) == M);
            ++tested;
        }
    CHECK(tested > 30);
}
